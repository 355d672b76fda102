//! Ergodic sums `F_j = f^{(j)} + g^{(j)}` restricted to one continuity
//! interval at a time.
//!
//! Each interval `[a, b)` of the level-`j` partition is a branch: `T^k` is a
//! translation on it for `k < j`, so every logarithmic term of `F_j` is a
//! function of the offset from one of the two ends. Offsets are measured from
//! the nearer end so that distances to a singular end keep full relative
//! precision.

use rayon::prelude::*;

use super::function::RoofFunction;
use super::real::{LogProduct, Real};
use crate::partitions::{global_points, OrbitTable, PointId};
use crate::{Result, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Point of a branch at distance `u` from the given end.
#[derive(Clone, Debug)]
pub struct Pos<R> {
    pub side: Side,
    pub u: R,
}

#[derive(Clone, Debug)]
struct Term<R> {
    /// Distance to the singularity at the left end of the branch.
    left: R,
    /// Same at the right end.
    right: R,
    /// `{x - beta}` term, so the distance grows to the right.
    plus: bool,
}

#[derive(Clone, Debug)]
struct Group<R> {
    c: R,
    terms: Vec<Term<R>>,
}

#[derive(Clone, Debug)]
struct Trig<R> {
    w: R,
    a: R,
    b: R,
    /// `sum cos(w y_k)` and `sum sin(w y_k)` over the orbit of the left end.
    cs: R,
    sn: R,
}

/// `F_j` on one continuity interval.
#[derive(Clone, Debug)]
pub struct Branch<R> {
    pub j: usize,
    pub left: Scalar,
    pub left_id: PointId,
    pub right: Scalar,
    pub right_id: Option<PointId>,
    pub width: R,
    pub singular_left: bool,
    pub singular_right: bool,
    prec: u32,
    groups: Vec<Group<R>>,
    poly: Vec<R>,
    /// `sum y_k^l` for `l <= deg`.
    power_sums: Vec<R>,
    trig: Vec<Trig<R>>,
    /// `slope * sum y_k`, `slope * j`
    g2: (R, R),
    g3: R,
    constant: Option<R>,
    /// Include `g^{(j)}` in values and slopes.
    use_g: bool,
}

/// One monotone stretch of a branch between consecutive critical points.
#[derive(Clone, Debug)]
pub struct Piece<R> {
    pub side: Side,
    /// Parameter range `ua < ub` in the distance from `side`.
    pub ua: R,
    pub ub: R,
    /// Values at `ua` and `ub`; `+inf` at a singular end.
    pub fa: R,
    pub fb: R,
}

/// Critical structure of a branch.
#[derive(Clone, Debug)]
pub struct Shape<R> {
    pub pieces: Vec<Piece<R>>,
    /// Interior critical points as `(s, bracket width)`.
    pub critical: Vec<(f64, f64)>,
    pub min: R,
    pub min_s: f64,
    /// Exactly one interior minimum and no other critical point.
    pub unimodal: bool,
}

fn inf<R: Real>(prec: u32) -> R {
    R::from_f64(f64::INFINITY, prec)
}

impl<R: Real> Branch<R> {
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Distance from the left end.
    pub fn s_of(&self, p: &Pos<R>) -> R {
        match p.side {
            Side::Left => p.u.clone(),
            Side::Right => self.width.sub(&p.u),
        }
    }

    pub fn pos_at(&self, s: &R) -> Pos<R> {
        let half = self.width.mul(&R::from_f64(0.5, self.prec));
        if *s <= half {
            Pos {
                side: Side::Left,
                u: s.clone(),
            }
        } else {
            Pos {
                side: Side::Right,
                u: self.width.sub(s),
            }
        }
    }

    fn dist(&self, t: &Term<R>, p: &Pos<R>) -> R {
        match (p.side, t.plus) {
            (Side::Left, true) => t.left.add(&p.u),
            (Side::Left, false) => t.left.sub(&p.u),
            (Side::Right, true) => t.right.sub(&p.u),
            (Side::Right, false) => t.right.add(&p.u),
        }
    }

    /// `f^{(j)}` at `p`.
    pub fn f(&self, p: &Pos<R>) -> R {
        if let Some(h) = &self.constant {
            return h.mul(&R::from_f64(self.j as f64, self.prec));
        }
        let mut acc = R::zero(self.prec);
        for g in &self.groups {
            let mut lp = LogProduct::new(self.prec);
            for t in &g.terms {
                lp.push(&self.dist(t, p));
            }
            acc = acc.sub(&g.c.mul(&lp.finish()));
        }
        acc
    }

    /// Derivative of order 1..=3 of `f^{(j)}`.
    pub fn df(&self, p: &Pos<R>, order: u32) -> R {
        if self.constant.is_some() {
            return R::zero(self.prec);
        }
        let mut acc = R::zero(self.prec);
        for g in &self.groups {
            let mut part = R::zero(self.prec);
            for t in &g.terms {
                let d = self.dist(t, p);
                let v = match order {
                    1 => R::one(self.prec).div(&d),
                    2 => R::one(self.prec).div(&d.mul(&d)),
                    _ => R::from_f64(2.0, self.prec).div(&d.mul(&d).mul(&d)),
                };
                // plus terms: -1/d, 1/d^2, -2/d^3; minus terms flip odd orders
                if order == 2 || !t.plus {
                    part.add_assign(&v);
                } else {
                    part = part.sub(&v);
                }
            }
            acc.add_assign(&g.c.mul(&part));
        }
        acc
    }

    /// `g^{(j)}` and its derivative at distance `s` from the left end.
    pub fn g(&self, s: &R) -> (R, R) {
        let prec = self.prec;
        let mut v = self.g3.clone();
        let mut d = R::zero(prec);
        if !self.poly.is_empty() {
            // Q_m(s) = sum_k (y_k + s)^m by the binomial expansion
            let deg = self.poly.len() - 1;
            let mut q = Vec::with_capacity(deg + 1);
            for m in 0..=deg {
                let mut acc = R::zero(prec);
                let mut binom = 1.0f64;
                let mut spow = R::one(prec);
                // sum_l C(m, l) s^(m-l) P_l, l from m down to 0
                for l in (0..=m).rev() {
                    acc.add_assign(&self.power_sums[l].mul(&spow).mul(&R::from_f64(binom, prec)));
                    spow = spow.mul(s);
                    binom = binom * l as f64 / (m - l + 1) as f64;
                }
                q.push(acc);
            }
            for (m, a) in self.poly.iter().enumerate() {
                v.add_assign(&a.mul(&q[m]));
                if m > 0 {
                    d.add_assign(&a.mul(&q[m - 1]).mul(&R::from_f64(m as f64, prec)));
                }
            }
        }
        for t in &self.trig {
            let ws = t.w.mul(s);
            let (c, sn) = (ws.cos(), ws.sin());
            // sum cos(w(y+s)) = C cos ws - S sin ws, sum sin(w(y+s)) = S cos ws + C sin ws
            let sc = t.cs.mul(&c).sub(&t.sn.mul(&sn));
            let ss = t.sn.mul(&c).add(&t.cs.mul(&sn));
            v.add_assign(&t.a.mul(&sc).add(&t.b.mul(&ss)));
            d.add_assign(&t.w.mul(&t.b.mul(&sc).sub(&t.a.mul(&ss))));
        }
        v.add_assign(&self.g2.0.add(&self.g2.1.mul(s)));
        d.add_assign(&self.g2.1);
        (v, d)
    }

    /// The same branch with `g^{(j)}` dropped from values and slopes.
    pub fn f_only(&self) -> Branch<R> {
        Branch {
            use_g: false,
            ..self.clone()
        }
    }

    pub fn has_g(&self) -> bool {
        self.use_g
            && (!self.poly.is_empty()
                || !self.trig.is_empty()
                || self.g2.0.to_f64() != 0.0
                || self.g2.1.to_f64() != 0.0
                || self.g3.to_f64() != 0.0)
    }

    /// `F_j = f^{(j)} + g^{(j)}` at `p`.
    pub fn value(&self, p: &Pos<R>) -> R {
        let mut v = self.f(p);
        if self.has_g() {
            v.add_assign(&self.g(&self.s_of(p)).0);
        }
        v
    }

    /// `F_j'` at `p`.
    pub fn slope(&self, p: &Pos<R>) -> R {
        let mut d = self.df(p, 1);
        if self.has_g() {
            d.add_assign(&self.g(&self.s_of(p)).1);
        }
        d
    }

    /// Value at an end, `+inf` if singular there.
    fn end_value(&self, side: Side) -> R {
        let singular = match side {
            Side::Left => self.singular_left,
            Side::Right => self.singular_right,
        };
        if singular {
            inf(self.prec)
        } else {
            self.value(&Pos {
                side,
                u: R::zero(self.prec),
            })
        }
    }

    /// Sign of `F_j'` at the end itself: `-1`/`+1` for singular ends.
    fn end_slope(&self, side: Side) -> R {
        let singular = match side {
            Side::Left => self.singular_left,
            Side::Right => self.singular_right,
        };
        match (singular, side) {
            (true, Side::Left) => inf::<R>(self.prec).neg(),
            (true, Side::Right) => inf(self.prec),
            _ => self.slope(&Pos {
                side,
                u: R::zero(self.prec),
            }),
        }
    }

    /// Locates all sign changes of `F_j'` on a sample grid, refines each
    /// by bisection, and splits the branch into monotone pieces.
    pub fn shape(&self) -> Shape<R> {
        let prec = self.prec;
        let w = self.width.to_f64();
        let grid = if self.trig.is_empty() { 16 } else { 64 };
        let mut samples: Vec<(f64, R)> = Vec::with_capacity(grid + 1);
        samples.push((0.0, self.end_slope(Side::Left)));
        for i in 1..grid {
            let s = R::from_f64(w * i as f64 / grid as f64, prec);
            samples.push((s.to_f64(), self.slope(&self.pos_at(&s))));
        }
        samples.push((w, self.end_slope(Side::Right)));
        let zero = R::zero(prec);
        let mut critical = Vec::new();
        for pair in samples.windows(2) {
            let (sa, da) = (&pair[0].0, &pair[0].1);
            let (sb, db) = (&pair[1].0, &pair[1].1);
            let neg_a = *da < zero;
            let neg_b = *db < zero;
            if neg_a == neg_b || *da == zero {
                continue;
            }
            let (mut lo, mut hi) = (*sa, *sb);
            let tol = (w * 2f64.powi(-45)).max(f64::MIN_POSITIVE);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let d = self.slope(&self.pos_at(&R::from_f64(mid, prec)));
                if (d < zero) == neg_a {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            critical.push((0.5 * (lo + hi), hi - lo));
        }
        let mut cuts: Vec<f64> = vec![0.0];
        cuts.extend(critical.iter().map(|c| c.0));
        cuts.push(w);
        let mut pieces = Vec::with_capacity(cuts.len() - 1);
        let last = cuts.len() - 2;
        for (i, pair) in cuts.windows(2).enumerate() {
            let (side, ua, ub) = if i == last && i > 0 {
                (Side::Right, R::zero(prec), R::from_f64(w - pair[0], prec))
            } else if i == last {
                // one piece spanning the branch: parametrise from the left
                (Side::Left, zero.clone(), self.width.clone())
            } else {
                (
                    Side::Left,
                    R::from_f64(pair[0], prec),
                    R::from_f64(pair[1], prec),
                )
            };
            let at = |u: &R, end: Option<Side>| match end {
                Some(e) => self.end_value(e),
                None => self.value(&Pos { side, u: u.clone() }),
            };
            let (ea, eb) = match side {
                Side::Left => (
                    if i == 0 { Some(Side::Left) } else { None },
                    if i == last { Some(Side::Right) } else { None },
                ),
                Side::Right => (Some(Side::Right), None),
            };
            let fa = at(&ua, ea);
            let fb = at(&ub, eb);
            pieces.push(Piece {
                side,
                ua,
                ub,
                fa,
                fb,
            });
        }
        // minimum over critical points and finite ends
        let mut min = inf::<R>(prec);
        let mut min_s = 0.0;
        for (k, p) in pieces.iter().enumerate() {
            let (sa, sb) = match p.side {
                Side::Left => (cuts[k], cuts[k + 1]),
                Side::Right => (cuts[k + 1], cuts[k]),
            };
            for (v, s) in [(&p.fa, sa), (&p.fb, sb)] {
                if *v < min {
                    min = v.clone();
                    min_s = s;
                }
            }
        }
        let unimodal = critical.len() == 1 && self.singular_left && self.singular_right
            || critical.len() == 1
                && samples.first().is_some_and(|d| d.1 < zero)
                && samples.last().is_some_and(|d| d.1 > zero);
        Shape {
            pieces,
            critical,
            min,
            min_s,
            unimodal,
        }
    }
}

impl<R: Real> Shape<R> {
    /// Lower bound for `min F_j` on the branch: the sampled minimum less the
    /// largest slope at a bracket end times the bracket width.
    pub fn min_lower_bound(&self, b: &Branch<R>) -> (f64, f64) {
        let mut slack = 0.0f64;
        for (s, width) in &self.critical {
            let lo = R::from_f64(s - width, b.prec);
            let hi = R::from_f64(s + width, b.prec);
            let d = b
                .slope(&b.pos_at(&lo))
                .to_f64()
                .abs()
                .max(b.slope(&b.pos_at(&hi)).to_f64().abs());
            slack = slack.max(d * 2.0 * width);
        }
        let m = self.min.to_f64();
        let rel = 2f64.powi(-(b.prec as i32) + 16) * m.abs().max(1.0);
        (m - slack - rel, b.left.to_f64() + self.min_s)
    }
}

impl<R: Real> Piece<R> {
    /// Parameter `u` where the monotone piece crosses `level`, bracketed to
    /// width `tol`. `None` if the level is not attained inside the piece.
    pub fn crossing(&self, b: &Branch<R>, level: &R, tol: f64) -> Option<(f64, f64)> {
        let increasing = self.fa < self.fb;
        let (lo_v, hi_v) = if increasing {
            (&self.fa, &self.fb)
        } else {
            (&self.fb, &self.fa)
        };
        if level <= lo_v || level >= hi_v {
            return None;
        }
        let (mut lo, mut hi) = (self.ua.to_f64(), self.ub.to_f64());
        let mut steps = 0;
        while hi - lo > tol && steps < 200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = b.value(&Pos {
                side: self.side,
                u: R::from_f64(mid, b.prec),
            });
            // along the parameter the value increases iff (increasing, Left)
            // or (decreasing, Right)... both reduce to comparing with fa
            let below = v < *level;
            let fa_below = self.fa < *level;
            if below == fa_below {
                lo = mid;
            } else {
                hi = mid;
            }
            steps += 1;
        }
        Some((lo, hi))
    }

    /// Converts a parameter to the distance from the left end.
    pub fn to_s(&self, b: &Branch<R>, u: f64) -> f64 {
        match self.side {
            Side::Left => u,
            Side::Right => b.width.to_f64() - u,
        }
    }
}

/// Orbit values in floating form with a flag for exact hits on the left
/// end of a base interval.
struct RealTable<R> {
    lo: i64,
    values: Vec<Vec<R>>,
    at_left: Vec<Vec<bool>>,
}

/// Builds branches of `F_j` for all `j` up to a fixed cap.
pub struct RoofEngine<R: Real> {
    roof: RoofFunction,
    prec: u32,
    j_cap: usize,
    table: OrbitTable,
    reals: RealTable<R>,
    beta: Vec<R>,
    /// Position sent last by the exchange; `beta_{end_pos+1}` has its left
    /// limit mapped to 1.
    end_pos: usize,
    c_plus: Vec<Option<R>>,
    c_minus: Vec<Option<R>>,
}

impl<R: Real> RoofEngine<R> {
    pub fn new(roof: &RoofFunction, prec: u32, j_cap: usize) -> Result<Self> {
        let t = roof.base();
        let r = t.r();
        let j_cap = j_cap.max(1);
        let table = OrbitTable::new(t, -(j_cap as i64) - 1, j_cap as i64 + 1)?;
        let beta_exact = t.discontinuities();
        let lo = -(j_cap as i64) - 1;
        let mut values = Vec::with_capacity(r);
        let mut at_left = Vec::with_capacity(r);
        for l in 0..r {
            let mut vrow = Vec::new();
            let mut arow = Vec::new();
            for n in lo..=(j_cap as i64 + 1) {
                let id = PointId { l, n };
                let x = table.point(id);
                let p = table.position(id);
                vrow.push(R::from_scalar(x, prec));
                arow.push(x == &beta_exact[p]);
            }
            values.push(vrow);
            at_left.push(arow);
        }
        let conv = |cs: &[Scalar]| {
            cs.iter()
                .map(|c| {
                    if c.is_zero() {
                        None
                    } else {
                        Some(R::from_scalar(c, prec))
                    }
                })
                .collect()
        };
        Ok(RoofEngine {
            beta: beta_exact.iter().map(|b| R::from_scalar(b, prec)).collect(),
            end_pos: t.pi0()[t.bottom()[r - 1]],
            c_plus: conv(roof.c_plus()),
            c_minus: conv(roof.c_minus()),
            roof: roof.clone(),
            prec,
            j_cap,
            table,
            reals: RealTable {
                lo,
                values,
                at_left,
            },
        })
    }

    pub fn roof(&self) -> &RoofFunction {
        &self.roof
    }

    pub fn j_cap(&self) -> usize {
        self.j_cap
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn table(&self) -> &OrbitTable {
        &self.table
    }

    /// Partition points of level `j` with their names.
    pub fn points(&self, j: usize) -> Vec<(Scalar, PointId)> {
        assert!(j <= self.j_cap, "level {j} above engine cap {}", self.j_cap);
        global_points(self.roof.base(), &self.table, j)
    }

    fn real(&self, id: PointId) -> (&R, bool) {
        let i = (id.n - self.reals.lo) as usize;
        (&self.reals.values[id.l][i], self.reals.at_left[id.l][i])
    }

    /// Branch of `F_j` on `[left, right)`, where `right = None` is the end
    /// of the domain.
    pub fn branch(
        &self,
        j: usize,
        left: &(Scalar, PointId),
        right: Option<&(Scalar, PointId)>,
    ) -> Branch<R> {
        let prec = self.prec;
        let t = self.roof.base();
        let r = t.r();
        let total = t.total();
        let right_x = right.map_or_else(|| total.clone(), |p| p.0.clone());
        let width = R::from_scalar(&(&right_x - &left.0), prec);
        let constant = self.roof.constant().map(|h| R::from_scalar(h, prec));
        let one = R::one(prec);
        let zero = R::zero(prec);
        // (c, terms) for each nonzero constant, in a fixed order
        let mut groups: Vec<Group<R>> = Vec::new();
        let mut slot: Vec<Option<usize>> = vec![None; 2 * r];
        for i in 0..r {
            if let Some(c) = &self.c_plus[i] {
                slot[2 * i] = Some(groups.len());
                groups.push(Group {
                    c: c.clone(),
                    terms: Vec::with_capacity(j),
                });
            }
            if let Some(c) = &self.c_minus[i] {
                slot[2 * i + 1] = Some(groups.len());
                groups.push(Group {
                    c: c.clone(),
                    terms: Vec::with_capacity(j),
                });
            }
        }
        let deg = self.roof.g().poly.len();
        let mut power_sums = vec![zero.clone(); deg];
        let two_pi = R::pi(prec).mul(&R::from_f64(2.0, prec));
        let mut trig: Vec<Trig<R>> = self
            .roof
            .g()
            .trig
            .iter()
            .map(|tt| Trig {
                w: two_pi.mul(&R::from_f64(tt.k as f64, prec)),
                a: R::from_scalar(&tt.cos, prec),
                b: R::from_scalar(&tt.sin, prec),
                cs: zero.clone(),
                sn: zero.clone(),
            })
            .collect();
        let mut sum_y = zero.clone();
        let mut g3 = zero.clone();
        let mut singular_left = false;
        let mut singular_right = false;
        for k in 0..j {
            let id = self.table.forward(left.1, k as i64);
            let m = self.table.position(id);
            let (y, at_left) = self.real(id);
            let y = y.clone();
            if constant.is_none() {
                for i in 0..r {
                    if let Some(g) = slot[2 * i] {
                        let d0 = if at_left && i == m {
                            zero.clone()
                        } else if i <= m {
                            y.sub(&self.beta[i])
                        } else {
                            y.sub(&self.beta[i]).add(&one)
                        };
                        if d0 == zero {
                            singular_left = true;
                        }
                        let right_d = d0.add(&width);
                        groups[g].terms.push(Term {
                            left: d0,
                            right: right_d,
                            plus: true,
                        });
                    }
                    if let Some(g) = slot[2 * i + 1] {
                        let d0 = if i >= m {
                            self.beta[i + 1].sub(&y)
                        } else {
                            self.beta[i + 1].sub(&y).add(&one)
                        };
                        let hit = i == m && self.right_singular(k, i, right.map(|p| p.1), r);
                        let right_d = if hit {
                            singular_right = true;
                            zero.clone()
                        } else {
                            d0.sub(&width)
                        };
                        groups[g].terms.push(Term {
                            left: d0,
                            right: right_d,
                            plus: false,
                        });
                    }
                }
            }
            let mut yp = one.clone();
            for ps in power_sums.iter_mut() {
                ps.add_assign(&yp);
                yp = yp.mul(&y);
            }
            for tt in trig.iter_mut() {
                let a = tt.w.mul(&y);
                tt.cs.add_assign(&a.cos());
                tt.sn.add_assign(&a.sin());
            }
            sum_y.add_assign(&y);
            g3.add_assign(&R::from_scalar(&self.roof.g().step(m), prec));
        }
        let slope = R::from_scalar(&self.roof.g().slope, prec);
        Branch {
            j,
            left: left.0.clone(),
            left_id: left.1,
            right: right_x,
            right_id: right.map(|p| p.1),
            width,
            singular_left,
            singular_right,
            prec,
            groups,
            poly: self
                .roof
                .g()
                .poly
                .iter()
                .map(|a| R::from_scalar(a, prec))
                .collect(),
            power_sums,
            trig,
            g2: (slope.mul(&sum_y), slope.mul(&R::from_f64(j as f64, prec))),
            g3,
            constant,
            use_g: true,
        }
    }

    /// The `k`-th iterate of the right end, approached from the left, is
    /// `beta_{i+1}`.
    fn right_singular(&self, k: usize, i: usize, right: Option<PointId>, r: usize) -> bool {
        let k = k as i64;
        match right {
            None => k == 0 && i == r - 1,
            Some(PointId { l, n }) => {
                (k == -n && i + 1 == l) || (l == self.end_pos + 1 && k == -n + 1 && i == r - 1)
            }
        }
    }

    /// All branches of level `j`, left to right.
    pub fn level(&self, j: usize) -> Vec<Branch<R>> {
        let pts = self.points(j);
        (0..pts.len())
            .into_par_iter()
            .map(|b| self.branch(j, &pts[b], pts.get(b + 1)))
            .collect()
    }

    /// `F_j` jumps or blows up at the named partition point.
    pub fn discontinuous_at(&self, id: PointId, j: usize) -> bool {
        if id == self.table.origin() {
            return true;
        }
        if id.n > 0 || (-id.n) as usize >= j {
            return false;
        }
        let m = (-id.n) as usize;
        if self.roof.singular_or_jump(id.l) {
            return true;
        }
        if m + 1 >= j {
            return false;
        }
        let t = self.roof.base();
        // right side goes on from T beta_l, left side from the left limit
        // there, which is 1 when beta_l follows the interval placed last
        if id.l != self.end_pos + 1 || self.table.to_zero() != id.l {
            return true;
        }
        if self.roof.discontinuous_at_origin() {
            return true;
        }
        if m + 2 >= j {
            return false;
        }
        // orbits of 0 and 1- merge iff T(0) equals T(1-)
        let r = t.r();
        let t1 = &t.discontinuities()[r] + t.shift(r - 1);
        let t0 = match t.evaluate(&Scalar::zero()) {
            Ok(v) => v,
            Err(_) => return true,
        };
        t0 != t1
    }
}

#[cfg(test)]
mod tests {
    use rug::Float;

    use super::*;
    use crate::roof::{make_roof, GSpec, Quantity};
    use crate::Iet;

    fn unit_golden() -> RoofFunction {
        let one = Scalar::one();
        make_roof(
            Iet::golden(),
            vec![one.clone(); 2],
            vec![one.clone(); 2],
            GSpec::zero(),
        )
        .unwrap()
    }

    #[test]
    fn branch_matches_direct_sum() {
        let roof = unit_golden();
        let eng = RoofEngine::<f64>::new(&roof, 53, 12).unwrap();
        for j in [1, 2, 5, 12] {
            for b in eng.level(j) {
                for frac in [0.01, 0.3, 0.5, 0.77, 0.999] {
                    let s = b.width * frac;
                    let x = b.left.to_f64() + s;
                    let mut direct = 0.0;
                    let mut d1 = 0.0;
                    let mut y = x;
                    for _ in 0..j {
                        direct += roof.eval_f64(y, Quantity::F);
                        d1 += roof.eval_f64(y, Quantity::D1);
                        y = (y + Scalar::golden().to_f64()).fract();
                    }
                    let p = b.pos_at(&s);
                    assert!(
                        (b.f(&p) - direct).abs() < 1e-9 * direct.abs().max(1.0),
                        "j={j}"
                    );
                    assert!((b.df(&p, 1) - d1).abs() < 1e-7 * d1.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn ends_are_singular() {
        let roof = unit_golden();
        let eng = RoofEngine::<Float>::new(&roof, 128, 20).unwrap();
        for j in [1, 3, 20] {
            for b in eng.level(j) {
                assert!(b.singular_left && b.singular_right, "j={j} at {}", b.left);
                let sh = b.shape();
                assert!(sh.unimodal);
                assert_eq!(sh.pieces.len(), 2);
            }
        }
    }

    #[test]
    fn circle_pattern_joins_branches() {
        let z = Scalar::zero();
        let one = Scalar::one();
        let roof = make_roof(
            Iet::golden(),
            vec![one.clone(), z.clone()],
            vec![z.clone(), one.clone()],
            GSpec::zero(),
        )
        .unwrap();
        let eng = RoofEngine::<f64>::new(&roof, 53, 6).unwrap();
        let b1 = PointId { l: 1, n: 0 };
        // beta_1 sends its left limit to 1- and itself to 0: jump only once
        // the next step is included
        assert!(!eng.discontinuous_at(b1, 1));
        assert!(eng.discontinuous_at(b1, 2));
        for b in eng.level(1) {
            assert!(b.singular_left != b.singular_right);
        }
    }

    #[test]
    fn g_parts_match_direct_sum() {
        let one = Scalar::one();
        let g = GSpec {
            poly: vec![Scalar::ratio(1, 2), Scalar::int(3), Scalar::int(-3)],
            trig: vec![crate::roof::TrigTerm {
                k: 2,
                cos: Scalar::ratio(1, 4),
                sin: Scalar::ratio(-1, 3),
            }],
            slope: Scalar::ratio(1, 5),
            steps: vec![Scalar::ratio(1, 10), Scalar::zero()],
        };
        let roof = make_roof(Iet::golden(), vec![one.clone(); 2], vec![one.clone(); 2], g).unwrap();
        let eng = RoofEngine::<f64>::new(&roof, 53, 7).unwrap();
        for b in eng.level(7) {
            let s = b.width * 0.37;
            let x = b.left.to_f64() + s;
            let (mut v, mut d, mut y) = (0.0, 0.0, x);
            for _ in 0..7 {
                v += roof.eval_f64(y, Quantity::G);
                d += roof.eval_f64(y, Quantity::D1FPlusG) - roof.eval_f64(y, Quantity::D1);
                y = (y + Scalar::golden().to_f64()).fract();
            }
            let (gv, gd) = b.g(&s);
            assert!((gv - v).abs() < 1e-10, "{gv} vs {v}");
            assert!((gd - d).abs() < 1e-8, "{gd} vs {d}");
        }
    }
}
