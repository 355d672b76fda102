use std::fmt;

use rug::{Integer, Rational};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::Scalar;

/// Square integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    data: Vec<Integer>,
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix {
            n,
            data: vec![Integer::new(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Integer::from(1);
        }
        m
    }

    /// `I + E_{row,col}`.
    pub fn elementary(n: usize, row: usize, col: usize) -> Self {
        let mut m = Self::identity(n);
        m.data[row * n + col] += 1;
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        IntMatrix {
            n,
            data: rows.iter().flatten().map(|&v| Integer::from(v)).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Integer {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Integer) {
        self.data[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.data[j * self.n + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.cmp0() == std::cmp::Ordering::Equal {
                    continue;
                }
                for j in 0..n {
                    let prod = Integer::from(a * other.get(k, j));
                    out.data[i * n + j] += prod;
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> IntMatrix {
        let mut acc = Self::identity(self.n);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn mul_ints(&self, v: &[Integer]) -> Vec<Integer> {
        (0..self.n)
            .map(|i| {
                let mut s = Integer::new();
                for (j, x) in v.iter().enumerate() {
                    s += Integer::from(self.get(i, j) * x);
                }
                s
            })
            .collect()
    }

    pub fn mul_scalars(&self, v: &[Scalar]) -> Vec<Scalar> {
        (0..self.n)
            .map(|i| {
                let mut s = Scalar::zero();
                for (j, x) in v.iter().enumerate() {
                    let c = self.get(i, j);
                    if c.cmp0() != std::cmp::Ordering::Equal {
                        s = &s + &(&Scalar::rational(Rational::from(c)) * x);
                    }
                }
                s
            })
            .collect()
    }

    /// Row sums, i.e. the product with `(1, ..., 1)`.
    pub fn row_sums(&self) -> Vec<Integer> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().sum())
            .collect()
    }

    pub fn is_positive(&self) -> bool {
        self.data
            .iter()
            .all(|v| v.cmp0() == std::cmp::Ordering::Greater)
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> Integer {
        let n = self.n;
        let mut a = self.data.clone();
        let mut sign = 1;
        let mut prev = Integer::from(1);
        for k in 0..n {
            if a[k * n + k] == 0 {
                match (k + 1..n).find(|&i| a[i * n + k] != 0) {
                    Some(i) => {
                        for j in 0..n {
                            a.swap(k * n + j, i * n + j);
                        }
                        sign = -sign;
                    }
                    None => return Integer::new(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = Integer::from(&a[i * n + j] * &a[k * n + k])
                        - Integer::from(&a[i * n + k] * &a[k * n + j]);
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        prev * sign
    }

    /// Smallest `k <= (n-1)^2 + 1` with a strictly positive `k`-th power.
    pub fn primitivity_exponent(&self) -> Option<u32> {
        let bound = ((self.n - 1) * (self.n - 1) + 1) as u32;
        // only the zero pattern matters
        let pattern = IntMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .map(|v| Integer::from((v.cmp0() == std::cmp::Ordering::Greater) as i32))
                .collect(),
        };
        let mut acc = pattern.clone();
        for k in 1..=bound {
            if acc.is_positive() {
                return Some(k);
            }
            acc = acc.mul(&pattern);
            for v in acc.data.iter_mut() {
                if *v > 1 {
                    *v = Integer::from(1);
                }
            }
        }
        None
    }

    /// Inverse of a unimodular matrix over the rationals.
    pub fn inverse_rational(&self) -> Option<Vec<Vec<Rational>>> {
        let n = self.n;
        let mut a: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                let mut row: Vec<Rational> =
                    (0..n).map(|j| Rational::from(self.get(i, j))).collect();
                row.extend((0..n).map(|j| Rational::from((i == j) as i32)));
                row
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&i| a[i][col].cmp0() != std::cmp::Ordering::Equal)?;
            a.swap(col, piv);
            let p = a[col][col].clone();
            for v in a[col].iter_mut() {
                *v /= &p;
            }
            for i in 0..n {
                if i != col && a[i][col].cmp0() != std::cmp::Ordering::Equal {
                    let f = a[i][col].clone();
                    for j in 0..2 * n {
                        let delta = Rational::from(&f * &a[col][j]);
                        a[i][j] -= delta;
                    }
                }
            }
        }
        Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
    }

    pub fn to_rows(&self) -> Vec<Vec<Integer>> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }
}

fn int_json(v: &Integer) -> serde_json::Value {
    match v.to_i64() {
        Some(x) => serde_json::Value::from(x),
        None => serde_json::Value::from(v.to_string()),
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.n))?;
        for row in self.to_rows() {
            let row: Vec<serde_json::Value> = row.iter().map(int_json).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// Integers as JSON numbers when they fit, strings otherwise.
pub fn ints_json(v: &[Integer]) -> serde_json::Value {
    serde_json::Value::Array(v.iter().map(int_json).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse() {
        let m = IntMatrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 0], vec![1, 2, 1]]);
        assert_eq!(m.det(), 1);
        let inv = m.inverse_rational().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = Rational::new();
                for k in 0..3 {
                    s += Rational::from(m.get(i, k)) * &inv[k][j];
                }
                assert_eq!(s, Rational::from((i == j) as i32));
            }
        }
        assert_eq!(IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).det(), -1);
    }

    #[test]
    fn primitivity() {
        let b = IntMatrix::from_rows(&[vec![1, 1], vec![1, 2]]);
        assert_eq!(b.primitivity_exponent(), Some(1));
        let u = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]);
        assert_eq!(u.primitivity_exponent(), None);
        let c = IntMatrix::from_rows(&[vec![0, 1], vec![1, 1]]);
        assert_eq!(c.primitivity_exponent(), Some(2));
    }
}
