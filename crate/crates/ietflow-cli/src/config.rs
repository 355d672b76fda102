//! `key = value` run configurations.
//!
//! One entry per line, `#` starts a comment line, keys are unique. Values
//! are kept as written (trimmed) and interpreted by the command that reads
//! them, so emitting and parsing again gives back the same configuration.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use ietflow::roof::{make_roof, GSpec, RoofFunction, TrigTerm};
use ietflow::{Error, Iet, Result, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every key any command understands.
pub const KNOWN_KEYS: &[&str] = &[
    "command",
    "precision_bits",
    "seed",
    // exchange
    "iet",
    "alpha",
    "lambda",
    "pi0",
    "pi1",
    "r",
    // roof
    "c_plus",
    "c_minus",
    "g_poly",
    "g_trig",
    "g_slope",
    "g_steps",
    // command parameters
    "x",
    "n",
    "depth",
    "steps",
    "format",
    "loop",
    "p_max",
    "tol",
    "periods",
    "j_min",
    "j_max",
    "stride",
    "single",
    "probe",
    "samples",
    "eta",
    "c",
    "eps",
    "t0",
    "count",
    "span",
    "n_min",
    "n_max",
    "bins",
    "r_tail",
    "r_grid",
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunConfig {
    entries: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if cfg.entries.contains_key(k) {
                return Err(Error::Parse(format!(
                    "line {}: duplicate key '{k}'",
                    no + 1
                )));
            }
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Canonical text: sorted keys, one `key = value` per line.
    pub fn emit(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::Parse(format!("unknown key '{key}'")));
        }
        let value = value.trim();
        if value.is_empty() || value.contains('\n') {
            return Err(Error::Parse(format!("key '{key}' needs a one-line value")));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Entries of `other` override ours.
    pub fn merge(&mut self, other: &RunConfig) {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Invalid(format!("missing key '{key}'")))
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::Parse(format!("bad value for '{key}': '{v}'")))
            })
            .transpose()
    }

    pub fn parsed_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    pub fn scalar(&self, key: &str) -> Result<Option<Scalar>> {
        self.get(key).map(Scalar::from_str).transpose()
    }

    pub fn scalars(&self, key: &str) -> Result<Option<Vec<Scalar>>> {
        self.get(key)
            .map(|v| v.split(',').map(|s| s.trim().parse()).collect())
            .transpose()
    }

    pub fn floats(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Parse(format!("bad number in '{key}'")))
                    })
                    .collect()
            })
            .transpose()
    }

    fn line(&self, key: &str) -> Result<Option<Vec<usize>>> {
        self.get(key)
            .map(|v| {
                v.split_whitespace()
                    .map(|s| {
                        s.parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad entry in '{key}'")))
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn precision(&self) -> Result<u32> {
        self.parsed_or("precision_bits", 128)
    }

    pub fn seed(&self) -> Result<u64> {
        self.parsed_or("seed", 0)
    }

    /// 1-based one-line pair from `pi0`/`pi1`, defaulting to the exchange's.
    pub fn pair(&self) -> Result<(Vec<usize>, Vec<usize>)> {
        match (self.line("pi0")?, self.line("pi1")?) {
            (Some(p0), Some(p1)) => {
                let t = Iet::from_one_line(&p0, &p1, vec![Scalar::one(); p0.len()])?;
                Ok((t.pi0().to_vec(), t.pi1().to_vec()))
            }
            _ => {
                let t = self.iet()?;
                Ok((t.pi0().to_vec(), t.pi1().to_vec()))
            }
        }
    }

    /// The exchange described by the `iet` key and its companions.
    pub fn iet(&self) -> Result<Iet> {
        match self.get("iet").unwrap_or("golden") {
            "golden" => Ok(Iet::golden()),
            "rotation" => {
                let a = self
                    .scalar("alpha")?
                    .ok_or_else(|| Error::Invalid("rotation needs alpha".into()))?;
                Iet::rotation(&Scalar::one() - &a, a)
            }
            "symmetric" => Iet::symmetric(self.lengths()?),
            "explicit" => {
                let p0 = self
                    .line("pi0")?
                    .ok_or_else(|| Error::Invalid("explicit needs pi0".into()))?;
                let p1 = self
                    .line("pi1")?
                    .ok_or_else(|| Error::Invalid("explicit needs pi1".into()))?;
                Iet::from_one_line(&p0, &p1, self.lengths()?)
            }
            "random" => self.random_iet(),
            other => Err(Error::Parse(format!("unknown exchange kind '{other}'"))),
        }
    }

    fn lengths(&self) -> Result<Vec<Scalar>> {
        self.scalars("lambda")?
            .ok_or_else(|| Error::Invalid("missing key 'lambda'".into()))
    }

    /// Irreducible exchange with rational lengths drawn from `seed`.
    fn random_iet(&self) -> Result<Iet> {
        let r: usize = self.parsed_or("r", 4)?;
        if r < 2 {
            return Err(Error::Invalid("r must be at least 2".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed()?);
        loop {
            let pi0: Vec<usize> = (0..r).collect();
            let mut pi1 = pi0.clone();
            for i in (1..r).rev() {
                pi1.swap(i, rng.gen_range(0..=i));
            }
            if ietflow::iet_core::reducibility_witness(&pi0, &pi1).is_some() {
                continue;
            }
            let raw: Vec<i64> = (0..r).map(|_| rng.gen_range(1..1_000_000)).collect();
            let total: i64 = raw.iter().sum();
            let lambda = raw.iter().map(|&n| Scalar::ratio(n, total)).collect();
            return Iet::new(pi0, pi1, lambda);
        }
    }

    pub fn g_spec(&self) -> Result<GSpec> {
        let mut g = GSpec::zero();
        if let Some(p) = self.scalars("g_poly")? {
            g.poly = p;
        }
        if let Some(s) = self.scalar("g_slope")? {
            g.slope = s;
        }
        if let Some(s) = self.scalars("g_steps")? {
            g.steps = s;
        }
        if let Some(text) = self.get("g_trig") {
            // k cos sin; k cos sin; ...
            for term in text.split(';').map(str::trim).filter(|t| !t.is_empty()) {
                let parts: Vec<&str> = term.split_whitespace().collect();
                let [k, c, s] = parts.as_slice() else {
                    return Err(Error::Parse(format!("trig term '{term}' needs k cos sin")));
                };
                g.trig.push(TrigTerm {
                    k: k.parse()
                        .map_err(|_| Error::Parse(format!("bad frequency '{k}'")))?,
                    cos: c.parse()?,
                    sin: s.parse()?,
                });
            }
        }
        Ok(g)
    }

    /// Roof over [`RunConfig::iet`]; constants default to 1.
    pub fn roof(&self) -> Result<RoofFunction> {
        let base = self.iet()?;
        let r = base.r();
        let c_plus = self
            .scalars("c_plus")?
            .unwrap_or_else(|| vec![Scalar::one(); r]);
        let c_minus = self
            .scalars("c_minus")?
            .unwrap_or_else(|| vec![Scalar::one(); r]);
        make_roof(base, c_plus, c_minus, self.g_spec()?)
    }
}

/// A number, or a multiple of a reference written with a `min` suffix.
pub fn relative(value: &str, reference: f64) -> Result<f64> {
    let v = value.trim();
    let (num, scale) = match v.strip_suffix("min") {
        Some(head) => (head.trim(), reference),
        None => (v, 1.0),
    };
    let x: f64 = if num.is_empty() {
        1.0
    } else {
        num.parse()
            .map_err(|_| Error::Parse(format!("bad number '{value}'")))?
    };
    Ok(x * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "# golden base\niet = golden\nc_plus = 1, 1\n\nc_minus = 1,1\neps = 0.1min\n";
        let cfg = RunConfig::parse(text).unwrap();
        let again = RunConfig::parse(&cfg.emit()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(again.emit(), cfg.emit());
        assert_eq!(cfg.get("c_minus"), Some("1,1"));
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(RunConfig::parse("iet golden").is_err());
        assert!(RunConfig::parse("iet = golden\niet = golden").is_err());
        assert!(RunConfig::parse("colour = red").is_err());
        assert!(RunConfig::parse("iet =").is_err());
    }

    #[test]
    fn exchanges() {
        let cfg =
            RunConfig::parse("iet = explicit\npi0 = 1 2 3\npi1 = 3 2 1\nlambda = 1/2, 1/3, 1/6")
                .unwrap();
        let t = cfg.iet().unwrap();
        assert_eq!(t.r(), 3);
        assert_eq!(t.total(), &Scalar::one());
        let rot = RunConfig::parse("iet = rotation\nalpha = -1 + sqrt(2)")
            .unwrap()
            .iet()
            .unwrap();
        assert_eq!(
            rot.evaluate(&Scalar::zero()).unwrap(),
            &Scalar::sqrt_int(2) - &Scalar::one()
        );
        let a = RunConfig::parse("iet = random\nr = 5\nseed = 3")
            .unwrap()
            .iet()
            .unwrap();
        let b = RunConfig::parse("iet = random\nr = 5\nseed = 3")
            .unwrap()
            .iet()
            .unwrap();
        assert_eq!(a, b);
        assert!(RunConfig::parse("iet = torus").unwrap().iet().is_err());
    }

    #[test]
    fn roofs_and_relative_values() {
        let roof = RunConfig::parse("g_trig = 1 1/10 0; 2 0 1/20")
            .unwrap()
            .roof()
            .unwrap();
        assert_eq!(roof.g().trig.len(), 2);
        assert_eq!(relative("0.1min", 3.0).unwrap(), 0.30000000000000004);
        assert_eq!(relative("min", 3.0).unwrap(), 3.0);
        assert_eq!(relative("2.5", 3.0).unwrap(), 2.5);
        assert!(relative("abc", 1.0).is_err());
    }
}
