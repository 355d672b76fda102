//! One function per subcommand, each reading only the run configuration.

use serde_json::{json, Value};

use ietflow::partitions::{balance_scan, balance_scan_with, rows_to_csv, ScanOptions, SingleScan};
use ietflow::rauzy::{
    balance_check, build_periodic_iet, detect_periodic, induce, rauzy_class, StepType,
};
use ietflow::rigidity_probe::{default_t0, rigidity_sweep};
use ietflow::roof::{derivative_bound_probe, g_oscillation_probe, monotonicity_probe};
use ietflow::special_flow::{
    birkhoff_distribution, rotation_rigidity_sets, tightness_report, BinSpec,
};
use ietflow::{Error, Result, Scalar};

use crate::config::{relative, RunConfig};

/// The subcommands, by name.
pub const COMMANDS: &[&str] = &[
    "iet-eval",
    "iet-idoc",
    "rauzy-induce",
    "rauzy-class",
    "rauzy-periodic",
    "partition-balance",
    "roof-probe",
    "rigidity-sweep",
    "flow-distribution",
];

/// Report text and its file kind.
#[derive(Debug)]
pub struct Report {
    pub body: String,
    pub kind: &'static str,
    /// Headline numbers, copied into the manifest.
    pub summary: Option<Value>,
}

impl Report {
    fn json(v: Value) -> Self {
        Report {
            body: format!(
                "{}\n",
                serde_json::to_string_pretty(&v).expect("serializable")
            ),
            kind: "json",
            summary: None,
        }
    }

    fn csv(body: String) -> Self {
        Report {
            body,
            kind: "csv",
            summary: None,
        }
    }

    fn dot(body: String) -> Self {
        Report {
            body,
            kind: "dot",
            summary: None,
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    match cfg.require("command")? {
        "iet-eval" => iet_eval(cfg),
        "iet-idoc" => iet_idoc(cfg),
        "rauzy-induce" => rauzy_induce(cfg),
        "rauzy-class" => rauzy_class_cmd(cfg),
        "rauzy-periodic" => rauzy_periodic(cfg),
        "partition-balance" => partition_balance(cfg),
        "roof-probe" => roof_probe(cfg),
        "rigidity-sweep" => sweep(cfg),
        "flow-distribution" => flow_distribution(cfg),
        other => Err(Error::Invalid(format!("unknown command '{other}'"))),
    }
}

fn iet_eval(cfg: &RunConfig) -> Result<Report> {
    let t = cfg.iet()?;
    let n: i64 = cfg.parsed_or("n", 1)?;
    let xs = cfg
        .scalars("x")?
        .ok_or_else(|| Error::Invalid("missing key 'x'".into()))?;
    let rows = xs
        .iter()
        .map(|x| Ok(json!({ "x": x, "image": t.iterate(x, n)? })))
        .collect::<Result<Vec<_>>>()?;
    Ok(Report::json(
        json!({ "iet": t.to_string(), "n": n, "points": rows }),
    ))
}

fn iet_idoc(cfg: &RunConfig) -> Result<Report> {
    let t = cfg.iet()?;
    let cert = t.idoc_probe(cfg.parsed_or("depth", 200)?);
    Ok(Report::json(json!({
        "iet": t.to_string(),
        "passed": cert.passed(),
        "label": cert.label(),
        "certificate": to_value(&cert),
    })))
}

fn rauzy_induce(cfg: &RunConfig) -> Result<Report> {
    let trace = induce(&cfg.iet()?, cfg.parsed_or("steps", 10)?)?;
    let ident = trace.verify_identities();
    let mut v = trace.to_json();
    v["identities"] = to_value(&ident);
    v["identities_ok"] = json!(ident.ok());
    Ok(Report::json(v))
}

fn rauzy_class_cmd(cfg: &RunConfig) -> Result<Report> {
    let (p0, p1) = cfg.pair()?;
    let class = rauzy_class(&p0, &p1)?;
    if cfg.get("format") == Some("dot") {
        return Ok(Report::dot(class.to_dot()));
    }
    let one = |v: &[usize]| v.iter().map(|x| x + 1).collect::<Vec<_>>();
    let pairs: Vec<Value> = class
        .pairs
        .iter()
        .map(|(a, b)| json!([one(a), one(b)]))
        .collect();
    let edges: Vec<Value> = class
        .edges
        .iter()
        .map(|(a, b, t)| json!([a, b, t.code()]))
        .collect();
    Ok(Report::json(
        json!({ "size": class.len(), "pairs": pairs, "edges": edges }),
    ))
}

fn parse_loop(text: &str) -> Result<Vec<StepType>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| match s {
            "T" | "t" | "0" => Ok(StepType::Top),
            "B" | "b" | "1" => Ok(StepType::Bottom),
            other => Err(Error::Parse(format!("step '{other}' is not T or B"))),
        })
        .collect()
}

fn rauzy_periodic(cfg: &RunConfig) -> Result<Report> {
    let prec = cfg.precision()?;
    let (t, rep) = match cfg.get("loop") {
        Some(text) => build_periodic_iet(&parse_loop(text)?, &cfg.pair()?, prec)?,
        None => {
            let t = cfg.iet()?;
            let tol = cfg.scalar("tol")?.unwrap_or_else(|| Scalar::ratio(1, 1000));
            let rep = detect_periodic(&t, cfg.parsed_or("p_max", 50)?, &tol)?;
            (t, rep)
        }
    };
    let periods: usize = cfg.parsed_or("periods", 10)?;
    let trace = induce(&t, rep.period * periods)?;
    let balance = balance_check(&trace, &rep.matrix, rep.period)?;
    Ok(Report::json(json!({
        "iet": t.to_string(),
        "report": to_value(&rep),
        "balance": to_value(&balance),
        "balanced": balance.ok(),
    })))
}

fn partition_balance(cfg: &RunConfig) -> Result<Report> {
    let t = cfg.iet()?;
    let single = match cfg.get("single").unwrap_or("skip") {
        "skip" => SingleScan::Skip,
        "spot" => SingleScan::Spot,
        "full" => SingleScan::Full,
        other => {
            return Err(Error::Parse(format!(
                "single = {other}: expected skip, spot or full"
            )))
        }
    };
    let opts = ScanOptions {
        j_max: cfg.parsed_or("j_max", 1000)?,
        stride: cfg.parsed("stride")?,
        single,
    };
    let rep = balance_scan_with(&t, &opts)?;
    if cfg.get("format") == Some("csv") {
        return Ok(Report::csv(rows_to_csv(&rep.rows)));
    }
    Ok(Report::json(to_value(&rep)))
}

fn balance_constant(cfg: &RunConfig, roof: &ietflow::roof::RoofFunction) -> Result<f64> {
    match cfg.get("c") {
        None | Some("auto") => Ok(balance_scan(roof.base(), 2000, None)?.c),
        Some(v) => v
            .parse()
            .map_err(|_| Error::Parse(format!("bad value for 'c': '{v}'"))),
    }
}

fn roof_probe(cfg: &RunConfig) -> Result<Report> {
    let roof = cfg.roof()?;
    let probe = cfg.get("probe").unwrap_or("monotonicity");
    let j_min: usize = cfg.parsed_or("j_min", 2)?;
    let v = match probe {
        "monotonicity" => {
            let j_max: usize = cfg.parsed_or("j_max", 20)?;
            let samples = cfg.parsed_or("samples", 64)?;
            let prec = cfg.precision()?;
            let reps = (j_min..=j_max)
                .map(|j| monotonicity_probe(&roof, j, samples, prec))
                .collect::<Result<Vec<_>>>()?;
            json!({ "passed": reps.iter().all(|r| r.passed()), "levels": to_value(&reps) })
        }
        "derivative" => {
            let c = balance_constant(cfg, &roof)?;
            let j0 = (6.0 * c * c).ceil() as usize;
            let j_lo: usize = cfg.parsed_or("j_min", j0)?;
            let j_max: usize = cfg.parsed_or("j_max", 200)?;
            let rep = derivative_bound_probe(
                &roof,
                cfg.parsed_or("eta", 0.5)?,
                j_lo..=j_max,
                &Scalar::float_f64(c, 53),
            )?;
            json!({ "passed": rep.passed(), "report": to_value(&rep) })
        }
        "oscillation" => {
            let j_max: usize = cfg.parsed_or("j_max", 200)?;
            let rep = g_oscillation_probe(
                roof.base(),
                roof.g(),
                j_min.max(1)..=j_max,
                cfg.parsed_or("eps", 0.1)?,
            )?;
            json!({ "settled": rep.settled, "report": to_value(&rep) })
        }
        other => {
            return Err(Error::Parse(format!(
                "probe = {other}: expected monotonicity, derivative or oscillation"
            )))
        }
    };
    Ok(Report::json(v))
}

fn sweep(cfg: &RunConfig) -> Result<Report> {
    let roof = cfg.roof()?;
    let m = roof.min_value();
    let eps = relative(cfg.get("eps").unwrap_or("0.1min"), m)?;
    let t0 = match cfg.get("t0").unwrap_or("auto") {
        "auto" => default_t0(&roof, balance_constant(cfg, &roof)?, eps)?,
        v => relative(v, m)?,
    };
    let count: usize = cfg.parsed_or("count", 50)?;
    if count < 2 {
        return Err(Error::Invalid("count must be at least 2".into()));
    }
    let span = relative(cfg.get("span").unwrap_or("100min"), m)?;
    let grid: Vec<f64> = (0..count)
        .map(|k| t0 + span * k as f64 / (count - 1) as f64)
        .collect();
    let rep = rigidity_sweep(&roof, &grid, eps)?;
    if cfg.get("format") == Some("json") {
        return Ok(Report::json(to_value(&rep)));
    }
    let mut out = Report::csv(rep.to_csv());
    out.summary = Some(json!({
        "rows": rep.rows.len(),
        "sup_measure": rep.bound,
        "first_half_sup": rep.first_half_sup,
        "last_half_sup": rep.last_half_sup,
    }));
    Ok(out)
}

fn parse_bins(text: &str) -> Result<BinSpec> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let bad = || Error::Parse(format!("bins = {text}: expected lo:hi:count"));
    let [lo, hi, count] = parts.as_slice() else {
        return Err(bad());
    };
    Ok(BinSpec {
        lo: lo.parse().map_err(|_| bad())?,
        hi: hi.parse().map_err(|_| bad())?,
        count: count.parse().map_err(|_| bad())?,
    })
}

fn flow_distribution(cfg: &RunConfig) -> Result<Report> {
    let roof = cfg.roof()?;
    let prec = cfg.precision()?;
    let alpha = match cfg.scalar("alpha")? {
        Some(a) => a,
        None => roof.base().evaluate(&Scalar::zero())?,
    };
    let n_min: usize = cfg.parsed_or("n_min", 1)?;
    let n_max: usize = cfg.parsed_or("n_max", 10)?;
    if n_min == 0 || n_max < n_min {
        return Err(Error::Invalid(format!("bad range n = {n_min}..{n_max}")));
    }
    let bins = parse_bins(cfg.get("bins").unwrap_or("-50:50:200"))?;
    let r_tail: f64 = cfg.parsed_or("r_tail", 50.0)?;
    let specs = rotation_rigidity_sets(&alpha, n_min..=n_max, Some(&roof), prec)?;
    let reps = specs
        .iter()
        .map(|s| birkhoff_distribution(&roof, s, bins, r_tail))
        .collect::<Result<Vec<_>>>()?;
    if cfg.get("format") == Some("csv") {
        let mut out = String::from("n,q,bin_lo,bin_hi,mass\n");
        for rep in &reps {
            for line in rep.to_csv().lines().skip(1) {
                out.push_str(&format!("{},{},{line}\n", rep.n, rep.q));
            }
        }
        return Ok(Report::csv(out));
    }
    let grid = cfg
        .floats("r_grid")?
        .unwrap_or_else(|| vec![1.0, 5.0, 10.0, 50.0]);
    let tight = if reps.len() >= 2 {
        Some(tightness_report(&reps, &grid)?)
    } else {
        None
    };
    Ok(Report::json(json!({
        "alpha": alpha,
        "reports": to_value(&reps),
        "tightness": tight.map(|t| to_value(&t)),
    })))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> RunConfig {
        RunConfig::parse(text).unwrap()
    }

    #[test]
    fn eval_and_idoc() {
        let rep = run(&cfg("command = iet-eval\nx = 0, 1/2\nn = 2")).unwrap();
        let v: Value = serde_json::from_str(&rep.body).unwrap();
        assert_eq!(v["points"].as_array().unwrap().len(), 2);
        let rep = run(&cfg("command = iet-idoc\ndepth = 50")).unwrap();
        assert!(rep.body.contains("\"passed\": true"));
    }

    #[test]
    fn periodic_from_loop() {
        let rep = run(&cfg(
            "command = rauzy-periodic\npi0 = 1 2 3\npi1 = 3 2 1\nloop = B B T B B T\nperiods = 3",
        ))
        .unwrap();
        let v: Value = serde_json::from_str(&rep.body).unwrap();
        assert_eq!(v["report"]["period"], 12);
        assert_eq!(v["balanced"], true);
        assert!(parse_loop("T X").is_err());
    }

    #[test]
    fn class_as_dot() {
        let rep = run(&cfg(
            "command = rauzy-class\npi0 = 1 2 3 4\npi1 = 4 3 2 1\nformat = dot",
        ))
        .unwrap();
        assert_eq!(rep.kind, "dot");
        assert!(rep.body.starts_with("digraph"));
    }

    #[test]
    fn bins_syntax() {
        assert_eq!(
            parse_bins("-1:1:4").unwrap(),
            BinSpec {
                lo: -1.0,
                hi: 1.0,
                count: 4
            }
        );
        assert!(parse_bins("1:2").is_err());
    }

    #[test]
    fn hypothesis_failure_maps_to_three() {
        let err = run(&cfg("command = flow-distribution\nalpha = 3/8\nn_max = 2")).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
