use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ietflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ietflow"))
        .args(args)
        .env_remove("IETFLOW_THREADS")
        .output()
        .expect("binary runs")
}

fn stderr_error(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("error line");
    serde_json::from_str(line).expect("json error")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn induce_writes_trace_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let iet = write(dir.path(), "golden.cfg", "iet = golden\n");
    let out = dir.path().join("trace.json");
    let o = ietflow(&[
        "rauzy-induce",
        "--iet",
        &iet,
        "--steps",
        "6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let trace: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(trace["identities_ok"], true);
    assert_eq!(trace["steps"].as_array().unwrap().len(), 6);

    let manifest: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("trace.json.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "rauzy-induce");
    assert_eq!(manifest["precision_bits"], 128);
    assert_eq!(manifest["library_version"], ietflow::VERSION);

    // same inputs, same bytes
    let again = dir.path().join("again.json");
    ietflow(&[
        "rauzy-induce",
        "--iet",
        &iet,
        "--steps",
        "6",
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn printed_config_runs_identically() {
    let dir = tempfile::tempdir().unwrap();
    let o = ietflow(&[
        "--print-config",
        "--precision-bits",
        "96",
        "iet-eval",
        "--set",
        "iet=rotation",
        "--set",
        "alpha=-1 + sqrt(2)",
        "--x",
        "0, 1/3",
        "--n",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("precision_bits = 96\n"));
    let cfg = write(dir.path(), "run.cfg", &text);
    let printed = ietflow(&["--print-config", "--config", &cfg, "run"]);
    assert_eq!(String::from_utf8(printed.stdout).unwrap(), text);

    let direct = ietflow(&[
        "--precision-bits",
        "96",
        "iet-eval",
        "--set",
        "iet=rotation",
        "--set",
        "alpha=-1 + sqrt(2)",
        "--x",
        "0, 1/3",
        "--n",
        "4",
    ]);
    let from_file = ietflow(&["--config", &cfg, "run"]);
    assert_eq!(direct.stdout, from_file.stdout);
    let v: Value = serde_json::from_slice(&direct.stdout).unwrap();
    assert_eq!(v["points"].as_array().unwrap().len(), 2);
}

#[test]
fn sweep_writes_rows_and_reports_sup() {
    let dir = tempfile::tempdir().unwrap();
    let roof = write(
        dir.path(),
        "unitlog.cfg",
        "iet = golden\nc_plus = 1, 1\nc_minus = 1, 1\n",
    );
    let out = dir.path().join("sweep.csv");
    let o = ietflow(&[
        "rigidity-sweep",
        "--roof",
        &roof,
        "--t0",
        "auto",
        "--count",
        "6",
        "--span",
        "5min",
        "--eps",
        "0.1min",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,eps,j_max,measure,error_bar,disjoint_flag");
    assert_eq!(lines.len(), 7);
    let summary: Value = serde_json::from_slice(&o.stdout).unwrap();
    let sup = summary["sup_measure"].as_f64().unwrap();
    assert!(sup > 0.0 && sup < 0.9, "{sup}");
}

#[test]
fn exit_codes() {
    let o = ietflow(&["rauzy-induce", "--config", "/nonexistent/run.cfg"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_error(&o)["error"]["kind"], "Io");

    let o = ietflow(&["iet-idoc", "--set", "colour=red"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_error(&o)["error"]["kind"], "Parse");

    let o = ietflow(&["rauzy-class", "--pi0", "1 2 3 4", "--pi1", "2 1 4 3"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_error(&o)["error"]["kind"], "ReduciblePair");

    let o = ietflow(&["flow-distribution", "--alpha", "3/8", "--n-max", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_error(&o)["error"]["exit_code"], 3);

    // values may start with a minus sign
    let o = ietflow(&["iet-eval", "--x", "-1/3"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_error(&o)["error"]["kind"], "OutOfDomain");

    let o = ietflow(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_error(&o)["error"]["kind"], "Usage");

    assert_eq!(ietflow(&["--help"]).status.code(), Some(0));
}

#[test]
fn environment_overrides() {
    let o = Command::new(env!("CARGO_BIN_EXE_ietflow"))
        .args(["--print-config", "partition-balance"])
        .env("IETFLOW_J_MAX", "77")
        .env("IETFLOW_SEED", "9")
        .output()
        .unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("j_max = 77\n"), "{text}");
    assert!(text.contains("seed = 9\n"));
}
