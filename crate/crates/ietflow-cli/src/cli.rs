//! Argument parsing and the run driver.
//!
//! Every flag also reads an `IETFLOW_*` environment variable. Sources are
//! merged into one [`RunConfig`] in this order, later ones winning: the
//! `--config` file, the `--iet` file, the `--roof` file, global flags,
//! command flags, then `--set key=value` pairs.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::commands::{self, Report};
use crate::config::RunConfig;
use crate::manifest::Manifest;
use ietflow::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "ietflow",
    version,
    about = "Interval exchanges, Rauzy induction and special flows"
)]
struct Cli {
    /// Worker threads for parallel sweeps (0 = all cores).
    #[arg(long, env = "IETFLOW_THREADS", global = true)]
    threads: Option<usize>,
    /// Working precision in bits.
    #[arg(long, env = "IETFLOW_PRECISION_BITS", global = true)]
    precision_bits: Option<u32>,
    /// Seed for randomly drawn exchanges.
    #[arg(long, env = "IETFLOW_SEED", global = true)]
    seed: Option<u64>,
    /// Base run configuration.
    #[arg(long, env = "IETFLOW_CONFIG", global = true)]
    config: Option<PathBuf>,
    /// Report file; a manifest is written to `<out>.manifest.json`.
    #[arg(long, env = "IETFLOW_OUT", global = true)]
    out: Option<PathBuf>,
    /// Print the merged configuration instead of running.
    #[arg(long, env = "IETFLOW_PRINT_CONFIG", global = true, value_parser = clap::builder::BoolishValueParser::new())]
    print_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Inputs {
    /// Configuration file describing the exchange.
    #[arg(long, env = "IETFLOW_IET")]
    iet: Option<PathBuf>,
    /// Configuration file describing the roof.
    #[arg(long, env = "IETFLOW_ROOF")]
    roof: Option<PathBuf>,
    /// Extra `key=value` entry, repeatable.
    #[arg(long = "set", env = "IETFLOW_SET", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

macro_rules! params {
    ($name:ident { $($field:ident, $long:literal, $env:literal, $help:literal;)* }) => {
        #[derive(Args, Debug, Default)]
        struct $name {
            #[command(flatten)]
            inputs: Inputs,
            $(
                #[arg(long = $long, env = $env, help = $help, allow_hyphen_values = true)]
                $field: Option<String>,
            )*
        }

        impl $name {
            fn entries(&self) -> Vec<(&'static str, Option<&String>)> {
                vec![$(($long, self.$field.as_ref())),*]
            }
        }
    };
}

params!(EvalArgs {
    x, "x", "IETFLOW_X", "Comma-separated points";
    n, "n", "IETFLOW_N", "Number of iterates, negative for the inverse";
});

params!(IdocArgs {
    depth, "depth", "IETFLOW_DEPTH", "Orbit depth checked for coincidences";
});

params!(InduceArgs {
    steps, "steps", "IETFLOW_STEPS", "Rauzy steps";
});

params!(ClassArgs {
    pi0, "pi0", "IETFLOW_PI0", "Top row, 1-based";
    pi1, "pi1", "IETFLOW_PI1", "Bottom row, 1-based";
    format, "format", "IETFLOW_FORMAT", "json or dot";
});

params!(PeriodicArgs {
    steps_loop, "loop", "IETFLOW_LOOP", "Closed loop of T/B steps to build from";
    pi0, "pi0", "IETFLOW_PI0", "Top row of the loop start, 1-based";
    pi1, "pi1", "IETFLOW_PI1", "Bottom row of the loop start, 1-based";
    p_max, "p-max", "IETFLOW_P_MAX", "Longest period searched";
    tol, "tol", "IETFLOW_TOL", "Projective tolerance for detection";
    periods, "periods", "IETFLOW_PERIODS", "Periods checked for balance";
});

params!(BalanceArgs {
    j_max, "j-max", "IETFLOW_J_MAX", "Largest partition level";
    stride, "stride", "IETFLOW_STRIDE", "Row stride in the report";
    single, "single", "IETFLOW_SINGLE", "Single-point partitions: skip, spot or full";
    format, "format", "IETFLOW_FORMAT", "json or csv";
});

params!(ProbeArgs {
    probe, "probe", "IETFLOW_PROBE", "monotonicity, derivative or oscillation";
    j_min, "j-min", "IETFLOW_J_MIN", "First level";
    j_max, "j-max", "IETFLOW_J_MAX", "Last level";
    samples, "samples", "IETFLOW_SAMPLES", "Samples per interval";
    eta, "eta", "IETFLOW_ETA", "Sublevel exponent for the derivative probe";
    c, "c", "IETFLOW_C", "Balance constant, or auto";
    eps, "eps", "IETFLOW_EPS", "Settling tolerance for the oscillation probe";
});

params!(SweepArgs {
    t0, "t0", "IETFLOW_T0", "First time, auto, or a multiple like 20min";
    count, "count", "IETFLOW_COUNT", "Number of times";
    span, "span", "IETFLOW_SPAN", "Length of the time grid";
    eps, "eps", "IETFLOW_EPS", "Strip half-width";
    c, "c", "IETFLOW_C", "Balance constant, or auto";
    format, "format", "IETFLOW_FORMAT", "csv or json";
});

params!(DistributionArgs {
    alpha, "alpha", "IETFLOW_ALPHA", "Rotation number, defaults to the image of 0";
    n_min, "n-min", "IETFLOW_N_MIN", "First convergent index";
    n_max, "n-max", "IETFLOW_N_MAX", "Last convergent index";
    bins, "bins", "IETFLOW_BINS", "Histogram bins lo:hi:count";
    r_tail, "r-tail", "IETFLOW_R_TAIL", "Tail radius";
    r_grid, "r-grid", "IETFLOW_R_GRID", "Comma-separated radii for the tightness table";
    format, "format", "IETFLOW_FORMAT", "json or csv";
});

#[derive(Args, Debug, Default)]
struct RunArgs {
    #[command(flatten)]
    inputs: Inputs,
}

impl RunArgs {
    fn entries(&self) -> Vec<(&'static str, Option<&String>)> {
        Vec::new()
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate iterates of an exchange at given points.
    IetEval(EvalArgs),
    /// Check the orbits of the discontinuities for coincidences.
    IetIdoc(IdocArgs),
    /// Run Rauzy induction and verify the cocycle identities.
    RauzyInduce(InduceArgs),
    /// Enumerate the Rauzy class of a pair.
    RauzyClass(ClassArgs),
    /// Detect or build a periodic-type exchange and check balance.
    RauzyPeriodic(PeriodicArgs),
    /// Scan gap lengths of the discontinuity partitions.
    PartitionBalance(BalanceArgs),
    /// Probe derivative properties of the Birkhoff sums of a roof.
    RoofProbe(ProbeArgs),
    /// Strip measures over a grid of flow times.
    RigiditySweep(SweepArgs),
    /// Birkhoff-sum distributions over rigidity sets of a rotation.
    FlowDistribution(DistributionArgs),
    /// Run the command named in the configuration.
    Run(RunArgs),
}

impl Command {
    /// Subcommand name, or `None` for `run`.
    fn name(&self) -> Option<&'static str> {
        Some(match self {
            Command::IetEval(_) => "iet-eval",
            Command::IetIdoc(_) => "iet-idoc",
            Command::RauzyInduce(_) => "rauzy-induce",
            Command::RauzyClass(_) => "rauzy-class",
            Command::RauzyPeriodic(_) => "rauzy-periodic",
            Command::PartitionBalance(_) => "partition-balance",
            Command::RoofProbe(_) => "roof-probe",
            Command::RigiditySweep(_) => "rigidity-sweep",
            Command::FlowDistribution(_) => "flow-distribution",
            Command::Run(_) => return None,
        })
    }

    fn parts(&self) -> (&Inputs, Vec<(&'static str, Option<&String>)>) {
        match self {
            Command::IetEval(a) => (&a.inputs, a.entries()),
            Command::IetIdoc(a) => (&a.inputs, a.entries()),
            Command::RauzyInduce(a) => (&a.inputs, a.entries()),
            Command::RauzyClass(a) => (&a.inputs, a.entries()),
            Command::RauzyPeriodic(a) => (&a.inputs, a.entries()),
            Command::PartitionBalance(a) => (&a.inputs, a.entries()),
            Command::RoofProbe(a) => (&a.inputs, a.entries()),
            Command::RigiditySweep(a) => (&a.inputs, a.entries()),
            Command::FlowDistribution(a) => (&a.inputs, a.entries()),
            Command::Run(a) => (&a.inputs, a.entries()),
        }
    }
}

fn config_key(flag: &str) -> String {
    flag.replace('-', "_")
}

fn merged_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::new(),
    };
    let (inputs, entries) = cli.command.parts();
    for file in [&inputs.iet, &inputs.roof].into_iter().flatten() {
        cfg.merge(&RunConfig::load(file)?);
    }
    if let Some(name) = cli.command.name() {
        cfg.set("command", name)?;
    }
    if let Some(p) = cli.precision_bits {
        cfg.set("precision_bits", &p.to_string())?;
    }
    if let Some(s) = cli.seed {
        cfg.set("seed", &s.to_string())?;
    }
    for (flag, value) in entries {
        if let Some(v) = value {
            cfg.set(&config_key(flag), v)?;
        }
    }
    for pair in &inputs.set {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("--set {pair}: expected key=value")))?;
        cfg.set(k.trim(), v)?;
    }
    cfg.require("command")?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<()> {
    let cfg = merged_config(cli)?;
    if cli.print_config {
        print!("{}", cfg.emit());
        return Ok(());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    let report = pool.install(|| commands::run(&cfg))?;
    match &cli.out {
        Some(path) => write_outputs(&cfg, path, &report),
        None => {
            print!("{}", report.body);
            Ok(())
        }
    }
}

fn write_outputs(cfg: &RunConfig, path: &Path, report: &Report) -> Result<()> {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let manifest = Manifest::new(cfg, &name, report)?;
    let mut mpath = path.as_os_str().to_owned();
    mpath.push(".manifest.json");
    let write = |p: &Path, body: &str| {
        std::fs::write(p, body).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
    };
    write(path, &report.body)?;
    write(Path::new(&mpath), &manifest.to_json())?;
    if let Some(summary) = &report.summary {
        println!("{summary}");
    }
    Ok(())
}

/// Machine-readable error line for stderr.
pub fn error_json(kind: &str, message: &str, exit_code: i32) -> String {
    json!({ "error": { "kind": kind, "message": message, "exit_code": exit_code } }).to_string()
}

/// Parse `argv`, run the command and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                eprint!("{e}");
            }
            eprintln!("{}", error_json("Usage", e.to_string().trim(), 1));
            return 1;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_json(e.kind(), &e.to_string(), e.exit_code()));
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_land_in_config() {
        let cli = Cli::try_parse_from([
            "ietflow",
            "--precision-bits",
            "96",
            "rigidity-sweep",
            "--count",
            "5",
            "--set",
            "c=2.5",
        ])
        .unwrap();
        let cfg = merged_config(&cli).unwrap();
        assert_eq!(cfg.get("command"), Some("rigidity-sweep"));
        assert_eq!(cfg.get("count"), Some("5"));
        assert_eq!(cfg.get("c"), Some("2.5"));
        assert_eq!(cfg.precision().unwrap(), 96);
        for name in commands::COMMANDS {
            assert!(Cli::try_parse_from(["ietflow", name]).is_ok(), "{name}");
        }
    }

    #[test]
    fn run_needs_a_command_key() {
        let cli = Cli::try_parse_from(["ietflow", "run"]).unwrap();
        assert!(matches!(merged_config(&cli), Err(Error::Invalid(_))));
    }
}
