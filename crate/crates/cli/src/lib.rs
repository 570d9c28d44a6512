//! Argument handling and dispatch for the `prodlab` binary.
//!
//! ```text
//! prodlab <clt|fclt|lil|extremal|check|run> [--config PATH] [--seed U64]
//!         [--out DIR] [--workers N] [--retain-samples BOOL]
//! ```
//!
//! Flags override keys from the config file. `run` takes the kind from the
//! config file; the other subcommands fix it and reject a config that names a
//! different one.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use prodlab::checks::all_passed;
use prodlab::mcengine::{run_experiment, write_outputs, ConfigFile, ExperimentConfig, ExperimentResult, Kind, Output};
use prodlab::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "prodlab",
    version,
    about = "Products of partial sums: limit theorems by simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Replicated log-statistic at t = 1 against N(0, 2)
    Clt(Flags),
    /// Replicated log-path on a t grid against N(0, 2t)
    Fclt(Flags),
    /// One path followed to n under the iterated-logarithm scaling
    Lil(Flags),
    /// Optimiser over the Strassen ball on a t grid
    Extremal(Flags),
    /// Analytic self-checks
    Check(Flags),
    /// Kind taken from the config file
    Run(Flags),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON config file
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed; drawn from OS entropy when absent
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Output directory (default results/<kind>)
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads, 0 for one per core
    #[arg(long, value_name = "N")]
    pub workers: Option<usize>,
    /// Keep per-replication values and write them to the CSV
    #[arg(long, value_name = "BOOL", action = clap::ArgAction::Set)]
    pub retain_samples: Option<bool>,
}

impl Command {
    fn parts(&self) -> (Option<Kind>, &Flags) {
        match self {
            Command::Clt(f) => (Some(Kind::Clt), f),
            Command::Fclt(f) => (Some(Kind::Fclt), f),
            Command::Lil(f) => (Some(Kind::Lil), f),
            Command::Extremal(f) => (Some(Kind::Extremal), f),
            Command::Check(f) => (Some(Kind::Check), f),
            Command::Run(f) => (None, f),
        }
    }
}

/// A validated config plus where its results go.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub config: ExperimentConfig,
    pub out_dir: PathBuf,
    /// Set when the seed came from entropy rather than the user.
    pub generated_seed: bool,
}

/// Builds the experiment from the config file (if any) and the flags.
pub fn parse_config(command: &Command) -> prodlab::Result<Parsed> {
    let (kind, flags) = command.parts();
    let mut file = match &flags.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            ConfigFile::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => ConfigFile::default(),
    };
    match (kind, file.kind.as_deref()) {
        (Some(k), Some(named)) if named != k.as_str() => {
            return Err(Error::Config(format!(
                "kind: config names {named:?} but the subcommand is {k}"
            )));
        }
        (Some(k), _) => file.kind = Some(k.as_str().into()),
        (None, None) => return Err(Error::Config("kind: missing (required by `run`)".into())),
        (None, Some(_)) => {}
    }
    if flags.seed.is_some() {
        file.seed = flags.seed;
    }
    if flags.workers.is_some() {
        file.workers = flags.workers;
    }
    if flags.retain_samples.is_some() {
        file.retain_samples = flags.retain_samples;
    }
    if flags.out.is_some() {
        file.output = flags.out.clone();
    }
    let generated_seed = file.seed.is_none();
    let config = file.resolve(rand::random())?;
    let out_dir = config
        .output_path
        .clone()
        .unwrap_or_else(|| Path::new("results").join(config.kind.as_str()));
    Ok(Parsed {
        config,
        out_dir,
        generated_seed,
    })
}

fn report(result: &ExperimentResult, out: &mut dyn Write) -> std::io::Result<()> {
    match &result.output {
        Output::Replicated(r) => {
            writeln!(
                out,
                "{:>6} {:>8} {:>10} {:>10} {:>10}",
                "t", "count", "mean", "variance", "ks"
            )?;
            for (i, s) in r.summaries.iter().enumerate() {
                let var = s.variance.map_or("NA".to_string(), |v| format!("{v:.5}"));
                writeln!(
                    out,
                    "{:>6} {:>8} {:>10.5} {:>10} {:>10.5}   target variance {}",
                    r.t_grid[i], s.count, s.mean, var, r.ks_distance[i], r.target_variance[i]
                )?;
            }
        }
        Output::Lil(r) => {
            if let Some(last) = r.trajectory.last() {
                writeln!(
                    out,
                    "n = {}: value {:.5}, running max {:.5}",
                    last.n, last.value, last.running_max
                )?;
            }
            writeln!(
                out,
                "envelope slack {:.5}, limit-set score {:.5}",
                r.envelope_slack, r.limit_set.score
            )?;
        }
        Output::Extremal { rows } => {
            for row in rows {
                writeln!(
                    out,
                    "t = {}: value {:.8}, sqrt(2t) {:.8}, gap {:.3e}",
                    row.t, row.value, row.closed_form, row.gap
                )?;
            }
        }
        Output::Check { outcomes } => {
            for c in outcomes {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                writeln!(
                    out,
                    "[{tag}] {}: {} (target {}, tol {})",
                    c.name, c.value, c.target, c.tolerance
                )?;
            }
        }
    }
    Ok(())
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

/// Parses, runs and writes results, reporting to the given streams.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_CONFIG;
            }
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    let parsed = match parse_config(&cli.command) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "config error: {e}");
            return exit_code(&e);
        }
    };
    if parsed.generated_seed {
        let _ = writeln!(stderr, "seed: {} (generated)", parsed.config.master_seed);
    }
    let result = match run_experiment(&parsed.config) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let files = match write_outputs(&result, &parsed.out_dir) {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(stderr, "cannot write results to {}: {e}", parsed.out_dir.display());
            return EXIT_RUNTIME;
        }
    };
    let _ = report(&result, stdout);
    let _ = writeln!(stdout, "wrote {}", files.primary.display());
    if let Output::Check { outcomes } = &result.output {
        if !all_passed(outcomes) {
            return EXIT_CHECK_FAILED;
        }
    }
    EXIT_OK
}

/// Entry point used by the binary.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}
