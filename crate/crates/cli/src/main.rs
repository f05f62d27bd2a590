//! `finlim`: exact and approximate finite-blocklength compression limits
//! as CSV tables with a JSON metadata sidecar.
//!
//! Exit codes: 0 success, 2 configuration error, 3 budget exceeded,
//! 4 numerical failure, 1 output error. Errors are reported on stderr as a
//! single JSON object.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use finlim::{Budgets, Error, SourceSpec};
use serde::Serialize;
use serde_json::json;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "finlim",
    version,
    about = "Finite-blocklength limits of lossless compression"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Information spectrum at one blocklength: (info_value_bits, prob, count).
    Spectrum,
    /// ε*(n, k), R*(n, ε), R̄(n) and their prefix-free counterparts.
    Limits,
    /// Exact R*(n, ε) against the Gaussian approximation and bounds.
    Bounds,
    /// Random-binning error: exact and simulated.
    Binning,
    /// Codelength and information variances against blocklength.
    Dispersion,
    /// CDFs of the optimal codelength and the information for a coin-flip count.
    Figure1,
    /// R*(n, 0.1) and its approximations for 10 <= n <= 2000.
    Figure2,
    /// R*(n, 0.1) and its approximations for 10 <= n <= 200.
    Figure3,
    /// Normalized dispersion against entropy for three families.
    Figure4,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Options {
    /// Source specification file (JSON).
    #[arg(long, global = true, conflicts_with = "source_json")]
    #[serde(skip)]
    source: Option<PathBuf>,
    /// Source specification as inline JSON, e.g. '{"type":"memoryless","probs":[0.89,0.11]}'.
    #[arg(long, global = true)]
    #[serde(skip)]
    source_json: Option<String>,
    /// Blocklengths: `a:b` (inclusive), `a:b:step` or a comma list.
    #[arg(long = "n", global = true)]
    #[serde(skip)]
    n_range: Option<String>,
    /// Comma-separated excess probabilities.
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip)]
    eps: Option<Vec<f64>>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted. CSV output gets `<out>.meta.json`.
    #[arg(long, global = true)]
    #[serde(skip)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    #[serde(skip)]
    format: Format,
    /// Bin counts for `binning`, comma-separated.
    #[arg(long, global = true, value_delimiter = ',')]
    bins: Option<Vec<u64>>,
    /// Monte-Carlo trials for `binning` (0 disables simulation).
    #[arg(
        long,
        global = true,
        env = "FINLIM_MC_TRIALS",
        default_value_t = 100_000
    )]
    trials: u64,
    /// Sample paths for a Monte-Carlo Markov spectrum; exact when omitted.
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Coin flips for `figure1`.
    #[arg(long, global = true, default_value_t = 10_000)]
    flips: u64,
    /// Parameter values per family for `figure4`.
    #[arg(long, global = true, default_value_t = 60)]
    points: usize,
    /// Berry-Esseen constant A for Markov bounds.
    #[arg(long, global = true)]
    markov_constant: Option<f64>,
    #[arg(long, global = true, env = "FINLIM_TYPE_CLASS_BUDGET", default_value_t = Budgets::default().type_classes)]
    type_class_budget: u64,
    #[arg(long, global = true, env = "FINLIM_ENUM_BUDGET", default_value_t = Budgets::default().enumeration)]
    enum_budget: u64,
}

impl Options {
    pub fn budgets(&self) -> Budgets {
        Budgets {
            type_classes: self.type_class_budget,
            enumeration: self.enum_budget,
            ..Budgets::default()
        }
    }
}

/// Everything a run depends on, after defaults are applied.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub subcommand: Command,
    pub source: Option<SourceSpec>,
    pub n: Vec<usize>,
    pub eps: Vec<f64>,
    #[serde(flatten)]
    pub opts: Options,
}

#[derive(Debug)]
pub enum Failure {
    Lib(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn kind_and_code(&self) -> (&'static str, u8) {
        match self {
            Failure::Lib(Error::BudgetExceeded { .. }) => ("budget", 3),
            Failure::Lib(Error::NoConvergence { .. } | Error::NoSolution(_)) => ("numeric", 4),
            Failure::Lib(_) => ("config", 2),
            Failure::Io(_) => ("io", 1),
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Io(e) => e.to_string(),
        }
    }
}

fn config_error(msg: impl Into<String>) -> Failure {
    Failure::Lib(Error::Config(msg.into()))
}

/// Parses `a:b`, `a:b:step` or `a,b,c`.
fn parse_n_list(text: &str) -> Result<Vec<usize>, Failure> {
    let bad = || config_error(format!("cannot parse blocklengths {text:?}"));
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let list = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let (lo, hi, step) = match parts.as_slice() {
            [a, b] => (parse(a)?, parse(b)?, 1),
            [a, b, s] => (parse(a)?, parse(b)?, parse(s)?),
            _ => return Err(bad()),
        };
        if step == 0 || lo > hi {
            return Err(bad());
        }
        (lo..=hi).step_by(step).collect()
    } else {
        text.split(',').map(parse).collect::<Result<Vec<_>, _>>()?
    };
    if list.is_empty() || list.contains(&0) {
        return Err(config_error("blocklengths must be >= 1"));
    }
    Ok(list)
}

fn load_source(opts: &Options) -> Result<Option<SourceSpec>, Failure> {
    let text = match (&opts.source, &opts.source_json) {
        (Some(path), _) => std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?,
        (None, Some(inline)) => inline.clone(),
        (None, None) => return Ok(None),
    };
    Ok(Some(SourceSpec::from_json(&text)?))
}

fn resolve(command: Command, opts: Options) -> Result<RunConfig, Failure> {
    let mut source = load_source(&opts)?;
    let figure_source = || SourceSpec::Memoryless {
        probs: vec![0.89, 0.11],
    };
    let default_n = match command {
        Command::Figure2 => Some("10:2000"),
        Command::Figure3 => Some("10:200"),
        Command::Binning => Some("1"),
        _ => None,
    };
    if matches!(command, Command::Figure2 | Command::Figure3) && source.is_none() {
        source = Some(figure_source());
    }
    let needs_source = !matches!(command, Command::Figure1 | Command::Figure4);
    if needs_source && source.is_none() {
        return Err(config_error(
            "this subcommand needs --source or --source-json",
        ));
    }
    let n = match (&opts.n_range, default_n) {
        (Some(text), _) => parse_n_list(text)?,
        (None, Some(text)) => parse_n_list(text)?,
        (None, None) if needs_source => return Err(config_error("this subcommand needs --n")),
        (None, None) => Vec::new(),
    };
    let eps = opts.eps.clone().unwrap_or_else(|| vec![0.1]);
    if eps.iter().any(|e| !(0.0..1.0).contains(e)) {
        return Err(config_error("eps values must lie in [0, 1)"));
    }
    Ok(RunConfig {
        subcommand: command,
        source,
        n,
        eps,
        opts,
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = resolve(cli.command, cli.opts)?;
    let table = commands::run(&config)?;
    let config_value = serde_json::to_value(&config).expect("config serializes");
    let name = serde_json::to_value(config.subcommand).expect("subcommand serializes");
    let meta = output::metadata(
        name.as_str().unwrap_or_default(),
        &config_value,
        config.opts.seed,
        &table.extra,
    );
    output::emit(&table, meta, config.opts.format, config.opts.out.as_deref())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let report = json!({ "error": { "kind": "usage", "message": e.to_string().trim_end(), "exit_code": 2 } });
            eprintln!("{report}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (kind, code) = f.kind_and_code();
            let report =
                json!({ "error": { "kind": kind, "message": f.message(), "exit_code": code } });
            eprintln!("{report}");
            ExitCode::from(code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocklength_lists() {
        assert_eq!(parse_n_list("3:6").unwrap(), vec![3, 4, 5, 6]);
        assert_eq!(parse_n_list("10:30:10").unwrap(), vec![10, 20, 30]);
        assert_eq!(parse_n_list("5, 7,2").unwrap(), vec![5, 7, 2]);
        for bad in ["", "0:3", "4:2", "1:5:0", "a", "1:2:3:4"] {
            assert!(parse_n_list(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn exit_codes_follow_error_kind() {
        let budget = Failure::Lib(Error::BudgetExceeded {
            what: "x",
            required: "2".into(),
            budget: 1,
            hint: None,
        });
        assert_eq!(budget.kind_and_code().1, 3);
        assert_eq!(
            Failure::Lib(Error::NoSolution("x".into()))
                .kind_and_code()
                .1,
            4
        );
        assert_eq!(config_error("x").kind_and_code().1, 2);
    }
}
