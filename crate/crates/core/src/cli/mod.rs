//! Command-line front end shared by the `chi2qec` binary.
//!
//! Every subcommand produces one report. Exit codes: 0 when every verdict
//! passes, 1 on a verification failure or runtime error, 2 on a usage error.
//! JSON reports follow `report.schema.json` at the repository root.

pub mod commands;
pub mod config;
pub mod criteria;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::codes::CodeKind;
use crate::errors::KlPolicy;
use crate::Error;

use commands::{BoundArgs, BoundKind, ErrorSpec, Outcome};
pub use config::{Format, Overrides, RunConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "CHI2QEC_THREADS";

#[derive(Debug, Parser)]
#[command(name = "chi2qec", version, about = "Build and verify chi(2) bosonic error-correcting codes")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Config file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Absolute tolerance.
    #[arg(long = "tol", global = true)]
    pub tolerance: Option<f64>,
    /// Seed for random logical states.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Random logical states per recovery check.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Worker threads; overrides CHI2QEC_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Largest n searched by bound checks.
    #[arg(long, global = true)]
    pub max_n: Option<u32>,
    /// Largest q in bound sweeps.
    #[arg(long, global = true)]
    pub max_q: Option<u32>,
    /// Largest b in bound sweeps.
    #[arg(long, global = true)]
    pub max_b: Option<u32>,
    /// Largest k in bound sweeps.
    #[arg(long, global = true)]
    pub max_k: Option<u32>,
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            tolerance: self.tolerance,
            seed: self.seed,
            format: self.format,
            trials: self.trials,
            threads: self.threads,
            max_n: self.max_n,
            max_q: self.max_q,
            max_b: self.max_b,
            max_k: self.max_k,
            max_q_enumeration: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PolicyArg {
    Exact,
    LowestOrder,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a code from its symmetry operators.
    Synth {
        code: CodeKind,
        #[arg(long = "N", default_value_t = 2)]
        n: u32,
    },
    /// Knill-Laflamme check against an error set.
    KlCheck {
        code: CodeKind,
        #[arg(long = "N", default_value_t = 2)]
        n: u32,
        /// lowest-order, xi<m>[:loss|gain|dephasing] or ad[<m>].
        #[arg(long, default_value = "xi1")]
        errors: ErrorSpec,
        #[arg(long, default_value_t = 0.01)]
        gamma: f64,
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
    },
    /// Parity syndrome table, optionally decoding one syndrome.
    Syndromes {
        code: CodeKind,
        #[arg(long = "N", default_value_t = 2)]
        n: u32,
        /// Error order; binomial codes default to every order up to N.
        #[arg(long)]
        order: Option<u32>,
        /// Comma-separated p syndrome to decode.
        #[arg(long, value_delimiter = ',', requires = "q")]
        p: Option<Vec<u32>>,
        /// Comma-separated q syndrome to decode.
        #[arg(long, value_delimiter = ',', requires = "p")]
        q: Option<Vec<u32>>,
    },
    /// Recovery fidelity over seeded random logical states.
    Recover {
        code: CodeKind,
        #[arg(long = "N", default_value_t = 2)]
        n: u32,
        /// Error label such as a_s1, or `all`.
        #[arg(long, default_value = "all")]
        error: String,
    },
    /// Gate library checks.
    Gates {
        #[command(subcommand)]
        action: GatesAction,
    },
    /// Quantum Hamming bounds.
    Bounds {
        #[arg(value_enum, default_value = "theorems")]
        kind: BoundKind,
        /// Tabulate min n over the capped (q, b, k) grid.
        #[arg(long)]
        sweep: bool,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long, default_value_t = 2)]
        b: u32,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 1)]
        t: u32,
    },
    /// Reproduction matrix.
    Report {
        #[command(subcommand)]
        scope: ReportScope,
    },
}

#[derive(Debug, Subcommand)]
pub enum GatesAction {
    /// Decompositions, generators and two-qutrit gate identities.
    Verify,
}

#[derive(Debug, Subcommand)]
pub enum ReportScope {
    /// Every acceptance criterion.
    All {
        /// Evaluate only this criterion.
        #[arg(long)]
        criterion: Option<u32>,
    },
}

impl Command {
    fn name(&self) -> String {
        match self {
            Command::Synth { code, n } => format!("synth {code} --N {n}"),
            Command::KlCheck { code, n, errors, gamma, .. } => {
                format!("kl-check {code} --N {n} --errors {errors} --gamma {gamma}")
            }
            Command::Syndromes { code, n, .. } => format!("syndromes {code} --N {n}"),
            Command::Recover { code, n, error } => format!("recover {code} --N {n} --error {error}"),
            Command::Gates { .. } => "gates verify".into(),
            Command::Bounds { kind, sweep, .. } => {
                format!("bounds {kind:?}{}", if *sweep { " --sweep" } else { "" }).to_lowercase()
            }
            Command::Report { .. } => "report all".into(),
        }
    }
}

/// Defaults, then the config file, then `CHI2QEC_THREADS`, then flags.
pub fn resolve_config(global: &GlobalArgs) -> crate::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &global.config {
        cfg = cfg.apply(&Overrides::load(path)?);
    }
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| Error::Parse(format!("{THREADS_ENV}={v}")))?;
        cfg.threads = Some(n);
    }
    let cfg = cfg.apply(&global.overrides());
    cfg.validate()?;
    Ok(cfg)
}

/// Runs one parsed command.
pub fn execute(command: &Command, config: &RunConfig) -> crate::Result<Outcome> {
    match command {
        Command::Synth { code, n } => commands::synth(*code, *n, config),
        Command::KlCheck { code, n, errors, gamma, policy } => {
            let policy = policy.map(|p| match p {
                PolicyArg::Exact => KlPolicy::Exact,
                PolicyArg::LowestOrder => KlPolicy::LowestOrder,
            });
            commands::kl_check(*code, *n, errors, *gamma, policy, config)
        }
        Command::Syndromes { code, n, order, p, q } => {
            let decode = p.clone().zip(q.clone());
            commands::syndromes(*code, *n, *order, decode)
        }
        Command::Recover { code, n, error } => commands::recover(*code, *n, error, config),
        Command::Gates { action: GatesAction::Verify } => commands::gates_verify(),
        Command::Bounds { kind, sweep, n, q, b, k, t } => {
            commands::bounds_cmd(*kind, *sweep, BoundArgs { n: *n, q: *q, b: *b, k: *k, t: *t }, config)
        }
        Command::Report { scope: ReportScope::All { criterion } } => commands::report_all(*criterion, config),
    }
}

/// Full JSON report around an outcome.
pub fn report_json(command: &str, config: &RunConfig, outcome: &Outcome) -> Value {
    json!({
        "tool": "chi2qec",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "passed": outcome.passed,
        "results": outcome.results,
    })
}

/// Renders an outcome in the configured format.
pub fn render(command: &str, config: &RunConfig, outcome: &Outcome) -> crate::Result<String> {
    match config.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report_json(command, config, outcome))
                .map_err(|e| Error::Parse(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => outcome
            .csv
            .clone()
            .ok_or_else(|| Error::InvalidParameter(format!("{command} has no csv form"))),
        Format::Text => {
            let mut s = outcome.text.clone();
            s.push_str(if outcome.passed { "result: pass\n" } else { "result: fail\n" });
            Ok(s)
        }
    }
}

fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidParameter(_) | Error::UnknownName(_) | Error::Parse(_) | Error::InvalidLayout(_)
    )
}

fn error_exit(e: &Error) -> i32 {
    eprintln!("error: {e}");
    if is_usage_error(e) {
        EXIT_USAGE
    } else {
        EXIT_FAIL
    }
}

/// Parses `args` (program name first), runs the command and writes the
/// report. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let config = match resolve_config(&cli.global) {
        Ok(c) => c,
        Err(e) => return error_exit(&e),
    };
    if let Some(n) = config.threads {
        // A pool that already exists keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let name = cli.command.name();
    let outcome = match execute(&cli.command, &config) {
        Ok(o) => o,
        Err(e) => return error_exit(&e),
    };
    let body = match render(&name, &config, &outcome) {
        Ok(b) => b,
        Err(e) => return error_exit(&e),
    };
    let written = match &cli.global.output {
        Some(path) => std::fs::write(path, body.as_bytes()),
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: writing report: {e}");
        return EXIT_FAIL;
    }
    if outcome.passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
