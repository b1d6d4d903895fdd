//! Library half of the `scflab` binary: config ingestion, time-series
//! output and the subcommands.
//!
//! Every command writes machine-readable JSON (or the CSV/JSONL series) to
//! stdout and human-oriented text to stderr. The failure class is carried
//! by the exit code alone:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | bad config, bad arguments or unwritable output |
//! | 2 | flow stopped on constraint drift |
//! | 3 | flow stopped on a degenerate metric or divergence |
//! | 4 | `check` found a failing invariant |

pub mod args;
pub mod commands;
pub mod config;
pub mod series;

use std::fmt;

pub use config::ConfigError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_DRIFT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_CONFIG
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            CliError::Config(e) => serde_json::json!({
                "error": e.message,
                "field": e.field,
                "exit_code": self.exit_code(),
            }),
            CliError::Io(e) => serde_json::json!({
                "error": e.to_string(),
                "exit_code": self.exit_code(),
            }),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => e.fmt(f),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Run a parsed command line, reporting errors as JSON on `out` and text on
/// `err`. Returns the exit code.
pub fn run(cli: args::Cli, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32 {
    use args::Command;
    let result = match cli.command {
        Command::List => commands::list(out, err),
        Command::Report(source) => source
            .build()
            .map_err(CliError::from)
            .and_then(|cfg| commands::report(&cfg, out, err)),
        Command::Flow { source, flow, output } => source.build().map_err(CliError::from).and_then(|mut cfg| {
            flow.apply(&mut cfg);
            output.apply(&mut cfg);
            commands::flow(&cfg, out, err)
        }),
        Command::Check {
            source,
            seed,
            draws,
            t_end,
            dt,
        } => source.build().map_err(CliError::from).and_then(|cfg| {
            let d = scflab::checks::CheckOptions::default();
            let opts = scflab::checks::CheckOptions {
                seed,
                draws: draws.unwrap_or(d.draws),
                flow_t_end: t_end.unwrap_or(d.flow_t_end),
                flow_dt: dt.unwrap_or(d.flow_dt),
            };
            commands::check(&cfg, &opts, out, err)
        }),
        Command::Static { n, scale, t } => commands::static_law(n, scale, t, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            let _ = serde_json::to_writer(&mut *out, &e.to_json());
            let _ = writeln!(out);
            e.exit_code()
        }
    }
}
