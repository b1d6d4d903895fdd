//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{Format, RunConfig, Source};
use crate::ConfigError;

#[derive(Debug, Parser)]
#[command(name = "scflab", version, about = "Symplectic curvature flow on nilpotent Lie algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the catalog entries and their parameters
    List,
    /// One-shot curvature report at t = 0
    Report(SourceArgs),
    /// Integrate the flow and write a time series
    Flow {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        flow: FlowArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the invariant suite against a structure
    Check {
        #[command(flatten)]
        source: SourceArgs,
        /// Seed for the randomized property draws
        #[arg(long, env = "SCFLAB_SEED", default_value_t = 0)]
        seed: u64,
        /// Random draws per property
        #[arg(long)]
        draws: Option<usize>,
        /// Horizon of the drift checks
        #[arg(long)]
        t_end: Option<f64>,
        /// Step size of the drift checks
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Scaling law of the homogeneous static solution on a space of complex dimension N
    Static {
        n: u32,
        /// Overall scale of the initial symplectic form
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Time at which to evaluate the scale
        #[arg(long, default_value_t = 0.0)]
        t: f64,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct SourceArgs {
    /// Catalog entry (see `scflab list`)
    #[arg(long)]
    pub example: Option<String>,
    /// JSON run configuration
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FlowArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub record_every: Option<usize>,
    /// Project J back onto complex structures after every step
    #[arg(long)]
    pub renormalize_j: bool,
    #[arg(long)]
    pub drift_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// Series destination; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    #[value(alias = "json-lines")]
    Jsonl,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Jsonl => Format::Jsonl,
        }
    }
}

impl SourceArgs {
    /// Load `--config` (or start from `--example`) and apply the parameter
    /// overrides.
    pub fn build(&self) -> Result<RunConfig, ConfigError> {
        let mut cfg = match (&self.config, &self.example) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(name)) => RunConfig::example(name),
            (None, None) => return Err(ConfigError::new("source", "pass --example NAME or --config PATH")),
        };
        // --example wins over the config's source
        if let (Some(_), Some(name)) = (&self.config, &self.example) {
            cfg.source = RunConfig::example(name).source;
        }
        let overrides = [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)];
        match &mut cfg.source {
            Source::Example(ex) => {
                ex.alpha = self.alpha.or(ex.alpha);
                ex.beta = self.beta.or(ex.beta);
                ex.gamma = self.gamma.or(ex.gamma);
            }
            Source::Inline(_) => {
                if let Some((name, _)) = overrides.iter().find(|(_, v)| v.is_some()) {
                    return Err(ConfigError::new(
                        format!("--{name}"),
                        "parameters apply only to catalog examples",
                    ));
                }
            }
        }
        Ok(cfg)
    }
}

impl FlowArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        let f = &mut cfg.flow;
        f.t_end = self.t_end.unwrap_or(f.t_end);
        f.dt = self.dt.unwrap_or(f.dt);
        f.record_every = self.record_every.unwrap_or(f.record_every);
        f.drift_tol = self.drift_tol.unwrap_or(f.drift_tol);
        f.renormalize_j |= self.renormalize_j;
    }
}

impl OutputArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(p) = &self.out {
            cfg.output.path = Some(p.clone());
        }
        if let Some(f) = self.format {
            cfg.output.format = f.into();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn overrides_reach_the_config() {
        let cli = Cli::try_parse_from([
            "scflab", "flow", "--example", "kodaira_thurston", "--alpha", "2", "--t-end", "3", "--dt", "0.01",
            "--renormalize-j", "--format", "jsonl",
        ])
        .unwrap();
        let Command::Flow { source, flow, output } = cli.command else {
            panic!("expected flow");
        };
        let mut cfg = source.build().unwrap();
        flow.apply(&mut cfg);
        output.apply(&mut cfg);
        assert_eq!(cfg.flow.t_end, 3.0);
        assert_eq!(cfg.flow.dt, 0.01);
        assert!(cfg.flow.renormalize_j);
        assert_eq!(cfg.output.format, Format::Jsonl);
        let Source::Example(ex) = cfg.source else { panic!() };
        assert_eq!((ex.alpha, ex.beta), (Some(2.0), None));
    }

    #[test]
    fn missing_source_is_a_config_error() {
        let err = SourceArgs::default().build().unwrap_err();
        assert_eq!(err.field, "source");
    }
}
