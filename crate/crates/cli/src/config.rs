//! Run configuration: a single JSON document, optionally overridden by
//! command-line flags.
//!
//! ```json
//! {
//!   "source": { "example": { "name": "kodaira_thurston", "alpha": 1.0, "beta": 1.0 } },
//!   "flow":   { "t_end": 10.0, "dt": 0.001, "record_every": 100,
//!               "renormalize_J": false, "drift_tol": 1e-6 },
//!   "output": { "path": "run.csv", "format": "csv" }
//! }
//! ```
//!
//! An inline source replaces `example`:
//!
//! ```json
//! { "inline": { "dim": 4,
//!               "brackets": [[1, 2, 3, 1.0]],
//!               "omega": [[1, 3, 1.0], [2, 4, -1.0]],
//!               "J": [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]] } }
//! ```
//!
//! Bracket entries `[i, j, k, v]` mean `[e_i, e_j] += v·e_k` with `i < j`;
//! omega entries `[i, j, v]` add `v·e^i∧e^j` with `i < j`. All indices are
//! 1-based. `J` is either a list of rows or a flat row-major list.

use std::fmt;
use std::path::{Path, PathBuf};

use scflab::catalog::{self, CatalogEntry};
use scflab::flow::IntegratorConfig;
use scflab::{AlmostKahler, Endomorphism, LieAlgebra, TwoForm};
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub source: Source,
    #[serde(default)]
    pub flow: FlowSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    Example(ExampleSource),
    Inline(InlineSource),
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExampleSource {
    pub name: String,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InlineSource {
    pub dim: usize,
    #[serde(default)]
    pub brackets: Vec<(usize, usize, usize, f64)>,
    pub omega: Vec<(usize, usize, f64)>,
    #[serde(rename = "J")]
    pub j: MatrixSpec,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum MatrixSpec {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct FlowSection {
    pub t_end: f64,
    pub dt: f64,
    pub record_every: usize,
    #[serde(rename = "renormalize_J", alias = "renormalize_j")]
    pub renormalize_j: bool,
    pub drift_tol: f64,
}

impl Default for FlowSection {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        Self {
            t_end: d.t_end,
            dt: d.dt,
            record_every: d.record_every,
            renormalize_j: d.renormalize_j,
            drift_tol: d.drift_tol,
        }
    }
}

impl FlowSection {
    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            t_end: self.t_end,
            dt: self.dt,
            drift_tol: self.drift_tol,
            renormalize_j: self.renormalize_j,
            record_every: self.record_every,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(ConfigError::new("flow.dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.dt < self.t_end) {
            return Err(ConfigError::new(
                "flow.dt",
                format!("must be smaller than t_end = {}, got {}", self.t_end, self.dt),
            ));
        }
        if self.record_every == 0 {
            return Err(ConfigError::new("flow.record_every", "must be a positive integer"));
        }
        if !(self.drift_tol > 0.0) {
            return Err(ConfigError::new(
                "flow.drift_tol",
                format!("must be positive, got {}", self.drift_tol),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
pub enum Format {
    #[default]
    #[serde(rename = "csv")]
    Csv,
    #[serde(rename = "jsonl", alias = "json-lines")]
    Jsonl,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::new(field_of(&e), e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("--config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn example(name: &str) -> Self {
        Self {
            source: Source::Example(ExampleSource {
                name: name.to_owned(),
                alpha: None,
                beta: None,
                gamma: None,
            }),
            flow: FlowSection::default(),
            output: OutputSection::default(),
        }
    }
}

/// Best-effort field name from a serde error message, e.g. "missing field
/// `dim`" or "unknown field `foo`".
fn field_of(e: &serde_json::Error) -> String {
    let msg = e.to_string();
    match (msg.find('`'), msg[msg.find('`').map_or(0, |i| i + 1)..].find('`')) {
        (Some(start), Some(len)) => msg[start + 1..start + 1 + len].to_owned(),
        _ => "config".to_owned(),
    }
}

/// A structure ready for computation, plus its catalog entry when it came
/// from one.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub label: String,
    pub entry: Option<CatalogEntry>,
    pub structure: AlmostKahler,
}

impl Resolved {
    pub fn algebra(&self) -> &LieAlgebra {
        self.structure.algebra()
    }
}

pub fn resolve(source: &Source) -> Result<Resolved, ConfigError> {
    match source {
        Source::Example(ex) => {
            if !catalog::list_entries().contains(&ex.name.as_str()) {
                return Err(ConfigError::new(
                    "source.example.name",
                    format!(
                        "unknown example `{}` (expected one of {})",
                        ex.name,
                        catalog::list_entries().join(", ")
                    ),
                ));
            }
            let entry = catalog::entry_by_name(&ex.name, ex.alpha, ex.beta, ex.gamma).map_err(|e| {
                let field = match e {
                    scflab::ScfError::InvalidParameter { name, .. } => format!("source.example.{name}"),
                    _ => "source.example".to_owned(),
                };
                ConfigError::new(field, e.to_string())
            })?;
            Ok(Resolved {
                label: ex.name.clone(),
                structure: entry.initial().clone(),
                entry: Some(entry),
            })
        }
        Source::Inline(inline) => resolve_inline(inline),
    }
}

fn resolve_inline(s: &InlineSource) -> Result<Resolved, ConfigError> {
    let n = s.dim;
    if n < 2 {
        return Err(ConfigError::new("source.inline.dim", format!("must be at least 2, got {n}")));
    }
    for (idx, &(i, j, k, _)) in s.brackets.iter().enumerate() {
        if !(1 <= i && i < j && j <= n && 1 <= k && k <= n) {
            return Err(ConfigError::new(
                format!("source.inline.brackets[{idx}]"),
                format!("need 1 <= i < j <= {n} and 1 <= k <= {n}, got ({i}, {j}, {k})"),
            ));
        }
    }
    for (idx, &(i, j, _)) in s.omega.iter().enumerate() {
        if !(1 <= i && i < j && j <= n) {
            return Err(ConfigError::new(
                format!("source.inline.omega[{idx}]"),
                format!("need 1 <= i < j <= {n}, got ({i}, {j})"),
            ));
        }
    }
    let values: Vec<f64> = match &s.j {
        MatrixSpec::Rows(rows) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(ConfigError::new("source.inline.J", format!("expected {n} rows of length {n}")));
            }
            rows.iter().flatten().copied().collect()
        }
        MatrixSpec::Flat(v) => v.clone(),
    };
    let j = Endomorphism::from_row_major(n, &values)
        .map_err(|e| ConfigError::new("source.inline.J", e.to_string()))?;
    let algebra = LieAlgebra::from_brackets(n, &s.brackets)
        .map_err(|e| ConfigError::new("source.inline.brackets", e.to_string()))?;
    let omega =
        TwoForm::from_entries(n, &s.omega).map_err(|e| ConfigError::new("source.inline.omega", e.to_string()))?;
    let structure = AlmostKahler::new(algebra, omega, j)
        .map_err(|e| ConfigError::new("source.inline", format!("not almost Kähler: {e}")))?;
    Ok(Resolved {
        label: "inline".to_owned(),
        entry: None,
        structure,
    })
}
