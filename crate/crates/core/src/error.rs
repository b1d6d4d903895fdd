use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScfError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} not antisymmetric (defect {defect:e})")]
    NotAntisymmetric { what: &'static str, defect: f64 },

    #[error("jacobi_defect = {defect:e} exceeds tolerance")]
    JacobiViolation { defect: f64 },

    #[error("{what} index {index:?} out of range for dimension {dim}")]
    IndexOutOfRange {
        what: &'static str,
        index: (usize, usize, usize),
        dim: usize,
    },

    #[error("cohomological degree {degree} not supported (0, 1 or 2)")]
    DegreeOutOfRange { degree: usize },

    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("incompatible pair: metric not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    IncompatiblePair { min_eigenvalue: f64 },

    #[error("degenerate metric (smallest eigenvalue {min_eigenvalue:e})")]
    DegenerateMetric { min_eigenvalue: f64 },

    #[error("not Chern–Ricci flat (max |P| = {max:e})")]
    NotChernRicciFlat { max: f64 },

    #[error("family constraint {relation} violated (residual {residual:e})")]
    FamilyConstraint {
        relation: &'static str,
        residual: f64,
    },

    #[error("state lies outside the {family} family (residual {residual:e})")]
    OutsideFamily { family: &'static str, residual: f64 },

    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("numerical failure: {0}")]
    Numerical(&'static str),
}

pub type Result<T> = std::result::Result<T, ScfError>;
