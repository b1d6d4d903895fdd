//! Tolerances shared across modules.

/// Jacobi identity for accepted structure constants.
pub const JACOBI: f64 = 1e-12;

/// Singular value cutoff for ranks, spans and CE exactness.
pub const RANK: f64 = 1e-9;

/// Almost Kähler invariants at construction time.
pub const STRUCTURE: f64 = 1e-10;

/// Pure-algebra identities (projections, commutators).
pub const ALGEBRA: f64 = 1e-12;

/// Default constraint drift bound for the integrator.
pub const DRIFT: f64 = 1e-6;

/// Integration stops once the metric's smallest eigenvalue drops below this.
pub const MIN_EIGENVALUE: f64 = 1e-10;

/// Integration stops once any state component exceeds this in magnitude.
pub const BLOWUP: f64 = 1e12;
