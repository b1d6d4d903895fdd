//! Symplectic curvature flow of left-invariant almost Kähler structures on
//! nilpotent Lie algebras.
//!
//! The crate is organised bottom-up:
//!
//! * [`lie`]: structure constants, brackets, Chevalley–Eilenberg differentials.
//! * [`structure`]: almost Kähler pairs `(ω, J)`, the induced metric, type
//!   decompositions.
//! * [`curvature`]: Levi-Civita and Chern connections, Ricci tensors,
//!   Nijenhuis tensor.
//! * [`flow`]: the flow equations and a fixed-step RK4 integrator.
//! * [`catalog`]: examples with closed-form or reduced dynamics.
//!
//! ```
//! use scflab::catalog;
//! use scflab::flow::{integrate_entry, IntegratorConfig};
//!
//! let entry = catalog::kodaira_thurston(1.0, 1.0).unwrap();
//! let traj = integrate_entry(&entry, &IntegratorConfig::new(1.0, 1e-2)).unwrap();
//! let (state, _) = traj.last();
//! let exact = entry.analytic(1.0).unwrap();
//! assert!((state.j.matrix() - exact.j.matrix()).amax() < 1e-8);
//! ```

pub mod catalog;
pub mod checks;
pub mod curvature;
pub mod error;
pub mod flow;
pub mod lie;
pub mod random;
pub mod structure;
pub mod sweep;
pub mod tol;

pub use error::{Result, ScfError};
pub use flow::{FlowState, IntegratorConfig, Termination, Trajectory};
pub use lie::{LieAlgebra, OneForm, ThreeForm, TwoForm};
pub use structure::{AlmostKahler, Endomorphism, Metric};
