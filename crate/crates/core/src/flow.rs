//! Symplectic curvature flow for left-invariant structures:
//!
//! ```text
//! ∂ω/∂t = −2P
//! ∂J/∂t = −2 g⁻¹[P^{(2,0)+(0,2)}] + [Rc, J]
//! ```
//!
//! integrated with fixed-step classical RK4. The metric is recomputed from
//! `(ω, J)` at every evaluation; constraint drift is monitored, not
//! projected away.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::catalog::CatalogEntry;
use crate::curvature::{norm_nijenhuis, norm_riemann, nijenhuis, Geometry};
use crate::error::{Result, ScfError};
use crate::lie::{LieAlgebra, TwoForm};
use crate::structure::{
    anti_invariant_part, anti_invariant_part_bilinear, commutator_anti_part, min_symmetric_eigenvalue,
    raise, renormalize_complex_structure, Endomorphism,
};
use crate::tol;

/// One point `(t, ω, J)` of a flow.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub omega: TwoForm,
    pub j: Endomorphism,
}

impl FlowState {
    pub fn new(t: f64, omega: TwoForm, j: Endomorphism) -> Self {
        Self { t, omega, j }
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    fn max_component(&self) -> f64 {
        self.omega.max_abs().max(self.j.matrix().amax())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub t_end: f64,
    pub dt: f64,
    pub drift_tol: f64,
    pub renormalize_j: bool,
    pub record_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            t_end: 10.0,
            dt: 1e-3,
            drift_tol: tol::DRIFT,
            renormalize_j: false,
            record_every: 100,
        }
    }
}

impl IntegratorConfig {
    pub fn new(t_end: f64, dt: f64) -> Self {
        Self {
            t_end,
            dt,
            ..Self::default()
        }
    }

    pub fn validate(&self, t_start: f64) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(ScfError::InvalidParameter {
                name: "dt",
                value: self.dt,
            });
        }
        if !(self.dt < self.t_end - t_start) {
            return Err(ScfError::InvalidParameter {
                name: "t_end",
                value: self.t_end,
            });
        }
        if !(self.drift_tol > 0.0) {
            return Err(ScfError::InvalidParameter {
                name: "drift_tol",
                value: self.drift_tol,
            });
        }
        if self.record_every == 0 {
            return Err(ScfError::InvalidParameter {
                name: "record_every",
                value: 0.0,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowDiagnostics {
    pub drift_jsq: f64,
    pub drift_compat: f64,
    pub drift_closed: f64,
    pub min_eig_g: f64,
    pub norm_n_sq: f64,
    pub norm_r_sq: f64,
    pub conserved: Vec<(String, f64)>,
}

impl FlowDiagnostics {
    pub fn max_drift(&self) -> f64 {
        self.drift_jsq.max(self.drift_compat).max(self.drift_closed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    ReachedEnd,
    DriftExceeded,
    MetricDegenerated,
    /// A state component exceeded the blow-up bound.
    Diverged,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::ReachedEnd => "reached_t_end",
            Termination::DriftExceeded => "drift_exceeded",
            Termination::MetricDegenerated => "metric_degenerated",
            Termination::Diverged => "diverged",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub records: Vec<(FlowState, FlowDiagnostics)>,
    pub termination: Termination,
    pub steps: usize,
    /// Largest drifts seen over every accepted step, recorded or not.
    pub max_drift_jsq: f64,
    pub max_drift_compat: f64,
    pub max_drift_closed: f64,
}

impl Trajectory {
    pub fn last(&self) -> &(FlowState, FlowDiagnostics) {
        self.records.last().expect("trajectory always holds the initial state")
    }

    pub fn states(&self) -> impl Iterator<Item = &FlowState> {
        self.records.iter().map(|(s, _)| s)
    }
}

/// Time derivatives `(∂ω/∂t, ∂J/∂t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowRhs {
    pub omega: TwoForm,
    pub j: Endomorphism,
}

pub fn scf_rhs(algebra: &LieAlgebra, omega: &TwoForm, j: &Endomorphism) -> Result<FlowRhs> {
    let geo = Geometry::compute(algebra, omega, j).map_err(degenerate)?;
    Ok(rhs_from_geometry(&geo, j))
}

fn rhs_from_geometry(geo: &Geometry, j: &Endomorphism) -> FlowRhs {
    let p = &geo.chern_ricci;
    let p_anti = anti_invariant_part(p, j);
    let raised = raise(&geo.metric, &p_anti).expect("dimensions agree");
    let comm = commutator_anti_part(&geo.ricci_endomorphism, j);
    FlowRhs {
        omega: p * -2.0,
        j: Endomorphism(raised.matrix() * -2.0 + comm.matrix()),
    }
}

fn degenerate(e: ScfError) -> ScfError {
    match e {
        ScfError::IncompatiblePair { min_eigenvalue } => ScfError::DegenerateMetric { min_eigenvalue },
        other => other,
    }
}

/// `∂g/∂t = −Ric + Ric(J·,J·)`, valid when the Chern–Ricci form vanishes.
pub fn metric_rhs_flat_case(
    algebra: &LieAlgebra,
    omega: &TwoForm,
    j: &Endomorphism,
) -> Result<DMatrix<f64>> {
    let geo = Geometry::compute(algebra, omega, j).map_err(degenerate)?;
    let p = geo.chern_ricci.max_abs();
    if p > tol::STRUCTURE {
        return Err(ScfError::NotChernRicciFlat { max: p });
    }
    let jm = j.matrix();
    let ric = &geo.ricci.form;
    Ok(-ric + jm.transpose() * ric * jm)
}

/// `2 g⁻¹ Ric^{(2,0)+(0,2)}` and `J [Rc, J]`; equal for any almost Hermitian
/// structure.
pub fn ricci_anti_identity_sides(geo: &Geometry, j: &Endomorphism) -> (DMatrix<f64>, DMatrix<f64>) {
    let anti = anti_invariant_part_bilinear(&geo.ricci.form, j);
    let lhs = crate::structure::raise_bilinear(&geo.metric, &anti).0 * 2.0;
    let rhs = j.matrix() * commutator_anti_part(&geo.ricci_endomorphism, j).0;
    (lhs, rhs)
}

fn axpy(state: &FlowState, h: f64, k: &FlowRhs) -> FlowState {
    FlowState {
        t: state.t + h,
        omega: &state.omega + &(&k.omega * h),
        j: Endomorphism(state.j.matrix() + k.j.matrix() * h),
    }
}

/// One classical RK4 step applied jointly to `(ω, J)`.
pub fn step_rk4(
    algebra: &LieAlgebra,
    state: &FlowState,
    dt: f64,
    renormalize_j: bool,
) -> Result<FlowState> {
    if !(dt > 0.0) {
        return Err(ScfError::InvalidParameter {
            name: "dt",
            value: dt,
        });
    }
    let f = |s: &FlowState| scf_rhs(algebra, &s.omega, &s.j);
    let k1 = f(state)?;
    let k2 = f(&axpy(state, dt / 2.0, &k1))?;
    let k3 = f(&axpy(state, dt / 2.0, &k2))?;
    let k4 = f(&axpy(state, dt, &k3))?;
    let w = dt / 6.0;
    let omega_inc = (k1.omega.matrix() + (k2.omega.matrix() + k3.omega.matrix()) * 2.0
        + k4.omega.matrix())
        * w;
    let j_inc = (k1.j.matrix() + (k2.j.matrix() + k3.j.matrix()) * 2.0 + k4.j.matrix()) * w;
    let mut j = Endomorphism(state.j.matrix() + j_inc);
    if renormalize_j {
        j = renormalize_complex_structure(&j)?;
    }
    Ok(FlowState {
        t: state.t + dt,
        omega: TwoForm::antisymmetrize(state.omega.matrix() + omega_inc),
        j,
    })
}

struct Drift {
    jsq: f64,
    compat: f64,
    closed: f64,
    min_eig: f64,
}

fn drift(algebra: &LieAlgebra, state: &FlowState) -> Drift {
    let jm = state.j.matrix();
    let om = state.omega.matrix();
    let raw = om * jm;
    Drift {
        jsq: state.j.square_defect(),
        compat: (jm.transpose() * om * jm - om).amax(),
        closed: algebra
            .ce_d2(&state.omega)
            .map(|d| d.max_abs())
            .unwrap_or(f64::INFINITY),
        min_eig: min_symmetric_eigenvalue(&((&raw + raw.transpose()) * 0.5)),
    }
}

/// Diagnostics for a single state; conserved quantities come from `entry`
/// when given and the state lies in its family.
pub fn diagnostics(
    algebra: &LieAlgebra,
    state: &FlowState,
    entry: Option<&CatalogEntry>,
    family_tol: f64,
) -> Result<FlowDiagnostics> {
    let d = drift(algebra, state);
    let geo = Geometry::compute(algebra, &state.omega, &state.j).map_err(degenerate)?;
    let conserved = match entry {
        Some(e) => e.conserved(state, family_tol).unwrap_or_default(),
        None => Vec::new(),
    };
    Ok(FlowDiagnostics {
        drift_jsq: d.jsq,
        drift_compat: d.compat,
        drift_closed: d.closed,
        min_eig_g: d.min_eig,
        norm_n_sq: norm_nijenhuis(&geo.metric, &nijenhuis(algebra, &state.j)),
        norm_r_sq: norm_riemann(&geo.metric, &geo.riemann),
        conserved,
    })
}

/// Conserved quantities of a catalog family evaluated at `state`.
pub fn conserved_report(
    entry: &CatalogEntry,
    state: &FlowState,
    family_tol: f64,
) -> Result<Vec<(String, f64)>> {
    entry.conserved(state, family_tol)
}

pub fn integrate(
    algebra: &LieAlgebra,
    initial: &FlowState,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    run(algebra, initial, cfg, None)
}

/// Integrate a catalog entry from its initial structure, reporting the
/// entry's conserved quantities at every recorded state.
pub fn integrate_entry(entry: &CatalogEntry, cfg: &IntegratorConfig) -> Result<Trajectory> {
    run(entry.algebra(), &entry.initial_state(), cfg, Some(entry))
}

fn run(
    algebra: &LieAlgebra,
    initial: &FlowState,
    cfg: &IntegratorConfig,
    entry: Option<&CatalogEntry>,
) -> Result<Trajectory> {
    cfg.validate(initial.t)?;
    let span = cfg.t_end - initial.t;
    let n_steps = ((span / cfg.dt) - 1e-9).ceil().max(1.0) as usize;
    let h = span / n_steps as f64;
    let family_tol = cfg.drift_tol.max(tol::STRUCTURE);

    let record = |s: &FlowState| diagnostics(algebra, s, entry, family_tol);
    let mut traj = Trajectory {
        records: Vec::new(),
        termination: Termination::ReachedEnd,
        steps: 0,
        max_drift_jsq: 0.0,
        max_drift_compat: 0.0,
        max_drift_closed: 0.0,
    };

    let d0 = drift(algebra, initial);
    traj.max_drift_jsq = d0.jsq;
    traj.max_drift_compat = d0.compat;
    traj.max_drift_closed = d0.closed;
    match record(initial) {
        Ok(diag) => traj.records.push((initial.clone(), diag)),
        Err(_) => {
            traj.records.push((initial.clone(), empty_diagnostics(&d0)));
            traj.termination = Termination::MetricDegenerated;
            return Ok(traj);
        }
    }
    if d0.jsq.max(d0.compat).max(d0.closed) > cfg.drift_tol {
        traj.termination = Termination::DriftExceeded;
        return Ok(traj);
    }

    let mut state = initial.clone();
    for step in 1..=n_steps {
        let next = match step_rk4(algebra, &state, h, cfg.renormalize_j) {
            Ok(s) => s,
            Err(_) => {
                traj.termination = Termination::MetricDegenerated;
                break;
            }
        };
        // land exactly on t_end
        let next = if step == n_steps {
            FlowState { t: cfg.t_end, ..next }
        } else {
            next
        };
        traj.steps = step;
        let d = drift(algebra, &next);
        traj.max_drift_jsq = traj.max_drift_jsq.max(d.jsq);
        traj.max_drift_compat = traj.max_drift_compat.max(d.compat);
        traj.max_drift_closed = traj.max_drift_closed.max(d.closed);

        let stop = if !next.max_component().is_finite() || next.max_component() > tol::BLOWUP {
            Some(Termination::Diverged)
        } else if !(d.min_eig >= tol::MIN_EIGENVALUE) {
            Some(Termination::MetricDegenerated)
        } else if d.jsq.max(d.compat).max(d.closed) > cfg.drift_tol {
            Some(Termination::DriftExceeded)
        } else {
            None
        };

        let last = stop.is_some() || step == n_steps;
        if last || step % cfg.record_every == 0 {
            let diag = record(&next).unwrap_or_else(|_| empty_diagnostics(&d));
            traj.records.push((next.clone(), diag));
        }
        if let Some(reason) = stop {
            traj.termination = reason;
            break;
        }
        state = next;
    }
    Ok(traj)
}

fn empty_diagnostics(d: &Drift) -> FlowDiagnostics {
    FlowDiagnostics {
        drift_jsq: d.jsq,
        drift_compat: d.compat,
        drift_closed: d.closed,
        min_eig_g: d.min_eig,
        norm_n_sq: f64::NAN,
        norm_r_sq: f64::NAN,
        conserved: Vec::new(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StaticBehaviour {
    Expand,
    Static,
    Collapse,
}

impl StaticBehaviour {
    pub fn as_str(&self) -> &'static str {
        match self {
            StaticBehaviour::Expand => "expand",
            StaticBehaviour::Static => "static",
            StaticBehaviour::Collapse => "collapse",
        }
    }
}

/// Scaling law of the homogeneous static solution: `ω(t) = (1 + λt) ω(0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StaticPrediction {
    pub n: u32,
    pub lambda: f64,
    pub scale: f64,
    pub behaviour: StaticBehaviour,
    /// `t* = −1/λ` when the structure collapses.
    pub extinction_time: Option<f64>,
}

/// `λ = π(2 − n)/2`; the symplectic form scales as `(1 + λt)·ω₀`.
pub fn static_flow_predictor(n: u32, omega0_scale: f64, t: f64) -> Result<StaticPrediction> {
    if n == 0 {
        return Err(ScfError::InvalidParameter {
            name: "n",
            value: 0.0,
        });
    }
    let lambda = PI * (2.0 - n as f64) / 2.0;
    let behaviour = match n {
        1 => StaticBehaviour::Expand,
        2 => StaticBehaviour::Static,
        _ => StaticBehaviour::Collapse,
    };
    Ok(StaticPrediction {
        n,
        lambda,
        scale: (1.0 + lambda * t) * omega0_scale,
        behaviour,
        extinction_time: (n > 2).then(|| -1.0 / lambda),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn abelian_flow_is_stationary() {
        let l = LieAlgebra::abelian(4);
        let entry = catalog::kodaira_thurston(1.0, 1.0).unwrap();
        let s0 = FlowState::new(0.0, entry.initial().omega().clone(), entry.initial().j().clone());
        let rhs = scf_rhs(&l, &s0.omega, &s0.j).unwrap();
        assert_eq!(rhs.omega.max_abs(), 0.0);
        assert_eq!(rhs.j.matrix().amax(), 0.0);
        let s1 = step_rk4(&l, &s0, 0.01, false).unwrap();
        assert_eq!(s1.omega, s0.omega);
        assert_eq!(s1.j, s0.j);
        assert_eq!(s1.t, 0.01);
    }

    #[test]
    fn kt_rhs_rates() {
        for (a, b) in [(1.0, 1.0), (1.3, 0.7)] {
            let e = catalog::kodaira_thurston(a, b).unwrap();
            let s = e.initial();
            let rhs = scf_rhs(e.algebra(), s.omega(), s.j()).unwrap();
            assert!(rhs.omega.max_abs() < 1e-14);
            // α = −J[1][3] and β = J[2][4] (1-based)
            let da = -rhs.j.matrix()[(0, 2)];
            let db = rhs.j.matrix()[(1, 3)];
            assert!((da + a.powi(3) * b).abs() < 1e-13);
            assert!((db + 0.5 * a * a * b * b).abs() < 1e-13);
        }
    }

    #[test]
    fn n4_rhs_at_t0() {
        let e = catalog::n4_entry();
        let s = e.initial();
        let rhs = scf_rhs(e.algebra(), s.omega(), s.j()).unwrap();
        let expected_omega = TwoForm::wedge(4, 1, 2);
        assert!((rhs.omega.matrix() - expected_omega.matrix() * 2.0).amax() < 1e-13);
        // derivative of the closed-form solution at y = 1, y'(0) = 1/2
        let expected_j = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, -1.0, 0.5, 0.0, //
                1.0, 0.0, 0.0, 1.5, //
                0.5, 0.0, 0.0, 1.0, //
                0.0, 1.5, -1.0, 0.0,
            ],
        );
        assert!((rhs.j.matrix() - expected_j).amax() < 1e-13);
    }

    #[test]
    fn flat_case_metric_rhs() {
        let (a, b) = (1.3, 0.7);
        let e = catalog::kodaira_thurston(a, b).unwrap();
        let s = e.initial();
        let dg = metric_rhs_flat_case(e.algebra(), s.omega(), s.j()).unwrap();
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            2.0 * a * b,
            a * a,
            -2.0 * a.powi(3) * b,
            -a * a * b * b,
        ])) * 0.5;
        assert!((dg - expected).amax() < 1e-13);

        let n4 = catalog::n4_entry();
        let err = metric_rhs_flat_case(n4.algebra(), n4.initial().omega(), n4.initial().j())
            .unwrap_err();
        assert!(matches!(err, ScfError::NotChernRicciFlat { .. }));

        // J-invariant Ricci (flat abelian) gives zero
        let dg0 = metric_rhs_flat_case(&LieAlgebra::abelian(4), s.omega(), s.j()).unwrap();
        assert_eq!(dg0.amax(), 0.0);
    }

    #[test]
    fn kt_single_step_accuracy() {
        let e = catalog::kodaira_thurston(1.0, 1.0).unwrap();
        let dt = 1e-3;
        let s1 = step_rk4(e.algebra(), &e.initial_state(), dt, false).unwrap();
        let alpha = -s1.j.matrix()[(0, 2)];
        let exact = (1.0_f64 + 2.5 * dt).powf(-0.4);
        // local error of RK4 is O(dt⁵)
        assert!((alpha - exact).abs() < 1e-14, "{}", (alpha - exact).abs());
    }

    #[test]
    fn n4_one_step_error_ratio() {
        let e = catalog::n4_entry();
        let err = |dt: f64| {
            let s = step_rk4(e.algebra(), &e.initial_state(), dt, false).unwrap();
            let exact = e.analytic(dt).unwrap();
            (s.j.matrix() - exact.j.matrix())
                .amax()
                .max((s.omega.matrix() - exact.omega.matrix()).amax())
        };
        let ratio = err(0.04) / err(0.02);
        // one-step error is O(dt⁵) → ratio 32; over a fixed horizon the
        // global error ratio would be 16
        assert!(ratio > 24.0 && ratio < 40.0, "ratio {ratio}");
    }

    #[test]
    fn config_validation() {
        let e = catalog::kodaira_thurston(1.0, 1.0).unwrap();
        let bad = IntegratorConfig::new(1.0, 1.0);
        assert!(integrate_entry(&e, &bad).is_err());
        let bad = IntegratorConfig::new(1.0, -0.1);
        assert!(integrate_entry(&e, &bad).is_err());
        let bad = IntegratorConfig {
            record_every: 0,
            ..IntegratorConfig::new(1.0, 0.1)
        };
        assert!(integrate_entry(&e, &bad).is_err());
        assert!(step_rk4(e.algebra(), &e.initial_state(), 0.0, false).is_err());
    }

    #[test]
    fn trajectory_bookkeeping() {
        let e = catalog::kodaira_thurston(1.0, 1.0).unwrap();
        let cfg = IntegratorConfig {
            record_every: 3,
            ..IntegratorConfig::new(0.1, 0.01)
        };
        let traj = integrate_entry(&e, &cfg).unwrap();
        assert_eq!(traj.termination, Termination::ReachedEnd);
        assert_eq!(traj.steps, 10);
        let ts: Vec<f64> = traj.states().map(|s| s.t).collect();
        assert_eq!(ts.len(), 5); // 0, 3, 6, 9, 10
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*ts.last().unwrap(), 0.1);
        assert_eq!(traj.last().1.conserved.len(), 1);
    }

    #[test]
    fn drift_violation_terminates() {
        let e = catalog::kodaira_thurston(1.0, 1.0).unwrap();
        let mut s0 = e.initial_state();
        s0.j.0[(0, 2)] += 1e-3;
        let traj = integrate(e.algebra(), &s0, &IntegratorConfig::new(1.0, 0.01)).unwrap();
        assert_eq!(traj.termination, Termination::DriftExceeded);
        assert_eq!(traj.records.len(), 1);
    }

    #[test]
    fn renormalization_keeps_j_complex() {
        let e = catalog::n4_entry();
        let cfg = IntegratorConfig {
            renormalize_j: true,
            ..IntegratorConfig::new(1.0, 0.01)
        };
        let traj = integrate_entry(&e, &cfg).unwrap();
        assert_eq!(traj.termination, Termination::ReachedEnd);
        assert!(traj.max_drift_jsq < 1e-12);
    }

    #[test]
    fn static_predictor() {
        let p1 = static_flow_predictor(1, 1.0, 1.0).unwrap();
        assert_eq!(p1.lambda, PI / 2.0);
        assert_eq!(p1.scale, 1.0 + PI / 2.0);
        assert_eq!(p1.behaviour, StaticBehaviour::Expand);
        assert_eq!(p1.extinction_time, None);
        for t in [0.0, 1.0, 100.0] {
            let p2 = static_flow_predictor(2, 3.0, t).unwrap();
            assert_eq!(p2.lambda, 0.0);
            assert_eq!(p2.scale, 3.0);
            assert_eq!(p2.behaviour, StaticBehaviour::Static);
        }
        let p3 = static_flow_predictor(3, 1.0, 0.0).unwrap();
        assert_eq!(p3.lambda, -PI / 2.0);
        assert!((p3.extinction_time.unwrap() - 2.0 / PI).abs() < 1e-15);
        let p5 = static_flow_predictor(5, 1.0, 0.0).unwrap();
        assert!((p5.extinction_time.unwrap() - 0.212_206_590_789_193_8).abs() < 1e-15);
        let at_extinction = static_flow_predictor(3, 1.0, 2.0 / PI).unwrap();
        assert!(at_extinction.scale.abs() < 1e-15);
        assert!(static_flow_predictor(0, 1.0, 0.0).is_err());
    }
}
