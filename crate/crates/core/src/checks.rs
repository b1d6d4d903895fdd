//! Invariant suite run against a single almost Kähler structure.

use nalgebra::DMatrix;

use crate::curvature::{chern_ricci_adjoint, nijenhuis, Geometry};
use crate::flow::{integrate, metric_rhs_flat_case, ricci_anti_identity_sides, FlowState, IntegratorConfig, Termination};
use crate::lie::LieAlgebra;
use crate::random;
use crate::structure::{anti_invariant_part, metric_of, AlmostKahler, Endomorphism};
use crate::sweep;
use crate::tol;

#[derive(Clone, Debug, PartialEq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped(&'static str),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub group: &'static str,
    pub name: &'static str,
    pub value: f64,
    pub tol: f64,
    pub status: CheckStatus,
}

impl CheckOutcome {
    fn bound(group: &'static str, name: &'static str, value: f64, tol: f64) -> Self {
        let status = if value <= tol {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        Self {
            group,
            name,
            value,
            tol,
            status,
        }
    }

    fn skipped(group: &'static str, name: &'static str, reason: &'static str) -> Self {
        Self {
            group,
            name,
            value: f64::NAN,
            tol: f64::NAN,
            status: CheckStatus::Skipped(reason),
        }
    }

    pub fn failed(&self) -> bool {
        self.status == CheckStatus::Fail
    }
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub seed: u64,
    pub draws: usize,
    pub flow_t_end: f64,
    pub flow_dt: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            draws: 100,
            flow_t_end: 5.0,
            flow_dt: 1e-3,
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Group {
    Lie,
    Structure,
    Curvature,
    Flow,
}

/// Run every invariant; groups run concurrently and each draws from its own
/// seeded stream, so results do not depend on scheduling.
pub fn run_suite(ak: &AlmostKahler, opts: &CheckOptions) -> Vec<CheckOutcome> {
    let groups = [Group::Lie, Group::Structure, Group::Curvature, Group::Flow];
    sweep::map(&groups, |g| {
        let seed = opts.seed.wrapping_add(*g as u64);
        match g {
            Group::Lie => lie_checks(ak.algebra(), seed, opts.draws),
            Group::Structure => structure_checks(ak, seed, opts.draws),
            Group::Curvature => curvature_checks(ak, seed, opts.draws),
            Group::Flow => flow_checks(ak, opts),
        }
    })
    .into_iter()
    .flatten()
    .collect()
}

fn lie_checks(l: &LieAlgebra, seed: u64, draws: usize) -> Vec<CheckOutcome> {
    let mut rng = random::seeded(seed);
    let n = l.dim();
    let cmax = l.constants().iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1.0);
    let mut out = vec![CheckOutcome::bound("lie", "jacobi", l.jacobi_defect(), tol::JACOBI)];

    let mut d_sq = 0.0f64;
    let mut ad_hom = 0.0f64;
    for _ in 0..draws {
        let theta = random::one_form(&mut rng, n);
        let dd = l.ce_d2(&l.ce_d1(&theta).expect("dim")).expect("dim");
        d_sq = d_sq.max(dd.max_abs());
        let x = random::vector(&mut rng, n);
        let y = random::vector(&mut rng, n);
        let xy = l.bracket(&x, &y).expect("dim");
        let (ax, ay) = (l.ad(&x).expect("dim"), l.ad(&y).expect("dim"));
        let lhs = l.ad(&xy).expect("dim");
        ad_hom = ad_hom.max((lhs - (&ax * &ay - &ay * &ax)).amax());
    }
    out.push(CheckOutcome::bound("lie", "d_squared", d_sq, 1e-13 * cmax * cmax));
    out.push(CheckOutcome::bound("lie", "ad_homomorphism", ad_hom, tol::JACOBI * cmax * cmax));

    match l.nilpotency_step() {
        Some(s) => {
            let mut nested = 0.0f64;
            for _ in 0..draws {
                let mut v = random::vector(&mut rng, n);
                for _ in 0..s {
                    v = l.bracket(&random::vector(&mut rng, n), &v).expect("dim");
                }
                nested = nested.max(v.amax());
            }
            out.push(CheckOutcome::bound("lie", "nilpotent_nested_brackets", nested, tol::JACOBI));
        }
        None => out.push(CheckOutcome::skipped(
            "lie",
            "nilpotent_nested_brackets",
            "algebra is not nilpotent",
        )),
    }
    out
}

fn structure_checks(ak: &AlmostKahler, seed: u64, draws: usize) -> Vec<CheckOutcome> {
    let mut rng = random::seeded(seed);
    let n = ak.algebra().dim();
    let j = ak.j();
    let r = ak.check(tol::STRUCTURE);
    let mut out = vec![
        CheckOutcome::bound("structure", "j_squared", r.j_squared, tol::STRUCTURE),
        CheckOutcome::bound("structure", "compatibility", r.compatibility, tol::STRUCTURE),
        CheckOutcome::bound("structure", "closedness", r.closedness, tol::STRUCTURE),
        CheckOutcome::bound("structure", "metric_symmetry", r.metric_asymmetry, 1e-13),
        CheckOutcome::bound("structure", "metric_positive", -r.min_eig_g, -tol::MIN_EIGENVALUE),
    ];

    let jm = j.matrix();
    let mut anti = 0.0f64;
    let mut split = 0.0f64;
    let mut comm = 0.0f64;
    for _ in 0..draws {
        let b = random::two_form(&mut rng, n);
        let ba = anti_invariant_part(&b, j);
        anti = anti.max((jm.transpose() * ba.matrix() * jm + ba.matrix()).amax());
        let bi = &b - &ba;
        split = split.max((jm.transpose() * bi.matrix() * jm - bi.matrix()).amax());
        let s = random::matrix(&mut rng, n);
        let c = crate::structure::commutator_anti_part(&Endomorphism(s), j);
        comm = comm.max((jm * c.matrix() + c.matrix() * jm).amax());
    }
    out.push(CheckOutcome::bound("structure", "anti_invariant_part", anti, tol::ALGEBRA));
    out.push(CheckOutcome::bound("structure", "invariant_part", split, tol::ALGEBRA));
    out.push(CheckOutcome::bound("structure", "commutator_anticommutes", comm, tol::ALGEBRA));
    out
}

fn curvature_checks(ak: &AlmostKahler, seed: u64, draws: usize) -> Vec<CheckOutcome> {
    let mut rng = random::seeded(seed);
    let l = ak.algebra();
    let n = l.dim();
    let j = ak.j();
    let geo = match Geometry::compute(l, ak.omega(), j) {
        Ok(g) => g,
        Err(_) => {
            return vec![CheckOutcome::bound("curvature", "geometry", f64::INFINITY, 0.0)];
        }
    };
    let mut out = vec![
        CheckOutcome::bound(
            "curvature",
            "levi_civita_metric",
            geo.connection.metric_compatibility_defect(&geo.metric),
            tol::STRUCTURE,
        ),
        CheckOutcome::bound("curvature", "levi_civita_torsion", geo.connection.torsion_defect(l), tol::STRUCTURE),
        CheckOutcome::bound("curvature", "ricci_symmetry", geo.ricci.asymmetry, 1e-9),
    ];
    let p = &geo.chern_ricci;
    let p_adj = chern_ricci_adjoint(l, j);
    out.push(CheckOutcome::bound(
        "curvature",
        "chern_ricci_trace_vs_adjoint",
        (p.matrix() - p_adj.matrix()).amax(),
        1e-11,
    ));
    out.push(CheckOutcome::bound(
        "curvature",
        "chern_ricci_closed",
        l.ce_d2(p).map(|d| d.max_abs()).unwrap_or(f64::INFINITY),
        tol::STRUCTURE,
    ));
    match l.nilpotency_step() {
        Some(s) if s <= 2 => out.push(CheckOutcome::bound(
            "curvature",
            "chern_ricci_two_step",
            p.max_abs(),
            tol::JACOBI,
        )),
        _ => out.push(CheckOutcome::skipped(
            "curvature",
            "chern_ricci_two_step",
            "algebra is not 2-step nilpotent",
        )),
    }
    let (lhs, rhs) = ricci_anti_identity_sides(&geo, j);
    out.push(CheckOutcome::bound("curvature", "ricci_anti_identity", (lhs - rhs).amax(), tol::STRUCTURE));

    let nt = nijenhuis(l, j);
    let mut diag = 0.0f64;
    let mut jlin = 0.0f64;
    for _ in 0..draws {
        let x = random::vector(&mut rng, n);
        let y = random::vector(&mut rng, n);
        diag = diag.max(nt.apply(&x, &x).amax());
        let lhs = nt.apply(&j.apply(&x), &y);
        let rhs = -(j.matrix() * nt.apply(&x, &y));
        jlin = jlin.max((lhs - rhs).amax());
    }
    out.push(CheckOutcome::bound("curvature", "nijenhuis_alternating", diag, 0.0));
    out.push(CheckOutcome::bound("curvature", "nijenhuis_j_antilinear", jlin, tol::STRUCTURE));
    out
}

fn flow_checks(ak: &AlmostKahler, opts: &CheckOptions) -> Vec<CheckOutcome> {
    let l = ak.algebra();
    let s0 = FlowState::new(0.0, ak.omega().clone(), ak.j().clone());
    let cfg = IntegratorConfig {
        drift_tol: 1e-7,
        record_every: usize::MAX,
        ..IntegratorConfig::new(opts.flow_t_end, opts.flow_dt)
    };
    let mut out = Vec::new();
    match integrate(l, &s0, &cfg) {
        Ok(traj) => {
            let drift = traj.max_drift_jsq.max(traj.max_drift_compat);
            let reached = traj.termination == Termination::ReachedEnd;
            out.push(CheckOutcome::bound(
                "flow",
                "constraint_drift",
                if reached || traj.termination == Termination::DriftExceeded {
                    drift
                } else {
                    f64::INFINITY
                },
                1e-7,
            ));
            out.push(CheckOutcome::bound("flow", "omega_closed_along_flow", traj.max_drift_closed, 1e-9));
        }
        Err(_) => out.push(CheckOutcome::bound("flow", "constraint_drift", f64::INFINITY, 1e-7)),
    }
    out.push(flat_case_check(l, &s0));
    out
}

/// Five-point central difference of `g(t)` against the reduced metric
/// equation, where the Chern–Ricci form vanishes.
fn flat_case_check(l: &LieAlgebra, s0: &FlowState) -> CheckOutcome {
    const NAME: &str = "flat_case_metric_equation";
    if metric_rhs_flat_case(l, &s0.omega, &s0.j).is_err() {
        return CheckOutcome::skipped("flow", NAME, "chern-ricci form is nonzero");
    }
    let h = 1e-3;
    let mut states = vec![s0.clone()];
    for _ in 0..4 {
        match crate::flow::step_rk4(l, states.last().expect("nonempty"), h, false) {
            Ok(s) => states.push(s),
            Err(_) => return CheckOutcome::bound("flow", NAME, f64::INFINITY, 0.0),
        }
    }
    let mut g = Vec::with_capacity(5);
    for s in &states {
        match metric_of(&s.omega, &s.j) {
            Ok(m) => g.push(m.matrix().clone()),
            Err(_) => return CheckOutcome::bound("flow", NAME, f64::INFINITY, 0.0),
        }
    }
    let fd: DMatrix<f64> = (&g[0] - &g[1] * 8.0 + &g[3] * 8.0 - &g[4]) / (12.0 * h);
    match metric_rhs_flat_case(l, &states[2].omega, &states[2].j) {
        Ok(r) => {
            let scale = r.amax().max(1.0);
            CheckOutcome::bound("flow", NAME, (fd - r).amax() / scale, 1e-7)
        }
        Err(_) => CheckOutcome::bound("flow", NAME, f64::INFINITY, 0.0),
    }
}
