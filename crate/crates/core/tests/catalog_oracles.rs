use nalgebra::{DMatrix, DVector};
use scflab::catalog::{self, heisenberg_sum, kodaira_thurston, n4_entry, N4FamilyParams};
use scflab::curvature::{chern_ricci_adjoint, Geometry};
use scflab::flow::{diagnostics, metric_rhs_flat_case, scf_rhs};
use scflab::structure::{anti_invariant_part, commutator_anti_part, metric_of};
use scflab::{LieAlgebra, TwoForm};

fn diag(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_row_slice(v))
}

fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
    (a - b).amax() <= tol
}

#[test]
fn kt_analytic_at_exact_power() {
    let e = kodaira_thurston(1.0, 1.0).unwrap();
    let s = e.analytic(62.0 / 5.0).unwrap();
    assert!((-s.j.matrix()[(0, 2)] - 0.25).abs() < 1e-15);
    assert!((s.j.matrix()[(1, 3)] - 0.5).abs() < 1e-15);
    let d = diagnostics(e.algebra(), &e.initial_state(), None, 1e-10).unwrap();
    assert!((d.norm_n_sq - 8.0).abs() < 1e-13);
    assert!((d.norm_r_sq - 2.75).abs() < 1e-13);
}

#[test]
fn heisenberg_sum_easy_case_at_quarter() {
    let e = heisenberg_sum(1.0, 1.0, 1.0).unwrap();
    let s = e.analytic(1.5).unwrap();
    let m = s.j.matrix();
    assert!((-m[(0, 4)] - 0.5).abs() < 1e-15);
    assert!((-m[(1, 3)] - 1.0).abs() < 1e-15);
    assert!((-m[(2, 5)] - 0.5).abs() < 1e-15);
    assert!(heisenberg_sum(1.0, 2.0, 3.0).unwrap().analytic(1.0).is_none());
}

#[test]
fn heisenberg_sum_curvature() {
    for (a, b, g) in [(1.0, 1.0, 1.0), (1.3, 0.7, 2.1), (0.5, 2.0, 0.9)] {
        let e = heisenberg_sum(a, b, g).unwrap();
        let init = e.initial();
        let geo = Geometry::compute(init.algebra(), init.omega(), init.j()).unwrap();
        let ric = diag(&[-a * b, -a * a, -g / b, -g * g, a.powi(3) * b, g.powi(3) / b]) * 0.5;
        assert!(close(&geo.ricci.form, &ric, 1e-13));
        let d = diagnostics(init.algebra(), &e.initial_state(), None, 1e-10).unwrap();
        let n = 8.0 * (a * a * b + g * g / b);
        let r = 11.0 / 4.0 * (a.powi(4) * b * b + g.powi(4) / (b * b));
        assert!(((d.norm_n_sq - n) / n).abs() < 1e-12);
        assert!(((d.norm_r_sq - r) / r).abs() < 1e-12);
        let dg = metric_rhs_flat_case(init.algebra(), init.omega(), init.j()).unwrap();
        // g = diag(α⁻¹, β⁻¹, γ⁻¹, β, α, γ), so the last two entries are
        // ∂α = −α³β and ∂γ = −γ³β⁻¹
        let expected = diag(&[
            2.0 * a * b,
            -g * g / (b * b) + a * a,
            2.0 * g / b,
            -a * a * b * b + g * g,
            -2.0 * a.powi(3) * b,
            -2.0 * g.powi(3) / b,
        ]) * 0.5;
        assert!(close(&dg, &expected, 1e-13));
        assert!(geo.chern_ricci.max_abs() < 1e-14);
    }
}

#[test]
fn n4_t0_curvature() {
    let e = n4_entry();
    let init = e.initial();
    let geo = Geometry::compute(init.algebra(), init.omega(), init.j()).unwrap();
    assert!(close(geo.metric.matrix(), &DMatrix::identity(4, 4), 0.0));
    assert!(close(geo.ricci_endomorphism.matrix(), &diag(&[-0.5, -1.0, 0.0, 0.5]), 1e-15));
    let p = &TwoForm::wedge(4, 1, 2) * -1.0;
    assert!(close(geo.chern_ricci.matrix(), p.matrix(), 1e-15));
    let comm = commutator_anti_part(&geo.ricci_endomorphism, init.j());
    let mut expected = DMatrix::zeros(4, 4);
    expected[(0, 2)] = 0.5;
    expected[(2, 0)] = 0.5;
    expected[(1, 3)] = 1.5;
    expected[(3, 1)] = 1.5;
    assert!(close(comm.matrix(), &expected, 1e-15));
    let anti = anti_invariant_part(&geo.chern_ricci, init.j());
    let expected = &(&TwoForm::wedge(4, 1, 2) * -0.5) + &(&TwoForm::wedge(4, 3, 4) * 0.5);
    assert!(close(anti.matrix(), expected.matrix(), 1e-15));
    let d = diagnostics(init.algebra(), &e.initial_state(), None, 1e-10).unwrap();
    assert!((d.norm_n_sq - 16.0).abs() < 1e-13);
    assert!((d.norm_r_sq - 5.0).abs() < 1e-13);
}

#[test]
fn n4_primitive_of_chern_ricci_form() {
    let e = n4_entry();
    let l = e.algebra();
    let p = chern_ricci_adjoint(l, e.initial().j());
    let theta = l.exact_primitive(&p).unwrap().expect("P is exact");
    let dtheta = l.ce_d1(&theta).unwrap();
    assert!(close(dtheta.matrix(), p.matrix(), 1e-14));
    // d e³ = −e¹∧e², and e¹, e² are closed, so the primitive is e³ modulo closed 1-forms
    assert!((theta.components()[2] - 1.0).abs() < 1e-14);
    assert!(theta.components()[3].abs() < 1e-14);
}

#[test]
fn n4_metric_along_closed_form() {
    for y in [1.0, 1.5, 2.0, 26f64.powf(0.2)] {
        let p = N4FamilyParams::analytic(y);
        let g = metric_of(&p.omega(), &p.j()).unwrap();
        let m = g.matrix();
        let gamma = p.gamma();
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                p.b + gamma * p.a, 0.0, 0.0, -p.a, //
                0.0, p.c - gamma * p.ap, -p.ap, 0.0, //
                0.0, -p.ap, -p.bp, 0.0, //
                -p.a, 0.0, 0.0, -p.cp,
            ],
        );
        assert!(close(m, &expected, 1e-13));
        assert!((m[(0, 0)] - (2.0 * y - 2.0 / y + y.powi(-3))).abs() < 1e-13);
        assert!((m[(3, 3)] - y.powi(-3)).abs() < 1e-13);
        for (relation, r) in p.constraint_residuals() {
            assert!(r.abs() < 1e-13, "{relation}: {r}");
        }
    }
}

#[test]
fn n4_gamma_rate_matches_chern_ricci() {
    // d/dt 2(y² − 1) = 2y⁻³ = −2c'
    let e = n4_entry();
    for t in [0.0, 0.7, 3.0] {
        let s = e.analytic(t).unwrap();
        let rhs = scf_rhs(e.algebra(), &s.omega, &s.j).unwrap();
        let y = (1.0 + 2.5 * t).powf(0.2);
        assert!((rhs.omega.coefficient(1, 2) - 2.0 * y.powi(-3)).abs() < 1e-13);
    }
}

#[test]
fn analytic_solutions_satisfy_the_flow() {
    let entries = [
        kodaira_thurston(1.0, 1.0).unwrap(),
        kodaira_thurston(1.4, 0.6).unwrap(),
        heisenberg_sum(1.0, 1.0, 1.0).unwrap(),
        heisenberg_sum(2.0, 0.25, 0.5).unwrap(),
        n4_entry(),
    ];
    let h = 1e-5;
    for e in &entries {
        for k in 0..20 {
            let t = 0.1 + 4.9 * k as f64 / 19.0;
            let lo = e.analytic(t - h).unwrap();
            let hi = e.analytic(t + h).unwrap();
            let s = e.analytic(t).unwrap();
            let rhs = scf_rhs(e.algebra(), &s.omega, &s.j).unwrap();
            let fd_j = (hi.j.matrix() - lo.j.matrix()) / (2.0 * h);
            let fd_w = (hi.omega.matrix() - lo.omega.matrix()) / (2.0 * h);
            let scale = rhs.j.matrix().amax();
            let err = (fd_j - rhs.j.matrix()).amax().max((fd_w - rhs.omega.matrix()).amax()) / scale;
            assert!(err < 1e-6, "{} at t={t}: {err:e}", e.name());
        }
    }
}

#[test]
fn conserved_quantities_along_analytic_solutions() {
    for e in [kodaira_thurston(0.8, 1.7).unwrap(), heisenberg_sum(2.0, 0.25, 0.5).unwrap()] {
        let c0 = e.conserved(&e.initial_state(), 1e-12).unwrap();
        for t in [0.5, 2.0, 5.0] {
            let c = e.conserved(&e.analytic(t).unwrap(), 1e-12).unwrap();
            for ((name, v0), (_, v)) in c0.iter().zip(&c) {
                assert!((v - v0).abs() <= 1e-10 * v0.abs().max(1.0), "{name}");
            }
        }
    }
}

#[test]
fn xi_eta_initial_value() {
    let e = heisenberg_sum(1.0, 2.0, 3.0).unwrap();
    let c = e.conserved(&e.initial_state(), 1e-12).unwrap();
    let l = 2.0 * 3f64.sqrt();
    assert_eq!(c[1].0, "xi-eta");
    assert!((c[1].1 - (1.0 / l - l / 27.0)).abs() < 1e-15);
    assert!((c[0].1 - 12.0).abs() < 1e-14);
}

#[test]
fn betti_numbers_and_steps() {
    let cases: [(LieAlgebra, [usize; 3], Option<usize>); 5] = [
        (LieAlgebra::heisenberg3(), [1, 2, 2], Some(2)),
        (LieAlgebra::heisenberg3_plus_line(), [1, 3, 4], Some(2)),
        (LieAlgebra::n4(), [1, 2, 2], Some(3)),
        (LieAlgebra::heisenberg3_squared(), [1, 4, 8], Some(2)),
        (LieAlgebra::abelian(4), [1, 4, 6], Some(1)),
    ];
    for (l, betti, step) in cases {
        for k in 0..3 {
            assert_eq!(l.ce_betti(k).unwrap(), betti[k]);
        }
        assert_eq!(l.nilpotency_step(), step);
    }
    let steps: Vec<_> = catalog::list_entries()
        .iter()
        .map(|n| catalog::entry_by_name(n, None, None, None).unwrap().algebra().nilpotency_step())
        .collect();
    assert_eq!(steps, [Some(2), Some(2), Some(3)]);
}

#[test]
fn exact_primitive_absent_for_non_exact_form() {
    let l = LieAlgebra::heisenberg3_plus_line();
    // e¹∧e² is the only exact 2-form direction on h₃ ⊕ ℝ
    assert!(l.exact_primitive(&TwoForm::wedge(4, 1, 3)).unwrap().is_none());
    let theta = l.exact_primitive(&TwoForm::wedge(4, 1, 2)).unwrap().unwrap();
    let back = l.ce_d1(&theta).unwrap();
    assert!(close(back.matrix(), TwoForm::wedge(4, 1, 2).matrix(), 1e-14));
}
