//! Seeded random draws for randomized invariant checks.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{self, N4FamilyParams};
use crate::error::{Result, ScfError};
use crate::lie::{LieAlgebra, OneForm, TwoForm, Vector};
use crate::structure::{compatible_complex_structure, metric_of, AlmostKahler, Metric};
use crate::tol;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub fn vector(rng: &mut impl Rng, n: usize) -> Vector {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

pub fn one_form(rng: &mut impl Rng, n: usize) -> OneForm {
    OneForm(vector(rng, n))
}

pub fn matrix(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
}

pub fn two_form(rng: &mut impl Rng, n: usize) -> TwoForm {
    TwoForm::antisymmetrize(matrix(rng, n))
}

/// `I + εAAᵀ` with `A` uniform in `[-1, 1]`.
pub fn spd_metric(rng: &mut impl Rng, n: usize, eps: f64) -> Metric {
    let a = matrix(rng, n);
    let g = DMatrix::identity(n, n) + (&a * a.transpose()) * eps;
    Metric::new((&g + g.transpose()) * 0.5).expect("I + εAAᵀ is positive definite")
}

/// Orthonormal basis of closed 2-forms (kernel of `d`).
pub fn closed_two_forms(algebra: &LieAlgebra) -> Vec<TwoForm> {
    let n = algebra.dim();
    let d2 = algebra.ce_d2_matrix();
    let gram = d2.transpose() * &d2;
    let eig = SymmetricEigen::new(gram);
    let mut out = Vec::new();
    for (k, &v) in eig.eigenvalues.iter().enumerate() {
        if v.abs() < tol::RANK {
            let col: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            out.push(TwoForm::from_upper_triangle(n, &col).expect("column length matches"));
        }
    }
    out
}

pub fn closed_two_form(rng: &mut impl Rng, algebra: &LieAlgebra) -> TwoForm {
    let basis = closed_two_forms(algebra);
    let mut out = TwoForm::zeros(algebra.dim());
    for b in &basis {
        out = &out + &(b * rng.random_range(-1.0..1.0));
    }
    out
}

/// Almost Kähler structure near `(ω₀, ·)`: `ω = ω₀ + ε·(random closed form)`
/// and `J` the polar-decomposition structure for a random metric.
pub fn perturbed_structure(
    rng: &mut impl Rng,
    algebra: &LieAlgebra,
    omega0: &TwoForm,
    eps: f64,
) -> Result<AlmostKahler> {
    let n = algebra.dim();
    for _ in 0..100 {
        let omega = omega0 + &(&closed_two_form(rng, algebra) * eps);
        let h = spd_metric(rng, n, 0.3);
        let Ok(j) = compatible_complex_structure(&omega, &h) else {
            continue;
        };
        if let Ok(ak) = AlmostKahler::new(algebra.clone(), omega, j) {
            return Ok(ak);
        }
    }
    Err(ScfError::Numerical("no admissible perturbation found"))
}

/// Random almost Kähler structure on a 2-step algebra: `h₃ ⊕ ℝ` or
/// `h₃ ⊕ h₃` chosen at random.
pub fn two_step_structure(rng: &mut impl Rng) -> AlmostKahler {
    let entry = if rng.random_bool(0.5) {
        catalog::kodaira_thurston(rng.random_range(0.5..2.0), rng.random_range(0.5..2.0))
    } else {
        catalog::heisenberg_sum(
            rng.random_range(0.5..2.0),
            rng.random_range(0.5..2.0),
            rng.random_range(0.5..2.0),
        )
    }
    .expect("parameters are positive");
    let base = entry.initial();
    perturbed_structure(rng, base.algebra(), base.omega(), 0.2).expect("small perturbation admissible")
}

/// Random member of the `n4` family near the `t = 0` structure, with a
/// positive-definite metric.
pub fn n4_params(rng: &mut impl Rng) -> N4FamilyParams {
    loop {
        let a = rng.random_range(-0.4..0.4);
        let b = 1.0 + rng.random_range(-0.4..0.4);
        let cp = -1.0 + rng.random_range(-0.4..0.4);
        let dp = rng.random_range(-0.4..0.4);
        let Ok(p) = N4FamilyParams::from_block(a, b, cp, dp) else {
            continue;
        };
        if p.bp.abs() < 0.2 {
            continue;
        }
        match metric_of(&p.omega(), &p.j()) {
            Ok(g) if g.min_eigenvalue() > 1e-3 => return p,
            _ => continue,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_match_betti_count() {
        // dim Z² = b₂ + rank d₁
        let l = LieAlgebra::heisenberg3_plus_line();
        assert_eq!(closed_two_forms(&l).len(), 4 + 1);
        let mut rng = seeded(3);
        let b = closed_two_form(&mut rng, &l);
        assert!(l.ce_d2(&b).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn draws_are_reproducible() {
        let a = two_step_structure(&mut seeded(7));
        let b = two_step_structure(&mut seeded(7));
        assert_eq!(a.j(), b.j());
        assert!(a.check(1e-10).passed());
        let p = n4_params(&mut seeded(1));
        p.validate(1e-12).unwrap();
    }
}
