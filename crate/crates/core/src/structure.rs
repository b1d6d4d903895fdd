//! Almost Kähler data `(ω, J, g)` on a Lie algebra.
//!
//! Convention: `ω(X, Y) = g(JX, Y)`, equivalently `g(X, Y) = ω(X, JY)`, so
//! in matrices `g = ω·J` and `ω = Jᵀ·g`.

use nalgebra::{Cholesky, DMatrix, Dyn, SymmetricEigen};

use crate::error::{Result, ScfError};
use crate::lie::{LieAlgebra, TwoForm, Vector};
use crate::tol;

/// Linear map of the Lie algebra; column `j` is the image of `e_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Endomorphism(pub DMatrix<f64>);

impl Endomorphism {
    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn from_row_major(n: usize, values: &[f64]) -> Result<Self> {
        if values.len() != n * n {
            return Err(ScfError::DimensionMismatch {
                expected: n * n,
                found: values.len(),
            });
        }
        Ok(Self(DMatrix::from_row_slice(n, n, values)))
    }

    pub fn row_major(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.0[(i, j)])
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.0 * x
    }

    /// `max |J² + I|`.
    pub fn square_defect(&self) -> f64 {
        let n = self.dim();
        (&self.0 * &self.0 + DMatrix::identity(n, n)).amax()
    }
}

/// Positive definite inner product `g_ij = g(e_i, e_j)`.
#[derive(Clone, Debug)]
pub struct Metric {
    g: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    asymmetry: f64,
}

impl PartialEq for Metric {
    fn eq(&self, other: &Self) -> bool {
        self.g == other.g
    }
}

impl Metric {
    /// Exactly symmetric, positive definite matrix.
    pub fn new(g: DMatrix<f64>) -> Result<Self> {
        let asym = (&g - g.transpose()).amax();
        if asym != 0.0 {
            return Err(ScfError::NotAntisymmetric {
                what: "metric (symmetric part expected)",
                defect: asym,
            });
        }
        Self::from_symmetric(g, 0.0)
    }

    fn from_symmetric(g: DMatrix<f64>, asymmetry: f64) -> Result<Self> {
        let min = min_symmetric_eigenvalue(&g);
        if !(min > 0.0) {
            return Err(ScfError::IncompatiblePair {
                min_eigenvalue: min,
            });
        }
        let chol = Cholesky::new(g.clone()).ok_or(ScfError::IncompatiblePair {
            min_eigenvalue: min,
        })?;
        Ok(Self { g, chol, asymmetry })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n)).expect("identity is SPD")
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    /// Max-norm of `g − gᵀ` before symmetrization, when derived from `(ω, J)`.
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_symmetric_eigenvalue(&self.g)
    }

    pub fn inner(&self, x: &Vector, y: &Vector) -> f64 {
        x.dot(&(&self.g * y))
    }

    /// `g⁻¹ m`.
    pub fn solve(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(m)
    }

    /// Columns form a `g`-orthonormal frame (`Fᵀ g F = I`).
    pub fn orthonormal_frame(&self) -> DMatrix<f64> {
        let l = self.chol.l();
        let n = self.dim();
        let lt = l.transpose();
        lt.solve_upper_triangular(&DMatrix::identity(n, n))
            .expect("Cholesky factor is invertible")
    }
}

pub(crate) fn min_symmetric_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.iter().any(|v| !v.is_finite()) {
        return f64::NAN;
    }
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `g(X, Y) = ω(X, JY)`, symmetrized; the pre-symmetrization defect is kept
/// on the result.
pub fn metric_of(omega: &TwoForm, j: &Endomorphism) -> Result<Metric> {
    if omega.dim() != j.dim() {
        return Err(ScfError::DimensionMismatch {
            expected: omega.dim(),
            found: j.dim(),
        });
    }
    let raw = omega.matrix() * j.matrix();
    let asym = (&raw - raw.transpose()).amax();
    let sym = (&raw + raw.transpose()) * 0.5;
    Metric::from_symmetric(sym, asym)
}

/// Residuals of the almost Kähler conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureReport {
    pub tol: f64,
    /// `max |J² + I|`
    pub j_squared: f64,
    /// `max |ω(J·,J·) − ω|`
    pub compatibility: f64,
    /// `max |dω|`
    pub closedness: f64,
    /// Smallest eigenvalue of the symmetrized metric.
    pub min_eig_g: f64,
    /// `max |g − gᵀ|` before symmetrization.
    pub metric_asymmetry: f64,
}

impl StructureReport {
    pub fn j_squared_ok(&self) -> bool {
        self.j_squared <= self.tol
    }

    pub fn compatibility_ok(&self) -> bool {
        self.compatibility <= self.tol
    }

    pub fn closedness_ok(&self) -> bool {
        self.closedness <= self.tol
    }

    pub fn metric_ok(&self) -> bool {
        self.min_eig_g > 0.0
    }

    pub fn passed(&self) -> bool {
        self.j_squared_ok() && self.compatibility_ok() && self.closedness_ok() && self.metric_ok()
    }

    /// Names of the conditions that failed.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.j_squared_ok() {
            out.push("J^2 = -I");
        }
        if !self.compatibility_ok() {
            out.push("omega(J.,J.) = omega");
        }
        if !self.closedness_ok() {
            out.push("d omega = 0");
        }
        if !self.metric_ok() {
            out.push("g positive definite");
        }
        out
    }
}

pub fn check_structure(
    algebra: &LieAlgebra,
    omega: &TwoForm,
    j: &Endomorphism,
    tol: f64,
) -> Result<StructureReport> {
    let n = algebra.dim();
    if omega.dim() != n || j.dim() != n {
        return Err(ScfError::DimensionMismatch {
            expected: n,
            found: if omega.dim() != n { omega.dim() } else { j.dim() },
        });
    }
    let jm = j.matrix();
    let compat = (jm.transpose() * omega.matrix() * jm - omega.matrix()).amax();
    let closed = algebra.ce_d2(omega)?.max_abs();
    let raw = omega.matrix() * jm;
    let asym = (&raw - raw.transpose()).amax();
    let min_eig = min_symmetric_eigenvalue(&((&raw + raw.transpose()) * 0.5));
    Ok(StructureReport {
        tol,
        j_squared: j.square_defect(),
        compatibility: compat,
        closedness: closed,
        min_eig_g: min_eig,
        metric_asymmetry: asym,
    })
}

/// A validated almost Kähler structure on a Lie algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct AlmostKahler {
    algebra: LieAlgebra,
    omega: TwoForm,
    j: Endomorphism,
}

impl AlmostKahler {
    /// Checks the almost Kähler conditions at [`tol::STRUCTURE`].
    pub fn new(algebra: LieAlgebra, omega: TwoForm, j: Endomorphism) -> Result<Self> {
        let report = check_structure(&algebra, &omega, &j, tol::STRUCTURE)?;
        if !report.metric_ok() {
            return Err(ScfError::IncompatiblePair {
                min_eigenvalue: report.min_eig_g,
            });
        }
        if !report.j_squared_ok() {
            return Err(ScfError::FamilyConstraint {
                relation: "J^2 = -I",
                residual: report.j_squared,
            });
        }
        if !report.compatibility_ok() {
            return Err(ScfError::FamilyConstraint {
                relation: "omega(J.,J.) = omega",
                residual: report.compatibility,
            });
        }
        if !report.closedness_ok() {
            return Err(ScfError::FamilyConstraint {
                relation: "d omega = 0",
                residual: report.closedness,
            });
        }
        Ok(Self { algebra, omega, j })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn omega(&self) -> &TwoForm {
        &self.omega
    }

    pub fn j(&self) -> &Endomorphism {
        &self.j
    }

    pub fn metric(&self) -> Metric {
        metric_of(&self.omega, &self.j).expect("validated at construction")
    }

    pub fn check(&self, tol: f64) -> StructureReport {
        check_structure(&self.algebra, &self.omega, &self.j, tol).expect("dimensions agree")
    }

    pub fn into_parts(self) -> (LieAlgebra, TwoForm, Endomorphism) {
        (self.algebra, self.omega, self.j)
    }
}

/// `B^anti(X,Y) = ½(B(X,Y) − B(JX,JY))` for any bilinear form given as a
/// matrix `B_ij = B(e_i, e_j)`.
pub fn anti_invariant_part_bilinear(b: &DMatrix<f64>, j: &Endomorphism) -> DMatrix<f64> {
    let jm = j.matrix();
    (b - jm.transpose() * b * jm) * 0.5
}

/// `J`-anti-invariant part of a 2-form, the `(2,0)+(0,2)` component.
pub fn anti_invariant_part(b: &TwoForm, j: &Endomorphism) -> TwoForm {
    TwoForm::antisymmetrize(anti_invariant_part_bilinear(b.matrix(), j))
}

/// The endomorphism `E` with `g(EX, Y) = B(X, Y)` for a bilinear form `B`.
pub fn raise_bilinear(g: &Metric, b: &DMatrix<f64>) -> Endomorphism {
    Endomorphism(g.solve(&b.transpose()))
}

/// Index raising of a 2-form: `g(EX, Y) = B(X, Y)`.
pub fn raise(g: &Metric, b: &TwoForm) -> Result<Endomorphism> {
    if g.dim() != b.dim() {
        return Err(ScfError::DimensionMismatch {
            expected: g.dim(),
            found: b.dim(),
        });
    }
    Ok(raise_bilinear(g, b.matrix()))
}

/// Inverse of [`raise_bilinear`]: `B(X, Y) = g(EX, Y)`.
pub fn lower(g: &Metric, e: &Endomorphism) -> DMatrix<f64> {
    (g.matrix() * e.matrix()).transpose()
}

/// `Rc·J − J·Rc`, the `J`-anti-linear part (up to a factor) of `Rc`.
pub fn commutator_anti_part(rc: &Endomorphism, j: &Endomorphism) -> Endomorphism {
    Endomorphism(rc.matrix() * j.matrix() - j.matrix() * rc.matrix())
}

/// Compatible almost complex structure for `ω` obtained from an auxiliary
/// metric `h` by polar decomposition: with `ω(X,Y) = h(AX,Y)`,
/// `J = A(−A²)^{-1/2}`.
pub fn compatible_complex_structure(omega: &TwoForm, h: &Metric) -> Result<Endomorphism> {
    let n = omega.dim();
    let l = h.chol.l();
    let lt = l.transpose();
    // Â = −L⁻¹ ω L⁻ᵀ is skew-symmetric
    let linv_omega = l
        .solve_lower_triangular(omega.matrix())
        .ok_or(ScfError::Numerical("singular auxiliary metric"))?;
    let a_hat = -lt
        .transpose()
        .solve_lower_triangular(&linv_omega.transpose())
        .ok_or(ScfError::Numerical("singular auxiliary metric"))?
        .transpose();
    let ata = a_hat.transpose() * &a_hat;
    let eig = SymmetricEigen::new((&ata + ata.transpose()) * 0.5);
    if eig.eigenvalues.iter().any(|&v| !(v > tol::RANK)) {
        return Err(ScfError::Domain("2-form is degenerate"));
    }
    let inv_sqrt = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()))
        * eig.eigenvectors.transpose();
    let j_hat = &a_hat * inv_sqrt;
    // J = L⁻ᵀ Ĵ Lᵀ
    let j = lt
        .solve_upper_triangular(&(j_hat * &lt))
        .ok_or(ScfError::Numerical("singular auxiliary metric"))?;
    debug_assert_eq!(j.nrows(), n);
    Ok(Endomorphism(j))
}

/// `J·(−J²)^{-1/2}`, pulling a nearly complex `J` back onto `J² = −I`.
pub fn renormalize_complex_structure(j: &Endomorphism) -> Result<Endomorphism> {
    let n = j.dim();
    let m = -(j.matrix() * j.matrix());
    // Denman–Beavers: Y → M^{1/2}, Z → M^{-1/2}
    let mut y = m;
    let mut z = DMatrix::<f64>::identity(n, n);
    for _ in 0..50 {
        let y_inv = y
            .clone()
            .try_inverse()
            .ok_or(ScfError::Numerical("renormalization diverged"))?;
        let z_inv = z
            .clone()
            .try_inverse()
            .ok_or(ScfError::Numerical("renormalization diverged"))?;
        let y_next = (&y + z_inv) * 0.5;
        let z_next = (&z + y_inv) * 0.5;
        let change = (&z_next - &z).amax();
        y = y_next;
        z = z_next;
        if change < 1e-15 {
            break;
        }
    }
    Ok(Endomorphism(j.matrix() * z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::basis_vector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn kt_j(alpha: f64, beta: f64) -> Endomorphism {
        Endomorphism::from_row_major(
            4,
            &[
                0.0, 0.0, -alpha, 0.0, //
                0.0, 0.0, 0.0, beta, //
                1.0 / alpha, 0.0, 0.0, 0.0, //
                0.0, -1.0 / beta, 0.0, 0.0,
            ],
        )
        .unwrap()
    }

    fn kt_omega() -> TwoForm {
        TwoForm::from_entries(4, &[(1, 3, 1.0), (2, 4, -1.0)]).unwrap()
    }

    fn n4_t0() -> (TwoForm, Endomorphism) {
        // J₀ = e₃⊗e¹ + e₄⊗e² − e₁⊗e³ − e₂⊗e⁴
        let j = Endomorphism::from_row_major(
            4,
            &[
                0.0, 0.0, -1.0, 0.0, //
                0.0, 0.0, 0.0, -1.0, //
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0,
            ],
        )
        .unwrap();
        let omega = TwoForm::from_entries(4, &[(1, 3, 1.0), (2, 4, 1.0)]).unwrap();
        (omega, j)
    }

    fn random_matrix(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
    }

    fn random_two_form(rng: &mut impl Rng, n: usize) -> TwoForm {
        TwoForm::antisymmetrize(random_matrix(rng, n))
    }

    fn random_spd(rng: &mut impl Rng, n: usize) -> Metric {
        let a = random_matrix(rng, n);
        let m = &a * a.transpose() + DMatrix::identity(n, n) * 0.5;
        Metric::new((&m + m.transpose()) * 0.5).unwrap()
    }

    #[test]
    fn kt_metric_is_diagonal() {
        for (a, b) in [(1.0, 1.0), (1.3, 0.7), (0.2, 5.0)] {
            let g = metric_of(&kt_omega(), &kt_j(a, b)).unwrap();
            let expected = DMatrix::from_diagonal(&Vector::from_vec(vec![1.0 / a, 1.0 / b, a, b]));
            assert!((g.matrix() - expected).amax() < 1e-15);
            assert_eq!(g.asymmetry(), 0.0);
        }
    }

    #[test]
    fn canonical_pair_in_the_plane() {
        let omega = TwoForm::wedge(2, 1, 2);
        let j = Endomorphism::from_row_major(2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
        assert_eq!(j.apply(&basis_vector(2, 1)), basis_vector(2, 2));
        let g = metric_of(&omega, &j).unwrap();
        assert_eq!(g.inner(&basis_vector(2, 1), &basis_vector(2, 1)), 1.0);
        assert_eq!(g.matrix(), &DMatrix::identity(2, 2));
    }

    #[test]
    fn opposite_orientation_is_incompatible() {
        let omega = TwoForm::wedge(2, 1, 2);
        let j = Endomorphism::from_row_major(2, &[0.0, 1.0, -1.0, 0.0]).unwrap();
        match metric_of(&omega, &j) {
            Err(ScfError::IncompatiblePair { min_eigenvalue }) => {
                assert!((min_eigenvalue + 1.0).abs() < 1e-12)
            }
            other => panic!("expected incompatible pair, got {other:?}"),
        }
    }

    #[test]
    fn metric_validation() {
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = 1e-3;
        assert!(Metric::new(m).is_err());
        assert!(Metric::new(-DMatrix::<f64>::identity(2, 2)).is_err());
        let g = Metric::new(DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0])).unwrap();
        let f = g.orthonormal_frame();
        assert!((f.transpose() * g.matrix() * &f - DMatrix::identity(2, 2)).amax() < 1e-14);
    }

    #[test]
    fn catalog_like_structures_pass() {
        let kt = check_structure(
            &LieAlgebra::heisenberg3_plus_line(),
            &kt_omega(),
            &kt_j(1.0, 1.0),
            1e-12,
        )
        .unwrap();
        assert!(kt.passed(), "{kt:?}");
        let (omega, j) = n4_t0();
        let r = check_structure(&LieAlgebra::n4(), &omega, &j, 1e-12).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(AlmostKahler::new(LieAlgebra::n4(), omega, j).is_ok());
    }

    #[test]
    fn violated_j_squared_is_reported() {
        // n4 family pattern with a' + 0.1 so that aa' + bb' = −0.9 (a = 1)
        let (a, b, c, d) = (1.0, -1.0, -1.0, -1.0);
        let (ap, bp, cp, dp) = (0.0, 1.0, 1.0, 0.0);
        let make = |ap: f64| {
            Endomorphism::from_row_major(
                4,
                &[
                    0.0, ap, bp, 0.0, //
                    a, 0.0, 0.0, cp, //
                    b, 0.0, 0.0, dp, //
                    0.0, c, d, 0.0,
                ],
            )
            .unwrap()
        };
        assert!(make(ap).square_defect() < 1e-15);
        let bad = make(ap + 0.1);
        let gamma = (ap + 0.1 + d) / bp;
        let omega =
            TwoForm::from_entries(4, &[(1, 3, 1.0), (2, 4, 1.0), (1, 2, gamma)]).unwrap();
        let r = check_structure(&LieAlgebra::n4(), &omega, &bad, 1e-10).unwrap();
        assert!((r.j_squared - 0.1).abs() < 1e-12, "{r:?}");
        assert!(!r.passed());
        assert!(r.failures().contains(&"J^2 = -I"));
    }

    #[test]
    fn wrong_symplectic_form_fails_compatibility_only() {
        let r = check_structure(
            &LieAlgebra::heisenberg3_plus_line(),
            &TwoForm::wedge(4, 1, 2),
            &kt_j(1.0, 1.0),
            1e-10,
        )
        .unwrap();
        assert!(r.j_squared_ok());
        assert!(r.closedness_ok());
        assert!(!r.compatibility_ok());
        assert!(r.failures().contains(&"omega(J.,J.) = omega"));
        assert!(AlmostKahler::new(
            LieAlgebra::heisenberg3_plus_line(),
            TwoForm::wedge(4, 1, 2),
            kt_j(1.0, 1.0)
        )
        .is_err());
    }

    #[test]
    fn omega_is_j_invariant() {
        let anti = anti_invariant_part(&kt_omega(), &kt_j(1.7, 0.4));
        assert!(anti.max_abs() < 1e-15);
    }

    #[test]
    fn n4_chern_ricci_anti_part_at_t0() {
        let (_, j) = n4_t0();
        let p = &TwoForm::wedge(4, 1, 2) * -1.0;
        let anti = anti_invariant_part(&p, &j);
        let expected = &(&TwoForm::wedge(4, 1, 2) * -0.5) + &(&TwoForm::wedge(4, 3, 4) * 0.5);
        assert!((anti.matrix() - expected.matrix()).amax() < 1e-15);
    }

    #[test]
    fn projection_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let j = kt_j(1.3, 0.6);
        for _ in 0..50 {
            let b = random_two_form(&mut rng, 4);
            let once = anti_invariant_part(&b, &j);
            let twice = anti_invariant_part(&once, &j);
            assert!((once.matrix() - twice.matrix()).amax() < 1e-12);
            // B^anti(JX, JY) = −B^anti(X, Y)
            let jm = j.matrix();
            assert!((jm.transpose() * once.matrix() * jm + once.matrix()).amax() < 1e-12);
            // B = invariant + anti-invariant
            let inv = (b.matrix() + jm.transpose() * b.matrix() * jm) * 0.5;
            assert!((inv + once.matrix() - b.matrix()).amax() < 1e-13);
        }
    }

    #[test]
    fn raise_and_lower() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b = random_two_form(&mut rng, 4);
        // g = I: E = Bᵀ so that ⟨Ex, y⟩ = B(x, y)
        let e = raise(&Metric::identity(4), &b).unwrap();
        assert_eq!(e.matrix(), &b.matrix().transpose());
        for _ in 0..20 {
            let g = random_spd(&mut rng, 5);
            let b = random_two_form(&mut rng, 5);
            let e = raise(&g, &b).unwrap();
            for i in 1..=5 {
                for k in 1..=5 {
                    let x = basis_vector(5, i);
                    let y = basis_vector(5, k);
                    assert!((g.inner(&e.apply(&x), &y) - b.eval(&x, &y)).abs() < 1e-12);
                }
            }
            let endo = Endomorphism(random_matrix(&mut rng, 5));
            let back = raise_bilinear(&g, &lower(&g, &endo));
            assert!((back.matrix() - endo.matrix()).amax() < 1e-12);
        }
        assert!(raise(&Metric::identity(3), &b).is_err());
    }

    #[test]
    fn commutator_is_anti_linear() {
        let j = kt_j(1.0, 1.0);
        assert_eq!(
            commutator_anti_part(&Endomorphism::identity(4), &j).matrix(),
            &DMatrix::zeros(4, 4)
        );
        let rc = Endomorphism(DMatrix::from_diagonal(&Vector::from_vec(vec![
            -0.5, -0.5, 0.5, 0.0,
        ])));
        let r = commutator_anti_part(&rc, &j);
        assert!(r.matrix().amax() > 0.1);
        assert!((r.matrix() * j.matrix() + j.matrix() * r.matrix()).amax() < 1e-12);
    }

    #[test]
    fn polar_construction_is_compatible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let h = random_spd(&mut rng, 4);
            let omega = &kt_omega() + &(&random_two_form(&mut rng, 4) * 0.2);
            let j = compatible_complex_structure(&omega, &h).unwrap();
            assert!(j.square_defect() < 1e-12);
            let jm = j.matrix();
            assert!((jm.transpose() * omega.matrix() * jm - omega.matrix()).amax() < 1e-12);
            let g = metric_of(&omega, &j).unwrap();
            assert!(g.asymmetry() < 1e-12);
            assert!(g.min_eigenvalue() > 0.0);
        }
        assert!(compatible_complex_structure(&TwoForm::wedge(4, 1, 2), &Metric::identity(4)).is_err());
    }

    #[test]
    fn renormalization_restores_j_squared() {
        let j = kt_j(1.2, 0.8);
        let mut perturbed = j.clone();
        perturbed.0[(0, 2)] += 1e-4;
        perturbed.0[(3, 1)] -= 2e-5;
        assert!(perturbed.square_defect() > 1e-5);
        let fixed = renormalize_complex_structure(&perturbed).unwrap();
        assert!(fixed.square_defect() < 1e-13);
        assert!((fixed.matrix() - j.matrix()).amax() < 1e-3);
        let same = renormalize_complex_structure(&j).unwrap();
        assert!((same.matrix() - j.matrix()).amax() < 1e-15);
    }
}
