//! Real Lie algebras given by structure constants, left-invariant forms and
//! the Chevalley–Eilenberg differential in degrees 0, 1 and 2.
//!
//! Anything that names a basis element (`e_i`, `e^i ∧ e^j`, bracket tables)
//! is 1-based, matching the usual `e_1, …, e_n` notation. Raw array access
//! is 0-based.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, ScfError};
use crate::tol;

/// A vector in the Lie algebra, in the basis `e_1, …, e_n`.
pub type Vector = DVector<f64>;

/// The 1-based basis vector `e_i` of an `n`-dimensional algebra.
pub fn basis_vector(n: usize, i: usize) -> Vector {
    assert!(i >= 1 && i <= n, "basis index {i} outside 1..={n}");
    let mut v = Vector::zeros(n);
    v[i - 1] = 1.0;
    v
}

/// Finite-dimensional real Lie algebra.
///
/// `c[k][i][j]` is the coefficient of `e_k` in `[e_i, e_j]`. The array is
/// stored in full and must be exactly antisymmetric in `(i, j)`; the Jacobi
/// identity is checked to [`tol::JACOBI`].
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    c: Vec<f64>,
}

#[inline]
fn idx3(n: usize, k: usize, i: usize, j: usize) -> usize {
    (k * n + i) * n + j
}

/// Max-norm of the Jacobiator over all basis triples for a raw structure
/// constant array (`c[k][i][j]` flattened row-major).
pub fn jacobi_defect_of(dim: usize, c: &[f64]) -> f64 {
    let n = dim;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                for m in 0..n {
                    let mut s = 0.0;
                    for k in 0..n {
                        s += c[idx3(n, m, i, k)] * c[idx3(n, k, j, l)]
                            + c[idx3(n, m, j, k)] * c[idx3(n, k, l, i)]
                            + c[idx3(n, m, l, k)] * c[idx3(n, k, i, j)];
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

impl LieAlgebra {
    /// Build from a full `n × n × n` array. Rejects arrays that are not exactly
    /// antisymmetric or that violate Jacobi.
    pub fn from_constants(dim: usize, c: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(ScfError::InvalidParameter {
                name: "dim",
                value: 0.0,
            });
        }
        if c.len() != dim * dim * dim {
            return Err(ScfError::DimensionMismatch {
                expected: dim * dim * dim,
                found: c.len(),
            });
        }
        let mut asym = 0.0_f64;
        for k in 0..dim {
            for i in 0..dim {
                for j in 0..dim {
                    asym = asym.max((c[idx3(dim, k, i, j)] + c[idx3(dim, k, j, i)]).abs());
                }
            }
        }
        if asym != 0.0 || c.iter().any(|v| !v.is_finite()) {
            return Err(ScfError::NotAntisymmetric {
                what: "structure constants",
                defect: asym,
            });
        }
        let defect = jacobi_defect_of(dim, &c);
        if defect > tol::JACOBI {
            return Err(ScfError::JacobiViolation { defect });
        }
        Ok(Self { dim, c })
    }

    /// Build from a bracket table `[e_i, e_j] += value · e_k`, 1-based, `i < j`.
    pub fn from_brackets(dim: usize, brackets: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let mut c = vec![0.0; dim * dim * dim];
        for &(i, j, k, v) in brackets {
            if !(1 <= i && i < j && j <= dim && 1 <= k && k <= dim) {
                return Err(ScfError::IndexOutOfRange {
                    what: "bracket",
                    index: (i, j, k),
                    dim,
                });
            }
            c[idx3(dim, k - 1, i - 1, j - 1)] += v;
            c[idx3(dim, k - 1, j - 1, i - 1)] -= v;
        }
        Self::from_constants(dim, c)
    }

    pub fn abelian(dim: usize) -> Self {
        Self {
            dim,
            c: vec![0.0; dim * dim * dim],
        }
    }

    /// `𝔥₃`: `[e_1, e_2] = e_3`.
    pub fn heisenberg3() -> Self {
        Self::from_brackets(3, &[(1, 2, 3, 1.0)]).expect("valid table")
    }

    /// `𝔥₃ ⊕ ℝ`: `[e_1, e_2] = e_3`.
    pub fn heisenberg3_plus_line() -> Self {
        Self::from_brackets(4, &[(1, 2, 3, 1.0)]).expect("valid table")
    }

    /// `𝔥₃ ⊕ 𝔥₃`: `[e_1, e_2] = e_5`, `[e_3, e_4] = e_6`.
    pub fn heisenberg3_squared() -> Self {
        Self::from_brackets(6, &[(1, 2, 5, 1.0), (3, 4, 6, 1.0)]).expect("valid table")
    }

    /// `𝔫₄`: `[e_1, e_2] = e_3`, `[e_2, e_3] = e_4`.
    pub fn n4() -> Self {
        Self::from_brackets(4, &[(1, 2, 3, 1.0), (2, 3, 4, 1.0)]).expect("valid table")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `c[k][i][j]`, 0-based.
    #[inline]
    pub fn constant(&self, k: usize, i: usize, j: usize) -> f64 {
        self.c[idx3(self.dim, k, i, j)]
    }

    pub fn constants(&self) -> &[f64] {
        &self.c
    }

    /// Nonzero brackets `(i, j, k, value)` with `i < j`, 1-based.
    pub fn bracket_table(&self) -> Vec<(usize, usize, usize, f64)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let v = self.constant(k, i, j);
                    if v != 0.0 {
                        out.push((i + 1, j + 1, k + 1, v));
                    }
                }
            }
        }
        out
    }

    fn check_len(&self, v: &Vector) -> Result<()> {
        if v.len() != self.dim {
            return Err(ScfError::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(())
    }

    pub fn bracket(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(self.bracket_unchecked(x, y))
    }

    pub(crate) fn bracket_unchecked(&self, x: &Vector, y: &Vector) -> Vector {
        let n = self.dim;
        Vector::from_fn(n, |k, _| {
            let mut s = 0.0;
            for i in 0..n {
                if x[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    s += self.c[idx3(n, k, i, j)] * x[i] * y[j];
                }
            }
            s
        })
    }

    /// `[e_i, e_j]` for 0-based indices.
    pub(crate) fn bracket_basis(&self, i: usize, j: usize) -> Vector {
        let n = self.dim;
        Vector::from_fn(n, |k, _| self.c[idx3(n, k, i, j)])
    }

    /// `ad_z` as a matrix: column `j` is `[z, e_j]`.
    pub fn ad(&self, z: &Vector) -> Result<DMatrix<f64>> {
        self.check_len(z)?;
        Ok(self.ad_unchecked(z))
    }

    pub(crate) fn ad_unchecked(&self, z: &Vector) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |k, j| {
            (0..n).map(|i| z[i] * self.c[idx3(n, k, i, j)]).sum()
        })
    }

    pub fn jacobi_defect(&self) -> f64 {
        jacobi_defect_of(self.dim, &self.c)
    }

    /// Lower central series dimensions `dim g¹ = n, dim g², …` up to the first
    /// zero term or the first repeat.
    pub fn lower_central_series(&self) -> Vec<usize> {
        let n = self.dim;
        let mut dims = vec![n];
        let mut current = DMatrix::<f64>::identity(n, n);
        loop {
            let cols: Vec<Vector> = (0..n)
                .flat_map(|i| {
                    let e = basis_vector(n, i + 1);
                    current
                        .column_iter()
                        .map(move |v| (e.clone(), v.into_owned()))
                        .collect::<Vec<_>>()
                })
                .map(|(e, v)| self.bracket_unchecked(&e, &v))
                .collect();
            let next = if cols.is_empty() {
                DMatrix::zeros(n, 0)
            } else {
                column_space(&DMatrix::from_columns(&cols))
            };
            let d = next.ncols();
            let prev = *dims.last().expect("nonempty");
            dims.push(d);
            if d == 0 || d == prev {
                return dims;
            }
            current = next;
        }
    }

    /// Smallest `s` with `g^{s+1} = 0`; `None` when the lower central series
    /// stabilises at a nonzero ideal.
    pub fn nilpotency_step(&self) -> Option<usize> {
        let dims = self.lower_central_series();
        match dims.last() {
            Some(0) => Some(dims.len() - 1),
            _ => None,
        }
    }

    pub fn is_nilpotent(&self) -> bool {
        self.nilpotency_step().is_some()
    }

    /// `(dθ)_ij = −θ([e_i, e_j])`.
    pub fn ce_d1(&self, theta: &OneForm) -> Result<TwoForm> {
        self.check_len(&theta.0)?;
        let n = self.dim;
        let m = DMatrix::from_fn(n, n, |i, j| {
            -(0..n).map(|k| theta.0[k] * self.constant(k, i, j)).sum::<f64>()
        });
        Ok(TwoForm(m))
    }

    /// `dB(X,Y,Z) = −B([X,Y],Z) + B([X,Z],Y) − B([Y,Z],X)`.
    pub fn ce_d2(&self, b: &TwoForm) -> Result<ThreeForm> {
        if b.dim() != self.dim {
            return Err(ScfError::DimensionMismatch {
                expected: self.dim,
                found: b.dim(),
            });
        }
        let n = self.dim;
        // bc[i][j][l] = B([e_i, e_j], e_l)
        let mut bc = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    bc[idx3(n, i, j, l)] =
                        (0..n).map(|k| self.constant(k, i, j) * b.0[(k, l)]).sum();
                }
            }
        }
        let mut out = vec![0.0; n * n * n];
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    out[idx3(n, x, y, z)] =
                        -bc[idx3(n, x, y, z)] + bc[idx3(n, x, z, y)] - bc[idx3(n, y, z, x)];
                }
            }
        }
        Ok(ThreeForm { dim: n, data: out })
    }

    /// Matrix of `d : Λ¹ → Λ²` in the bases `e^k` and `e^i ∧ e^j (i<j)`.
    pub fn ce_d1_matrix(&self) -> DMatrix<f64> {
        let n = self.dim;
        let pairs = ordered_pairs(n);
        DMatrix::from_fn(pairs.len(), n, |row, k| {
            let (i, j) = pairs[row];
            -self.constant(k, i, j)
        })
    }

    /// Matrix of `d : Λ² → Λ³` in the bases `e^i ∧ e^j (i<j)` and
    /// `e^i ∧ e^j ∧ e^l (i<j<l)`.
    pub fn ce_d2_matrix(&self) -> DMatrix<f64> {
        let n = self.dim;
        let pairs = ordered_pairs(n);
        let triples = ordered_triples(n);
        let mut m = DMatrix::zeros(triples.len(), pairs.len());
        for (col, &(p, q)) in pairs.iter().enumerate() {
            let b = TwoForm::elementary(n, p, q);
            let db = self.ce_d2(&b).expect("dimensions agree");
            for (row, &(x, y, z)) in triples.iter().enumerate() {
                m[(row, col)] = db.get(x, y, z);
            }
        }
        m
    }

    /// Betti number of the CE complex with trivial coefficients, `k ∈ {0,1,2}`.
    pub fn ce_betti(&self, k: usize) -> Result<usize> {
        let n = self.dim;
        let r1 = matrix_rank(&self.ce_d1_matrix());
        match k {
            // d on 0-forms vanishes
            0 => Ok(1),
            1 => Ok(n - r1),
            2 => {
                let r2 = if n >= 3 {
                    matrix_rank(&self.ce_d2_matrix())
                } else {
                    0
                };
                Ok(n * (n - 1) / 2 - r2 - r1)
            }
            _ => Err(ScfError::DegreeOutOfRange { degree: k }),
        }
    }

    /// Least-squares primitive `θ` with `dθ = B`; `None` when the residual
    /// exceeds [`tol::RANK`].
    pub fn exact_primitive(&self, b: &TwoForm) -> Result<Option<OneForm>> {
        if b.dim() != self.dim {
            return Err(ScfError::DimensionMismatch {
                expected: self.dim,
                found: b.dim(),
            });
        }
        let n = self.dim;
        if n < 2 {
            return Ok(Some(OneForm::zeros(n)));
        }
        let d1 = self.ce_d1_matrix();
        let pairs = ordered_pairs(n);
        let rhs = DVector::from_iterator(pairs.len(), pairs.iter().map(|&(i, j)| b.0[(i, j)]));
        let svd = d1.svd(true, true);
        let theta = svd
            .solve(&rhs, tol::RANK)
            .map_err(|_| ScfError::Numerical("least-squares solve failed"))?;
        let theta = OneForm(theta);
        let residual = (self.ce_d1(&theta)?.0 - &b.0).amax();
        Ok((residual < tol::RANK).then_some(theta))
    }
}

pub(crate) fn ordered_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

pub(crate) fn ordered_triples(n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                out.push((i, j, l));
            }
        }
    }
    out
}

/// Numerical rank with absolute singular value cutoff [`tol::RANK`].
pub fn matrix_rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > tol::RANK)
        .count()
}

/// Orthonormal basis (as columns) of the column space of `m`.
fn column_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > tol::RANK)
        .map(|(i, _)| i)
        .collect();
    if keep.is_empty() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    DMatrix::from_columns(&keep.iter().map(|&i| u.column(i)).collect::<Vec<_>>())
}

/// Left-invariant 1-form `θ = Σ θ_i e^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneForm(pub DVector<f64>);

impl OneForm {
    pub fn zeros(n: usize) -> Self {
        Self(DVector::zeros(n))
    }

    /// The dual basis form `e^i`, 1-based.
    pub fn basis(n: usize, i: usize) -> Self {
        Self(basis_vector(n, i))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &DVector<f64> {
        &self.0
    }
}

/// Left-invariant 2-form stored as the full matrix `B_ij = B(e_i, e_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoForm(DMatrix<f64>);

impl TwoForm {
    /// Rejects anything that is not exactly antisymmetric.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(ScfError::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let defect = (&m + m.transpose()).amax();
        if defect != 0.0 || m.iter().any(|v| !v.is_finite()) {
            return Err(ScfError::NotAntisymmetric {
                what: "2-form",
                defect,
            });
        }
        Ok(Self(m))
    }

    /// Antisymmetric part of `m`. For values produced by computations whose
    /// antisymmetry holds only up to rounding.
    pub fn antisymmetrize(m: DMatrix<f64>) -> Self {
        let t = m.transpose();
        Self((m - t) * 0.5)
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    /// `Σ value · e^i ∧ e^j`, 1-based indices with `i ≠ j`.
    pub fn from_entries(n: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let mut m = DMatrix::zeros(n, n);
        for &(i, j, v) in entries {
            if !(1 <= i && i <= n && 1 <= j && j <= n && i != j) {
                return Err(ScfError::IndexOutOfRange {
                    what: "2-form entry",
                    index: (i, j, 0),
                    dim: n,
                });
            }
            m[(i - 1, j - 1)] += v;
            m[(j - 1, i - 1)] -= v;
        }
        Ok(Self(m))
    }

    /// `e^i ∧ e^j`, 1-based.
    pub fn wedge(n: usize, i: usize, j: usize) -> Self {
        Self::from_entries(n, &[(i, j, 1.0)]).expect("valid basis indices")
    }

    /// `e^i ∧ e^j` with 0-based indices.
    pub(crate) fn elementary(n: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = 1.0;
        m[(j, i)] = -1.0;
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// `B(x, y)`.
    pub fn eval(&self, x: &Vector, y: &Vector) -> f64 {
        x.dot(&(&self.0 * y))
    }

    /// Coefficient of `e^i ∧ e^j`, 1-based.
    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        self.0[(i - 1, j - 1)]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    /// Upper-triangle components in lexicographic order `(1,2), (1,3), …`.
    pub fn upper_triangle(&self) -> Vec<f64> {
        ordered_pairs(self.dim())
            .into_iter()
            .map(|(i, j)| self.0[(i, j)])
            .collect()
    }

    pub fn from_upper_triangle(n: usize, values: &[f64]) -> Result<Self> {
        let pairs = ordered_pairs(n);
        if pairs.len() != values.len() {
            return Err(ScfError::DimensionMismatch {
                expected: pairs.len(),
                found: values.len(),
            });
        }
        let mut m = DMatrix::zeros(n, n);
        for (&(i, j), &v) in pairs.iter().zip(values) {
            m[(i, j)] = v;
            m[(j, i)] = -v;
        }
        Ok(Self(m))
    }
}

impl std::ops::Add for &TwoForm {
    type Output = TwoForm;
    fn add(self, rhs: &TwoForm) -> TwoForm {
        TwoForm(&self.0 + &rhs.0)
    }
}

impl std::ops::Sub for &TwoForm {
    type Output = TwoForm;
    fn sub(self, rhs: &TwoForm) -> TwoForm {
        TwoForm(&self.0 - &rhs.0)
    }
}

impl std::ops::Mul<f64> for &TwoForm {
    type Output = TwoForm;
    fn mul(self, s: f64) -> TwoForm {
        TwoForm(&self.0 * s)
    }
}

/// Totally antisymmetric 3-form, full `n³` storage.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeForm {
    dim: usize,
    data: Vec<f64>,
}

impl ThreeForm {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `T(e_i, e_j, e_l)`, 0-based.
    pub fn get(&self, i: usize, j: usize, l: usize) -> f64 {
        self.data[idx3(self.dim, i, j, l)]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest violation of antisymmetry under a transposition of slots.
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let v = self.get(i, j, l);
                    worst = worst
                        .max((v + self.get(j, i, l)).abs())
                        .max((v + self.get(i, l, j)).abs())
                        .max((v + self.get(l, j, i)).abs());
                }
            }
        }
        worst
    }
}
