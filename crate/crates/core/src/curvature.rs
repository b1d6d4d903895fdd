//! Levi-Civita and Chern connections of left-invariant metrics, Riemann and
//! Ricci curvature, the Chern–Ricci form and the Nijenhuis tensor.
//!
//! Sign conventions:
//! - `R(X,Y) = [A_X, A_Y] − A_{[X,Y]}`
//! - `Ric(X,Y) = tr(Z ↦ R(Z,X)Y)`
//! - `N(X,Y) = [JX,JY] − J[JX,Y] − J[X,JY] − [X,Y]`
//! - `P(X,Y) = −tr(A_{[X,Y]} ∘ J)`

use nalgebra::DMatrix;

use crate::error::{Result, ScfError};
use crate::lie::{LieAlgebra, TwoForm, Vector};
use crate::structure::{Endomorphism, Metric};

#[inline]
fn idx3(n: usize, a: usize, b: usize, c: usize) -> usize {
    (a * n + b) * n + c
}

#[inline]
fn idx4(n: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * n + b) * n + c) * n + d
}

/// Endomorphism-valued 1-form: `A_{e_j} e_i = Σ_k A[k][i][j] e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionForm {
    dim: usize,
    data: Vec<f64>,
}

impl ConnectionForm {
    /// From the matrices `A_{e_1}, …, A_{e_n}`.
    pub fn from_matrices(mats: &[DMatrix<f64>]) -> Result<Self> {
        let n = mats.len();
        let mut data = vec![0.0; n * n * n];
        for (j, m) in mats.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(ScfError::DimensionMismatch {
                    expected: n,
                    found: m.nrows(),
                });
            }
            for k in 0..n {
                for i in 0..n {
                    data[idx3(n, k, i, j)] = m[(k, i)];
                }
            }
        }
        Ok(Self { dim: n, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `A[k][i][j]`, 0-based.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[idx3(self.dim, k, i, j)]
    }

    /// `A_{e_j}` as a matrix, 0-based `j`.
    pub fn along_basis(&self, j: usize) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |k, i| self.data[idx3(n, k, i, j)])
    }

    /// `A_Z = Σ_j z_j A_{e_j}`.
    pub fn along(&self, z: &Vector) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |k, i| {
            (0..n).map(|j| z[j] * self.data[idx3(n, k, i, j)]).sum()
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `max |g(A_Z X, Y) + g(X, A_Z Y)|` over basis triples.
    pub fn metric_compatibility_defect(&self, g: &Metric) -> f64 {
        (0..self.dim)
            .map(|j| {
                let a = self.along_basis(j);
                let ga = g.matrix() * a;
                (&ga + ga.transpose()).amax()
            })
            .fold(0.0, f64::max)
    }

    /// `max |A_X Y − A_Y X − [X,Y]|` over basis pairs.
    pub fn torsion_defect(&self, algebra: &LieAlgebra) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for x in 0..n {
            for y in 0..n {
                let br = algebra.bracket_basis(x, y);
                for k in 0..n {
                    let t = self.get(k, y, x) - self.get(k, x, y) - br[k];
                    worst = worst.max(t.abs());
                }
            }
        }
        worst
    }
}

/// Curvature endomorphisms `R(e_i, e_j)`: entry `[k][l][i][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor {
    dim: usize,
    data: Vec<f64>,
}

impl CurvatureTensor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `R[k][l][i][j]`, 0-based.
    pub fn get(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        self.data[idx4(self.dim, k, l, i, j)]
    }

    /// `R(e_i, e_j)` as a matrix.
    pub fn endomorphism(&self, i: usize, j: usize) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |k, l| self.data[idx4(n, k, l, i, j)])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Nijenhuis tensor: `N[k][i][j]` is the `e_k` coefficient of `N(e_i, e_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NijenhuisTensor {
    dim: usize,
    data: Vec<f64>,
}

impl NijenhuisTensor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[idx3(self.dim, k, i, j)]
    }

    /// `N(e_i, e_j)`, 1-based.
    pub fn on_basis(&self, i: usize, j: usize) -> Vector {
        let n = self.dim;
        Vector::from_fn(n, |k, _| self.data[idx3(n, k, i - 1, j - 1)])
    }

    /// `N(x, y)` by bilinearity, summed over `i < j` so that `N(x, x)` is
    /// exactly zero.
    pub fn apply(&self, x: &Vector, y: &Vector) -> Vector {
        let n = self.dim;
        Vector::from_fn(n, |k, _| {
            let mut s = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    s += self.data[idx3(n, k, i, j)] * (x[i] * y[j] - x[j] * y[i]);
                }
            }
            s
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Ricci form together with its asymmetry before symmetrization.
#[derive(Clone, Debug, PartialEq)]
pub struct Ricci {
    pub form: DMatrix<f64>,
    pub asymmetry: f64,
}

/// Levi-Civita connection from the Koszul formula
/// `2g(e_l, D_{e_j} e_i) = g([e_j,e_i],e_l) − g([e_j,e_l],e_i) − g([e_i,e_l],e_j)`.
pub fn levi_civita(algebra: &LieAlgebra, g: &Metric) -> Result<ConnectionForm> {
    let n = algebra.dim();
    if g.dim() != n {
        return Err(ScfError::DimensionMismatch {
            expected: n,
            found: g.dim(),
        });
    }
    let gm = g.matrix();
    // cg[l][i][j] = g(e_l, [e_i, e_j])
    let mut cg = vec![0.0; n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                cg[idx3(n, l, i, j)] = (0..n).map(|m| gm[(l, m)] * algebra.constant(m, i, j)).sum();
            }
        }
    }
    // rhs column (i, j) holds g(e_l, D_{e_j} e_i) for l = 0..n
    let mut rhs = DMatrix::zeros(n, n * n);
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                rhs[(l, i * n + j)] =
                    0.5 * (cg[idx3(n, l, j, i)] - cg[idx3(n, i, j, l)] - cg[idx3(n, j, i, l)]);
            }
        }
    }
    let sol = g.solve(&rhs);
    let mut data = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                data[idx3(n, k, i, j)] = sol[(k, i * n + j)];
            }
        }
    }
    Ok(ConnectionForm { dim: n, data })
}

/// `R(e_i, e_j) = [A_i, A_j] − A_{[e_i, e_j]}`.
pub fn riemann(algebra: &LieAlgebra, a: &ConnectionForm) -> CurvatureTensor {
    let n = a.dim();
    let mats: Vec<DMatrix<f64>> = (0..n).map(|j| a.along_basis(j)).collect();
    let mut data = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in i + 1..n {
            let br = algebra.bracket_basis(i, j);
            let r = &mats[i] * &mats[j] - &mats[j] * &mats[i] - a.along(&br);
            for k in 0..n {
                for l in 0..n {
                    data[idx4(n, k, l, i, j)] = r[(k, l)];
                    data[idx4(n, k, l, j, i)] = -r[(k, l)];
                }
            }
        }
    }
    CurvatureTensor { dim: n, data }
}

/// `Ric(X,Y) = tr(Z ↦ R(Z,X)Y)`, symmetrized.
pub fn ricci(r: &CurvatureTensor) -> Ricci {
    let n = r.dim();
    let raw = DMatrix::from_fn(n, n, |x, y| (0..n).map(|m| r.get(m, y, m, x)).sum::<f64>());
    let asymmetry = (&raw - raw.transpose()).amax();
    Ricci {
        form: (&raw + raw.transpose()) * 0.5,
        asymmetry,
    }
}

/// `Rc = g⁻¹ Ric`, so that `g(Rc X, Y) = Ric(X, Y)`.
pub fn ricci_endomorphism(g: &Metric, ric: &DMatrix<f64>) -> Result<Endomorphism> {
    if g.dim() != ric.nrows() {
        return Err(ScfError::DimensionMismatch {
            expected: g.dim(),
            found: ric.nrows(),
        });
    }
    Ok(Endomorphism(g.solve(ric)))
}

/// `C_Z = ½(A_Z − J A_Z J)`.
pub fn chern_connection(a: &ConnectionForm, j: &Endomorphism) -> ConnectionForm {
    let jm = j.matrix();
    let mats: Vec<DMatrix<f64>> = (0..a.dim())
        .map(|z| {
            let az = a.along_basis(z);
            (&az - jm * &az * jm) * 0.5
        })
        .collect();
    ConnectionForm::from_matrices(&mats).expect("square blocks")
}

/// `P(e_i, e_j) = −tr(A_{[e_i,e_j]} J)`.
pub fn chern_ricci_trace(algebra: &LieAlgebra, a: &ConnectionForm, j: &Endomorphism) -> TwoForm {
    let n = algebra.dim();
    let jm = j.matrix();
    // t[z] = tr(A_{e_z} J)
    let traces: Vec<f64> = (0..n)
        .map(|z| (a.along_basis(z) * jm).trace())
        .collect();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in i + 1..n {
            let v: f64 = -(0..n)
                .map(|z| algebra.constant(z, i, k) * traces[z])
                .sum::<f64>();
            m[(i, k)] = v;
            m[(k, i)] = -v;
        }
    }
    TwoForm::new(m).expect("antisymmetric by construction")
}

/// `P(X,Y) = −½ tr(ad_{[X,Y]} J + J ad_{[X,Y]}) − tr ad_{J[X,Y]}`; metric-free.
pub fn chern_ricci_adjoint(algebra: &LieAlgebra, j: &Endomorphism) -> TwoForm {
    let n = algebra.dim();
    let jm = j.matrix();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in i + 1..n {
            let br = algebra.bracket_basis(i, k);
            let ad = algebra.ad_unchecked(&br);
            let ad_j = algebra.ad_unchecked(&(jm * &br));
            let v = -0.5 * (&ad * jm + jm * &ad).trace() - ad_j.trace();
            m[(i, k)] = v;
            m[(k, i)] = -v;
        }
    }
    TwoForm::new(m).expect("antisymmetric by construction")
}

pub fn nijenhuis(algebra: &LieAlgebra, j: &Endomorphism) -> NijenhuisTensor {
    let n = algebra.dim();
    let jm = j.matrix();
    let je: Vec<Vector> = (0..n).map(|i| jm.column(i).into_owned()).collect();
    let mut data = vec![0.0; n * n * n];
    for i in 0..n {
        for k in i + 1..n {
            let ei = crate::lie::basis_vector(n, i + 1);
            let ek = crate::lie::basis_vector(n, k + 1);
            let v = algebra.bracket_unchecked(&je[i], &je[k])
                - jm * algebra.bracket_unchecked(&je[i], &ek)
                - jm * algebra.bracket_unchecked(&ei, &je[k])
                - algebra.bracket_basis(i, k);
            for m in 0..n {
                data[idx3(n, m, i, k)] = v[m];
                data[idx3(n, m, k, i)] = -v[m];
            }
        }
    }
    NijenhuisTensor { dim: n, data }
}

/// `‖N‖² = Σ_{a,b} g(N(f_a,f_b), N(f_a,f_b))` over ordered pairs of a
/// `g`-orthonormal frame.
pub fn norm_nijenhuis(g: &Metric, nt: &NijenhuisTensor) -> f64 {
    let n = nt.dim();
    let f = g.orthonormal_frame();
    let cols: Vec<Vector> = (0..n).map(|a| f.column(a).into_owned()).collect();
    let mut s = 0.0;
    for a in 0..n {
        for b in 0..n {
            let v = nt.apply(&cols[a], &cols[b]);
            s += g.inner(&v, &v);
        }
    }
    s
}

/// Multiplicative factor applied to the full four-index contraction. The
/// plain contraction already reproduces the known Kodaira–Thurston value
/// `11/4 α⁴β²`, so the factor is one.
pub const RIEMANN_NORM_CALIBRATION: f64 = 1.0;

/// `‖R‖² = Σ R_abcd²`, `R_abcd = g(R(f_c,f_d) f_b, f_a)` in a `g`-orthonormal
/// frame.
pub fn norm_riemann(g: &Metric, r: &CurvatureTensor) -> f64 {
    let n = r.dim();
    let f = g.orthonormal_frame();
    // t[k][l][c][j] = Σ_i R[k][l][i][j] F[i][c]
    let mut t = vec![0.0; n * n * n * n];
    for k in 0..n {
        for l in 0..n {
            for c in 0..n {
                for j in 0..n {
                    t[idx4(n, k, l, c, j)] = (0..n).map(|i| r.get(k, l, i, j) * f[(i, c)]).sum();
                }
            }
        }
    }
    let ftg = f.transpose() * g.matrix();
    let mut s = 0.0;
    for c in 0..n {
        for d in 0..n {
            let m = DMatrix::from_fn(n, n, |k, l| {
                (0..n).map(|j| t[idx4(n, k, l, c, j)] * f[(j, d)]).sum::<f64>()
            });
            let lowered = &ftg * m * &f;
            s += lowered.iter().map(|v| v * v).sum::<f64>();
        }
    }
    RIEMANN_NORM_CALIBRATION * s
}

/// Everything curvature-related for one `(ω, J)` on an algebra.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub metric: Metric,
    pub connection: ConnectionForm,
    pub riemann: CurvatureTensor,
    pub ricci: Ricci,
    pub ricci_endomorphism: Endomorphism,
    pub chern_ricci: TwoForm,
}

impl Geometry {
    pub fn compute(algebra: &LieAlgebra, omega: &TwoForm, j: &Endomorphism) -> Result<Self> {
        let metric = crate::structure::metric_of(omega, j)?;
        let connection = levi_civita(algebra, &metric)?;
        let riemann = riemann(algebra, &connection);
        let ricci = ricci(&riemann);
        let ricci_endomorphism = ricci_endomorphism(&metric, &ricci.form)?;
        let chern_ricci = chern_ricci_trace(algebra, &connection, j);
        Ok(Self {
            metric,
            connection,
            riemann,
            ricci,
            ricci_endomorphism,
            chern_ricci,
        })
    }
}
