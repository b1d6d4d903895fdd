//! Worked examples with closed-form or reduced dynamics.
//!
//! * `kodaira_thurston`: the abelian-complement family on `h₃ ⊕ ℝ`,
//!   parameters `(α, β)`.
//! * `heisenberg_sum`: the three-parameter family on `h₃ ⊕ h₃`.
//! * `n4`: the filiform algebra with the one-parameter closed-form solution
//!   `y(t) = (1 + 5t/2)^{1/5}`.

use nalgebra::DMatrix;

use crate::error::{Result, ScfError};
use crate::flow::FlowState;
use crate::lie::{LieAlgebra, TwoForm};
use crate::structure::{check_structure, AlmostKahler, Endomorphism};
use crate::tol;

pub const ENTRY_NAMES: [&str; 3] = ["kodaira_thurston", "heisenberg_sum", "n4"];

pub fn list_entries() -> &'static [&'static str] {
    &ENTRY_NAMES
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    KodairaThurston { alpha: f64, beta: f64 },
    HeisenbergSum { alpha: f64, beta: f64, gamma: f64 },
    N4,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    name: &'static str,
    family: Family,
    initial: AlmostKahler,
}

/// Look up an entry by name. Parameters not used by the family are ignored;
/// missing ones default to 1.
pub fn entry_by_name(
    name: &str,
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
) -> Result<CatalogEntry> {
    let a = alpha.unwrap_or(1.0);
    let b = beta.unwrap_or(1.0);
    let g = gamma.unwrap_or(1.0);
    match name {
        "kodaira_thurston" => kodaira_thurston(a, b),
        "heisenberg_sum" => heisenberg_sum(a, b, g),
        "n4" => Ok(n4_entry()),
        _ => Err(ScfError::Domain("unknown catalog entry")),
    }
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ScfError::InvalidParameter { name, value })
    }
}

pub fn kodaira_thurston(alpha: f64, beta: f64) -> Result<CatalogEntry> {
    let alpha = positive("alpha", alpha)?;
    let beta = positive("beta", beta)?;
    Ok(CatalogEntry {
        name: "kodaira_thurston",
        family: Family::KodairaThurston { alpha, beta },
        initial: AlmostKahler::new(LieAlgebra::heisenberg3_plus_line(), kt_omega(), kt_j(alpha, beta))?,
    })
}

fn kt_omega() -> TwoForm {
    &TwoForm::wedge(4, 1, 3) - &TwoForm::wedge(4, 2, 4)
}

fn kt_j(alpha: f64, beta: f64) -> Endomorphism {
    Endomorphism(DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, 0.0, -alpha, 0.0, //
            0.0, 0.0, 0.0, beta, //
            1.0 / alpha, 0.0, 0.0, 0.0, //
            0.0, -1.0 / beta, 0.0, 0.0,
        ],
    ))
}

pub fn heisenberg_sum(alpha: f64, beta: f64, gamma: f64) -> Result<CatalogEntry> {
    let alpha = positive("alpha", alpha)?;
    let beta = positive("beta", beta)?;
    let gamma = positive("gamma", gamma)?;
    Ok(CatalogEntry {
        name: "heisenberg_sum",
        family: Family::HeisenbergSum { alpha, beta, gamma },
        initial: AlmostKahler::new(
            LieAlgebra::heisenberg3_squared(),
            hs_omega(),
            hs_j(alpha, beta, gamma),
        )?,
    })
}

fn hs_omega() -> TwoForm {
    &(&TwoForm::wedge(6, 1, 5) + &TwoForm::wedge(6, 2, 4)) + &TwoForm::wedge(6, 3, 6)
}

fn hs_j(alpha: f64, beta: f64, gamma: f64) -> Endomorphism {
    let mut j = DMatrix::zeros(6, 6);
    j[(0, 4)] = -alpha;
    j[(1, 3)] = -beta;
    j[(2, 5)] = -gamma;
    j[(3, 1)] = 1.0 / beta;
    j[(4, 0)] = 1.0 / alpha;
    j[(5, 2)] = 1.0 / gamma;
    Endomorphism(j)
}

/// Parameters of the `n4` family
///
/// ```text
///       ⎡ 0  a' b' 0  ⎤
///   J = ⎢ a  0  0  c' ⎥ ,   ω = e¹³ + e²⁴ + γ e¹²,   γ = (a' + d)/b'.
///       ⎢ b  0  0  d' ⎥
///       ⎣ 0  c  d  0  ⎦
/// ```
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct N4FamilyParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub ap: f64,
    pub bp: f64,
    pub cp: f64,
    pub dp: f64,
}

impl N4FamilyParams {
    /// Closed-form solution in terms of `y = (1 + 5t/2)^{1/5}`.
    pub fn analytic(y: f64) -> Self {
        let (y1, y3) = (1.0 / y, y.powi(-3));
        Self {
            a: y1 - y3,
            b: 2.0 * y1 - y3,
            c: 2.0 * y - y1,
            d: -y + y1,
            ap: -y + y1,
            bp: -y1,
            cp: -y3,
            dp: y1 - y3,
        }
    }

    /// Parameters determined by the invertible block `Y = [[a, c'], [b, d']]`;
    /// the remaining ones follow from `[[a', b'], [c, d]] = −Y⁻¹`.
    pub fn from_block(a: f64, b: f64, cp: f64, dp: f64) -> Result<Self> {
        let det = a * dp - cp * b;
        if det.abs() < tol::RANK {
            return Err(ScfError::FamilyConstraint {
                relation: "ad' - bc' != 0",
                residual: det,
            });
        }
        Ok(Self {
            a,
            b,
            cp,
            dp,
            ap: -dp / det,
            bp: cp / det,
            c: b / det,
            d: -a / det,
        })
    }

    pub fn gamma(&self) -> f64 {
        (self.ap + self.d) / self.bp
    }

    /// The relations making `J² = −1`, with residuals.
    pub fn constraint_residuals(&self) -> [(&'static str, f64); 8] {
        let p = self;
        [
            ("aa'+bb' = -1", p.a * p.ap + p.b * p.bp + 1.0),
            ("aa'+cc' = -1", p.a * p.ap + p.c * p.cp + 1.0),
            ("bb'+dd' = -1", p.b * p.bp + p.d * p.dp + 1.0),
            ("cc'+dd' = -1", p.c * p.cp + p.d * p.dp + 1.0),
            ("ac+bd = 0", p.a * p.c + p.b * p.d),
            ("a'c'+b'd' = 0", p.ap * p.cp + p.bp * p.dp),
            ("ab'+c'd = 0", p.a * p.bp + p.cp * p.d),
            ("a'b+cd' = 0", p.ap * p.b + p.c * p.dp),
        ]
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.bp.abs() < tol::RANK {
            return Err(ScfError::FamilyConstraint {
                relation: "b' != 0",
                residual: self.bp,
            });
        }
        for (relation, residual) in self.constraint_residuals() {
            if residual.abs() > tol {
                return Err(ScfError::FamilyConstraint { relation, residual });
            }
        }
        Ok(())
    }

    pub fn omega(&self) -> TwoForm {
        let base = &TwoForm::wedge(4, 1, 3) + &TwoForm::wedge(4, 2, 4);
        &base + &(&TwoForm::wedge(4, 1, 2) * self.gamma())
    }

    pub fn j(&self) -> Endomorphism {
        let p = self;
        Endomorphism(DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, p.ap, p.bp, 0.0, //
                p.a, 0.0, 0.0, p.cp, //
                p.b, 0.0, 0.0, p.dp, //
                0.0, p.c, p.d, 0.0,
            ],
        ))
    }

    /// Read the parameters off `J`, returning them with the largest
    /// deviation of `(ω, J)` from the family shape.
    pub fn project(omega: &TwoForm, j: &Endomorphism) -> (Self, f64) {
        let m = j.matrix();
        let p = Self {
            a: m[(1, 0)],
            b: m[(2, 0)],
            c: m[(3, 1)],
            d: m[(3, 2)],
            ap: m[(0, 1)],
            bp: m[(0, 2)],
            cp: m[(1, 3)],
            dp: m[(2, 3)],
        };
        let residual = if p.bp.abs() < tol::RANK {
            f64::INFINITY
        } else {
            let dj = (m - p.j().matrix()).amax();
            let dw = (omega.matrix() - p.omega().matrix()).amax();
            dj.max(dw)
        };
        (p, residual)
    }
}

pub fn n4_family(params: N4FamilyParams) -> Result<AlmostKahler> {
    params.validate(tol::STRUCTURE)?;
    let omega = params.omega();
    let j = params.j();
    let algebra = LieAlgebra::n4();
    let report = check_structure(&algebra, &omega, &j, tol::STRUCTURE)?;
    if !report.metric_ok() {
        return Err(ScfError::IncompatiblePair {
            min_eigenvalue: report.min_eig_g,
        });
    }
    AlmostKahler::new(algebra, omega, j)
}

pub fn n4_entry() -> CatalogEntry {
    CatalogEntry {
        name: "n4",
        family: Family::N4,
        initial: n4_family(N4FamilyParams::analytic(1.0)).expect("initial n4 structure is valid"),
    }
}

/// Right-hand side of the reduced equation `η' = 3 η^{1/6} (η + c)^{1/6}`
/// for the `heisenberg_sum` family, where `η = L γ⁻³`.
pub fn reduced_eta_rhs(eta: f64, c: f64) -> Result<f64> {
    if !(eta > 0.0) || !(eta + c > 0.0) {
        return Err(ScfError::Domain("reduced equation needs eta > 0 and eta + c > 0"));
    }
    Ok(3.0 * eta.powf(1.0 / 6.0) * (eta + c).powf(1.0 / 6.0))
}

/// Solution of the reduced equation for `c = 0`: `η = (η₀^{2/3} + 2t)^{3/2}`.
pub fn reduced_eta_balanced(eta0: f64, t: f64) -> f64 {
    (eta0.powf(2.0 / 3.0) + 2.0 * t).powf(1.5)
}

impl CatalogEntry {
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn algebra(&self) -> &LieAlgebra {
        self.initial.algebra()
    }

    pub fn initial(&self) -> &AlmostKahler {
        &self.initial
    }

    pub fn initial_state(&self) -> FlowState {
        FlowState::new(0.0, self.initial.omega().clone(), self.initial.j().clone())
    }

    /// Names and values of the family parameters at `t = 0`.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match self.family {
            Family::KodairaThurston { alpha, beta } => vec![("alpha", alpha), ("beta", beta)],
            Family::HeisenbergSum { alpha, beta, gamma } => {
                vec![("alpha", alpha), ("beta", beta), ("gamma", gamma)]
            }
            Family::N4 => Vec::new(),
        }
    }

    pub fn description(&self) -> &'static str {
        match self.family {
            Family::KodairaThurston { .. } => "h3 + R, omega = e13 - e24, J in (alpha, beta)",
            Family::HeisenbergSum { .. } => {
                "h3 + h3, omega = e15 + e24 + e36, J in (alpha, beta, gamma)"
            }
            Family::N4 => "filiform n4, omega = e13 + e24 + gamma e12, closed-form y(t)",
        }
    }

    pub fn conserved_names(&self) -> Vec<&'static str> {
        match self.family {
            Family::KodairaThurston { .. } => vec!["alpha^(-2/3)*beta^(4/3)"],
            Family::HeisenbergSum { .. } => vec!["beta^2*gamma/alpha", "xi-eta"],
            Family::N4 => Vec::new(),
        }
    }

    /// Closed-form state at time `t`, where one is known: always for the
    /// Kodaira–Thurston and `n4` entries, and for `heisenberg_sum` when
    /// `β₀ = γ₀/α₀`.
    pub fn analytic(&self, t: f64) -> Option<FlowState> {
        match self.family {
            Family::KodairaThurston { alpha, beta } => {
                let s = 1.0 + 2.5 * alpha * alpha * beta * t;
                (s > 0.0).then(|| {
                    FlowState::new(t, kt_omega(), kt_j(alpha * s.powf(-0.4), beta * s.powf(-0.2)))
                })
            }
            Family::HeisenbergSum { alpha, beta, gamma } => {
                let balanced = (beta - gamma / alpha).abs() <= 1e-12 * beta.max(1.0);
                let s = 1.0 + 2.0 * alpha * gamma * t;
                (balanced && s > 0.0).then(|| {
                    let r = s.powf(-0.5);
                    FlowState::new(t, hs_omega(), hs_j(alpha * r, beta, gamma * r))
                })
            }
            Family::N4 => {
                let s = 1.0 + 2.5 * t;
                (s > 0.0).then(|| {
                    let p = N4FamilyParams::analytic(s.powf(0.2));
                    FlowState::new(t, p.omega(), p.j())
                })
            }
        }
    }

    /// Family parameters of `state`, or `OutsideFamily` when it deviates
    /// from the family shape by more than `tol`.
    pub fn project(&self, state: &FlowState, tol: f64) -> Result<Vec<f64>> {
        let (values, residual) = match self.family {
            Family::KodairaThurston { .. } => {
                let m = state.j.matrix();
                let (a, b) = (-m[(0, 2)], m[(1, 3)]);
                let res = if a > 0.0 && b > 0.0 {
                    (m - kt_j(a, b).matrix())
                        .amax()
                        .max((state.omega.matrix() - kt_omega().matrix()).amax())
                } else {
                    f64::INFINITY
                };
                (vec![a, b], res)
            }
            Family::HeisenbergSum { .. } => {
                let m = state.j.matrix();
                let (a, b, g) = (-m[(0, 4)], -m[(1, 3)], -m[(2, 5)]);
                let res = if a > 0.0 && b > 0.0 && g > 0.0 {
                    (m - hs_j(a, b, g).matrix())
                        .amax()
                        .max((state.omega.matrix() - hs_omega().matrix()).amax())
                } else {
                    f64::INFINITY
                };
                (vec![a, b, g], res)
            }
            Family::N4 => {
                let (p, res) = N4FamilyParams::project(&state.omega, &state.j);
                (vec![p.a, p.b, p.c, p.d, p.ap, p.bp, p.cp, p.dp], res)
            }
        };
        if residual > tol {
            return Err(ScfError::OutsideFamily {
                family: self.name,
                residual,
            });
        }
        Ok(values)
    }

    /// Conserved quantities evaluated at `state`.
    pub fn conserved(&self, state: &FlowState, tol: f64) -> Result<Vec<(String, f64)>> {
        let names = self.conserved_names();
        let values = match self.family {
            Family::KodairaThurston { .. } => {
                let p = self.project(state, tol)?;
                vec![p[0].powf(-2.0 / 3.0) * p[1].powf(4.0 / 3.0)]
            }
            Family::HeisenbergSum { alpha, beta, gamma } => {
                let p = self.project(state, tol)?;
                let (a, b, g) = (p[0], p[1], p[2]);
                let l = heisenberg_sum_scale(alpha, beta, gamma);
                vec![b * b * g / a, xi_minus_eta(l, a, g)]
            }
            Family::N4 => Vec::new(),
        };
        Ok(names.into_iter().map(String::from).zip(values).collect())
    }
}

/// `L = β₀ (γ₀/α₀)^{1/2}`.
pub fn heisenberg_sum_scale(alpha0: f64, beta0: f64, gamma0: f64) -> f64 {
    beta0 * (gamma0 / alpha0).sqrt()
}

/// `ξ − η = L⁻¹α⁻³ − Lγ⁻³`.
pub fn xi_minus_eta(l: f64, alpha: f64, gamma: f64) -> f64 {
    alpha.powi(-3) / l - l * gamma.powi(-3)
}
