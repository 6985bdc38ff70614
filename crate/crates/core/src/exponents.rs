//! Rectangular matrix multiplication exponent calculus: the `omega(k1,k2,k3)`
//! upper bound built from the square exponent `omega` and the dual exponent
//! `alpha`, closed-form complexity exponents for each product, and numeric
//! parameter selection (`t`, `g`, split sizes) for concrete instances.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Exponent parameters for fast matrix multiplication.
///
/// `omega` is the square multiplication exponent; `alpha` is the largest `k`
/// such that an `n x n^k` by `n^k x n` product costs `n^{2+o(1)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaParams {
    pub omega: f64,
    pub alpha: f64,
}

impl Default for OmegaParams {
    fn default() -> Self {
        OmegaParams { omega: 2.373, alpha: 0.302 }
    }
}

impl OmegaParams {
    pub fn new(omega: f64, alpha: f64) -> Result<Self> {
        if !(2.0..=3.0).contains(&omega) {
            return Err(Error::ParamRange(format!("omega={omega} not in [2,3]")));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::ParamRange(format!("alpha={alpha} not in [0,1)")));
        }
        Ok(OmegaParams { omega, alpha })
    }

    /// `beta = (omega - 2) / (1 - alpha)`: the slope of the rectangular
    /// exponent above the flat regime.
    pub fn beta(&self) -> f64 {
        (self.omega - 2.0) / (1.0 - self.alpha)
    }

    /// Exponent of an `n x n^k` by `n^k x n` product.
    fn omega_1k1(&self, k: f64) -> f64 {
        if k <= self.alpha {
            2.0
        } else {
            2.0 + self.beta() * (k - self.alpha)
        }
    }

    /// Upper bound on the exponent of an `n^k1 x n^k2` by `n^k2 x n^k3`
    /// product. All arguments must be positive.
    ///
    /// With the dimensions sorted as `a <= b <= c`, the bound is
    /// `b * omega(1, a/b, 1) + (c - b)`: treat the two larger dimensions as
    /// square of side `n^b` (folding the excess `c - b` as a linear factor)
    /// and scale the `n^b x n^a x n^b` rectangular bound homogeneously.
    pub fn omega_bound(&self, k1: f64, k2: f64, k3: f64) -> Result<f64> {
        if k1 <= 0.0 || k2 <= 0.0 || k3 <= 0.0 {
            return Err(Error::ParamRange(format!(
                "omega_bound requires positive exponents, got ({k1},{k2},{k3})"
            )));
        }
        let mut d = [k1, k2, k3];
        d.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let [a, b, c] = d;
        let bound = b * self.omega_1k1(a / b) + (c - b);
        debug_assert!(bound + 1e-12 >= a + b && bound + 1e-12 >= b + c && bound + 1e-12 >= a + c);
        Ok(bound)
    }
}

/// Optimization equations solved by [`solve_exponent`]. Each balances the
/// search cost of a product against its multiplication cost; the unknown is
/// the split exponent `gamma` (or `mu` for the dense dominance product).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentEquation {
    /// Sparse dominance split: `mu + 2*omega(1, 1+mu, 1) = 1 + log_n(m1*m2)`,
    /// unknown `mu`, parameterized by `log_n(m1*m2)`.
    DomMu,
    /// (max,min) split: `gamma + 2*omega(1+gamma, 1+gamma, 1) = 5`.
    MaxMinGamma,
    /// Distance-bits quantum split:
    /// `5 + mu - gamma = 2*omega(1 + mu/2, 1 + gamma, 1 + mu/2)`.
    DistQGamma,
    /// Distance-bits classical split:
    /// `3 + mu - gamma = omega(1 + mu/2, 1 + gamma, 1 + mu/2)`.
    DistCGamma,
}

/// Residual whose zero the bisection hunts: `rhs(x) - lhs(x)` oriented so the
/// residual is increasing in `x`.
fn residual(eq: ExponentEquation, x: f64, aux: f64, p: &OmegaParams) -> Result<f64> {
    Ok(match eq {
        ExponentEquation::DomMu => x + 2.0 * p.omega_bound(1.0, 1.0 + x, 1.0)? - (1.0 + aux),
        ExponentEquation::MaxMinGamma => {
            x + 2.0 * p.omega_bound(1.0 + x, 1.0 + x, 1.0)? - 5.0
        }
        ExponentEquation::DistQGamma => {
            2.0 * p.omega_bound(1.0 + aux / 2.0, 1.0 + x, 1.0 + aux / 2.0)? - (5.0 + aux - x)
        }
        ExponentEquation::DistCGamma => {
            p.omega_bound(1.0 + aux / 2.0, 1.0 + x, 1.0 + aux / 2.0)? - (3.0 + aux - x)
        }
    })
}

/// Solve `eq` for its unknown by bisection on `[0, 4]` to absolute tolerance
/// `1e-9`. `aux` carries the fixed parameter of the equation (`log_n(m1*m2)`
/// for [`ExponentEquation::DomMu`], `mu` for the distance equations, unused
/// for the (max,min) equation).
///
/// All four residuals are increasing in the unknown. If the residual is
/// already nonnegative at `0` the constrained optimum is the boundary and the
/// solver returns `0`; a residual still negative at `4` is reported as
/// [`Error::NoBracket`].
pub fn solve_exponent(eq: ExponentEquation, aux: f64, p: &OmegaParams) -> Result<f64> {
    let mut lo = 0.0f64;
    let mut hi = 4.0f64;
    if residual(eq, lo, aux, p)? >= 0.0 {
        return Ok(0.0);
    }
    if residual(eq, hi, aux, p)? < 0.0 {
        return Err(Error::NoBracket(format!("{eq:?} with aux={aux} has no root in [0,4]")));
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if residual(eq, mid, aux, p)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The headline complexity exponents, in closed form, for the default
/// `(omega, alpha)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentTable {
    /// (max,min) product, quantum: `(12 - 6*alpha*beta + beta) / (5 - 2*alpha*beta)`.
    pub max_min: f64,
    /// Dense existence dominance, quantum: `(5 + omega) / 3`.
    pub dominance_dense: f64,
    /// (max,min) product, best classical: `(3 + omega) / 2`.
    pub max_min_classical: f64,
    /// Distance-bits quantum coefficient: exponent is
    /// `(4 - alpha*beta)/6 * ell + ...` in the number of bits `ell`.
    pub dist_msb_quantum_coeff: f64,
    /// Distance-bits classical coefficient: `1 - alpha*beta/4` per bit.
    pub dist_msb_classical_coeff: f64,
    /// Sparse Boolean, exponent of `sqrt(m1*m2)`: `2*beta / (1 + 2*beta)`.
    pub bool_sparse_m_exponent: f64,
    /// Sparse Boolean, exponent of `n`: `(2 + 2*beta - alpha*beta) / (1 + 2*beta)`.
    pub bool_sparse_n_exponent: f64,
    /// Value of the sparse Boolean exponent at the dense crossover
    /// `log_n sqrt(m1*m2) = (1 + omega) / 2 ... /2`.
    pub bool_sparse_crossover: f64,
    /// Lower sparsity threshold `log_n sqrt(m1*m2)` below which the quadratic
    /// regime applies: `1 + alpha/2`.
    pub threshold_low: f64,
    /// Upper threshold above which dense multiplication wins: `omega - 1/2`.
    pub threshold_high: f64,
}

/// Closed-form exponent table for the given parameters.
pub fn closed_form_exponent_table(p: &OmegaParams) -> ExponentTable {
    let (w, a, b) = (p.omega, p.alpha, p.beta());
    let ab = a * b;
    ExponentTable {
        max_min: (12.0 - 6.0 * ab + b) / (5.0 - 2.0 * ab),
        dominance_dense: (5.0 + w) / 3.0,
        max_min_classical: (3.0 + w) / 2.0,
        dist_msb_quantum_coeff: (4.0 - ab) / 6.0,
        dist_msb_classical_coeff: 1.0 - ab / 4.0,
        bool_sparse_m_exponent: 2.0 * b / (1.0 + 2.0 * b),
        bool_sparse_n_exponent: (2.0 + 2.0 * b - ab) / (1.0 + 2.0 * b),
        bool_sparse_crossover: {
            let s = (1.0 + w) / 2.0;
            (2.0 * b / (1.0 + 2.0 * b)) * s + (2.0 + 2.0 * b - ab) / (1.0 + 2.0 * b)
        },
        threshold_low: 1.0 + a / 2.0,
        threshold_high: w - 0.5,
    }
}

/// Which product's parameters to select.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Task {
    /// Number of parts `t` for the dominance product with `m1`, `m2` finite
    /// entries.
    DominanceT { n: usize, m1: usize, m2: usize },
    /// Row-part size `g` for leftslice via the balance `delta + gamma = 1`.
    MaxMinG { n: usize },
    /// Part count `t` for the distance-bits dominance calls at `ell` bits.
    DistMsbT { n: usize, ell: u32, classical: bool },
    /// Split size `ell2` (and companions) for sparse Boolean multiplication.
    BoolSparse { n: usize, m1: usize, m2: usize },
}

/// Sparse Boolean regime, ordered from sparsest to densest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SparseRegime {
    /// `sqrt(m1*m2) <= n`: enumerate the sparser matrix and expand.
    SparseExpand,
    /// `n < sqrt(m1*m2) <= n^{1+alpha/2}`: quadratic-time regime.
    Quadratic,
    /// Middle regime with the three-split decomposition.
    Middle,
    /// `sqrt(m1*m2) > n^{omega - 1/2}`: dense multiplication wins.
    Dense,
}

/// Selected numeric parameters for a task; fields irrelevant to the task are
/// `None`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub t: Option<usize>,
    pub g: Option<usize>,
    pub gamma: Option<f64>,
    pub l1: Option<usize>,
    pub l2: Option<usize>,
    pub l3: Option<usize>,
    pub regime: Option<SparseRegime>,
    /// Model exponent of the selected strategy on this instance.
    pub model_exponent: Option<f64>,
}

/// Select concrete parameters for `task`, rounding optimal real-valued splits
/// to integers and clamping to valid ranges.
pub fn select_parameters(task: Task, p: &OmegaParams) -> Result<Parameters> {
    let mut out = Parameters::default();
    match task {
        Task::DominanceT { n, m1, m2 } => {
            if n == 0 {
                return Err(Error::ParamRange("n must be positive".into()));
            }
            // t = ceil((m1*m2)^{1/3} * n^{(1-2*omega)/3}), clamped to [1, n^2]
            let nf = n as f64;
            let raw = ((m1 as f64) * (m2 as f64)).powf(1.0 / 3.0)
                * nf.powf((1.0 - 2.0 * p.omega) / 3.0);
            let t = (raw.ceil() as usize).clamp(1, n * n);
            out.t = Some(t);
            if n > 1 {
                let logn = nf.ln();
                let lt = 1.0 + (t as f64).ln() / logn;
                out.model_exponent = Some(p.omega_bound(1.0, lt, 1.0)?);
            }
        }
        Task::MaxMinG { n } => {
            if n == 0 {
                return Err(Error::ParamRange("n must be positive".into()));
            }
            let gamma = solve_exponent(ExponentEquation::MaxMinGamma, 0.0, p)?;
            // delta + gamma = 1, g = ceil(n^delta), so parts per row
            // s = ceil(n/g) ~ n^gamma.
            let g = ((n as f64).powf(1.0 - gamma).ceil() as usize).clamp(1, n);
            out.g = Some(g);
            out.gamma = Some(gamma);
            out.model_exponent = Some(closed_form_exponent_table(p).max_min);
        }
        Task::DistMsbT { n, ell, classical } => {
            if n == 0 {
                return Err(Error::ParamRange("n must be positive".into()));
            }
            if n == 1 {
                out.t = Some(1);
                return Ok(out);
            }
            // mu = ell * ln 2 / ln n is the bit budget in exponent units.
            let mu = (ell as f64) * std::f64::consts::LN_2 / (n as f64).ln();
            let eq = if classical {
                ExponentEquation::DistCGamma
            } else {
                ExponentEquation::DistQGamma
            };
            let gamma = solve_exponent(eq, mu, p)?;
            out.gamma = Some(gamma);
            let t = ((n as f64).powf(gamma).ceil() as usize).clamp(1, n * n);
            out.t = Some(t);
        }
        Task::BoolSparse { n, m1, m2 } => {
            if n == 0 {
                return Err(Error::ParamRange("n must be positive".into()));
            }
            let nf = n as f64;
            let m = ((m1 as f64) * (m2 as f64)).sqrt();
            let b = p.beta();
            let regime = if m <= nf {
                SparseRegime::SparseExpand
            } else if m <= nf.powf(1.0 + p.alpha / 2.0) {
                SparseRegime::Quadratic
            } else if m <= nf.powf(p.omega - 0.5) {
                SparseRegime::Middle
            } else {
                SparseRegime::Dense
            };
            out.regime = Some(regime);
            match regime {
                SparseRegime::SparseExpand => {
                    out.model_exponent = Some(if n > 1 {
                        (m.max(1.0).ln() / nf.ln() + 1.0).max(2.0)
                    } else {
                        2.0
                    });
                }
                SparseRegime::Quadratic => {
                    // ell1 = m1, ell2 = m1*m2/n^2, ell3 = m2
                    let l2 =
                        ((m1 as f64 * m2 as f64) / (nf * nf)).ceil().max(1.0) as usize;
                    out.l1 = Some(m1.max(1));
                    out.l2 = Some(l2.clamp(1, m2.max(1)));
                    out.l3 = Some(m2.max(1));
                    out.model_exponent = Some(2.0);
                }
                SparseRegime::Middle => {
                    // ell1 = m1, ell3 = m2, and
                    // ell2 = (m1*m2)^{1/(1+2*beta)} * n^{2(alpha*beta - 1)/(1+2*beta)}
                    let l2f = (m1 as f64 * m2 as f64).powf(1.0 / (1.0 + 2.0 * b))
                        * nf.powf(2.0 * (p.alpha * b - 1.0) / (1.0 + 2.0 * b));
                    out.l1 = Some(m1.max(1));
                    out.l2 = Some((l2f.ceil() as usize).clamp(1, m2.max(1)));
                    out.l3 = Some(m2.max(1));
                    let tab = closed_form_exponent_table(p);
                    out.model_exponent = Some(if n > 1 {
                        tab.bool_sparse_m_exponent * (m.max(1.0).ln() / nf.ln())
                            + tab.bool_sparse_n_exponent
                    } else {
                        2.0
                    });
                }
                SparseRegime::Dense => {
                    out.model_exponent = Some(p.omega);
                }
            }
        }
    }
    Ok(out)
}
