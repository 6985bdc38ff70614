//! The `ell` most significant bits of the distance (min-plus) product.
//!
//! With `W` a power of two exceeding every finite entry of the product, the
//! bucket index of `C[i,j]` in `[0, W)` at resolution `W/2^ell` is found by
//! one generalized strict dominance product over shifted copies of the
//! inputs: `A'_x = A - x*W/2^ceil(ell/2)` against `B'_y = -B + y*W/2^ell`
//! fires at `(i,j)` exactly when `C[i,j] < d*W/2^ell` for the combined shift
//! `d`. Running the product under the decreasing lexicographic order yields
//! the smallest firing `d` per cell: `d = 0` flags a negative entry, no `d`
//! at all leaves only the top bucket and `+inf` to separate, which one extra
//! strict dominance product (`A'_0` against `-B + W`) does.
//!
//! All thresholds are scaled integers: `W/2^ell` is a positive integer, so
//! no floating point enters any comparison.

use serde::{Deserialize, Serialize};

use crate::dominance::{dominance_product, generalized_dominance, LexOrder};
use crate::exponents::{select_parameters, OmegaParams, Task};
use crate::matrix::{ExtInt, ExtMatrix};
use crate::qsim::CostLedger;
use crate::{Engine, Error, Result};

/// Classification of one distance-product entry at resolution `ell`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "bucket", rename_all = "snake_case")]
pub enum MsbCell {
    /// Finite entry in `[0, W)`: the `ell`-bit bucket index
    /// `floor(C[i,j] * 2^ell / W)`.
    Bits(u32),
    Negative,
    Infinite,
}

impl MsbCell {
    /// The bucket as an `ell`-bit vector, most significant bit first.
    pub fn bit_vector(self, ell: u32) -> Option<Vec<bool>> {
        match self {
            MsbCell::Bits(d) => {
                Some((0..ell).rev().map(|b| (d >> b) & 1 == 1).collect())
            }
            _ => None,
        }
    }
}

/// Per-cell most-significant-bit classification of a distance product.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MsbResult {
    pub n: usize,
    pub ell: u32,
    pub w: i64,
    cells: Vec<MsbCell>,
}

impl MsbResult {
    fn filled(n: usize, ell: u32, w: i64, fill: MsbCell) -> Self {
        MsbResult { n, ell, w, cells: vec![fill; n * n] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> MsbCell {
        self.cells[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, c: MsbCell) {
        self.cells[i * self.n + j] = c;
    }
}

/// Brute-force distance product `C[i,j] = min_k (A[i,k] + B[k,j])`, with
/// `+inf` absorbing and overflow reported.
pub fn distance_brute(a: &ExtMatrix, b: &ExtMatrix) -> Result<ExtMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::Shape(format!(
            "distance {}x{} by {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mut c = ExtMatrix::filled(a.rows(), b.cols(), ExtInt::PosInf);
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            let mut best = ExtInt::PosInf;
            for k in 0..a.cols() {
                let s = a.get(i, k).checked_add(b.get(k, j))?;
                if s < best {
                    best = s;
                }
            }
            c.set(i, j, best);
        }
    }
    Ok(c)
}

/// Classifies an explicit product matrix: the oracle for [`distance_msb`].
pub fn msb_bits_oracle(c: &ExtMatrix, w: i64, ell: u32) -> Result<MsbResult> {
    validate_scale(w, ell)?;
    let n = c.rows();
    if c.cols() != n {
        return Err(Error::Shape("expected a square matrix".into()));
    }
    let bucket_width = w >> ell;
    let mut out = MsbResult::filled(n, ell, w, MsbCell::Infinite);
    for i in 0..n {
        for j in 0..n {
            let cell = match c.get(i, j) {
                ExtInt::PosInf => MsbCell::Infinite,
                ExtInt::NegInf => {
                    return Err(Error::ParamRange(
                        "distance products never contain -inf".into(),
                    ))
                }
                ExtInt::Finite(v) if v < 0 => MsbCell::Negative,
                ExtInt::Finite(v) if v >= w => {
                    return Err(Error::ParamRange(format!(
                        "finite entry {v} >= W = {w} violates the scale"
                    )))
                }
                ExtInt::Finite(v) => MsbCell::Bits((v / bucket_width) as u32),
            };
            out.set(i, j, cell);
        }
    }
    Ok(out)
}

fn validate_scale(w: i64, ell: u32) -> Result<()> {
    if ell == 0 || ell >= 63 {
        return Err(Error::ParamRange(format!("ell={ell} not in 1..=62")));
    }
    if w <= 0 || w.count_ones() != 1 {
        return Err(Error::ParamRange(format!("W={w} must be a positive power of two")));
    }
    if w < (1i64 << ell) {
        return Err(Error::ParamRange(format!("W={w} smaller than 2^ell = {}", 1i64 << ell)));
    }
    Ok(())
}

/// The scale recipe: the smallest power of two strictly larger than
/// `max_fin(A) + max_fin(B)`, raised to `2^ell` if necessary.
pub fn default_w(a: &ExtMatrix, b: &ExtMatrix, ell: u32) -> Result<i64> {
    if ell == 0 || ell >= 63 {
        return Err(Error::ParamRange(format!("ell={ell} not in 1..=62")));
    }
    let base = match (a.max_finite(), b.max_finite()) {
        (Some(ma), Some(mb)) => ma.checked_add(mb).ok_or(Error::Overflow)?,
        _ => 0,
    };
    let mut w: i64 = 1;
    while w <= base {
        w = w.checked_mul(2).ok_or(Error::Overflow)?;
    }
    Ok(w.max(1i64 << ell))
}

fn check_minplus_domain(m: &ExtMatrix) -> Result<()> {
    if m.entries().contains(&ExtInt::NegInf) {
        return Err(Error::ParamRange(
            "min-plus inputs take entries in Z ∪ {inf} only".into(),
        ));
    }
    Ok(())
}

/// Most significant bits of the distance product without forming the
/// product. `w_override` replaces the scale recipe (it must still be a power
/// of two at least `2^ell` and exceed every finite product entry).
pub fn distance_msb(
    a: &ExtMatrix,
    b: &ExtMatrix,
    ell: u32,
    w_override: Option<i64>,
    engine: Engine,
    ledger: &mut CostLedger,
) -> Result<MsbResult> {
    let n = a.rows();
    if a.cols() != n || b.rows() != n || b.cols() != n {
        return Err(Error::Shape("expected two n x n matrices".into()));
    }
    check_minplus_domain(a)?;
    check_minplus_domain(b)?;
    let w = match w_override {
        Some(w) => w,
        None => default_w(a, b, ell)?,
    };
    validate_scale(w, ell)?;

    let hi = 1u32 << ell.div_ceil(2); // u = 2^ceil(ell/2) coarse shifts
    let lo = 1u32 << (ell / 2); // v = 2^floor(ell/2) fine shifts
    let quant_a = w >> ell.div_ceil(2);
    let quant_b = w >> ell;

    let mut as_ = Vec::with_capacity(hi as usize);
    for x in 0..hi as i64 {
        let mut m = a.clone();
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, a.get(i, j).checked_sub(x * quant_a)?);
            }
        }
        as_.push(m);
    }
    let neg_b_plus = |shift: i64| -> Result<ExtMatrix> {
        let mut m = ExtMatrix::filled(n, n, ExtInt::NegInf);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, b.get(i, j).neg()?.checked_sub(-shift)?);
            }
        }
        Ok(m)
    };
    let mut bs = Vec::with_capacity(lo as usize);
    for y in 0..lo as i64 {
        bs.push(neg_b_plus(y * quant_b)?);
    }

    let m1 = as_.iter().map(ExtMatrix::finite_count).sum::<usize>();
    let sel = select_parameters(
        Task::DistMsbT { n: n.max(1), ell, classical: engine == Engine::Classical },
        &OmegaParams::default(),
    )?;
    let t = sel.t.unwrap_or(1).clamp(1, m1.max(1));

    // Decreasing order makes the per-cell maximum the smallest combined
    // shift d = (x-1)*2^floor(ell/2) + (y-1) whose product fires.
    let gd = generalized_dominance(
        &as_,
        &bs,
        t,
        LexOrder::Decreasing,
        true,
        engine,
        ledger,
    )?;

    let mut out = MsbResult::filled(n, ell, w, MsbCell::Infinite);
    let mut top_test: Option<crate::matrix::BoolMatrix> = None;
    for i in 0..n {
        for j in 0..n {
            let pair = gd.get(i, j);
            let cell = if pair.is_none() {
                // C >= (2^ell - 1) * W / 2^ell: split the top bucket from
                // +inf with one strict dominance product A'_0 * (-B + W).
                if top_test.is_none() {
                    let btop = neg_b_plus(w)?;
                    top_test =
                        Some(dominance_product(&as_[0], &btop, true, engine, ledger)?);
                }
                if top_test.as_ref().expect("just set").get(i, j) {
                    MsbCell::Bits((1u32 << ell) - 1)
                } else {
                    MsbCell::Infinite
                }
            } else {
                let d = u64::from(pair.x - 1) * u64::from(lo) + u64::from(pair.y - 1);
                if d == 0 {
                    MsbCell::Negative
                } else {
                    MsbCell::Bits((d - 1) as u32)
                }
            };
            out.set(i, j, cell);
        }
    }
    Ok(out)
}
