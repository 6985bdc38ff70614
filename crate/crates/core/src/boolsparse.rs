//! Output-insensitive sparse Boolean matrix multiplication.
//!
//! The product splits into four easier terms driven by degree thresholds:
//! `A·B = A_T^S·B_S^U + A^{S'}·B_{S'} + A_{T'}·B + A·B^{U'}` (entrywise OR),
//! where `S`/`T`/`U` collect the heavy rows of `B`, heavy rows of `A`, and
//! heavy columns of `B` respectively. The first term compresses to a product
//! of dimensions at most `min(l1,n) x min(l2,n) x min(l3,n)`; the remaining
//! three touch only light indices and are recovered by repeated searches
//! over explicit witness spaces with a strike-out set, so the charge adapts
//! to the number of output nonzeros without knowing it in advance.
//!
//! [`auto_sparse_bool_product`] picks the parameters from the input
//! densities: expand the sparser matrix row by row when
//! `sqrt(m1*m2) <= n`, the three-split with closed-form thresholds in the
//! two intermediate regimes, and a plain dense multiply past
//! `n^{omega - 1/2}`.

use crate::exponents::{select_parameters, OmegaParams, SparseRegime, Task};
use crate::matrix::BoolMatrix;
use crate::qsim::{q_enumerate, CostLedger, IndexSpace, PrefixSpace, SearchSpace};
use crate::{Engine, Error, Result};

/// Row/column nonzero counts of a pair of Boolean matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    pub a_row: Vec<usize>,
    pub a_col: Vec<usize>,
    pub b_row: Vec<usize>,
    pub b_col: Vec<usize>,
    pub m1: usize,
    pub m2: usize,
}

pub fn degree_profile(a: &BoolMatrix, b: &BoolMatrix) -> Result<DegreeProfile> {
    let n = check_square_pair(a, b)?;
    let mut p = DegreeProfile {
        a_row: vec![0; n],
        a_col: vec![0; n],
        b_row: vec![0; n],
        b_col: vec![0; n],
        m1: 0,
        m2: 0,
    };
    for i in 0..n {
        for k in a.row_indices(i) {
            p.a_row[i] += 1;
            p.a_col[k] += 1;
        }
        for j in b.row_indices(i) {
            p.b_row[i] += 1;
            p.b_col[j] += 1;
        }
    }
    p.m1 = p.a_row.iter().sum();
    p.m2 = p.b_row.iter().sum();
    Ok(p)
}

/// The six threshold sets; each primed set is the complement of its partner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSets {
    pub s: Vec<usize>,
    pub s_prime: Vec<usize>,
    pub t: Vec<usize>,
    pub t_prime: Vec<usize>,
    pub u: Vec<usize>,
    pub u_prime: Vec<usize>,
}

fn check_square_pair(a: &BoolMatrix, b: &BoolMatrix) -> Result<usize> {
    let n = a.rows();
    if a.cols() != n || b.rows() != n || b.cols() != n {
        return Err(Error::Shape("expected two n x n Boolean matrices".into()));
    }
    Ok(n)
}

/// Splits `{0..n}` by the degree thresholds `m2/l2` (rows of `B`), `m1/l1`
/// (rows of `A`) and `m2/l3` (columns of `B`). Comparisons cross-multiply,
/// so boundaries are exact: a degree equal to the threshold lands in the
/// heavy set. A zero matrix leaves its heavy sets empty.
pub fn classify_indices(
    a: &BoolMatrix,
    b: &BoolMatrix,
    l1: usize,
    l2: usize,
    l3: usize,
) -> Result<IndexSets> {
    let n = check_square_pair(a, b)?;
    let p = degree_profile(a, b)?;
    if p.m1 > 0 && !(1..=p.m1).contains(&l1) {
        return Err(Error::ParamRange(format!("l1={l1} not in 1..={}", p.m1)));
    }
    if p.m2 > 0 && (!(1..=p.m2).contains(&l2) || !(1..=p.m2).contains(&l3)) {
        return Err(Error::ParamRange(format!(
            "l2={l2}, l3={l3} must lie in 1..={}",
            p.m2
        )));
    }
    // degree >= m/l without floats: degree * l >= m
    let heavy = |deg: usize, l: usize, m: usize| m > 0 && (deg as u128) * (l as u128) >= m as u128;
    let split = |f: &dyn Fn(usize) -> bool| -> (Vec<usize>, Vec<usize>) {
        (0..n).partition(|&k| f(k))
    };
    let (s, s_prime) = split(&|k| heavy(p.b_row[k], l2, p.m2));
    let (t, t_prime) = split(&|k| heavy(p.a_row[k], l1, p.m1));
    let (u, u_prime) = split(&|k| heavy(p.b_col[k], l3, p.m2));
    Ok(IndexSets { s, s_prime, t, t_prime, u, u_prime })
}

fn membership_mask(n: usize, set: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &k in set {
        mask[k] = true;
    }
    mask
}

/// Runs one adaptive search round: quantum charges under `QuantumSim`,
/// a fully scanned space charged linearly under `Classical`.
fn run_enumeration<S: SearchSpace>(
    space: &S,
    mut pred: impl FnMut(&S::Item) -> bool,
    engine: Engine,
    ledger: &mut CostLedger,
    phase: &str,
) -> Vec<S::Item> {
    match engine {
        Engine::QuantumSim => q_enumerate(space, pred, ledger, phase),
        Engine::Classical => {
            let size = space.size();
            let mut found = Vec::new();
            for idx in 0..size {
                let item = space.item(idx);
                if pred(&item) {
                    found.push(item);
                }
            }
            ledger.charge_classical(phase, 2 * size as u64);
            found
        }
    }
}

/// Model cost of multiplying `n1 x n2` by `n2 x n3` Boolean matrices.
fn rect_model_cost(n1: usize, n2: usize, n3: usize) -> Result<f64> {
    let base = n1.max(n2).max(n3);
    if base <= 1 {
        return Ok(1.0);
    }
    let logb = (base as f64).ln();
    let k = |d: usize| ((d.max(1) as f64).ln() / logb).max(1e-9);
    let e = OmegaParams::default().omega_bound(k(n1), k(n2), k(n3))?;
    Ok((base as f64).powf(e))
}

/// The four-term sparse product with explicit thresholds. Always equals
/// `a.multiply(b)`; only the cost profile depends on the parameters.
pub fn sparse_bool_product(
    a: &BoolMatrix,
    b: &BoolMatrix,
    l1: usize,
    l2: usize,
    l3: usize,
    engine: Engine,
    ledger: &mut CostLedger,
) -> Result<BoolMatrix> {
    let n = check_square_pair(a, b)?;
    let m1 = a.count_ones();
    let m2 = b.count_ones();
    let mut result = BoolMatrix::zeros(n, n);
    if m1 == 0 || m2 == 0 {
        ledger.charge_classical("term1-multiply", (n * n) as u64);
        return Ok(result);
    }
    let sets = classify_indices(a, b, l1, l2, l3)?;
    // |S| <= l2 etc.: each heavy index contributes >= m/l to the total m
    assert!(sets.s.len() <= l2 && sets.t.len() <= l1 && sets.u.len() <= l3);

    // Term 1: heavy rows of A against heavy rows/columns of B, compressed
    // to |T| x |S| by |S| x |U|.
    ledger.charge_classical("term1-multiply", (n * n) as u64);
    if !sets.s.is_empty() && !sets.t.is_empty() && !sets.u.is_empty() {
        let (ts, ss, us) = (sets.t.len(), sets.s.len(), sets.u.len());
        assert!(ts <= l1.min(n) && ss <= l2.min(n) && us <= l3.min(n));
        let mut at = BoolMatrix::zeros(ts, ss);
        for (ti, &i) in sets.t.iter().enumerate() {
            for (si, &k) in sets.s.iter().enumerate() {
                if a.get(i, k) {
                    at.set(ti, si, true);
                }
            }
        }
        let mut bs = BoolMatrix::zeros(ss, us);
        for (si, &k) in sets.s.iter().enumerate() {
            for (ui, &j) in sets.u.iter().enumerate() {
                if b.get(k, j) {
                    bs.set(si, ui, true);
                }
            }
        }
        let prod = at.multiply(&bs)?;
        ledger.charge_classical("term1-multiply", (ts * ss + ss * us + ts * us) as u64);
        ledger.charge_model_multiply(
            "term1-multiply",
            rect_model_cost(l1.min(n), l2.min(n), l3.min(n))?,
        );
        for (ti, &i) in sets.t.iter().enumerate() {
            for (ui, &j) in sets.u.iter().enumerate() {
                if prod.get(ti, ui) {
                    result.set(i, j, true);
                }
            }
        }
    }

    // Term 2: light rows of B. Every witness (i,k,j) with k light is one
    // point of a prefix space over the nonzeros of A^{S'}; strike each
    // output cell on first discovery.
    ledger.charge_classical("term2-enumerate", (n * n) as u64);
    let sp_mask = membership_mask(n, &sets.s_prime);
    let mut pairs: Vec<(usize, usize)> = Vec::new(); // (i, k): nonzeros of A^{S'}
    for i in 0..n {
        for k in a.row_indices(i) {
            if sp_mask[k] {
                pairs.push((i, k));
            }
        }
    }
    let b_rows: Vec<Vec<usize>> = (0..n).map(|k| b.row_indices(k)).collect();
    let space = PrefixSpace::new(pairs.iter().map(|&(_, k)| b_rows[k].len() as u64));
    let mut sigma = BoolMatrix::zeros(n, n);
    let found2 = run_enumeration(
        &space,
        |&(p, q)| {
            let (i, k) = pairs[p];
            let j = b_rows[k][q];
            if sigma.get(i, j) {
                false
            } else {
                sigma.set(i, j, true);
                true
            }
        },
        engine,
        ledger,
        "term2-enumerate",
    );
    let lambda2 = found2.len();
    for (p, q) in found2 {
        let (i, k) = pairs[p];
        result.set(i, b_rows[k][q], true);
    }

    // Terms 3 and 4: light rows of A / light columns of B, searched per
    // inner index k over explicit witness rectangles with one strike-out
    // set per term.
    let tp_mask = membership_mask(n, &sets.t_prime);
    let up_mask = membership_mask(n, &sets.u_prime);
    let mut a_cols: Vec<Vec<usize>> = vec![Vec::new(); n]; // rows of each column of A
    for i in 0..n {
        for k in a.row_indices(i) {
            a_cols[k].push(i);
        }
    }
    let mut witnesses3: u128 = 0;
    for (phase, light_rows) in [("term3-enumerate", true), ("term4-enumerate", false)] {
        ledger.charge_classical(phase, (n * n) as u64);
        let mut sigma = BoolMatrix::zeros(n, n);
        for k in 0..n {
            let rows: Vec<usize> = if light_rows {
                a_cols[k].iter().copied().filter(|&i| tp_mask[i]).collect()
            } else {
                a_cols[k].clone()
            };
            let cols: Vec<usize> = if light_rows {
                b_rows[k].clone()
            } else {
                b_rows[k].iter().copied().filter(|&j| up_mask[j]).collect()
            };
            if rows.is_empty() || cols.is_empty() {
                continue;
            }
            if light_rows {
                witnesses3 += (rows.len() as u128) * (cols.len() as u128);
            }
            let space = IndexSpace(rows.len() * cols.len());
            let found = run_enumeration(
                &space,
                |&x| {
                    let (i, j) = (rows[x / cols.len()], cols[x % cols.len()]);
                    if sigma.get(i, j) {
                        false
                    } else {
                        sigma.set(i, j, true);
                        true
                    }
                },
                engine,
                ledger,
                phase,
            );
            for x in found {
                result.set(rows[x / cols.len()], cols[x % cols.len()], true);
            }
        }
    }

    // Witness and output bounds implied by the thresholds.
    let lambda = result.count_ones() as u128;
    assert!(witnesses3 * l1 as u128 <= lambda * m1 as u128);
    assert!(witnesses3 <= lambda * n as u128);
    assert!((lambda2 as u128) * l2 as u128 <= (m1 as u128) * m2 as u128);
    assert!(lambda2 as u128 <= lambda);
    Ok(result)
}

/// Row-expansion strategy for very sparse `A`: find its nonzeros by one
/// adaptive search over the whole index grid, then OR the matching row of
/// `B` into the result for each.
fn sparse_expand(
    a: &BoolMatrix,
    b: &BoolMatrix,
    engine: Engine,
    ledger: &mut CostLedger,
) -> Result<BoolMatrix> {
    let n = check_square_pair(a, b)?;
    let phase = "sparse-expand";
    let space = IndexSpace(n * n);
    let found = run_enumeration(&space, |&x| a.get(x / n, x % n), engine, ledger, phase);
    let mut result = BoolMatrix::zeros(n, n);
    for x in &found {
        result.or_row_from(x / n, b, x % n);
    }
    ledger.charge_classical(phase, (found.len() * n) as u64);
    Ok(result)
}

/// Sparse product with automatic regime selection from the input densities.
pub fn auto_sparse_bool_product(
    a: &BoolMatrix,
    b: &BoolMatrix,
    engine: Engine,
    ledger: &mut CostLedger,
) -> Result<BoolMatrix> {
    let n = check_square_pair(a, b)?;
    let m1 = a.count_ones();
    let m2 = b.count_ones();
    if m1 == 0 || m2 == 0 {
        ledger.charge_classical("sparse-expand", (n * n) as u64);
        return Ok(BoolMatrix::zeros(n, n));
    }
    let sel = select_parameters(
        Task::BoolSparse { n, m1, m2 },
        &OmegaParams::default(),
    )?;
    match sel.regime.expect("sparse tasks always pick a regime") {
        SparseRegime::SparseExpand => {
            if m1 <= m2 {
                sparse_expand(a, b, engine, ledger)
            } else {
                // A·B = (Bᵀ·Aᵀ)ᵀ lets the sparser factor drive the search.
                ledger.charge_classical("sparse-expand", 3 * (n * n) as u64);
                Ok(sparse_expand(&b.transpose(), &a.transpose(), engine, ledger)?
                    .transpose())
            }
        }
        SparseRegime::Quadratic | SparseRegime::Middle => {
            let (l1, l2, l3) = (
                sel.l1.expect("set in this regime"),
                sel.l2.expect("set in this regime"),
                sel.l3.expect("set in this regime"),
            );
            sparse_bool_product(a, b, l1, l2, l3, engine, ledger)
        }
        SparseRegime::Dense => {
            let result = a.multiply(b)?;
            ledger.charge_classical("dense-multiply", (n * n) as u64);
            ledger.charge_model_multiply("dense-multiply", rect_model_cost(n, n, n)?);
            Ok(result)
        }
    }
}
