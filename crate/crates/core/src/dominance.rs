//! Existence dominance products.
//!
//! The plain product has `C[i,j] = 1` iff some `k` has `A[i,k] <= B[k,j]`
//! (`<` in the strict variant). The generalized product takes families
//! `{A^(x)}`, `{B^(y)}` and returns, per cell, the largest pair `(x,y)` under
//! a configurable lexicographic order whose product fires there, with `(0,0)`
//! meaning "none".
//!
//! Dominance comparisons are finite-versus-finite only: an `A` entry of
//! `+inf` or `-inf`, or a `B` entry of `+inf` or `-inf`, never produces a
//! witness. Infinities act as "no entry" markers; callers that need
//! infinite-capacity semantics (e.g. bottleneck paths) preprocess their
//! inputs accordingly.
//!
//! The fast algorithm sorts the finite `A`-entries, splits them into `t`
//! level parts, handles cross-part witnesses by one stacked Boolean multiply
//! (`C1`), and handles in-part witnesses (`C2`) via column balancing into
//! width-`2n` matrices, a second stacked multiply, and a search phase
//! computing a residual matrix `D` with simulated quantum enumeration.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::exponents::{select_parameters, OmegaParams, Task};
use crate::matrix::{BlockGrid, BoolMatrix, ExtInt, ExtMatrix};
use crate::qsim::{q_enumerate, CostLedger, PrefixSpace, SearchSpace};
use crate::{Engine, Error, Result};

/// Which lexicographic order ranks the index pairs `(x,y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LexOrder {
    /// `(x,y) < (x',y')` iff `x < x'` or (`x = x'` and `y < y'`).
    Normal,
    /// Reverses the comparison on proper pairs; `(0,0)` stays minimum.
    Decreasing,
}

/// A pair in `({1..u} x {1..v}) ∪ {(0,0)}`; `(0,0)` is the unique pair with
/// a zero coordinate and means "no witness".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LexPair {
    pub x: u32,
    pub y: u32,
}

impl LexPair {
    pub const NONE: LexPair = LexPair { x: 0, y: 0 };

    pub fn new(x: u32, y: u32) -> Self {
        LexPair { x, y }
    }

    pub fn is_none(self) -> bool {
        self.x == 0
    }
}

impl LexOrder {
    /// Total order on `S ∪ {(0,0)}`: `(0,0)` is always the minimum.
    pub fn cmp(self, a: LexPair, b: LexPair) -> Ordering {
        match (a.is_none(), b.is_none()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => match self {
                LexOrder::Normal => (a.x, a.y).cmp(&(b.x, b.y)),
                LexOrder::Decreasing => (b.x, b.y).cmp(&(a.x, a.y)),
            },
        }
    }

    pub fn max(self, a: LexPair, b: LexPair) -> LexPair {
        if self.cmp(a, b) == Ordering::Less {
            b
        } else {
            a
        }
    }

    /// All proper pairs of `{1..u} x {1..v}`, sorted decreasing under `self`.
    fn pairs_descending(self, u: usize, v: usize) -> Vec<LexPair> {
        let mut out: Vec<LexPair> = (1..=u as u32)
            .flat_map(|x| (1..=v as u32).map(move |y| LexPair::new(x, y)))
            .collect();
        out.sort_by(|a, b| self.cmp(*b, *a));
        out
    }
}

/// Square matrix of [`LexPair`] entries, the output type of generalized
/// dominance products.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairMatrix {
    n: usize,
    entries: Vec<LexPair>,
}

impl PairMatrix {
    pub fn none(n: usize) -> Self {
        PairMatrix { n, entries: vec![LexPair::NONE; n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> LexPair {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, p: LexPair) {
        self.entries[i * self.n + j] = p;
    }

    /// Decodes the `u = v = 1` case back to a Boolean matrix.
    pub fn to_bool(&self) -> BoolMatrix {
        let mut out = BoolMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if !self.get(i, j).is_none() {
                    out.set(i, j, true);
                }
            }
        }
        out
    }
}

/// Finite-versus-finite dominance test.
#[inline]
fn dominates(a: ExtInt, b: ExtInt, strict: bool) -> bool {
    match (a, b) {
        (ExtInt::Finite(a), ExtInt::Finite(b)) => {
            if strict {
                a < b
            } else {
                a <= b
            }
        }
        _ => false,
    }
}

fn check_square_family(ms: &[ExtMatrix]) -> Result<usize> {
    let first = ms.first().ok_or_else(|| Error::Shape("empty matrix family".into()))?;
    let n = first.rows();
    if ms.iter().any(|m| m.rows() != n || m.cols() != n) {
        return Err(Error::Shape("family matrices must all be n x n".into()));
    }
    Ok(n)
}

/// Brute-force dominance product, the oracle for everything else.
pub fn dominance_brute(a: &ExtMatrix, b: &ExtMatrix, strict: bool) -> Result<BoolMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::Shape(format!(
            "dominance {}x{} by {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mut c = BoolMatrix::zeros(a.rows(), b.cols());
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            if (0..a.cols()).any(|k| dominates(a.get(i, k), b.get(k, j), strict)) {
                c.set(i, j, true);
            }
        }
    }
    Ok(c)
}

/// Brute-force generalized dominance product: per cell, the order-maximum
/// `(x,y)` whose plain product fires.
pub fn generalized_dominance_brute(
    as_: &[ExtMatrix],
    bs: &[ExtMatrix],
    order: LexOrder,
    strict: bool,
) -> Result<PairMatrix> {
    let n = check_square_family(as_)?;
    if check_square_family(bs)? != n {
        return Err(Error::Shape("A and B families must share n".into()));
    }
    let mut c = PairMatrix::none(n);
    for (xi, a) in as_.iter().enumerate() {
        for (yi, b) in bs.iter().enumerate() {
            let fires = dominance_brute(a, b, strict)?;
            let pair = LexPair::new(xi as u32 + 1, yi as u32 + 1);
            for i in 0..n {
                for j in fires.row_indices(i) {
                    let cur = c.get(i, j);
                    c.set(i, j, order.max(cur, pair));
                }
            }
        }
    }
    Ok(c)
}

/// The level decomposition of the sorted finite `A`-entries into `t` parts,
/// with the derived part matrices and bar indicators.
///
/// `a_parts`/`a_bars` are indexed `[x * t + r]`, `b_parts`/`b_bars` are
/// indexed `[y * t + r]`. Part membership of an `A`-entry is positional in
/// the sorted list (ties broken by `(value, x, i, k)`), so duplicates
/// straddling a boundary are split deterministically. `B`-side tests are by
/// value against the part bounds: a `B`-entry belongs to `b_parts[r]` when it
/// can meet an in-part `A`-entry (`min <= B < max`, or `min <= B <= max` in
/// the strict variant), and `b_bars[r]` marks finite entries beyond the part
/// (`B >= max`, strictly `B > max`).
#[derive(Clone, Debug)]
pub struct LevelPartition {
    pub n: usize,
    pub u: usize,
    pub v: usize,
    pub t: usize,
    pub strict: bool,
    pub m1: usize,
    pub m2: usize,
    /// Per part `r`: `(min L_r, max L_r)`, `None` for an empty part.
    pub bounds: Vec<Option<(i64, i64)>>,
    pub a_parts: Vec<ExtMatrix>,
    pub a_bars: Vec<BoolMatrix>,
    pub b_parts: Vec<ExtMatrix>,
    pub b_bars: Vec<BoolMatrix>,
}

/// Splits the sorted finite `A`-entries into `t` consecutive parts of at most
/// `ceil(m1/t)` entries each and builds all part matrices.
pub fn build_level_partition(
    as_: &[ExtMatrix],
    bs: &[ExtMatrix],
    t: usize,
    strict: bool,
) -> Result<LevelPartition> {
    let n = check_square_family(as_)?;
    if check_square_family(bs)? != n {
        return Err(Error::Shape("A and B families must share n".into()));
    }
    let u = as_.len();
    let v = bs.len();

    // L: (value, x, i, k) for every finite A-entry, sorted ascending.
    let mut l: Vec<(i64, usize, usize, usize)> = Vec::new();
    for (x, a) in as_.iter().enumerate() {
        for i in 0..n {
            for k in 0..n {
                if let Some(val) = a.get(i, k).finite() {
                    l.push((val, x, i, k));
                }
            }
        }
    }
    l.sort_unstable();
    let m1 = l.len();
    let m2 = bs.iter().map(ExtMatrix::finite_count).sum();
    if t < 1 || t > m1.max(1) {
        return Err(Error::ParamRange(format!("t={t} not in 1..={}", m1.max(1))));
    }

    // Balanced consecutive split: the first m1 % t parts get one extra entry,
    // so every part holds at most ceil(m1/t) entries.
    let mut bounds = vec![None; t];
    let mut part_of = vec![0usize; m1];
    let mut pos = 0usize;
    for (r, bound) in bounds.iter_mut().enumerate() {
        let size = m1 / t + usize::from(r < m1 % t);
        if size > 0 {
            *bound = Some((l[pos].0, l[pos + size - 1].0));
            for e in &mut part_of[pos..pos + size] {
                *e = r;
            }
            pos += size;
        }
    }

    let mut a_parts = vec![ExtMatrix::filled(n, n, ExtInt::PosInf); u * t];
    let mut a_bars = vec![BoolMatrix::zeros(n, n); u * t];
    for (idx, &(val, x, i, k)) in l.iter().enumerate() {
        let r = part_of[idx];
        a_parts[x * t + r].set(i, k, ExtInt::Finite(val));
        a_bars[x * t + r].set(i, k, true);
    }

    let mut b_parts = vec![ExtMatrix::filled(n, n, ExtInt::NegInf); v * t];
    let mut b_bars = vec![BoolMatrix::zeros(n, n); v * t];
    for (y, b) in bs.iter().enumerate() {
        for k in 0..n {
            for j in 0..n {
                let Some(val) = b.get(k, j).finite() else { continue };
                for (r, bound) in bounds.iter().enumerate() {
                    let Some((lo, hi)) = *bound else { continue };
                    let in_window =
                        val >= lo && if strict { val <= hi } else { val < hi };
                    if in_window {
                        b_parts[y * t + r].set(k, j, ExtInt::Finite(val));
                    }
                    let beyond = if strict { val > hi } else { val >= hi };
                    if beyond {
                        b_bars[y * t + r].set(k, j, true);
                    }
                }
            }
        }
    }

    Ok(LevelPartition {
        n,
        u,
        v,
        t,
        strict,
        m1,
        m2,
        bounds,
        a_parts,
        a_bars,
        b_parts,
        b_bars,
    })
}

/// Numbering convention for the column-balancing bijection. The algorithm's
/// output must not depend on it; both exist so tests can prove that.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhoNumbering {
    Forward,
    Reversed,
}

/// Per-part column-balancing data: how the chunks `(k,q)` of part `r` map
/// onto the `p <= 2n` used columns.
#[derive(Clone, Debug)]
pub struct RPartData {
    pub p: usize,
    /// `rho[k][q]` = balanced column index.
    pub rho: Vec<Vec<usize>>,
    /// Inverse: balanced column -> `(k, q)`.
    pub rho_inv: Vec<(usize, usize)>,
    /// `chunk_max[k][q]` = largest value in chunk `q` of column `k`
    /// (nondecreasing in `q`).
    pub chunk_max: Vec<Vec<i64>>,
}

/// The column-balanced artifacts: width-`2n` value and indicator matrices
/// plus the lookup tables driving the search phase.
pub struct BalancedBundle<'a> {
    pub lp: &'a LevelPartition,
    /// Per-column entry cap `ceil(m1/(n t))`.
    pub cap: usize,
    pub parts: Vec<RPartData>,
    /// `[x * t + r]`, n x 2n; every finite entry of the part matrix, same row,
    /// balanced column.
    pub a_tilde: Vec<ExtMatrix>,
    /// Finiteness indicators of `a_tilde`.
    pub a_hat: Vec<BoolMatrix>,
    /// `[y * t + r]`, 2n x n; bit at `(k',j)` iff the part's `B[k,j]` clears
    /// the whole chunk at `k'`.
    pub b_hat: Vec<BoolMatrix>,
    /// `u_lookup[x][r][k']` = ascending rows of finite `a_tilde` entries.
    pub u_lookup: Vec<Vec<Vec<Vec<usize>>>>,
    /// `v_list[y]` = `(r,k,j)` of every finite entry of the `B` part matrices.
    pub v_list: Vec<Vec<(usize, usize, usize)>>,
}

/// Column balancing with the default numbering.
pub fn column_balance(lp: &LevelPartition) -> BalancedBundle<'_> {
    column_balance_with(lp, RhoNumbering::Forward)
}

/// Redistributes the finite entries of each part's `A` matrices into at most
/// `2n` columns of at most `ceil(m1/(n t))` entries each: per original
/// column, the entries (across all `x`) are sorted and chopped into chunks,
/// and each chunk gets its own balanced column.
pub fn column_balance_with(lp: &LevelPartition, numbering: RhoNumbering) -> BalancedBundle<'_> {
    let (n, u, v, t) = (lp.n, lp.u, lp.v, lp.t);
    let cap = lp.m1.div_ceil((n * t).max(1)).max(1);

    let mut parts = Vec::with_capacity(t);
    let mut a_tilde = vec![ExtMatrix::filled(n, 2 * n, ExtInt::PosInf); u * t];
    for r in 0..t {
        // Chunk the sorted per-column entries.
        let mut chunks: Vec<Vec<Vec<(i64, usize, usize)>>> = Vec::with_capacity(n);
        let mut p = 0usize;
        for k in 0..n {
            let mut col: Vec<(i64, usize, usize)> = Vec::new();
            for (x, _) in lp.a_parts.iter().enumerate().take(u).map(|(x, _)| (x, ())) {
                let m = &lp.a_parts[x * t + r];
                for i in 0..n {
                    if let Some(val) = m.get(i, k).finite() {
                        col.push((val, x, i));
                    }
                }
            }
            col.sort_unstable();
            let kc: Vec<Vec<(i64, usize, usize)>> =
                col.chunks(cap).map(<[_]>::to_vec).collect();
            p += kc.len();
            chunks.push(kc);
        }
        assert!(p <= 2 * n, "column balancing produced {p} > 2n parts");

        // Assign each chunk a balanced column index.
        let mut rho: Vec<Vec<usize>> = Vec::with_capacity(n);
        let mut rho_inv = vec![(0usize, 0usize); p];
        let mut chunk_max: Vec<Vec<i64>> = Vec::with_capacity(n);
        let mut counter = 0usize;
        for (k, kc) in chunks.iter().enumerate() {
            let mut cols = Vec::with_capacity(kc.len());
            let mut maxes = Vec::with_capacity(kc.len());
            for (q, chunk) in kc.iter().enumerate() {
                let kp = match numbering {
                    RhoNumbering::Forward => counter,
                    RhoNumbering::Reversed => p - 1 - counter,
                };
                counter += 1;
                cols.push(kp);
                rho_inv[kp] = (k, q);
                maxes.push(chunk.last().expect("chunks are nonempty").0);
                for &(val, x, i) in chunk {
                    a_tilde[x * t + r].set(i, kp, ExtInt::Finite(val));
                }
            }
            rho.push(cols);
            chunk_max.push(maxes);
        }
        parts.push(RPartData { p, rho, rho_inv, chunk_max });
    }

    let mut a_hat = vec![BoolMatrix::zeros(n, 2 * n); u * t];
    for (hat, tilde) in a_hat.iter_mut().zip(&a_tilde) {
        for i in 0..n {
            for kp in 0..2 * n {
                if tilde.get(i, kp).is_finite() {
                    hat.set(i, kp, true);
                }
            }
        }
    }

    let mut b_hat = vec![BoolMatrix::zeros(2 * n, n); v * t];
    for y in 0..v {
        for (r, part) in parts.iter().enumerate() {
            let bp = &lp.b_parts[y * t + r];
            let hat = &mut b_hat[y * t + r];
            for kp in 0..part.p {
                let (k, q) = part.rho_inv[kp];
                let top = part.chunk_max[k][q];
                for j in 0..n {
                    if let Some(val) = bp.get(k, j).finite() {
                        let clears = if lp.strict { val > top } else { val >= top };
                        if clears {
                            hat.set(kp, j, true);
                        }
                    }
                }
            }
        }
    }

    let mut u_lookup = Vec::with_capacity(u);
    for x in 0..u {
        let mut per_r = Vec::with_capacity(t);
        for r in 0..t {
            let tilde = &a_tilde[x * t + r];
            let mut cols = vec![Vec::new(); 2 * n];
            for i in 0..n {
                for (kp, col) in cols.iter_mut().enumerate() {
                    if tilde.get(i, kp).is_finite() {
                        col.push(i);
                    }
                }
            }
            per_r.push(cols);
        }
        u_lookup.push(per_r);
    }

    let mut v_list = Vec::with_capacity(v);
    for y in 0..v {
        let mut list = Vec::new();
        for r in 0..t {
            let bp = &lp.b_parts[y * t + r];
            for k in 0..n {
                for j in 0..n {
                    if bp.get(k, j).is_finite() {
                        list.push((r, k, j));
                    }
                }
            }
        }
        v_list.push(list);
    }

    BalancedBundle { lp, cap, parts, a_tilde, a_hat, b_hat, u_lookup, v_list }
}

/// Per-cell order-maximum over the blocks of a stacked `(n u) x (n v)`
/// product.
fn max_over_blocks(
    big: &BoolMatrix,
    n: usize,
    u: usize,
    v: usize,
    order: LexOrder,
    seed: Option<&PairMatrix>,
) -> PairMatrix {
    let mut c = match seed {
        Some(d) => d.clone(),
        None => PairMatrix::none(n),
    };
    for x in 0..u {
        for y in 0..v {
            let pair = LexPair::new(x as u32 + 1, y as u32 + 1);
            for i in 0..n {
                for j in 0..n {
                    if big.get(x * n + i, y * n + j) {
                        let cur = c.get(i, j);
                        c.set(i, j, order.max(cur, pair));
                    }
                }
            }
        }
    }
    c
}

/// Cross-part contribution: one stacked Boolean multiply of the bar
/// indicators, then a per-cell order-max over the `(x,y)` blocks.
#[allow(non_snake_case)]
pub fn compute_C1(lp: &LevelPartition, order: LexOrder) -> Result<PairMatrix> {
    let (n, u, v, t) = (lp.n, lp.u, lp.v, lp.t);
    // A-side grid is (x, r); B-side grid is (r, y).
    let a_refs: Vec<&BoolMatrix> = (0..u * t).map(|i| &lp.a_bars[i]).collect();
    let mut b_refs: Vec<&BoolMatrix> = Vec::with_capacity(t * v);
    for r in 0..t {
        for y in 0..v {
            b_refs.push(&lp.b_bars[y * t + r]);
        }
    }
    let big = BlockGrid::new(u, t, a_refs)?.stack().multiply(&BlockGrid::new(t, v, b_refs)?.stack())?;
    Ok(max_over_blocks(&big, n, u, v, order, None))
}

/// In-part residual matrix `D`: for `(x,y)` in decreasing order, enumerate
/// all not-yet-struck cells `(i,j)` having an in-chunk witness
/// (`A[i,k] <= B[k,j] < chunk max`, strict variant `<`/`<=`), assign them
/// `(x,y)`, and strike them out.
///
/// Candidates live in the space `Γ^(x,y)` indexed through the prefix sums of
/// per-`B`-entry column counts; `engine` chooses between simulated quantum
/// enumeration and a plain linear scan over the same space.
#[allow(non_snake_case)]
pub fn compute_D(
    bb: &BalancedBundle<'_>,
    order: LexOrder,
    engine: Engine,
    ledger: &mut CostLedger,
) -> PairMatrix {
    let lp = bb.lp;
    let (n, u, v, t) = (lp.n, lp.u, lp.v, lp.t);
    let strict = lp.strict;
    let phase = "D-search";

    // For every finite B part entry, the balanced column of the first chunk
    // it does not clear (the only chunk that can hold in-part witnesses).
    let mut w_vals: Vec<Vec<Option<usize>>> = Vec::with_capacity(v);
    for y in 0..v {
        let mut wv = Vec::with_capacity(bb.v_list[y].len());
        for &(r, k, j) in &bb.v_list[y] {
            let bval = lp.b_parts[y * t + r]
                .get(k, j)
                .finite()
                .expect("v_list holds finite entries");
            let cm = &bb.parts[r].chunk_max[k];
            let q = if strict {
                cm.partition_point(|&m| m < bval)
            } else {
                cm.partition_point(|&m| m <= bval)
            };
            wv.push((q < cm.len()).then(|| bb.parts[r].rho[k][q]));
        }
        ledger.charge_classical(phase, wv.len() as u64);
        w_vals.push(wv);
    }

    let mut d = PairMatrix::none(n);
    let mut struck = vec![false; n * n];
    for pair in order.pairs_descending(u, v) {
        let x = pair.x as usize - 1;
        let y = pair.y as usize - 1;
        let space = PrefixSpace::new(w_vals[y].iter().enumerate().map(|(a, w)| {
            w.map_or(0, |kp| {
                let r = bb.v_list[y][a].0;
                bb.u_lookup[x][r][kp].len() as u64
            })
        }));
        let mut pred = |&(a, b): &(usize, usize)| -> bool {
            let (r, k, j) = bb.v_list[y][a];
            let kp = w_vals[y][a].expect("nonempty block implies a chunk column");
            let i = bb.u_lookup[x][r][kp][b];
            if struck[i * n + j] {
                return false;
            }
            let av = bb.a_tilde[x * t + r].get(i, kp);
            let bv = lp.b_parts[y * t + r].get(k, j);
            if dominates(av, bv, strict) {
                d.set(i, j, pair);
                struck[i * n + j] = true;
                true
            } else {
                false
            }
        };
        match engine {
            Engine::QuantumSim => {
                q_enumerate(&space, pred, ledger, phase);
            }
            Engine::Classical => {
                let size = space.size();
                for idx in 0..size {
                    pred(&space.item(idx));
                }
                ledger.charge_classical(phase, 2 * size as u64);
            }
        }
    }
    d
}

/// In-part contribution: one stacked multiply of the hat indicators, maxed
/// cellwise with the residual matrix `D` from the search phase.
#[allow(non_snake_case)]
pub fn compute_C2(
    bb: &BalancedBundle<'_>,
    d: &PairMatrix,
    order: LexOrder,
) -> Result<PairMatrix> {
    let lp = bb.lp;
    let (n, u, v, t) = (lp.n, lp.u, lp.v, lp.t);
    if d.n() != n {
        return Err(Error::Shape("D size must match the bundle".into()));
    }
    let a_refs: Vec<&BoolMatrix> = (0..u * t).map(|i| &bb.a_hat[i]).collect();
    let mut b_refs: Vec<&BoolMatrix> = Vec::with_capacity(t * v);
    for r in 0..t {
        for y in 0..v {
            b_refs.push(&bb.b_hat[y * t + r]);
        }
    }
    let big = BlockGrid::new(u, t, a_refs)?.stack().multiply(&BlockGrid::new(t, v, b_refs)?.stack())?;
    Ok(max_over_blocks(&big, n, u, v, order, Some(d)))
}

/// Generalized existence dominance product with the level-partition
/// algorithm. Ledger phases: `partition`, `balance`, `C1-multiply`,
/// `D-search`, `C2-multiply`; the multiply phases also charge the model cost
/// `n^omega(1+log_n u, 1+log_n t, 1+log_n v)`.
pub fn generalized_dominance(
    as_: &[ExtMatrix],
    bs: &[ExtMatrix],
    t: usize,
    order: LexOrder,
    strict: bool,
    engine: Engine,
    ledger: &mut CostLedger,
) -> Result<PairMatrix> {
    let lp = build_level_partition(as_, bs, t, strict)?;
    let (n, u, v) = (lp.n, lp.u, lp.v);
    ledger.charge_classical("partition", (n * n * t * (u + v)) as u64);
    if lp.m1 == 0 || lp.m2 == 0 {
        return Ok(PairMatrix::none(n));
    }

    let model_cost = stacked_multiply_model_cost(n, u, t, v)?;

    let bb = column_balance(&lp);
    ledger.charge_classical("balance", (n * n * t * u) as u64);

    let c1 = compute_C1(&lp, order)?;
    ledger.charge_classical("C1-multiply", (n * n * u * v) as u64);
    ledger.charge_model_multiply("C1-multiply", model_cost);

    let d = compute_D(&bb, order, engine, ledger);

    let c2 = compute_C2(&bb, &d, order)?;
    ledger.charge_classical("C2-multiply", (n * n * u * v) as u64);
    ledger.charge_model_multiply("C2-multiply", model_cost);

    let mut c = PairMatrix::none(n);
    for i in 0..n {
        for j in 0..n {
            c.set(i, j, order.max(c1.get(i, j), c2.get(i, j)));
        }
    }
    Ok(c)
}

/// Model cost of one stacked `(n u) x (n t)` by `(n t) x (n v)` multiply.
fn stacked_multiply_model_cost(n: usize, u: usize, t: usize, v: usize) -> Result<f64> {
    if n <= 1 {
        return Ok(1.0);
    }
    let logn = (n as f64).ln();
    let p = OmegaParams::default();
    let e = p.omega_bound(
        1.0 + (u as f64).ln() / logn,
        1.0 + (t as f64).ln() / logn,
        1.0 + (v as f64).ln() / logn,
    )?;
    Ok((n as f64).powf(e))
}

/// Plain dominance product via the generalized algorithm with `u = v = 1`
/// and an automatically selected part count `t`.
pub fn dominance_product(
    a: &ExtMatrix,
    b: &ExtMatrix,
    strict: bool,
    engine: Engine,
    ledger: &mut CostLedger,
) -> Result<BoolMatrix> {
    let m1 = a.finite_count();
    let n = a.rows();
    let sel = select_parameters(
        Task::DominanceT { n: n.max(1), m1, m2: b.finite_count() },
        &OmegaParams::default(),
    )?;
    let t = sel.t.unwrap_or(1).clamp(1, m1.max(1));
    dominance_product_with_t(a, b, t, strict, engine, ledger)
}

/// Plain dominance product with an explicit part count.
pub fn dominance_product_with_t(
    a: &ExtMatrix,
    b: &ExtMatrix,
    t: usize,
    strict: bool,
    engine: Engine,
    ledger: &mut CostLedger,
) -> Result<BoolMatrix> {
    if a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows() {
        return Err(Error::Shape("dominance product expects two n x n matrices".into()));
    }
    let c = generalized_dominance(
        std::slice::from_ref(a),
        std::slice::from_ref(b),
        t,
        LexOrder::Normal,
        strict,
        engine,
        ledger,
    )?;
    Ok(c.to_bool())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Random matrix over {-5..5, ±inf} with forced duplicates.
    fn random_ext(n: usize, rng: &mut ChaCha8Rng) -> ExtMatrix {
        let mut m = ExtMatrix::filled(n, n, ExtInt::PosInf);
        for i in 0..n {
            for j in 0..n {
                let e = match rng.gen_range(0..10) {
                    0 => ExtInt::PosInf,
                    1 => ExtInt::NegInf,
                    // small range forces many duplicate values
                    _ => ExtInt::Finite(rng.gen_range(-5..=5)),
                };
                m.set(i, j, e);
            }
        }
        m
    }

    fn family(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<ExtMatrix> {
        (0..count).map(|_| random_ext(n, rng)).collect()
    }

    #[test]
    fn brute_examples() {
        let one = ExtMatrix::from_ints(&[vec![1]]);
        assert!(dominance_brute(&one, &one, false).unwrap().get(0, 0));
        assert!(!dominance_brute(&one, &one, true).unwrap().get(0, 0));
        let a = ExtMatrix::from_rows(&[
            vec![ExtInt::Finite(3), ExtInt::PosInf],
            vec![ExtInt::Finite(5), ExtInt::Finite(1)],
        ])
        .unwrap();
        let b = ExtMatrix::from_rows(&[
            vec![ExtInt::Finite(2), ExtInt::Finite(4)],
            vec![ExtInt::NegInf, ExtInt::Finite(0)],
        ])
        .unwrap();
        let c = dominance_brute(&a, &b, false).unwrap();
        let expect = BoolMatrix::from_rows(&[vec![false, true], vec![false, false]]).unwrap();
        assert_eq!(c, expect);
    }

    #[test]
    fn generalized_brute_degenerate_cases() {
        let a = ExtMatrix::from_ints(&[vec![0, 2], vec![3, 1]]);
        let b = ExtMatrix::from_ints(&[vec![1, 0], vec![2, 2]]);
        let g = generalized_dominance_brute(
            std::slice::from_ref(&a),
            std::slice::from_ref(&b),
            LexOrder::Normal,
            false,
        )
        .unwrap();
        let plain = dominance_brute(&a, &b, false).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(!g.get(i, j).is_none(), plain.get(i, j));
            }
        }
        // all-infinite A family
        let inf = ExtMatrix::filled(2, 2, ExtInt::PosInf);
        let g = generalized_dominance_brute(
            &[inf.clone(), inf],
            std::slice::from_ref(&b),
            LexOrder::Normal,
            false,
        )
        .unwrap();
        assert_eq!(g, PairMatrix::none(2));
    }

    #[test]
    fn lex_order_semantics() {
        let none = LexPair::NONE;
        let a = LexPair::new(1, 2);
        let b = LexPair::new(2, 1);
        for order in [LexOrder::Normal, LexOrder::Decreasing] {
            assert_eq!(order.cmp(none, a), Ordering::Less);
            assert_eq!(order.cmp(none, none), Ordering::Equal);
        }
        assert_eq!(LexOrder::Normal.cmp(a, b), Ordering::Less);
        assert_eq!(LexOrder::Decreasing.cmp(a, b), Ordering::Greater);
        // descending iteration starts at the order maximum
        assert_eq!(LexOrder::Normal.pairs_descending(2, 2)[0], LexPair::new(2, 2));
        assert_eq!(LexOrder::Decreasing.pairs_descending(2, 2)[0], LexPair::new(1, 1));
    }

    /// Equation-(1)-style identity: the bar products plus the per-part brute
    /// products reconstruct the full product, for every part count.
    #[test]
    fn partition_reconstructs_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for case in 0..200 {
            let n = rng.gen_range(1..=10);
            let u = rng.gen_range(1..=2);
            let v = rng.gen_range(1..=2);
            let strict = case % 2 == 0;
            let as_ = family(n, u, &mut rng);
            let bs = family(n, v, &mut rng);
            let m1: usize = as_.iter().map(ExtMatrix::finite_count).sum();
            if m1 == 0 {
                continue;
            }
            let t = rng.gen_range(1..=m1);
            let lp = build_level_partition(&as_, &bs, t, strict).unwrap();
            for x in 0..u {
                for y in 0..v {
                    let mut acc = BoolMatrix::zeros(n, n);
                    for r in 0..t {
                        acc.or_in_place(
                            &lp.a_bars[x * t + r].multiply(&lp.b_bars[y * t + r]).unwrap(),
                        )
                        .unwrap();
                        acc.or_in_place(
                            &dominance_brute(
                                &lp.a_parts[x * t + r],
                                &lp.b_parts[y * t + r],
                                strict,
                            )
                            .unwrap(),
                        )
                        .unwrap();
                    }
                    let full = dominance_brute(&as_[x], &bs[y], strict).unwrap();
                    assert_eq!(acc, full, "case {case} t={t} x={x} y={y} strict={strict}");
                }
            }
        }
    }

    #[test]
    fn partition_degenerate_t() {
        let a = ExtMatrix::from_ints(&[vec![3, 1], vec![4, 1]]);
        let b = ExtMatrix::from_ints(&[vec![0, 5], vec![2, 2]]);
        let lp1 = build_level_partition(
            std::slice::from_ref(&a),
            std::slice::from_ref(&b),
            1,
            false,
        )
        .unwrap();
        assert_eq!(lp1.bounds, vec![Some((1, 4))]);
        assert_eq!(lp1.a_parts[0].finite_count(), 4);
        // t = m1: singleton parts
        let lp4 = build_level_partition(
            std::slice::from_ref(&a),
            std::slice::from_ref(&b),
            4,
            false,
        )
        .unwrap();
        for r in 0..4 {
            assert_eq!(lp4.a_bars[r].count_ones(), 1);
        }
        assert!(build_level_partition(
            std::slice::from_ref(&a),
            std::slice::from_ref(&b),
            5,
            false
        )
        .is_err());
    }

    #[test]
    fn balance_invariants_and_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.gen_range(1..=8);
            let u = rng.gen_range(1..=3);
            let as_ = family(n, u, &mut rng);
            let bs = family(n, 1, &mut rng);
            let m1: usize = as_.iter().map(ExtMatrix::finite_count).sum();
            if m1 == 0 {
                continue;
            }
            let t = rng.gen_range(1..=m1);
            let lp = build_level_partition(&as_, &bs, t, false).unwrap();
            let bb = column_balance(&lp);
            for (r, part) in bb.parts.iter().enumerate() {
                assert!(part.p <= 2 * n);
                // column sparsity: entries per balanced column across all x
                for kp in 0..2 * n {
                    let total: usize = (0..u)
                        .map(|x| {
                            (0..n)
                                .filter(|&i| bb.a_tilde[x * t + r].get(i, kp).is_finite())
                                .count()
                        })
                        .sum();
                    assert!(total <= bb.cap);
                }
                // every finite part entry appears exactly once, same row
                for x in 0..u {
                    let orig = &lp.a_parts[x * t + r];
                    let tilde = &bb.a_tilde[x * t + r];
                    let mut orig_entries: Vec<(usize, i64)> = Vec::new();
                    for i in 0..n {
                        for k in 0..n {
                            if let Some(val) = orig.get(i, k).finite() {
                                orig_entries.push((i, val));
                            }
                        }
                    }
                    let mut tilde_entries: Vec<(usize, i64)> = Vec::new();
                    for i in 0..n {
                        for kp in 0..2 * n {
                            if let Some(val) = tilde.get(i, kp).finite() {
                                tilde_entries.push((i, val));
                            }
                        }
                    }
                    orig_entries.sort_unstable();
                    tilde_entries.sort_unstable();
                    assert_eq!(orig_entries, tilde_entries);
                }
                // chunk maxima are nondecreasing per column
                for maxes in &part.chunk_max {
                    assert!(maxes.windows(2).all(|w| w[0] <= w[1]));
                }
            }
        }
    }

    #[test]
    fn c1_below_brute() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.gen_range(1..=8);
            let as_ = family(n, 2, &mut rng);
            let bs = family(n, 2, &mut rng);
            let m1: usize = as_.iter().map(ExtMatrix::finite_count).sum();
            if m1 == 0 {
                continue;
            }
            let t = rng.gen_range(1..=m1);
            let lp = build_level_partition(&as_, &bs, t, false).unwrap();
            let c1 = compute_C1(&lp, LexOrder::Normal).unwrap();
            let brute =
                generalized_dominance_brute(&as_, &bs, LexOrder::Normal, false).unwrap();
            for i in 0..n {
                for j in 0..n {
                    assert_ne!(
                        LexOrder::Normal.cmp(c1.get(i, j), brute.get(i, j)),
                        Ordering::Greater
                    );
                }
            }
        }
    }

    #[test]
    fn single_cell_d_example() {
        // Column 0 holds one chunk {2, 5} (cap = ceil(3/2) = 2), so its max
        // is 5. The B entry 3 satisfies 2 <= 3 < 5: an in-chunk witness the
        // hat product cannot see, so D must catch it.
        let a = ExtMatrix::from_rows(&[
            vec![ExtInt::Finite(2), ExtInt::Finite(7)],
            vec![ExtInt::Finite(5), ExtInt::PosInf],
        ])
        .unwrap();
        let b = ExtMatrix::from_rows(&[
            vec![ExtInt::Finite(3), ExtInt::NegInf],
            vec![ExtInt::NegInf, ExtInt::NegInf],
        ])
        .unwrap();
        let lp = build_level_partition(
            std::slice::from_ref(&a),
            std::slice::from_ref(&b),
            1,
            false,
        )
        .unwrap();
        let bb = column_balance(&lp);
        let mut ledger = CostLedger::new(0);
        let d = compute_D(&bb, LexOrder::Normal, Engine::QuantumSim, &mut ledger);
        assert_eq!(d.get(0, 0), LexPair::new(1, 1));
        assert_eq!(d.get(1, 1), LexPair::NONE);
    }

    #[test]
    fn full_algorithm_matches_brute() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for case in 0..80 {
            let n = rng.gen_range(1..=8);
            let u = rng.gen_range(1..=3);
            let v = rng.gen_range(1..=3);
            let as_ = family(n, u, &mut rng);
            let bs = family(n, v, &mut rng);
            let m1: usize = as_.iter().map(ExtMatrix::finite_count).sum();
            let t = rng.gen_range(1..=m1.max(1));
            for order in [LexOrder::Normal, LexOrder::Decreasing] {
                for strict in [false, true] {
                    for engine in [Engine::QuantumSim, Engine::Classical] {
                        let mut ledger = CostLedger::new(case);
                        let got = generalized_dominance(
                            &as_, &bs, t, order, strict, engine, &mut ledger,
                        )
                        .unwrap();
                        let want =
                            generalized_dominance_brute(&as_, &bs, order, strict).unwrap();
                        assert_eq!(
                            got, want,
                            "case {case} n={n} u={u} v={v} t={t} {order:?} strict={strict} {engine:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn rho_numbering_does_not_change_d() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let n = rng.gen_range(1..=7);
            let as_ = family(n, 2, &mut rng);
            let bs = family(n, 2, &mut rng);
            let m1: usize = as_.iter().map(ExtMatrix::finite_count).sum();
            if m1 == 0 {
                continue;
            }
            let t = rng.gen_range(1..=m1);
            let lp = build_level_partition(&as_, &bs, t, false).unwrap();
            let fwd = column_balance_with(&lp, RhoNumbering::Forward);
            let rev = column_balance_with(&lp, RhoNumbering::Reversed);
            let mut l1 = CostLedger::new(1);
            let mut l2 = CostLedger::new(1);
            let d1 = compute_D(&fwd, LexOrder::Normal, Engine::Classical, &mut l1);
            let d2 = compute_D(&rev, LexOrder::Normal, Engine::Classical, &mut l2);
            assert_eq!(d1, d2);
        }
    }

    #[test]
    fn one_by_one() {
        let a = ExtMatrix::from_ints(&[vec![0]]);
        let b = ExtMatrix::from_ints(&[vec![0]]);
        let mut ledger = CostLedger::new(0);
        let c = generalized_dominance(
            std::slice::from_ref(&a),
            std::slice::from_ref(&b),
            1,
            LexOrder::Normal,
            false,
            Engine::QuantumSim,
            &mut ledger,
        )
        .unwrap();
        assert_eq!(c.get(0, 0), LexPair::new(1, 1));
    }

    #[test]
    fn plain_product_wrapper() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // all-zero matrices: 0 <= 0 everywhere
        let z = ExtMatrix::from_ints(&[vec![0, 0], vec![0, 0]]);
        let mut ledger = CostLedger::new(0);
        let c = dominance_product(&z, &z, false, Engine::QuantumSim, &mut ledger).unwrap();
        assert_eq!(c.count_ones(), 4);
        // A all infinite
        let inf = ExtMatrix::filled(2, 2, ExtInt::PosInf);
        let mut ledger = CostLedger::new(0);
        let c = dominance_product(&inf, &z, false, Engine::QuantumSim, &mut ledger).unwrap();
        assert_eq!(c.count_ones(), 0);
        for case in 0..60 {
            let n = rng.gen_range(1..=10);
            let a = random_ext(n, &mut rng);
            let b = random_ext(n, &mut rng);
            let strict = case % 2 == 0;
            let mut ledger = CostLedger::new(case);
            let got =
                dominance_product(&a, &b, strict, Engine::QuantumSim, &mut ledger).unwrap();
            assert_eq!(got, dominance_brute(&a, &b, strict).unwrap());
        }
    }

    #[test]
    fn ledger_phases_present() {
        let a = ExtMatrix::from_ints(&[vec![1, 2], vec![3, 4]]);
        let b = ExtMatrix::from_ints(&[vec![2, 0], vec![5, 1]]);
        let mut ledger = CostLedger::new(0);
        generalized_dominance(
            std::slice::from_ref(&a),
            std::slice::from_ref(&b),
            2,
            LexOrder::Normal,
            false,
            Engine::QuantumSim,
            &mut ledger,
        )
        .unwrap();
        let rep = crate::ledger_report(&ledger);
        for phase in ["partition", "balance", "C1-multiply", "D-search", "C2-multiply"] {
            assert!(rep.phases.contains_key(phase), "missing phase {phase}");
        }
        assert!(rep.phases["C1-multiply"].model_multiply_cost > 0.0);
        assert!(rep.phases["D-search"].quantum_steps > 0);
    }
}
