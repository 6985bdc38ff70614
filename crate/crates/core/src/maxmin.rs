//! The leftslice product, the (max,min) product built from two leftslice
//! calls, and all-pairs bottleneck paths.
//!
//! `leftslice(A,B)[i,j] = max{ A[i,k] | A[i,k] <= B[k,j] }` (or `-inf`). The
//! fast algorithm splits each row's finite entries into parts of at most `g`
//! values, finds the largest firing part per cell with one generalized
//! dominance product (`u = s` parts, `v = 1`), and resolves each cell inside
//! its part with simulated quantum maximum finding.
//!
//! Dominance products ignore infinite entries, so two preprocessing moves
//! bridge the gap to full extended-integer semantics: `+inf` entries of `B`
//! are clamped to a finite value exceeding every finite `A` entry, and the
//! `A = +inf` against `B = +inf` pairs (which legitimately produce `+inf`)
//! are caught by one Boolean multiply of infinity indicators.

use crate::dominance::generalized_dominance;
use crate::dominance::LexOrder;
use crate::exponents::{select_parameters, OmegaParams, Task};
use crate::matrix::{BoolMatrix, ExtInt, ExtMatrix};
use crate::qsim::{q_extremum, CostLedger, ExtremumMode, IndexSpace, SearchSpace};
use crate::{Engine, Error, Result};

/// Per-row positional split of the finite entries into `s = ceil(n/g)` parts
/// of at most `g` entries, plus the per-part matrices `A_r`.
#[derive(Clone, Debug)]
pub struct RowPartition {
    pub g: usize,
    pub s: usize,
    /// `parts[i][r]` = ascending `(value, k)` entries of part `r` of row `i`.
    pub parts: Vec<Vec<Vec<(i64, usize)>>>,
    /// `A_r[i,k] = A[i,k]` iff that entry belongs to part `r` of row `i`.
    pub a_r: Vec<ExtMatrix>,
}

/// Builds the per-row partition; membership is positional (entry identity),
/// so duplicate values never land in two parts.
pub fn build_row_partition(a: &ExtMatrix, g: usize) -> Result<RowPartition> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::Shape("row partition expects a square matrix".into()));
    }
    if g < 1 || g > n.max(1) {
        return Err(Error::ParamRange(format!("g={g} not in 1..={n}")));
    }
    let s = n.div_ceil(g).max(1);
    let mut parts = Vec::with_capacity(n);
    let mut a_r = vec![ExtMatrix::filled(n, n, ExtInt::PosInf); s];
    for i in 0..n {
        let mut row: Vec<(i64, usize)> = (0..n)
            .filter_map(|k| a.get(i, k).finite().map(|v| (v, k)))
            .collect();
        row.sort_unstable();
        let mut row_parts = vec![Vec::new(); s];
        for (r, chunk) in row.chunks(g).enumerate() {
            row_parts[r] = chunk.to_vec();
            for &(v, k) in chunk {
                a_r[r].set(i, k, ExtInt::Finite(v));
            }
        }
        parts.push(row_parts);
    }
    Ok(RowPartition { g, s, parts, a_r })
}

/// Brute-force leftslice, the oracle.
pub fn leftslice_brute(a: &ExtMatrix, b: &ExtMatrix) -> Result<ExtMatrix> {
    let n = square_pair(a, b)?;
    let mut c = ExtMatrix::filled(n, n, ExtInt::NegInf);
    for i in 0..n {
        for j in 0..n {
            let mut best = ExtInt::NegInf;
            for k in 0..n {
                let av = a.get(i, k);
                if av <= b.get(k, j) && av > best {
                    best = av;
                }
            }
            c.set(i, j, best);
        }
    }
    Ok(c)
}

fn square_pair(a: &ExtMatrix, b: &ExtMatrix) -> Result<usize> {
    let n = a.rows();
    if a.cols() != n || b.rows() != n || b.cols() != n {
        return Err(Error::Shape(format!(
            "expected two n x n matrices, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(n)
}

/// Leftslice product via row partitioning: Step 1 finds the largest firing
/// part per cell with one generalized dominance call; Step 2 resolves each
/// defined cell by maximum finding over at most `g` candidates.
pub fn leftslice(
    a: &ExtMatrix,
    b: &ExtMatrix,
    g: usize,
    engine: Engine,
    ledger: &mut CostLedger,
) -> Result<ExtMatrix> {
    let n = square_pair(a, b)?;
    let mut c = ExtMatrix::filled(n, n, ExtInt::NegInf);
    if n == 0 {
        return Ok(c);
    }

    // +inf against +inf pairs produce +inf and bypass the finite machinery.
    let mut a_inf = BoolMatrix::zeros(n, n);
    let mut b_inf = BoolMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if a.get(i, j) == ExtInt::PosInf {
                a_inf.set(i, j, true);
            }
            if b.get(i, j) == ExtInt::PosInf {
                b_inf.set(i, j, true);
            }
        }
    }
    let mask = a_inf.multiply(&b_inf)?;
    ledger.charge_classical("leftslice-mask", (n * n) as u64);

    let rp = build_row_partition(a, g)?;
    let m1 = a.finite_count();
    if m1 > 0 {
        // Clamp +inf entries of B to a finite value above every finite A
        // entry, so they dominate exactly the finite entries.
        let big = a
            .max_finite()
            .expect("m1 > 0")
            .checked_add(1)
            .ok_or(Error::Overflow)?;
        let mut b_clamped = b.clone();
        for k in 0..n {
            for j in 0..n {
                if b.get(k, j) == ExtInt::PosInf {
                    b_clamped.set(k, j, ExtInt::Finite(big));
                }
            }
        }

        // Step 1: with u = s, v = 1, the normal-order maximum is the largest
        // firing part index. The split t = s mirrors the balance g * t ~ n.
        let t = rp.s.clamp(1, m1);
        let step1 = generalized_dominance(
            &rp.a_r,
            std::slice::from_ref(&b_clamped),
            t,
            LexOrder::Normal,
            false,
            engine,
            ledger,
        )?;

        // Step 2: per defined cell, maximum over the part's candidates.
        let phase = "leftslice-step2";
        for i in 0..n {
            for j in 0..n {
                let pair = step1.get(i, j);
                if pair.is_none() {
                    continue;
                }
                let r = pair.x as usize - 1;
                let cands = &rp.parts[i][r];
                let key = |&idx: &usize| -> ExtInt {
                    let (v, k) = cands[idx];
                    if ExtInt::Finite(v) <= b_clamped.get(k, j) {
                        ExtInt::Finite(v)
                    } else {
                        ExtInt::NegInf
                    }
                };
                let best = match engine {
                    Engine::QuantumSim => q_extremum(
                        &IndexSpace(cands.len()),
                        key,
                        ExtremumMode::Max,
                        ledger,
                        phase,
                    ),
                    Engine::Classical => {
                        let space = IndexSpace(cands.len());
                        ledger.charge_classical(phase, 2 * cands.len() as u64);
                        (0..space.size()).max_by(|&p, &q| {
                            key(&p).cmp(&key(&q)).then(q.cmp(&p))
                        })
                    }
                };
                let best = best.expect("a firing part has candidates");
                let val = key(&best);
                debug_assert!(val.is_finite(), "step 1 promised a witness");
                c.set(i, j, val);
            }
        }
    }

    for i in 0..n {
        for j in 0..n {
            if mask.get(i, j) {
                c.set(i, j, ExtInt::PosInf);
            }
        }
    }
    Ok(c)
}

/// Default row-part size `g` for an `n x n` instance.
pub fn default_g(n: usize) -> Result<usize> {
    let sel = select_parameters(Task::MaxMinG { n: n.max(1) }, &OmegaParams::default())?;
    Ok(sel.g.unwrap_or(1))
}

/// Brute-force (max,min) product.
pub fn maxmin_brute(a: &ExtMatrix, b: &ExtMatrix) -> Result<ExtMatrix> {
    let n = square_pair(a, b)?;
    let mut c = ExtMatrix::filled(n, n, ExtInt::NegInf);
    for i in 0..n {
        for j in 0..n {
            let mut best = ExtInt::NegInf;
            for k in 0..n {
                let m = a.get(i, k).min(b.get(k, j));
                if m > best {
                    best = m;
                }
            }
            c.set(i, j, best);
        }
    }
    Ok(c)
}

/// (max,min) product: `C[i,j] = max{ (A ⟕ B)[i,j], (Bᵀ ⟕ Aᵀ)[j,i] }`,
/// splitting each minimum by which operand attains it.
pub fn maxmin_product(
    a: &ExtMatrix,
    b: &ExtMatrix,
    g: usize,
    engine: Engine,
    ledger: &mut CostLedger,
) -> Result<ExtMatrix> {
    let n = square_pair(a, b)?;
    let l1 = leftslice(a, b, g, engine, ledger)?;
    let l2 = leftslice(&b.transpose(), &a.transpose(), g, engine, ledger)?;
    let mut c = ExtMatrix::filled(n, n, ExtInt::NegInf);
    for i in 0..n {
        for j in 0..n {
            c.set(i, j, l1.get(i, j).max(l2.get(j, i)));
        }
    }
    Ok(c)
}

/// All-pairs bottleneck paths by repeated (max,min) squaring. Capacities use
/// `cap[i,i] = +inf` and `-inf` for absent edges; the diagonal convention is
/// enforced on the working copy.
pub fn apbp(
    cap: &ExtMatrix,
    g: usize,
    engine: Engine,
    ledger: &mut CostLedger,
) -> Result<ExtMatrix> {
    let n = cap.rows();
    if cap.cols() != n {
        return Err(Error::Shape("apbp expects a square capacity matrix".into()));
    }
    let mut c = cap.clone();
    for i in 0..n {
        c.set(i, i, ExtInt::PosInf);
    }
    let rounds = if n <= 1 { 0 } else { (usize::BITS - (n - 1).leading_zeros()) as usize };
    for _ in 0..rounds {
        c = maxmin_product(&c, &c, g, engine, ledger)?;
    }
    Ok(c)
}

/// Bottleneck Floyd-Warshall: the all-pairs bottleneck-paths oracle.
pub fn apbp_brute(cap: &ExtMatrix) -> Result<ExtMatrix> {
    let n = cap.rows();
    if cap.cols() != n {
        return Err(Error::Shape("apbp expects a square capacity matrix".into()));
    }
    let mut d = cap.clone();
    for i in 0..n {
        d.set(i, i, ExtInt::PosInf);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d.get(i, k).min(d.get(k, j));
                if via > d.get(i, j) {
                    d.set(i, j, via);
                }
            }
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_ext(n: usize, rng: &mut ChaCha8Rng) -> ExtMatrix {
        let mut m = ExtMatrix::filled(n, n, ExtInt::PosInf);
        for i in 0..n {
            for j in 0..n {
                let e = match rng.gen_range(0..10) {
                    0 => ExtInt::PosInf,
                    1 => ExtInt::NegInf,
                    _ => ExtInt::Finite(rng.gen_range(-5..=5)),
                };
                m.set(i, j, e);
            }
        }
        m
    }

    fn bottleneck_fw(cap: &ExtMatrix) -> ExtMatrix {
        apbp_brute(cap).unwrap()
    }

    #[test]
    fn leftslice_brute_examples() {
        let a = ExtMatrix::from_ints(&[vec![3, 1], vec![5, 2]]);
        let b = ExtMatrix::from_ints(&[vec![2, 4], vec![1, 0]]);
        let c = leftslice_brute(&a, &b).unwrap();
        assert_eq!(c.get(0, 0), ExtInt::Finite(1));
        assert_eq!(c.get(0, 1), ExtInt::Finite(3));
        assert_eq!(c.get(1, 0), ExtInt::NegInf);
        assert_eq!(c.get(1, 1), ExtInt::NegInf);

        let inf = ExtMatrix::filled(2, 2, ExtInt::PosInf);
        let fin = ExtMatrix::from_ints(&[vec![0, 0], vec![0, 0]]);
        assert_eq!(leftslice_brute(&inf, &fin).unwrap(), ExtMatrix::filled(2, 2, ExtInt::NegInf));
        assert_eq!(leftslice_brute(&fin, &fin).unwrap(), fin);
    }

    #[test]
    fn leftslice_matches_brute_all_g() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for case in 0..60u64 {
            let n = rng.gen_range(1..=10);
            let a = random_ext(n, &mut rng);
            let b = random_ext(n, &mut rng);
            let want = leftslice_brute(&a, &b).unwrap();
            for g in 1..=n {
                for engine in [Engine::QuantumSim, Engine::Classical] {
                    let mut ledger = CostLedger::new(case);
                    let got = leftslice(&a, &b, g, engine, &mut ledger).unwrap();
                    assert_eq!(got, want, "case {case} n={n} g={g} {engine:?}");
                }
            }
        }
    }

    #[test]
    fn leftslice_degenerate_g() {
        let a = ExtMatrix::from_ints(&[vec![3, 1], vec![5, 2]]);
        let b = ExtMatrix::from_ints(&[vec![2, 4], vec![1, 0]]);
        let want = leftslice_brute(&a, &b).unwrap();
        for g in [1, 2] {
            let mut ledger = CostLedger::new(0);
            assert_eq!(leftslice(&a, &b, g, Engine::QuantumSim, &mut ledger).unwrap(), want);
        }
        let mut ledger = CostLedger::new(0);
        assert!(leftslice(&a, &b, 3, Engine::QuantumSim, &mut ledger).is_err());
    }

    #[test]
    fn maxmin_examples() {
        let a = ExtMatrix::from_ints(&[vec![3, 1], vec![5, 2]]);
        let b = ExtMatrix::from_ints(&[vec![2, 4], vec![1, 0]]);
        let mut ledger = CostLedger::new(0);
        let c = maxmin_product(&a, &b, 1, Engine::QuantumSim, &mut ledger).unwrap();
        assert_eq!(c, ExtMatrix::from_ints(&[vec![2, 3], vec![2, 4]]));
        assert_eq!(c, maxmin_brute(&a, &b).unwrap());

        let x = ExtMatrix::from_ints(&[vec![7]]);
        let y = ExtMatrix::from_ints(&[vec![4]]);
        let mut ledger = CostLedger::new(0);
        assert_eq!(
            maxmin_product(&x, &y, 1, Engine::QuantumSim, &mut ledger).unwrap(),
            ExtMatrix::from_ints(&[vec![4]])
        );
    }

    #[test]
    fn maxmin_matches_brute_and_is_g_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for case in 0..40u64 {
            let n = rng.gen_range(1..=8);
            let a = random_ext(n, &mut rng);
            let b = random_ext(n, &mut rng);
            let want = maxmin_brute(&a, &b).unwrap();
            for g in 1..=n {
                let mut ledger = CostLedger::new(case);
                let got = maxmin_product(&a, &b, g, Engine::QuantumSim, &mut ledger).unwrap();
                assert_eq!(got, want, "case {case} n={n} g={g}");
            }
        }
    }

    #[test]
    fn maxmin_self_with_infinite_diagonal_dominates_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 6;
        let mut a = random_ext(n, &mut rng);
        for i in 0..n {
            a.set(i, i, ExtInt::PosInf);
        }
        let mut ledger = CostLedger::new(0);
        let c = maxmin_product(&a, &a, 2, Engine::QuantumSim, &mut ledger).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert!(c.get(i, j) >= a.get(i, j));
            }
        }
    }

    #[test]
    fn apbp_path_and_disconnection() {
        // path 1 -> 2 -> 3 with caps 5, 2
        let mut cap = ExtMatrix::filled(3, 3, ExtInt::NegInf);
        cap.set(0, 1, ExtInt::Finite(5));
        cap.set(1, 2, ExtInt::Finite(2));
        let mut ledger = CostLedger::new(0);
        let d = apbp(&cap, 2, Engine::QuantumSim, &mut ledger).unwrap();
        assert_eq!(d.get(0, 2), ExtInt::Finite(2));
        assert_eq!(d.get(0, 1), ExtInt::Finite(5));
        // no edge into vertex 1 from 3
        assert_eq!(d.get(2, 0), ExtInt::NegInf);
    }

    #[test]
    fn apbp_matches_dp_oracle_and_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for case in 0..25u64 {
            let n = rng.gen_range(1..=10);
            let mut cap = ExtMatrix::filled(n, n, ExtInt::NegInf);
            for i in 0..n {
                for j in 0..n {
                    if i != j && rng.gen_bool(0.4) {
                        cap.set(i, j, ExtInt::Finite(rng.gen_range(0..=9)));
                    }
                }
            }
            for i in 0..n {
                cap.set(i, i, ExtInt::PosInf);
            }
            let g = rng.gen_range(1..=n);
            let mut ledger = CostLedger::new(case);
            let d = apbp(&cap, g, Engine::QuantumSim, &mut ledger).unwrap();
            assert_eq!(d, bottleneck_fw(&cap), "case {case} n={n} g={g}");
            // fixed point: one more squaring changes nothing
            let again = maxmin_product(&d, &d, g, Engine::QuantumSim, &mut ledger).unwrap();
            assert_eq!(again, d);
        }
    }

    #[test]
    fn default_g_in_range() {
        for n in [1usize, 2, 10, 100] {
            let g = default_g(n).unwrap();
            assert!((1..=n).contains(&g));
        }
    }
}
