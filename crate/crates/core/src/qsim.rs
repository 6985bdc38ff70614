//! Classical simulators for the quantum search primitives, with exact
//! model-cost accounting.
//!
//! Grover-style enumeration over a size-`N` space with `t` solutions is
//! charged `ceil(sqrt(N*(t+1)))` model quantum steps; extremum finding over
//! `N` items is charged `ceil(sqrt(N))`. Polylog factors are dropped so
//! ledger assertions are exact integers. The simulation itself is a seeded
//! scan, so it never errs: the failure probability of safe Grover search is
//! modeled as zero (an optional failure-rate knob exists for robustness
//! tests only).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::matrix::ExtInt;

/// Costs accumulated by one ledger phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseCost {
    pub classical_steps: u64,
    pub quantum_steps: u64,
    /// Model cost of algebraic multiplies, `n^omega_bound(..)`, kept apart
    /// from executed steps so model time and execution time are never
    /// conflated.
    pub model_multiply_cost: f64,
}

impl PhaseCost {
    fn absorb(&mut self, other: &PhaseCost) {
        self.classical_steps += other.classical_steps;
        self.quantum_steps += other.quantum_steps;
        self.model_multiply_cost += other.model_multiply_cost;
    }
}

/// One logged quantum charge, enough to recompute the charge formula
/// independently of the ledger's own accumulation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChargeEvent {
    Enumerate { space: u64, solutions: u64 },
    Extremum { space: u64 },
}

impl ChargeEvent {
    pub fn quantum_steps(&self) -> u64 {
        match *self {
            ChargeEvent::Enumerate { space, solutions } => {
                ceil_sqrt(space as u128 * (solutions as u128 + 1))
            }
            ChargeEvent::Extremum { space } => ceil_sqrt(space as u128),
        }
    }
}

/// Per-phase accumulator of classical steps and model quantum steps,
/// deterministic under a seed. Single-writer; distinct ledgers may be driven
/// concurrently.
#[derive(Clone, Debug)]
pub struct CostLedger {
    seed: u64,
    rng: ChaCha8Rng,
    phases: BTreeMap<String, PhaseCost>,
    events: Vec<(String, ChargeEvent)>,
    failure_rate: f64,
}

impl CostLedger {
    pub fn new(seed: u64) -> Self {
        CostLedger {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            phases: BTreeMap::new(),
            events: Vec::new(),
            failure_rate: 0.0,
        }
    }

    /// Robustness-test knob: probability that a simulated search drops a
    /// solution. Off (0.0) by default and excluded from acceptance runs.
    pub fn with_failure_rate(mut self, rate: f64) -> Self {
        self.failure_rate = rate;
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn charge_classical(&mut self, phase: &str, steps: u64) {
        self.phase_mut(phase).classical_steps += steps;
    }

    pub fn charge_model_multiply(&mut self, phase: &str, cost: f64) {
        self.phase_mut(phase).model_multiply_cost += cost;
    }

    pub fn charge_enumeration(&mut self, phase: &str, space: u64, solutions: u64) {
        let ev = ChargeEvent::Enumerate { space, solutions };
        self.phase_mut(phase).quantum_steps += ev.quantum_steps();
        self.events.push((phase.to_string(), ev));
    }

    pub fn charge_extremum(&mut self, phase: &str, space: u64) {
        let ev = ChargeEvent::Extremum { space };
        self.phase_mut(phase).quantum_steps += ev.quantum_steps();
        self.events.push((phase.to_string(), ev));
    }

    fn phase_mut(&mut self, phase: &str) -> &mut PhaseCost {
        self.phases.entry(phase.to_string()).or_default()
    }

    pub fn phase(&self, phase: &str) -> PhaseCost {
        self.phases.get(phase).copied().unwrap_or_default()
    }

    pub fn events(&self) -> &[(String, ChargeEvent)] {
        &self.events
    }

    fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Immutable ledger snapshot, serialized into CLI run reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerReport {
    pub seed: u64,
    pub phases: BTreeMap<String, PhaseCost>,
    pub totals: PhaseCost,
    pub events: Vec<(String, ChargeEvent)>,
    /// Predicate evaluation inside a simulated search is charged one step.
    pub predicate_step_cost: u64,
}

/// Snapshot of a ledger: per-phase steps, totals and the event log.
pub fn ledger_report(ledger: &CostLedger) -> LedgerReport {
    let mut totals = PhaseCost::default();
    for cost in ledger.phases.values() {
        totals.absorb(cost);
    }
    LedgerReport {
        seed: ledger.seed,
        phases: ledger.phases.clone(),
        totals,
        events: ledger.events.clone(),
        predicate_step_cost: 1,
    }
}

/// An indexable search space whose items and predicate evaluate in polylog
/// time. `item` must be a bijection from `0..size` onto the space.
pub trait SearchSpace {
    type Item;
    fn size(&self) -> usize;
    fn item(&self, index: usize) -> Self::Item;
}

/// The trivial space of indices `0..n`.
pub struct IndexSpace(pub usize);

impl SearchSpace for IndexSpace {
    type Item = usize;
    fn size(&self) -> usize {
        self.0
    }
    fn item(&self, index: usize) -> usize {
        index
    }
}

/// A two-level space given by prefix sums of inner-block lengths:
/// index `z` maps to `(outer, offset)` where `outer` is the block containing
/// `z` and `offset` the position inside it.
pub struct PrefixSpace {
    prefix: Vec<u64>,
}

impl PrefixSpace {
    /// `lengths[a]` is the size of block `a`.
    pub fn new(lengths: impl Iterator<Item = u64>) -> Self {
        let mut prefix = Vec::new();
        let mut acc = 0u64;
        for len in lengths {
            acc += len;
            prefix.push(acc);
        }
        PrefixSpace { prefix }
    }

    pub fn total(&self) -> u64 {
        self.prefix.last().copied().unwrap_or(0)
    }
}

impl SearchSpace for PrefixSpace {
    type Item = (usize, usize);
    fn size(&self) -> usize {
        self.total() as usize
    }
    fn item(&self, index: usize) -> (usize, usize) {
        let z = index as u64;
        // first block whose cumulative length exceeds z
        let a = self.prefix.partition_point(|&p| p <= z);
        let before = if a == 0 { 0 } else { self.prefix[a - 1] };
        (a, (z - before) as usize)
    }
}

/// Iteration order of a simulated search: an affine bijection over the next
/// power of two, which is a seed-determined permutation without materializing
/// index arrays.
struct Permutation {
    n: usize,
    mask: u64,
    mul: u64,
    add: u64,
}

impl Permutation {
    fn new(n: usize, rng: &mut ChaCha8Rng) -> Self {
        let m = (n.max(1) as u64).next_power_of_two();
        Permutation { n, mask: m - 1, mul: rng.gen::<u64>() | 1, add: rng.gen::<u64>() }
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..=self.mask)
            .map(move |z| (z.wrapping_mul(self.mul).wrapping_add(self.add) & self.mask) as usize)
            .filter(move |&x| x < self.n)
    }
}

/// Simulated quantum enumeration: returns every item satisfying `pred`,
/// visiting the space in a seed-determined permutation, and charges
/// `ceil(sqrt(N*(t+1)))` quantum steps where `t` is the number of solutions.
///
/// `pred` may carry state (e.g. a strike-out set updated as solutions are
/// found); it is invoked exactly once per item, in iteration order.
pub fn q_enumerate<S: SearchSpace>(
    space: &S,
    mut pred: impl FnMut(&S::Item) -> bool,
    ledger: &mut CostLedger,
    phase: &str,
) -> Vec<S::Item> {
    let n = space.size();
    let perm = Permutation::new(n, ledger.rng());
    let failure_rate = ledger.failure_rate;
    let mut drop_roll = ChaCha8Rng::seed_from_u64(ledger.rng().gen());
    let mut found = Vec::new();
    for idx in perm.iter() {
        let item = space.item(idx);
        if pred(&item) {
            if failure_rate > 0.0 && drop_roll.gen_bool(failure_rate) {
                continue;
            }
            found.push(item);
        }
    }
    // item access + predicate evaluation, one classical step each
    ledger.charge_classical(phase, 2 * n as u64);
    ledger.charge_enumeration(phase, n as u64, found.len() as u64);
    found
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremumMode {
    Max,
    Min,
}

/// Simulated quantum extremum finding: returns the index of an item attaining
/// the extremum of `key` (ties broken by smallest index), charging
/// `ceil(sqrt(N))` quantum steps. Returns `None` on an empty space.
pub fn q_extremum<S: SearchSpace>(
    space: &S,
    key: impl Fn(&S::Item) -> ExtInt,
    mode: ExtremumMode,
    ledger: &mut CostLedger,
    phase: &str,
) -> Option<usize> {
    let n = space.size();
    ledger.charge_classical(phase, 2 * n as u64);
    ledger.charge_extremum(phase, n as u64);
    let mut best: Option<(usize, ExtInt)> = None;
    for idx in 0..n {
        let k = key(&space.item(idx));
        let better = match (&best, mode) {
            (None, _) => true,
            (Some((_, b)), ExtremumMode::Max) => k > *b,
            (Some((_, b)), ExtremumMode::Min) => k < *b,
        };
        if better {
            best = Some((idx, k));
        }
    }
    best.map(|(idx, _)| idx)
}

/// Exact integer `ceil(sqrt(x))`.
pub fn ceil_sqrt(x: u128) -> u64 {
    if x == 0 {
        return 0;
    }
    let mut r = (x as f64).sqrt() as u128;
    while r * r < x {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= x {
        r -= 1;
    }
    r as u64
}
