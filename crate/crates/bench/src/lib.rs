//! Shared instance builders for the criterion benches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsemiring_core::{BoolMatrix, ExtInt, ExtMatrix};

pub fn random_bool(n: usize, density: f64, seed: u64) -> BoolMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = BoolMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if rng.gen_bool(density) {
                m.set(i, j, true);
            }
        }
    }
    m
}

pub fn random_ext(n: usize, seed: u64) -> ExtMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = ExtMatrix::filled(n, n, ExtInt::PosInf);
    for i in 0..n {
        for j in 0..n {
            if rng.gen_bool(0.9) {
                m.set(i, j, ExtInt::Finite(rng.gen_range(-50..=50)));
            }
        }
    }
    m
}
