//! Shared input builders for the criterion benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use magicbench_core::{RbmParameters, StateVector};

pub fn random_state(n: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    StateVector::random(n, &mut rng)
}

pub fn random_rbm(n: usize, alpha: usize, seed: u64) -> RbmParameters {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RbmParameters::random(n, alpha, 0.05, &mut rng).expect("valid parameters")
}
