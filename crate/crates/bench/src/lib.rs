//! Fixtures shared by the criterion benches.

use heofdma::{Matrix, WeightMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform weights in `[0, 1)` with a fixed seed.
pub fn random_weights(k: usize, n: usize, seed: u64) -> WeightMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Matrix::from_fn(k, n, |_, _| rng.random::<f64>())
}
