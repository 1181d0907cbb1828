//! Inputs shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shadowcalc::homology::IntMatrix;

/// `count` matrices of size `dim x dim` with entries in `[-9, 9]`.
pub fn matrices(count: usize, dim: usize, seed: u64) -> Vec<IntMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let rows: Vec<Vec<i64>> =
                (0..dim).map(|_| (0..dim).map(|_| rng.gen_range(-9..=9)).collect()).collect();
            IntMatrix::from_rows(&rows)
        })
        .collect()
}
