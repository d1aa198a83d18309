//! Fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semgp::gp::FeatureMatrix;
use semgp::objectives::LabeledDataset;

/// `n` rows of 18 uniform features with a 1:9 label ratio.
pub fn dataset(n: usize, seed: u64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..n * 18).map(|_| rng.random()).collect();
    let labels = (0..n).map(|i| u8::from(i % 10 == 0)).collect();
    LabeledDataset::new(FeatureMatrix::from_row_major(n, 18, &values), labels)
}

/// `n` uniform points in the unit square.
pub fn points(n: usize, seed: u64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| [rng.random(), rng.random()]).collect()
}
