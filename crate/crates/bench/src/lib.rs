//! Seeded inputs shared by the benchmarks.

use liouville_core::random;
use liouville_core::{lindblad_liouvillian, DensityMatrix, Liouvillian};
use rand::rngs::StdRng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// A random Lindblad generator on a `dim`-level system with `dim` jumps.
pub fn lindblad(dim: usize, seed: u64) -> Liouvillian {
    let mut rng = rng(seed);
    let model = random::lindblad_model(&mut rng, dim, dim);
    lindblad_liouvillian(&model).expect("valid random model")
}

pub fn state(dim: usize, seed: u64) -> DensityMatrix {
    random::density_matrix(&mut rng(seed), dim)
}

/// `count` equally spaced times in `[0, stop]`.
pub fn times(stop: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| stop * k as f64 / (count - 1).max(1) as f64)
        .collect()
}
