//! Deterministic parallel Monte Carlo scaffolding.
//!
//! Work is split into fixed-size blocks. Block `b` draws from an independent
//! ChaCha stream keyed by (seed, b), and block partials are reduced in block
//! order, so the result is bit-identical for any number of worker threads or
//! shards. Reusing a seed across calls replays the same draws, which is what
//! gives common-random-number sweeps their smooth curves.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Draws per block. Small enough to parallelize modest budgets, large enough
/// that stream setup is negligible.
pub const BLOCK_SIZE: u64 = 4096;

/// Running first and second moments of a scalar estimator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    pub sum: f64,
    pub sum_sq: f64,
    pub count: u64,
}

impl Accumulator {
    pub fn push(&mut self, value: f64) {
        self.sum += value;
        self.sum_sq += value * value;
        self.count += 1;
    }

    /// Merge in block order only; floating-point addition is not
    /// associative, so order defines the result.
    pub fn merge(&mut self, other: &Accumulator) {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.count += other.count;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Standard error of the mean, sample-std / sqrt(n).
    pub fn std_error(&self) -> f64 {
        let n = self.count as f64;
        let var = (self.sum_sq / n - self.mean() * self.mean()).max(0.0);
        (var * n / (n - 1.0).max(1.0)).sqrt() / n.sqrt()
    }
}

/// RNG stream for a given block of a seeded run.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Evaluate `kernel` once per draw over `budget` draws, partitioned into
/// blocks. The kernel receives the block RNG and must consume it
/// identically for every draw.
pub fn run_blocks<F>(budget: u64, seed: u64, kernel: F) -> Accumulator
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let n_blocks = budget.div_ceil(BLOCK_SIZE);
    let partials: Vec<Accumulator> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let in_block = BLOCK_SIZE.min(budget - b * BLOCK_SIZE);
            let mut acc = Accumulator::default();
            for _ in 0..in_block {
                acc.push(kernel(&mut rng));
            }
            acc
        })
        .collect();
    let mut total = Accumulator::default();
    for p in &partials {
        total.merge(p);
    }
    total
}
