//! Seeded randomness: independent streams, uniform draws and partial shuffles.
//!
//! Every stochastic routine takes a master seed and a stream index so that
//! parallel trials are reproducible regardless of scheduling.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::dist::{Distribution, JointDistribution};
use crate::error::Result;
use crate::math;

pub use rand_chacha::ChaCha8Rng as Rng;

/// The generator for `stream` under master `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform in `[0, 1)` with 53 random bits.
pub fn unit_f64<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in `0..bound` without modulo bias.
pub fn below<R: RngCore>(rng: &mut R, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let zone = u64::MAX - u64::MAX % bound;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return v % bound;
        }
    }
}

/// Shuffles the first `count` slots of `items` into a uniform random `count`-subset
/// (Fisher–Yates stopped early). The remainder stays a permutation of the rest.
pub fn partial_shuffle<T, R: RngCore>(items: &mut [T], count: usize, rng: &mut R) {
    let len = items.len();
    for i in 0..count.min(len) {
        let j = i + below(rng, (len - i) as u64) as usize;
        items.swap(i, j);
    }
}

/// A uniform `count`-subset of `0..universe`, in draw order.
pub fn sample_subset<R: RngCore>(universe: u64, count: usize, rng: &mut R) -> Vec<u64> {
    let mut items: Vec<u64> = (0..universe).collect();
    partial_shuffle(&mut items, count, rng);
    items.truncate(count);
    items
}

/// Weights for a random point of the simplex (flat Dirichlet), with each entry zeroed
/// independently with probability `sparsity`. At least one entry stays positive.
fn simplex_weights<R: RngCore>(len: usize, sparsity: f64, rng: &mut R) -> Vec<f64> {
    let mut w: Vec<f64> = (0..len)
        .map(|_| {
            let keep = unit_f64(rng) >= sparsity;
            let e = -math::ln(1.0 - unit_f64(rng));
            if keep {
                e
            } else {
                0.0
            }
        })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        let i = below(rng, len as u64) as usize;
        w[i] = 1.0;
    }
    w
}

/// A random distribution on `{0,1}^bits`, uniform over the simplex when `sparsity = 0`.
pub fn random_distribution<R: RngCore>(bits: u32, sparsity: f64, rng: &mut R) -> Result<Distribution> {
    Distribution::normalized(bits, simplex_weights(1usize << bits, sparsity, rng))
}

/// A random joint distribution on `{0,1}^{x_bits + z_bits}`.
pub fn random_joint<R: RngCore>(x_bits: u32, z_bits: u32, sparsity: f64, rng: &mut R) -> Result<JointDistribution> {
    let w = simplex_weights(1usize << (x_bits + z_bits), sparsity, rng);
    let total = math::kahan_sum(w.iter().copied());
    JointDistribution::new(x_bits, z_bits, w.into_iter().map(|v| v / total).collect())
}
