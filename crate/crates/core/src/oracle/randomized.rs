//! A boolean distinguisher that simulates a real-valued one with `ℓ` coin flips.
//!
//! On input `x` let `r_1 r_2 … r_ℓ` be the first `ℓ` binary digits of `D(x)`.
//! Flip coins until the first one lands on 1, say at flip `j`, and output `r_j`;
//! if none of the `ℓ` coins lands on 1, output 0. The acceptance probability is
//! `Σ_j 2^{−j} r_j`, the `ℓ`-digit truncation of `D(x)`.

use alloc::vec::Vec;

use rand_core::RngCore;

use super::RealDistinguisher;
use crate::error::{Error, Result};
use crate::math;
use crate::sampling;

/// Digits are kept in one machine word; 52 matches the mantissa of an `f64` in `[0, 1)`.
pub const MAX_ELL: u32 = 52;

#[derive(Debug, Clone, PartialEq)]
pub struct RandomizedDistinguisher {
    ell: u32,
    /// `⌊D(x)·2^ℓ⌋` (clipped to `2^ℓ − 1`), whose bits are the digits `r_1 … r_ℓ`.
    digits: Vec<u64>,
}

impl RandomizedDistinguisher {
    pub fn new(d: &RealDistinguisher, ell: u32) -> Result<Self> {
        if ell == 0 || ell > MAX_ELL {
            return Err(Error::param("ell", alloc::format!("need 1 <= ell <= {MAX_ELL}, got {ell}")));
        }
        let scale = math::pow2(ell);
        let top = (1u64 << ell) - 1;
        let digits = d.values().iter().map(|&v| (math::floor(v * scale) as u64).min(top)).collect();
        Ok(Self { ell, digits })
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    /// The digit `r_j`, `1 ≤ j ≤ ℓ`.
    pub fn digit(&self, x: u64, j: u32) -> bool {
        self.digits[x as usize] >> (self.ell - j) & 1 == 1
    }

    /// `Σ_j 2^{−j} r_j`, exactly.
    pub fn exact_expectation(&self, x: u64) -> f64 {
        self.digits[x as usize] as f64 / math::pow2(self.ell)
    }

    /// One run on input `x`: bit `i` of a fresh word is coin `i + 1`.
    pub fn sample<R: RngCore>(&self, x: u64, rng: &mut R) -> bool {
        let j = rng.next_u64().trailing_zeros() + 1;
        j <= self.ell && self.digit(x, j)
    }

    /// Per-point acceptance frequencies from `samples` runs each, one stream per point.
    pub fn empirical_means(&self, samples: u64, seed: u64) -> Vec<f64> {
        (0..self.digits.len() as u64)
            .map(|x| {
                let mut rng = sampling::stream_rng(seed, x);
                let hits = (0..samples).filter(|_| self.sample(x, &mut rng)).count();
                hits as f64 / samples as f64
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SimulationReport {
    pub seed: u64,
    pub ell: u32,
    pub samples: u64,
    /// `Σ_j 2^{−j} r_j` for every point.
    pub exact: Vec<f64>,
    /// `max_x |exact(x) − D(x)|`.
    pub max_truncation_error: f64,
    /// Mean of `D'(x) − D(x)` over `samples` runs with `x` uniform.
    pub bias: f64,
    /// Standard error of that mean.
    pub standard_error: f64,
}

/// Runs the simulator `samples` times on uniformly random inputs and compares the
/// acceptance rate with `E D(U)`.
pub fn simulate_randomized(d: &RealDistinguisher, ell: u32, samples: u64, seed: u64) -> Result<SimulationReport> {
    if samples < 2 {
        return Err(Error::param("samples", "need at least two samples"));
    }
    let sim = RandomizedDistinguisher::new(d, ell)?;
    let len = d.values().len() as u64;
    let exact: Vec<f64> = (0..len).map(|x| sim.exact_expectation(x)).collect();
    let max_truncation_error = exact.iter().zip(d.values()).map(|(e, v)| (e - v).abs()).fold(0.0, f64::max);
    let mut rng = sampling::stream_rng(seed, 0);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let x = sampling::below(&mut rng, len);
        let out = if sim.sample(x, &mut rng) { 1.0 } else { 0.0 };
        let delta = out - d.value(x);
        sum += delta;
        sum_sq += delta * delta;
    }
    let count = samples as f64;
    let bias = sum / count;
    let variance = ((sum_sq - count * bias * bias) / (count - 1.0)).max(0.0);
    Ok(SimulationReport {
        seed,
        ell,
        samples,
        exact,
        max_truncation_error,
        bias,
        standard_error: math::sqrt(variance / count),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn expectation_examples() {
        let d = RealDistinguisher::new(2, vec![0.625, 0.0, 1.0 / 3.0, 1.0]).unwrap();
        let sim = RandomizedDistinguisher::new(&d, 3).unwrap();
        assert_eq!(sim.exact_expectation(0), 0.625);
        assert!(sim.digit(0, 1) && !sim.digit(0, 2) && sim.digit(0, 3));
        assert_eq!(sim.exact_expectation(1), 0.0);
        assert_eq!(sim.exact_expectation(3), 0.875);
        let sim4 = RandomizedDistinguisher::new(&d, 4).unwrap();
        assert_eq!(sim4.exact_expectation(2), 0.3125);
        assert!((0.3125f64 - 1.0 / 3.0).abs() <= 1.0 / 32.0);
    }

    #[test]
    fn sampled_rate_matches_digits() {
        let d = RealDistinguisher::new(1, vec![1.0 / 3.0, 0.625]).unwrap();
        let sim = RandomizedDistinguisher::new(&d, 4).unwrap();
        let samples = 1_000_000u64;
        let means = sim.empirical_means(samples, 11);
        for (x, m) in means.iter().enumerate() {
            let p = sim.exact_expectation(x as u64);
            let sigma = (p * (1.0 - p) / samples as f64).sqrt();
            assert!((m - p).abs() <= 3.0 * sigma, "x = {x}: {m} vs {p}");
        }
    }

    #[test]
    fn bad_ell() {
        let d = RealDistinguisher::new(1, vec![0.5, 0.5]).unwrap();
        assert!(RandomizedDistinguisher::new(&d, 0).is_err());
        assert!(RandomizedDistinguisher::new(&d, 60).is_err());
    }
}
