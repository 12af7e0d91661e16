//! Hard-subset separation experiments at desk scale.
//!
//! Inside a set `S` of `2^{k+C}` points a random half-like subset `A` of size
//! `2^k` is drawn and `X` is uniform on `A`. Smoothing cannot lift `X` past
//! `k + 1` bits at distance `1/2`, yet a distinguisher that tells `X` apart
//! from every high-entropy `Y` must separate `A` from `B = S ∖ A`. The
//! experiment draws a family of random distinguishers and records how well the
//! best of them separates `A` from `B`; small families should all fail.
//! With `m > 0` conditioning bits each `z` gets its own `A(z)` and a family
//! member has to succeed for every `z` at once.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::metric::{bisect_k, DECISION_SLACK};
use crate::sampling;

/// Largest ambient bit-width.
pub const MAX_SEPARATION_BITS: u32 = 20;
/// Largest number of conditioning bits.
pub const MAX_SEPARATION_Z_BITS: u32 = 6;
/// Largest family size.
pub const MAX_FAMILY_SIZE: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SeparationSpec {
    pub k: u32,
    /// `|S| = 2^{k+C}`.
    pub c: u32,
    pub n: u32,
    pub m: u32,
    pub epsilon: f64,
    pub trials: u32,
    pub family_size: u64,
    /// Size of each sampled distinguisher inside `S`; `2^k` when absent.
    pub family_weight: Option<u64>,
    pub seed: u64,
}

impl SeparationSpec {
    /// `δ = ε / (1 − 2^{−C})`, the separation a successful distinguisher must show.
    pub fn delta(&self) -> f64 {
        if self.c == 0 {
            f64::INFINITY
        } else {
            self.epsilon / (1.0 - math::exp2(-(self.c as f64)))
        }
    }

    /// The `ε` that makes [`delta`](Self::delta) equal to `delta`.
    pub fn epsilon_for_delta(delta: f64, c: u32) -> f64 {
        delta * (1.0 - math::exp2(-(c as f64)))
    }

    pub fn weight(&self) -> u64 {
        self.family_weight.unwrap_or(1 << self.k)
    }

    /// `C = 0` leaves `B` empty, so there is nothing to separate.
    pub fn is_vacuous(&self) -> bool {
        self.c == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.n > MAX_SEPARATION_BITS || self.k + self.c > self.n {
            return Err(Error::param("n", alloc::format!("need k + C <= n <= {MAX_SEPARATION_BITS}")));
        }
        if self.m > MAX_SEPARATION_Z_BITS {
            return Err(Error::SizeCap { what: "conditioning bits", actual: self.m as u64, limit: MAX_SEPARATION_Z_BITS as u64 });
        }
        if self.family_size == 0 || self.family_size > MAX_FAMILY_SIZE {
            return Err(Error::SizeCap { what: "family size", actual: self.family_size, limit: MAX_FAMILY_SIZE });
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::param("epsilon", alloc::format!("must lie in [0, 1], got {}", self.epsilon)));
        }
        if self.trials == 0 {
            return Err(Error::param("trials", "need at least one trial"));
        }
        let weight = self.weight();
        if weight == 0 || weight > 1 << (self.k + self.c) {
            return Err(Error::param("family_weight", alloc::format!("need 1 <= weight <= |S| = {}", 1u64 << (self.k + self.c))));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TrialResult {
    pub trial: u32,
    /// Largest `k'` with smooth (conditional) min-entropy `k'` at distance `1/2`.
    pub smooth_threshold: f64,
    /// Worst-case conditional min-entropy of the drawn `X | Z` (plain min-entropy when `m = 0`).
    pub min_entropy: f64,
    pub exact_ok: bool,
    /// `max` over family members of `min_z adv_z`.
    pub max_advantage: f64,
    /// `adv_z` for the member attaining `max_advantage`.
    pub best_profile: Vec<f64>,
    /// Per `z`, the best `adv_z` over all members.
    pub per_z_max: Vec<f64>,
    pub distinguishing_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SeparationReport {
    pub spec: SeparationSpec,
    pub delta: Option<f64>,
    pub vacuous: bool,
    pub trials: Vec<TrialResult>,
    pub exact_passes: u32,
    pub distinguishing_passes: u32,
}

impl SeparationReport {
    pub fn from_trials(spec: &SeparationSpec, trials: Vec<TrialResult>) -> Self {
        let exact_passes = trials.iter().filter(|t| t.exact_ok).count() as u32;
        let distinguishing_passes = trials.iter().filter(|t| t.distinguishing_ok).count() as u32;
        let delta = spec.delta();
        Self {
            spec: spec.clone(),
            delta: delta.is_finite().then_some(delta),
            vacuous: spec.is_vacuous(),
            trials,
            exact_passes,
            distinguishing_passes,
        }
    }
}

/// Largest `k'` such that capping every column at `2^{−k'}·P(z)` moves at most `epsilon`:
/// the smooth worst-case conditional min-entropy for a fixed `Z`.
fn smooth_conditional_threshold(columns: &[(f64, Vec<f64>)], bits: u32, epsilon: f64) -> Result<f64> {
    bisect_k(bits, |k| {
        let level = math::exp2(-k);
        let moved = math::kahan_sum(
            columns.iter().flat_map(|(pz, masses)| masses.iter().map(move |&p| (p - level * pz).max(0.0))),
        );
        Ok(moved <= epsilon + DECISION_SLACK)
    })
}

/// One trial: draws `A(z)` for every `z`, checks the exact claims and runs the family.
///
/// Randomness comes from stream `trial` of the master seed, so trials can run in any order.
pub fn run_separation_trial(spec: &SeparationSpec, trial: u32) -> Result<TrialResult> {
    spec.validate()?;
    let mut rng = sampling::stream_rng(spec.seed, trial as u64);
    let s_len = 1usize << (spec.k + spec.c);
    let a_len = 1usize << spec.k;
    let b_len = s_len - a_len;
    let z_len = 1usize << spec.m;
    let pz = 1.0 / z_len as f64;

    // A(z) as membership flags over S.
    let mut perm: Vec<u32> = (0..s_len as u32).collect();
    let mut in_a = vec![vec![false; s_len]; z_len];
    for flags in in_a.iter_mut() {
        sampling::partial_shuffle(&mut perm, a_len, &mut rng);
        for &w in &perm[..a_len] {
            flags[w as usize] = true;
        }
    }

    // Exact part: X | Z = z is uniform on A(z), each column carries P(z).
    let columns: Vec<(f64, Vec<f64>)> = in_a
        .iter()
        .map(|flags| {
            let size = flags.iter().filter(|&&f| f).count() as f64;
            (pz, flags.iter().filter(|&&f| f).map(|_| pz / size).collect())
        })
        .collect();
    let smooth_threshold = smooth_conditional_threshold(&columns, spec.n, 0.5)?;
    let min_entropy = columns
        .iter()
        .map(|(pz, masses)| -math::log2(masses.iter().copied().fold(0.0, f64::max) / pz))
        .fold(f64::INFINITY, f64::min);
    let exact_ok = smooth_threshold <= spec.k as f64 + 1.0 + 1e-9 && (min_entropy - spec.k as f64).abs() <= 1e-9;

    // Empirical part.
    let weight = spec.weight() as usize;
    let mut max_advantage = f64::NEG_INFINITY;
    let mut best_profile = vec![0.0; z_len];
    let mut per_z_max = vec![f64::NEG_INFINITY; z_len];
    let mut profile = vec![0.0; z_len];
    for _ in 0..spec.family_size {
        for (z, flags) in in_a.iter().enumerate() {
            sampling::partial_shuffle(&mut perm, weight, &mut rng);
            let hits = perm[..weight].iter().filter(|&&w| flags[w as usize]).count();
            profile[z] = if b_len == 0 {
                0.0
            } else {
                hits as f64 / a_len as f64 - (weight - hits) as f64 / b_len as f64
            };
            per_z_max[z] = per_z_max[z].max(profile[z]);
        }
        let score = profile.iter().copied().fold(f64::INFINITY, f64::min);
        if score > max_advantage {
            max_advantage = score;
            best_profile.copy_from_slice(&profile);
        }
    }
    let distinguishing_ok = spec.is_vacuous() || max_advantage < spec.delta();
    Ok(TrialResult {
        trial,
        smooth_threshold,
        min_entropy,
        exact_ok,
        max_advantage,
        best_profile,
        per_z_max,
        distinguishing_ok,
    })
}

/// Runs every trial with the conditioning bits given in the spec.
pub fn run_conditional_separation(spec: &SeparationSpec) -> Result<SeparationReport> {
    spec.validate()?;
    let trials = (0..spec.trials).map(|t| run_separation_trial(spec, t)).collect::<Result<Vec<_>>>()?;
    Ok(SeparationReport::from_trials(spec, trials))
}

/// Runs every trial without conditioning (`m` is forced to zero).
pub fn run_unconditional_separation(spec: &SeparationSpec) -> Result<SeparationReport> {
    let spec = SeparationSpec { m: 0, ..spec.clone() };
    run_conditional_separation(&spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(c: u32, m: u32) -> SeparationSpec {
        SeparationSpec {
            k: 3,
            c,
            n: 8,
            m,
            epsilon: SeparationSpec::epsilon_for_delta(0.5, c.max(1)),
            trials: 4,
            family_size: 200,
            family_weight: None,
            seed: 5,
        }
    }

    #[test]
    fn exact_claims_hold() {
        let report = run_conditional_separation(&small(2, 2)).unwrap();
        assert_eq!(report.exact_passes, 4);
        for t in &report.trials {
            assert!((t.smooth_threshold - 4.0).abs() < 1e-9);
            assert!((t.min_entropy - 3.0).abs() < 1e-12);
            assert_eq!(t.per_z_max.len(), 4);
            assert!(t.best_profile.iter().all(|&a| a >= t.max_advantage));
        }
    }

    #[test]
    fn zero_conditioning_bits_reduce_to_the_unconditional_run() {
        let plain = run_unconditional_separation(&small(2, 3)).unwrap();
        let cond = run_conditional_separation(&small(2, 0)).unwrap();
        assert_eq!(plain.trials, cond.trials);
    }

    #[test]
    fn vacuous_without_complement() {
        let report = run_unconditional_separation(&small(0, 0)).unwrap();
        assert!(report.vacuous);
        assert_eq!(report.delta, None);
        assert!(report.trials.iter().all(|t| t.max_advantage == 0.0 && t.distinguishing_ok));
    }

    #[test]
    fn deterministic_given_seed() {
        let a = run_separation_trial(&small(2, 1), 3).unwrap();
        let b = run_separation_trial(&small(2, 1), 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, run_separation_trial(&small(2, 1), 2).unwrap());
    }

    #[test]
    fn budget_checks() {
        let mut spec = small(2, 0);
        spec.family_size = MAX_FAMILY_SIZE + 1;
        assert!(spec.validate().is_err());
        let mut spec = small(2, 0);
        spec.c = 9;
        assert!(spec.validate().is_err());
    }
}
