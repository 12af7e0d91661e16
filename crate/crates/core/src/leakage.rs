//! Checks of the leakage chain rule and the leakage lemma on explicit joints.
//!
//! Leaking `m₂` more bits costs at most `m₂` bits of relaxed conditional metric
//! min-entropy, with the advantage inflated by `2^{m₂}`:
//! `H(X | Z₁, Z₂) at 2^{m₂}ε ≥ H(X | Z₁) at ε − m₂`. Without `Z₁` the same holds
//! for the average-case (non-relaxed) conditional metric entropy.

use crate::dist::{Distribution, EntropyOrder, JointDistribution};
use crate::error::{Error, Result};
use crate::math;
use crate::metric::{
    metric_entropy_decide, metric_entropy_search, min_metric_conditional_decide, min_metric_conditional_search,
    relaxed_metric_decide, relaxed_metric_search, Conditioning,
};

/// Largest `n + m₁ + m₂` for the chain rule.
pub const MAX_CHAIN_BITS: u32 = 12;
/// Largest `n + m₂` for the leakage lemma.
pub const MAX_LEMMA_BITS: u32 = 10;

const TOLERANCE: f64 = 1e-9;

/// `(X, Z₁, Z₂)` stored as a joint of `X` with `Z = (Z₁, Z₂)`, `Z₂` in the trailing `m₂` bits.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LeakageInstance {
    pub joint: JointDistribution,
    pub m2: u32,
    /// When set, the decision-level implication is checked at this `k` too.
    pub k: Option<f64>,
    pub epsilon: f64,
}

impl LeakageInstance {
    pub fn new(joint: JointDistribution, m2: u32, k: Option<f64>, epsilon: f64) -> Result<Self> {
        let inst = Self { joint, m2, k, epsilon };
        inst.validate()?;
        Ok(inst)
    }

    pub fn m1(&self) -> u32 {
        self.joint.z_bits() - self.m2
    }

    pub fn validate(&self) -> Result<()> {
        let total = self.joint.x_bits() + self.joint.z_bits();
        if total > MAX_CHAIN_BITS {
            return Err(Error::SizeCap { what: "n + m1 + m2", actual: total as u64, limit: MAX_CHAIN_BITS as u64 });
        }
        if self.m2 > self.joint.z_bits() {
            return Err(Error::param("m2", alloc::format!("m2 = {} exceeds the {} leaked bits", self.m2, self.joint.z_bits())));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::param("epsilon", alloc::format!("must lie in [0, 1], got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// A claim of more entropy than `X` has bits is false, not an error.
fn claim(bits: u32, k: f64, decide: impl FnOnce() -> Result<bool>) -> Result<bool> {
    if k > bits as f64 {
        Ok(false)
    } else {
        decide()
    }
}

/// `2^{m₂} ε`, capped at one.
fn scaled(epsilon: f64, m2: u32) -> f64 {
    (epsilon * math::pow2(m2)).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DecisionCheck {
    pub k: f64,
    /// Entropy `k` before the extra leakage, at `ε`.
    pub before: bool,
    /// Entropy `k − m₂` after it, at `2^{m₂}ε`.
    pub after: bool,
    /// `before ⇒ after`.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ChainRuleReport {
    pub n: u32,
    pub m1: u32,
    pub m2: u32,
    pub epsilon: f64,
    pub scaled_epsilon: f64,
    /// Relaxed metric entropy of `X | Z₁` at `ε`.
    pub k1: f64,
    /// Relaxed metric entropy of `X | Z₁, Z₂` at `2^{m₂}ε`.
    pub k2: f64,
    /// `k₂ − (k₁ − m₂)`.
    pub slack: f64,
    pub decision: Option<DecisionCheck>,
    pub holds: bool,
}

/// Computes both sides of the chain rule for relaxed conditional metric min-entropy.
pub fn verify_chain_rule(inst: &LeakageInstance) -> Result<ChainRuleReport> {
    inst.validate()?;
    let m2 = inst.m2;
    let before = inst.joint.drop_trailing_z(m2)?;
    let scaled_epsilon = scaled(inst.epsilon, m2);
    let k1 = relaxed_metric_search(&before, inst.epsilon)?;
    let k2 = relaxed_metric_search(&inst.joint, scaled_epsilon)?;
    let slack = k2 - (k1 - m2 as f64);
    let decision = match inst.k {
        Some(k) => {
            let n = inst.joint.x_bits();
            let b = claim(n, k, || Ok(relaxed_metric_decide(&before, k, inst.epsilon)?.holds))?;
            let a = claim(n, k - m2 as f64, || Ok(relaxed_metric_decide(&inst.joint, k - m2 as f64, scaled_epsilon)?.holds))?;
            Some(DecisionCheck { k, before: b, after: a, holds: !b || a })
        }
        None => None,
    };
    let holds = slack >= -TOLERANCE && decision.is_none_or(|d| d.holds);
    Ok(ChainRuleReport {
        n: inst.joint.x_bits(),
        m1: inst.m1(),
        m2,
        epsilon: inst.epsilon,
        scaled_epsilon,
        k1,
        k2,
        slack,
        decision,
        holds,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LeakageLemmaReport {
    pub n: u32,
    pub m2: u32,
    pub epsilon: f64,
    pub scaled_epsilon: f64,
    /// Metric min-entropy of `X` at `ε`.
    pub metric: f64,
    /// Average-case conditional metric min-entropy of `X | Z₂` at `2^{m₂}ε`.
    pub lhs: f64,
    /// `metric − m₂`.
    pub rhs: f64,
    /// Worst-case conditional value at the same advantage; reported, not asserted.
    pub worst_case: f64,
    pub slack: f64,
    pub decision: Option<DecisionCheck>,
    pub holds: bool,
}

/// Computes both sides of the leakage lemma for `X` and the leak `Z₂` carried by `xz`.
pub fn verify_leakage_lemma(xz: &JointDistribution, k: Option<f64>, epsilon: f64) -> Result<LeakageLemmaReport> {
    let total = xz.x_bits() + xz.z_bits();
    if total > MAX_LEMMA_BITS {
        return Err(Error::SizeCap { what: "n + m2", actual: total as u64, limit: MAX_LEMMA_BITS as u64 });
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::param("epsilon", alloc::format!("must lie in [0, 1], got {epsilon}")));
    }
    let m2 = xz.z_bits();
    let x: Distribution = xz.marginal_x()?;
    let scaled_epsilon = scaled(epsilon, m2);
    let metric = metric_entropy_search(&x, EntropyOrder::Min, epsilon)?;
    let lhs = min_metric_conditional_search(xz, scaled_epsilon, Conditioning::Average)?;
    let worst_case = min_metric_conditional_search(xz, scaled_epsilon, Conditioning::Worst)?;
    let rhs = metric - m2 as f64;
    let decision = match k {
        Some(k) => {
            let n = xz.x_bits();
            let b = claim(n, k, || Ok(metric_entropy_decide(&x, EntropyOrder::Min, k, epsilon)?.holds))?;
            let a = claim(n, k - m2 as f64, || min_metric_conditional_decide(xz, k - m2 as f64, scaled_epsilon, Conditioning::Average))?;
            Some(DecisionCheck { k, before: b, after: a, holds: !b || a })
        }
        None => None,
    };
    let slack = lhs - rhs;
    let holds = slack >= -TOLERANCE && decision.is_none_or(|d| d.holds);
    Ok(LeakageLemmaReport { n: xz.x_bits(), m2, epsilon, scaled_epsilon, metric, lhs, rhs, worst_case, slack, decision, holds })
}

/// [`verify_leakage_lemma`] for a deterministic leak `f: {0,1}^n → {0,1}^{m₂}`.
pub fn verify_leakage_map(
    x: &Distribution,
    m2: u32,
    leak: impl Fn(u64) -> u64,
    k: Option<f64>,
    epsilon: f64,
) -> Result<LeakageLemmaReport> {
    verify_leakage_lemma(&JointDistribution::from_leakage(x, m2, leak)?, k, epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    fn worked_joint() -> JointDistribution {
        JointDistribution::new(1, 1, vec![0.25, 0.25, 0.375, 0.125]).unwrap()
    }

    #[test]
    fn no_extra_leak_is_free() {
        let inst = LeakageInstance::new(worked_joint(), 0, Some(0.5), 0.1).unwrap();
        let r = verify_chain_rule(&inst).unwrap();
        assert_eq!(r.k1, r.k2);
        assert!(r.holds);
    }

    #[test]
    fn independent_leak_is_free() {
        let z2 = Distribution::new(2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let x = Distribution::new(2, vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let joint = JointDistribution::independent(&x, &z2).unwrap();
        let r = verify_chain_rule(&LeakageInstance::new(joint, 2, None, 0.0).unwrap()).unwrap();
        assert!(r.k2 >= r.k1 - 1e-9);
    }

    #[test]
    fn leaking_bits_of_a_uniform_x() {
        let x = Distribution::uniform(4).unwrap();
        let joint = JointDistribution::from_leakage(&x, 2, |v| v >> 2).unwrap();
        let r = verify_chain_rule(&LeakageInstance::new(joint, 2, Some(4.0), 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(r.k1, 4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.k2, 2.0, epsilon = 1e-9);
        assert!(r.holds);
    }

    #[test]
    fn lemma_examples() {
        let x = Distribution::uniform(4).unwrap();
        let parity = verify_leakage_map(&x, 1, |v| (v.count_ones() & 1) as u64, Some(4.0), 0.0).unwrap();
        assert_abs_diff_eq!(parity.lhs, 3.0, epsilon = 1e-9);
        assert!(parity.holds);
        let y = Distribution::new(2, vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let constant = verify_leakage_map(&y, 1, |_| 0, None, 0.0).unwrap();
        assert_abs_diff_eq!(constant.lhs, constant.metric, epsilon = 1e-9);
    }

    #[test]
    fn claims_beyond_the_width_are_vacuous() {
        let r = verify_chain_rule(&LeakageInstance::new(worked_joint(), 1, Some(2.0), 0.0).unwrap()).unwrap();
        let d = r.decision.unwrap();
        assert!(!d.before && d.holds && r.holds);
    }

    #[test]
    fn size_caps() {
        let x = Distribution::uniform(8).unwrap();
        assert!(verify_leakage_map(&x, 3, |v| v & 7, None, 0.0).is_err());
    }
}
