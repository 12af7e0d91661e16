use alloc::vec::Vec;

use super::{BoolDistinguisher, RealDistinguisher};
use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::math;

/// A boolean distinguisher `1{D > t}` extracted from a real-valued `D`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Extraction {
    pub distinguisher: BoolDistinguisher,
    pub threshold: f64,
    /// `Pr[D'(X) = 1] − Pr[D'(Y) = 1]`.
    pub advantage: f64,
    /// `E D(X) − E D(Y)` for the original `D`.
    pub real_advantage: f64,
}

/// Best threshold of `D` for telling `X` from `Y`.
pub fn threshold_extract(d: &RealDistinguisher, x: &Distribution, y: &Distribution) -> Result<Extraction> {
    if x.bits() != d.bits() || y.bits() != d.bits() {
        return Err(Error::DimensionMismatch { left: d.bits(), right: if x.bits() != d.bits() { x.bits() } else { y.bits() } });
    }
    threshold_extract_masses(d, x.probs(), y.probs())
}

/// [`threshold_extract`] on raw mass vectors (for instance joint distributions flattened
/// over `(x, z)`).
///
/// Writing `E D(X) − E D(Y)` as the integral over `t ∈ [0, 1]` of
/// `Pr[D(X) > t] − Pr[D(Y) > t]` shows that some threshold does at least as well as
/// `D`; the integrand only changes at values of `D`, so those are the candidates.
pub fn threshold_extract_masses(d: &RealDistinguisher, x: &[f64], y: &[f64]) -> Result<Extraction> {
    let values = d.values();
    if x.len() != values.len() || y.len() != values.len() {
        return Err(Error::param("masses", "mass vectors must match the distinguisher's domain"));
    }
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let real_advantage = math::kahan_sum(values.iter().zip(&diff).map(|(v, g)| v * g));
    let mut candidates: Vec<f64> = values.to_vec();
    candidates.push(0.0);
    candidates.sort_by(|a, b| a.total_cmp(b));
    candidates.dedup();
    let mut best = (0.0, f64::NEG_INFINITY);
    for &t in &candidates {
        let adv = math::kahan_sum(values.iter().zip(&diff).filter(|(v, _)| **v > t).map(|(_, g)| *g));
        if adv > best.1 {
            best = (t, adv);
        }
    }
    let (threshold, advantage) = best;
    let accept: Vec<bool> = values.iter().map(|&v| v > threshold).collect();
    Ok(Extraction { distinguisher: BoolDistinguisher::new(d.bits(), &accept)?, threshold, advantage, real_advantage })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn boolean_input_is_reproduced() {
        let x = Distribution::new(2, vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let y = Distribution::uniform(2).unwrap();
        let d = BoolDistinguisher::from_mask(2, 0b0011).unwrap().to_real();
        let e = threshold_extract(&d, &x, &y).unwrap();
        assert_eq!(e.distinguisher, BoolDistinguisher::from_mask(2, 0b0011).unwrap());
        assert!((e.advantage - 0.2).abs() < 1e-15);
    }

    #[test]
    fn beats_the_real_distinguisher() {
        let x = Distribution::new(2, vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let y = Distribution::new(2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let d = RealDistinguisher::new(2, x.probs().to_vec()).unwrap();
        let e = threshold_extract(&d, &x, &y).unwrap();
        assert!(e.advantage >= e.real_advantage);
        assert!((e.advantage - 0.4).abs() < 1e-15);
    }

    #[test]
    fn constant_has_no_advantage() {
        let x = Distribution::new(1, vec![0.9, 0.1]).unwrap();
        let y = Distribution::uniform(1).unwrap();
        let d = RealDistinguisher::new(1, vec![0.5, 0.5]).unwrap();
        let e = threshold_extract(&d, &x, &y).unwrap();
        assert_eq!(e.advantage, 0.0);
        assert!(e.real_advantage.abs() < 1e-15);
    }
}
