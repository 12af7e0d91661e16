//! Ground truth for the metric engine.
//!
//! Everything here is computed from the definitions by a different route than
//! the production code: exhaustive enumeration of boolean distinguishers,
//! support functions of entropy superlevel sets, linear programs and explicit
//! separating hyperplanes. The randomized distinguisher simulator also lives
//! here.

mod brute;
mod hill;
mod randomized;
mod support;
mod threshold;

use alloc::vec::Vec;

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::math;

pub use brute::{bruteforce_metric, bruteforce_metric_abs, MAX_BRUTEFORCE_BITS};
pub use hill::{
    conditional_real_metric, hill_entropy_unbounded, metric_equals_hill_check, real_metric, separating_hyperplane,
    separating_hyperplane_lp, smooth_min_entropy_lp, Separation,
};
pub use randomized::{simulate_randomized, RandomizedDistinguisher, SimulationReport, MAX_ELL};
pub use support::support_value;
pub use threshold::{threshold_extract, threshold_extract_masses, Extraction};

/// A boolean distinguisher: the set of accepted points, stored as a bitset.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoolDistinguisher {
    bits: u32,
    words: Vec<u64>,
}

impl BoolDistinguisher {
    pub fn new(bits: u32, accept: &[bool]) -> Result<Self> {
        if accept.len() != 1usize << bits {
            return Err(Error::param("accept", alloc::format!("expected {} flags, got {}", 1usize << bits, accept.len())));
        }
        let mut words = alloc::vec![0u64; accept.len().div_ceil(64)];
        for (i, _) in accept.iter().enumerate().filter(|(_, &a)| a) {
            words[i / 64] |= 1 << (i % 64);
        }
        Ok(Self { bits, words })
    }

    /// From a bitmask over at most 64 points (`bits ≤ 6`); bit `x` accepts point `x`.
    pub fn from_mask(bits: u32, mask: u64) -> Result<Self> {
        if bits > 6 {
            return Err(Error::param("bits", "a single mask covers at most 6 bits"));
        }
        let len = 1u32 << bits;
        let mask = if len == 64 { mask } else { mask & ((1u64 << len) - 1) };
        Ok(Self { bits, words: alloc::vec![mask] })
    }

    pub fn from_points(bits: u32, points: &[u64]) -> Result<Self> {
        let mut accept = alloc::vec![false; 1usize << bits];
        for &x in points {
            *accept
                .get_mut(x as usize)
                .ok_or_else(|| Error::param("points", alloc::format!("point {x} outside the cube")))? = true;
        }
        Self::new(bits, &accept)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn accepts(&self, x: u64) -> bool {
        self.words.get(x as usize / 64).is_some_and(|w| w >> (x % 64) & 1 == 1)
    }

    /// `|D|`.
    pub fn size(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn complement(&self) -> Self {
        let len = 1usize << self.bits;
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        if !len.is_multiple_of(64) {
            words[0] &= (1u64 << len) - 1;
        }
        Self { bits: self.bits, words }
    }

    /// `Pr[D(X) = 1]` for masses indexed by point.
    pub fn expect(&self, masses: &[f64]) -> f64 {
        math::kahan_sum(masses.iter().enumerate().filter(|(x, _)| self.accepts(*x as u64)).map(|(_, p)| *p))
    }

    pub fn to_real(&self) -> RealDistinguisher {
        let values = (0..1u64 << self.bits).map(|x| if self.accepts(x) { 1.0 } else { 0.0 }).collect();
        RealDistinguisher { bits: self.bits, values }
    }
}

/// A `[0, 1]`-valued distinguisher.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RealDistinguisher {
    bits: u32,
    values: Vec<f64>,
}

impl RealDistinguisher {
    pub fn new(bits: u32, values: Vec<f64>) -> Result<Self> {
        if values.len() != 1usize << bits {
            return Err(Error::param("values", alloc::format!("expected {} values, got {}", 1usize << bits, values.len())));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::param("values", alloc::format!("value {v} outside [0, 1]")));
        }
        Ok(Self { bits, values })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, x: u64) -> f64 {
        self.values[x as usize]
    }

    /// `1 − D`.
    pub fn complement(&self) -> Self {
        Self { bits: self.bits, values: self.values.iter().map(|v| 1.0 - v).collect() }
    }

    pub fn expect(&self, x: &Distribution) -> f64 {
        x.expect(&self.values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitset_round_trip() {
        let d = BoolDistinguisher::from_points(7, &[0, 64, 127]).unwrap();
        assert_eq!(d.size(), 3);
        assert!(d.accepts(64) && !d.accepts(63));
        assert_eq!(d.complement().size(), 125);
        let m = BoolDistinguisher::from_mask(2, 0b1010).unwrap();
        assert_eq!(m.complement(), BoolDistinguisher::from_mask(2, 0b0101).unwrap());
        assert_eq!(m.expect(&[0.1, 0.2, 0.3, 0.4]), 0.2 + 0.4);
        assert_eq!(m.to_real().values(), &[0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn real_values_checked() {
        assert!(RealDistinguisher::new(1, alloc::vec![0.5, 1.5]).is_err());
        let d = RealDistinguisher::new(1, alloc::vec![0.25, 1.0]).unwrap();
        assert_eq!(d.complement().values(), &[0.75, 0.0]);
    }
}
