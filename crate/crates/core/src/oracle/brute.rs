use alloc::vec;
use alloc::vec::Vec;

use super::support::support_value;
use crate::dist::{Distribution, EntropyOrder};
use crate::error::{Error, Result};
use crate::metric::{bisect_k, DECISION_SLACK};

/// Exhaustive enumeration visits `2^{2^n}` distinguishers.
pub const MAX_BRUTEFORCE_BITS: u32 = 4;

/// `E D(X)` for every mask `D`, built from the mask with its lowest bit cleared.
fn all_expectations(x: &Distribution) -> Result<Vec<f64>> {
    if x.bits() > MAX_BRUTEFORCE_BITS {
        return Err(Error::SizeCap {
            what: "bit-width for exhaustive enumeration",
            actual: x.bits() as u64,
            limit: MAX_BRUTEFORCE_BITS as u64,
        });
    }
    let masks = 1usize << x.len();
    let mut sums = vec![0.0; masks];
    for mask in 1..masks {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + x.probs()[low];
    }
    Ok(sums)
}

fn indicator(len: usize, mask: usize) -> Vec<f64> {
    (0..len).map(|i| (mask >> i & 1) as f64).collect()
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::param("epsilon", alloc::format!("must lie in [0, 1], got {epsilon}")));
    }
    Ok(())
}

/// Metric entropy against all `2^{2^n}` boolean distinguishers, each compared with the
/// support function of the superlevel set evaluated at that very distinguisher.
pub fn bruteforce_metric(x: &Distribution, order: EntropyOrder, epsilon: f64) -> Result<f64> {
    order.validate()?;
    check_epsilon(epsilon)?;
    let sums = all_expectations(x)?;
    let len = x.len();
    bisect_k(x.bits(), |k| {
        let mut memo: Vec<Option<f64>> = vec![None; len + 1];
        for (mask, &ed) in sums.iter().enumerate().skip(1) {
            let size = mask.count_ones() as usize;
            // Every mask of the same size has the same support value; cache it.
            let sigma = match memo[size] {
                Some(s) => s,
                None => {
                    let s = support_value(&indicator(len, mask), order, x.bits(), k)?;
                    memo[size] = Some(s);
                    s
                }
            };
            if ed > sigma + epsilon + DECISION_SLACK {
                return Ok(false);
            }
        }
        Ok(true)
    })
}

/// As [`bruteforce_metric`] but with the two-sided condition `|E D(X) − E D(Y)| ≤ ε`:
/// some `Y` of entropy `k` has `E D(Y)` within `ε` of `E D(X)`, and the reachable values
/// of `E D(Y)` form the interval `[1 − σ_k(1 − D), σ_k(D)]`.
pub fn bruteforce_metric_abs(x: &Distribution, order: EntropyOrder, epsilon: f64) -> Result<f64> {
    order.validate()?;
    check_epsilon(epsilon)?;
    let sums = all_expectations(x)?;
    let len = x.len();
    bisect_k(x.bits(), |k| {
        // sigma[s] is the support value of any indicator of size s.
        let mut sigma = vec![0.0; len + 1];
        for (size, slot) in sigma.iter_mut().enumerate().skip(1) {
            *slot = support_value(&indicator(len, (1usize << size) - 1), order, x.bits(), k)?;
        }
        for (mask, &ed) in sums.iter().enumerate() {
            let size = mask.count_ones() as usize;
            let high = sigma[size];
            let low = 1.0 - sigma[len - size];
            if ed > high + epsilon + DECISION_SLACK || ed < low - epsilon - DECISION_SLACK {
                return Ok(false);
            }
        }
        Ok(true)
    })
}
