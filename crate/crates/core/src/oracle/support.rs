//! Support function of an entropy superlevel set: `σ_k(D) = max { ⟨D, Y⟩ : H_α(Y) ≥ k }`.
//!
//! Solved from first principles for any real `D`, without the two-level
//! reduction, so it can serve as an independent check on [`crate::extreme`].
//! The optimiser is a water-filling for min-entropy, a power law
//! `y ∝ ((D − λ)^+)^{1/(α−1)}` for finite orders and a Gibbs distribution
//! `y ∝ 2^{D/T}` for Shannon entropy; the free parameter is found by bisection
//! on the (monotone) entropy of the candidate.

use alloc::vec::Vec;

use crate::dist::EntropyOrder;
use crate::error::{Error, Result};
use crate::math;

/// Distinct values of `D` in decreasing order with their multiplicities.
fn groups(values: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for v in sorted {
        match out.last_mut() {
            Some((last, count)) if *last == v => *count += 1.0,
            _ => out.push((v, 1.0)),
        }
    }
    out
}

/// Entropy of per-point weights `w` (unnormalised) repeated `count` times.
fn grouped_entropy(groups: &[(f64, f64)], weights: &[f64], order: EntropyOrder) -> f64 {
    let total: f64 = math::kahan_sum(groups.iter().zip(weights).map(|(g, w)| g.1 * w));
    let top = weights.iter().copied().fold(0.0, f64::max) / total;
    match order {
        EntropyOrder::Min => -math::log2(top),
        EntropyOrder::Shannon => -math::kahan_sum(groups.iter().zip(weights).map(|(g, w)| g.1 * math::plogp(w / total))),
        EntropyOrder::Finite(alpha) => {
            let s = math::kahan_sum(groups.iter().zip(weights).map(|(g, w)| g.1 * math::powf(w / total / top, alpha)));
            (alpha * math::log2(top) + math::log2(s)) / (1.0 - alpha)
        }
    }
}

fn value_of(groups: &[(f64, f64)], weights: &[f64]) -> f64 {
    let total: f64 = math::kahan_sum(groups.iter().zip(weights).map(|(g, w)| g.1 * w));
    math::kahan_sum(groups.iter().zip(weights).map(|(g, w)| g.0 * g.1 * w)) / total
}

/// `σ_k(D)` for `D` given by its values on all `2^bits` points.
pub fn support_value(values: &[f64], order: EntropyOrder, bits: u32, k: f64) -> Result<f64> {
    order.validate()?;
    if values.len() != 1usize << bits {
        return Err(Error::param("values", alloc::format!("expected {} values, got {}", 1usize << bits, values.len())));
    }
    let n = bits as f64;
    if !k.is_finite() || k > n + 1e-12 {
        return Err(Error::Domain(alloc::format!("no distribution on {bits} bits has entropy {k}")));
    }
    let k = k.max(0.0);
    let groups = groups(values);
    let (top, top_count) = groups[0];
    if math::log2(top_count) >= k - 1e-12 {
        return Ok(top);
    }
    if k >= n - 1e-12 {
        return Ok(math::kahan_sum(values.iter().copied()) / values.len() as f64);
    }
    let gap = top - groups[1].0;

    if let EntropyOrder::Min = order {
        let cap = math::exp2(-k);
        let (mut left, mut value) = (1.0f64, 0.0);
        for &(v, count) in &groups {
            let take = left.min(count * cap);
            value += v * take;
            left -= take;
            if left <= 0.0 {
                break;
            }
        }
        return Ok(value);
    }

    // Candidate family indexed by a positive scale; entropy grows with it.
    let weights = |scale: f64| -> Vec<f64> {
        match order {
            EntropyOrder::Shannon => groups.iter().map(|&(v, _)| math::exp2((v - top) / scale)).collect(),
            EntropyOrder::Finite(alpha) => {
                groups.iter().map(|&(v, _)| math::powf((v - top + scale).max(0.0), 1.0 / (alpha - 1.0))).collect()
            }
            EntropyOrder::Min => unreachable!(),
        }
    };
    let entropy = |scale: f64| grouped_entropy(&groups, &weights(scale), order);
    let mut lo = match order {
        EntropyOrder::Shannon => gap / 2048.0,
        _ => gap / 2.0,
    };
    let mut hi = 2.0 * gap;
    let mut doublings = 0;
    while entropy(hi) < k {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 4000 || !hi.is_finite() {
            return Err(Error::NoRoot { lo, hi, f_lo: entropy(lo) - k, f_hi: entropy(hi) - k });
        }
    }
    for _ in 0..200 {
        let mid = math::sqrt(lo * hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if entropy(mid) >= k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(value_of(&groups, &weights(hi)))
}
