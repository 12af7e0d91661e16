//! HILL entropy for the unbounded real-valued class and its separating hyperplanes.
//!
//! Against every `[0, 1]`-valued distinguisher the best advantage between `X`
//! and `Y` is `Δ(X, Y)`, so HILL entropy is smooth entropy. The metric side is
//! computed separately: a hyperplane `D` read off the optimality conditions of
//! the smoothing clamp is scored against the support function of the
//! superlevel set. Weak duality makes that score a lower bound on the distance
//! to the set, so agreement with the clamp certifies both.

use alloc::vec;
use alloc::vec::Vec;

use super::support::support_value;
use super::RealDistinguisher;
use crate::dist::{clamp_levels, max_entropy_within, smooth_entropy_bruteforce, Distribution, EntropyOrder, JointDistribution};
use crate::error::{Error, Result};
use crate::lp::{self, Constraint, Relation};
use crate::math;
use crate::metric::{bisect_k, Conditioning, DECISION_SLACK};

/// Largest bit-width for the LP-based oracles.
const MAX_LP_BITS: u32 = 8;

/// Largest bit-width for [`metric_equals_hill_check`].
const MAX_CHECK_BITS: u32 = 6;

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::param("epsilon", alloc::format!("must lie in [0, 1], got {epsilon}")));
    }
    Ok(())
}

fn cap(bits: u32, limit: u32, what: &'static str) -> Result<()> {
    if bits > limit {
        return Err(Error::SizeCap { what, actual: bits as u64, limit: limit as u64 });
    }
    Ok(())
}

/// HILL entropy against all real-valued distinguishers: the entropy of the best
/// distribution within statistical distance `epsilon`.
pub fn hill_entropy_unbounded(x: &Distribution, order: EntropyOrder, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    max_entropy_within(x, order, epsilon)
}

/// Smooth min-entropy distance as a linear program: `min Σ t` subject to
/// `y ≤ 2^{−k}`, `Σ y = 1`, `t ≥ x − y`.
pub fn smooth_min_entropy_lp(x: &Distribution, k: f64) -> Result<f64> {
    cap(x.bits(), MAX_LP_BITS, "bit-width for the LP oracle")?;
    let len = x.len();
    let level = math::exp2(-k);
    let mut objective = vec![0.0; 2 * len];
    objective[len..].fill(1.0);
    let mut cons = Vec::with_capacity(2 * len + 1);
    for i in 0..len {
        let mut row = vec![0.0; 2 * len];
        row[i] = 1.0;
        cons.push(Constraint::new(row.clone(), Relation::Le, level));
        row[len + i] = 1.0;
        cons.push(Constraint::new(row, Relation::Ge, x.probs()[i]));
    }
    let mut row = vec![0.0; 2 * len];
    row[..len].fill(1.0);
    cons.push(Constraint::new(row, Relation::Eq, 1.0));
    Ok(lp::minimize(&objective, &cons)?.value)
}

/// A real-valued distinguisher separating `X` from an entropy superlevel set.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Separation {
    pub distinguisher: RealDistinguisher,
    /// `E D(X) − max_{H(Y) ≥ k} E D(Y)`, scored by the support function.
    pub advantage: f64,
    /// Statistical distance from `X` to the superlevel set.
    pub distance: f64,
}

/// The hyperplane supporting the superlevel set at the clamp of `X`.
///
/// At the clamp `Y` (capped at `a`, floored at `b`) the optimality conditions make
/// `D` an affine function of `y^{α−1}` (of `ln y` for Shannon) that is one on the
/// capped points and zero on the raised ones; for min-entropy it is the indicator
/// of the points above `2^{−k}`.
pub fn separating_hyperplane(x: &Distribution, order: EntropyOrder, k: f64) -> Result<Separation> {
    order.validate()?;
    let distance = smooth_entropy_bruteforce(x, order, k)?;
    let len = x.len();
    if distance <= 0.0 {
        let distinguisher = RealDistinguisher::new(x.bits(), vec![0.0; len])?;
        return Ok(Separation { distinguisher, advantage: 0.0, distance: 0.0 });
    }
    let mut desc = x.probs().to_vec();
    desc.sort_by(|a, b| b.total_cmp(a));
    let above = |level: f64| x.probs().iter().map(|&p| if p > level { 1.0 } else { 0.0 }).collect::<Vec<_>>();
    let values: Vec<f64> = match (order, clamp_levels(&desc, distance)) {
        (EntropyOrder::Min, _) => above(math::exp2(-k.max(0.0))),
        // Clamp at (or numerically indistinguishable from) the uniform distribution.
        (_, None) => above(1.0 / len as f64),
        (_, Some((a, b))) if a - b <= 1e-12 * a => above(1.0 / len as f64),
        (EntropyOrder::Finite(alpha), Some((a, b))) => {
            let floor = math::powf(b / a, alpha - 1.0);
            x.probs()
                .iter()
                .map(|&p| ((math::powf(p.clamp(b, a) / a, alpha - 1.0) - floor) / (1.0 - floor)).clamp(0.0, 1.0))
                .collect()
        }
        (EntropyOrder::Shannon, Some((a, b))) => {
            let (la, lb) = (math::ln(a), math::ln(b));
            x.probs().iter().map(|&p| ((math::ln(p.clamp(b, a)) - lb) / (la - lb)).clamp(0.0, 1.0)).collect()
        }
    };
    let advantage = x.expect(&values) - support_value(&values, order, x.bits(), k)?;
    Ok(Separation { distinguisher: RealDistinguisher::new(x.bits(), values)?, advantage, distance })
}

/// The min-entropy separating hyperplane as a linear program over `D ∈ [0,1]^N`,
/// with the support function replaced by its dual `λ + 2^{−k} Σ u`, `u ≥ D − λ`.
pub fn separating_hyperplane_lp(x: &Distribution, k: f64) -> Result<Separation> {
    cap(x.bits(), MAX_LP_BITS, "bit-width for the LP oracle")?;
    let len = x.len();
    let level = math::exp2(-k);
    // Variables: D (len), λ⁺, λ⁻, u (len).
    let vars = 2 * len + 2;
    let mut objective = vec![0.0; vars];
    objective[..len].copy_from_slice(x.probs());
    objective[len] = -1.0;
    objective[len + 1] = 1.0;
    objective[len + 2..].fill(-level);
    let mut cons = Vec::with_capacity(2 * len);
    for i in 0..len {
        let mut row = vec![0.0; vars];
        row[i] = 1.0;
        cons.push(Constraint::new(row.clone(), Relation::Le, 1.0));
        row[len] = -1.0;
        row[len + 1] = 1.0;
        row[len + 2 + i] = -1.0;
        cons.push(Constraint::new(row, Relation::Le, 0.0));
    }
    let sol = lp::maximize(&objective, &cons)?;
    let values: Vec<f64> = sol.x[..len].iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let advantage = x.expect(&values) - support_value(&values, EntropyOrder::Min, x.bits(), k)?;
    Ok(Separation { distinguisher: RealDistinguisher::new(x.bits(), values)?, advantage, distance: sol.value })
}

/// Metric entropy against all real-valued distinguishers: the largest `k` whose
/// separating hyperplane has advantage at most `epsilon`.
pub fn real_metric(x: &Distribution, order: EntropyOrder, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    bisect_k(x.bits(), |k| Ok(separating_hyperplane(x, order, k)?.advantage <= epsilon + DECISION_SLACK))
}

/// Whether metric and HILL entropy coincide (within `1e-6` bits) for the unbounded real class.
pub fn metric_equals_hill_check(x: &Distribution, order: EntropyOrder, epsilon: f64) -> Result<bool> {
    cap(x.bits(), MAX_CHECK_BITS, "bit-width for the metric/HILL check")?;
    let metric = real_metric(x, order, epsilon)?;
    let hill = hill_entropy_unbounded(x, order, epsilon)?;
    Ok((metric - hill).abs() <= 1e-6)
}

/// Conditional metric min-entropy against all real-valued distinguishers on `(x, z)`.
///
/// With an unbounded class this is the largest `k` such that some `(Y, Z)` with the
/// same `Z` is within `epsilon` of `(X, Z)` and has conditional min-entropy `k`;
/// one LP minimises the admissible guessing probability `u = 2^{−k}`.
pub fn conditional_real_metric(xz: &JointDistribution, epsilon: f64, kind: Conditioning) -> Result<f64> {
    check_epsilon(epsilon)?;
    cap(xz.x_bits() + xz.z_bits(), 6, "n + m for the conditional LP oracle")?;
    let (x_len, z_len) = (xz.x_len(), xz.z_len());
    let cells = x_len * z_len;
    let pz = xz.marginal_z();
    // Variables: y (cells), t (cells), then u for the worst case or (m_z, u) for the average case.
    let extra = match kind {
        Conditioning::Worst => 1,
        Conditioning::Average => z_len + 1,
    };
    let vars = 2 * cells + extra;
    let u = vars - 1;
    let idx = |x: usize, z: usize| x * z_len + z;
    let mut cons = Vec::new();
    for x in 0..x_len {
        for z in 0..z_len {
            let mut row = vec![0.0; vars];
            row[idx(x, z)] = 1.0;
            match kind {
                Conditioning::Worst => row[u] = -pz[z],
                Conditioning::Average => row[2 * cells + z] = -1.0,
            }
            cons.push(Constraint::new(row, Relation::Le, 0.0));
            let mut row = vec![0.0; vars];
            row[idx(x, z)] = 1.0;
            row[cells + idx(x, z)] = 1.0;
            cons.push(Constraint::new(row, Relation::Ge, xz.prob(x, z)));
        }
    }
    for (z, &mass) in pz.iter().enumerate() {
        let mut row = vec![0.0; vars];
        for x in 0..x_len {
            row[idx(x, z)] = 1.0;
        }
        cons.push(Constraint::new(row, Relation::Eq, mass));
    }
    if kind == Conditioning::Average {
        let mut row = vec![0.0; vars];
        row[2 * cells..u].fill(1.0);
        row[u] = -1.0;
        cons.push(Constraint::new(row, Relation::Le, 0.0));
    }
    let mut row = vec![0.0; vars];
    row[cells..2 * cells].fill(1.0);
    cons.push(Constraint::new(row, Relation::Le, epsilon));
    let mut objective = vec![0.0; vars];
    objective[u] = 1.0;
    let guess = lp::minimize(&objective, &cons)?.value;
    Ok((-math::log2(guess)).clamp(0.0, xz.x_bits() as f64))
}
