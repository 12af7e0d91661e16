//! Metric entropy against every deterministic boolean distinguisher.
//!
//! `X` has metric entropy `k` at advantage `ε` when every boolean `D` admits a
//! `Y` with `H_α(Y) ≥ k` and `E D(X) ≤ E D(Y) + ε`. The best `Y` for a given
//! `D` depends only on `|D| = d` (it is the extreme distribution of
//! [`crate::extreme`]), and the worst `D` of each size picks the `d` heaviest
//! points of `X`. So the whole class reduces to comparing the sorted prefix sums
//! of `X` with `γ(d)` for `d ≤ 2^k`.
//!
//! Conditional variants for min-entropy live here too: the relaxed one (where
//! the conditioning part may change as well) and the ordinary worst-case and
//! average-case ones.

use alloc::vec::Vec;

use crate::dist::{EntropyOrder, JointDistribution, PointMasses};
use crate::error::{Error, Result};
use crate::extreme;
use crate::math;

/// Slack on the non-strict inequality; ties count as passing.
pub const DECISION_SLACK: f64 = 1e-12;

/// Bisection steps for every search over `k ∈ [0, n]`.
pub const SEARCH_ITERATIONS: usize = 60;

/// Largest `n + m` accepted by the conditional routines.
pub const MAX_CONDITIONAL_BITS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MetricQuery {
    pub order: EntropyOrder,
    pub epsilon: f64,
    /// Decision mode when set, search mode otherwise.
    pub target_k: Option<f64>,
}

/// Outcome of a [`MetricQuery`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum MetricAnswer {
    Decision(Decision),
    Value(f64),
}

impl MetricQuery {
    pub fn new(order: EntropyOrder, epsilon: f64, target_k: Option<f64>) -> Result<Self> {
        order.validate()?;
        check_epsilon(epsilon)?;
        Ok(Self { order, epsilon, target_k })
    }

    pub fn run<X: PointMasses + ?Sized>(&self, x: &X) -> Result<MetricAnswer> {
        match self.target_k {
            Some(k) => metric_entropy_decide(x, self.order, k, self.epsilon).map(MetricAnswer::Decision),
            None => metric_entropy_search(x, self.order, self.epsilon).map(MetricAnswer::Value),
        }
    }
}

/// The boolean distinguisher that breaks a decision: the `d` heaviest points.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoolWitness {
    pub d: u64,
    /// `E D(X)` for the witness.
    pub top_mass: f64,
    /// `max E D(Y)` over the superlevel set.
    pub bound: f64,
    pub points: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Decision {
    pub holds: bool,
    /// Best boolean advantage `max_D [E D(X) − max_Y E D(Y)]`, never negative.
    pub advantage: f64,
    /// Present exactly when the decision fails.
    pub witness: Option<BoolWitness>,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::param("epsilon", alloc::format!("must lie in [0, 1], got {epsilon}")));
    }
    Ok(())
}

fn check_k(bits: u32, k: f64) -> Result<()> {
    if !k.is_finite() || k > bits as f64 {
        return Err(Error::Domain(alloc::format!("no distribution on {bits} bits has entropy {k}")));
    }
    Ok(())
}

/// Support points sorted by decreasing mass (ties by index) and their prefix sums.
struct Sorted {
    bits: u32,
    points: Vec<u64>,
    prefix: Vec<f64>,
}

impl Sorted {
    fn new<X: PointMasses + ?Sized>(x: &X) -> Self {
        let mut support = x.support();
        support.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut prefix = Vec::with_capacity(support.len());
        let (mut sum, mut c) = (0.0f64, 0.0f64);
        for &(_, p) in &support {
            let y = p - c;
            let t = sum + y;
            c = (t - sum) - y;
            sum = t;
            prefix.push(sum.min(1.0));
        }
        Self { bits: x.bits(), points: support.into_iter().map(|(x, _)| x).collect(), prefix }
    }

    fn top(&self, d: u64) -> f64 {
        if d as usize >= self.prefix.len() {
            1.0
        } else {
            self.prefix[d as usize - 1]
        }
    }

    /// Largest `d` worth checking: sizes beyond `2^k` are saturated, and beyond the
    /// support the prefix is already one while `γ` keeps growing.
    fn d_limit(&self, k: f64) -> u64 {
        let support = self.prefix.len() as u64;
        let cap = math::exp2(k) * (1.0 + DECISION_SLACK);
        if cap >= support as f64 {
            support
        } else {
            math::floor(cap) as u64
        }
    }

    fn decide(&self, order: EntropyOrder, k: f64, epsilon: f64) -> Result<Decision> {
        let k = k.max(0.0);
        let mut best: Option<(u64, f64, f64)> = None;
        for d in 1..=self.d_limit(k) {
            let bound = extreme::max_expectation(order, self.bits, k, d as f64)?;
            let top = self.top(d);
            if best.is_none_or(|(_, t, b)| top - bound > t - b) {
                best = Some((d, top, bound));
            }
        }
        let advantage = best.map_or(0.0, |(_, t, b)| (t - b).max(0.0));
        let holds = advantage <= epsilon + DECISION_SLACK;
        let witness = if holds {
            None
        } else {
            best.map(|(d, top_mass, bound)| BoolWitness {
                d,
                top_mass,
                bound,
                points: self.points[..d as usize].to_vec(),
            })
        };
        Ok(Decision { holds, advantage, witness })
    }
}

/// Sum of the `d` largest masses of `x`.
pub fn top_mass<X: PointMasses + ?Sized>(x: &X, d: u64) -> Result<f64> {
    let bits = x.bits();
    if d == 0 || (bits < 64 && d > 1u64 << bits) {
        return Err(Error::param("d", alloc::format!("need 1 <= d <= 2^{bits}, got {d}")));
    }
    Ok(Sorted::new(x).top(d))
}

/// Whether `x` has `k` bits of metric entropy of the given order at advantage `epsilon`.
pub fn metric_entropy_decide<X: PointMasses + ?Sized>(
    x: &X,
    order: EntropyOrder,
    k: f64,
    epsilon: f64,
) -> Result<Decision> {
    order.validate()?;
    check_epsilon(epsilon)?;
    check_k(x.bits(), k)?;
    Sorted::new(x).decide(order, k, epsilon)
}

/// Largest `k` with [`metric_entropy_decide`] true, by bisection on `[0, n]`.
pub fn metric_entropy_search<X: PointMasses + ?Sized>(x: &X, order: EntropyOrder, epsilon: f64) -> Result<f64> {
    order.validate()?;
    check_epsilon(epsilon)?;
    let sorted = Sorted::new(x);
    bisect_k(x.bits(), |k| Ok(sorted.decide(order, k, epsilon)?.holds))
}

/// Bisection for the largest `k ∈ [0, n]` where a monotone predicate holds.
pub(crate) fn bisect_k<F: FnMut(f64) -> Result<bool>>(bits: u32, mut holds: F) -> Result<f64> {
    let n = bits as f64;
    if holds(n)? {
        return Ok(n);
    }
    let (mut lo, mut hi) = (0.0, n);
    for _ in 0..SEARCH_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if holds(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Per-column sorted prefix sums of a joint distribution: `S_z(t)` for `t = 0..=2^n`.
fn column_prefixes(xz: &JointDistribution) -> Vec<Vec<f64>> {
    (0..xz.z_len())
        .map(|z| {
            let mut column = xz.column(z);
            column.sort_by(|a, b| b.total_cmp(a));
            let mut prefix = Vec::with_capacity(column.len() + 1);
            prefix.push(0.0);
            let mut sum = 0.0;
            for p in column {
                sum += p;
                prefix.push(sum);
            }
            prefix
        })
        .collect()
}

fn check_joint(xz: &JointDistribution) -> Result<()> {
    let total = xz.x_bits() + xz.z_bits();
    if total > MAX_CONDITIONAL_BITS {
        return Err(Error::SizeCap { what: "n + m", actual: total as u64, limit: MAX_CONDITIONAL_BITS as u64 });
    }
    Ok(())
}

/// Witness of a failed relaxed decision: per `z`, the `t` heaviest `x`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RelaxedWitness {
    pub t: u64,
    pub value: f64,
    pub bound: f64,
    /// Accepted `(x, z)` pairs.
    pub pairs: Vec<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RelaxedDecision {
    pub holds: bool,
    pub advantage: f64,
    pub witness: Option<RelaxedWitness>,
}

fn relaxed_scan(prefixes: &[Vec<f64>], x_len: usize, k: f64) -> (u64, f64, f64) {
    let scale = math::exp2(-k.max(0.0));
    let mut best = (0u64, 0.0, 0.0);
    let mut best_gap = 0.0;
    for t in 1..=x_len {
        let value = math::kahan_sum(prefixes.iter().map(|p| p[t]));
        let bound = (scale * t as f64).min(1.0);
        if value - bound > best_gap {
            best_gap = value - bound;
            best = (t as u64, value, bound);
        }
    }
    best
}

/// Relaxed conditional metric min-entropy: every boolean `D` on `(x, z)` must satisfy
/// `E D(X,Z) ≤ min(2^{−k} max_z |D(·,z)|, 1) + ε`.
pub fn relaxed_metric_decide(xz: &JointDistribution, k: f64, epsilon: f64) -> Result<RelaxedDecision> {
    check_epsilon(epsilon)?;
    check_k(xz.x_bits(), k)?;
    let prefixes = column_prefixes(xz);
    let (t, value, bound) = relaxed_scan(&prefixes, xz.x_len(), k);
    let advantage = (value - bound).max(0.0);
    let holds = advantage <= epsilon + DECISION_SLACK;
    let witness = (!holds).then(|| {
        let mut pairs = Vec::new();
        for z in 0..xz.z_len() {
            let mut order: Vec<usize> = (0..xz.x_len()).collect();
            order.sort_by(|&a, &b| xz.prob(b, z).total_cmp(&xz.prob(a, z)).then(a.cmp(&b)));
            pairs.extend(order[..t as usize].iter().map(|&x| (x as u64, z as u64)));
        }
        RelaxedWitness { t, value, bound, pairs }
    });
    Ok(RelaxedDecision { holds, advantage, witness })
}

/// Largest `k` with [`relaxed_metric_decide`] true.
pub fn relaxed_metric_search(xz: &JointDistribution, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let prefixes = column_prefixes(xz);
    bisect_k(xz.x_bits(), |k| {
        let (_, value, bound) = relaxed_scan(&prefixes, xz.x_len(), k);
        Ok(value - bound <= epsilon + DECISION_SLACK)
    })
}

/// Which conditional min-entropy bounds the comparison distributions `(Y, Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Conditioning {
    /// `H_∞(Y | Z = z) ≥ k` for every `z`.
    Worst,
    /// `−log2 E_z max_x P(Y = x | Z = z) ≥ k`.
    Average,
}

/// `max_D [E D(X,Z) − max_{(Y,Z) ∈ C} E D(Y,Z)]` over boolean `D`, where `C` keeps the law of `Z`
/// and bounds the conditional min-entropy of `Y` by `k`.
///
/// Worst case separates over `z`. In the average case the inner maximum is a
/// fractional knapsack over the per-column caps; its dual has one scalar `μ`
/// whose optimum sits at an integer in `0..=2^n`, so the outer maximum over `D`
/// becomes a scan over `μ` with an independent choice of `|D(·,z)|` per column.
pub fn conditional_advantage(xz: &JointDistribution, k: f64, kind: Conditioning) -> Result<f64> {
    check_joint(xz)?;
    check_k(xz.x_bits(), k)?;
    Ok(conditional_value(&column_prefixes(xz), xz.x_len(), k.max(0.0), kind))
}

fn conditional_value(prefixes: &[Vec<f64>], x_len: usize, k: f64, kind: Conditioning) -> f64 {
    let size = x_len as f64;
    let cap = math::exp2(-k);
    match kind {
        Conditioning::Worst => math::kahan_sum(prefixes.iter().map(|s| {
            let pz = s[x_len];
            (1..=x_len).map(|d| s[d] - pz * (d as f64 * cap).min(1.0)).fold(0.0, f64::max)
        })),
        Conditioning::Average => {
            let budget = (cap - 1.0 / size).max(0.0);
            let mut best = 0.0f64;
            for mu in 0..=x_len {
                let mut total = -(mu as f64) * budget;
                for s in prefixes {
                    let pz = s[x_len];
                    if pz <= 0.0 {
                        continue;
                    }
                    let mut column_best = 0.0f64;
                    #[allow(clippy::needless_range_loop)]
                    for d in 1..=x_len {
                        let df = d as f64;
                        let room = pz / df - pz / size;
                        let over = d.saturating_sub(mu) as f64;
                        column_best = column_best.max(s[d] - df * pz / size - over * room);
                    }
                    total += column_best;
                }
                best = best.max(total);
            }
            best
        }
    }
}

/// Whether `(X, Z)` has conditional metric min-entropy `k` at advantage `epsilon`.
pub fn min_metric_conditional_decide(xz: &JointDistribution, k: f64, epsilon: f64, kind: Conditioning) -> Result<bool> {
    check_epsilon(epsilon)?;
    Ok(conditional_advantage(xz, k, kind)? <= epsilon + DECISION_SLACK)
}

/// Largest `k` with [`min_metric_conditional_decide`] true.
pub fn min_metric_conditional_search(xz: &JointDistribution, epsilon: f64, kind: Conditioning) -> Result<f64> {
    check_joint(xz)?;
    check_epsilon(epsilon)?;
    let prefixes = column_prefixes(xz);
    bisect_k(xz.x_bits(), |k| Ok(conditional_value(&prefixes, xz.x_len(), k, kind) <= epsilon + DECISION_SLACK))
}
