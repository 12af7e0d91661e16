use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::dist::{EntropyOrder, SparseDistribution, MAX_SPARSE_BITS};
use crate::error::{Error, Result};
use crate::extreme;
use crate::math;

/// Largest `k` for the Shannon construction (it needs `2^k` root finds).
pub const MAX_SHANNON_FOOLER_K: u32 = 16;

/// Default ratio `c` in the Shannon precondition `k ≤ c·n`.
pub const DEFAULT_SHANNON_RATIO: f64 = 0.125;

/// Parameters of a fooling distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FoolingSpec {
    pub order: EntropyOrder,
    pub n: u32,
    pub k: u32,
    /// Only used by the Shannon construction: require `k ≤ shannon_ratio · n`.
    pub shannon_ratio: f64,
}

impl FoolingSpec {
    pub fn new(order: EntropyOrder, n: u32, k: u32) -> Result<Self> {
        let spec = Self { order, n, k, shannon_ratio: DEFAULT_SHANNON_RATIO };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_shannon_ratio(mut self, ratio: f64) -> Result<Self> {
        self.shannon_ratio = ratio;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_SPARSE_BITS {
            return Err(Error::param("n", alloc::format!("bit-width {} outside 1..={MAX_SPARSE_BITS}", self.n)));
        }
        match self.order {
            EntropyOrder::Finite(2.0) => {
                if self.k + 2 > self.n {
                    return Err(Error::param("k", alloc::format!("need k <= n - 2, got k = {}, n = {}", self.k, self.n)));
                }
            }
            EntropyOrder::Shannon => {
                if self.k == 0 || self.k > MAX_SHANNON_FOOLER_K {
                    return Err(Error::param("k", alloc::format!("need 1 <= k <= {MAX_SHANNON_FOOLER_K}, got {}", self.k)));
                }
                if !(self.shannon_ratio > 0.0) || self.k as f64 > self.shannon_ratio * self.n as f64 + 1e-12 {
                    return Err(Error::param(
                        "k",
                        alloc::format!("need k <= {} * n = {}", self.shannon_ratio, self.shannon_ratio * self.n as f64),
                    ));
                }
            }
            other => {
                return Err(Error::param("order", alloc::format!("fooling constructions exist for alpha=2 and shannon, not {other}")));
            }
        }
        Ok(())
    }
}

/// The `d`-th support point `x^d = (bin(d − 1), 0^{n−k})`.
fn support_point(spec: &FoolingSpec, d: u64) -> u64 {
    (d - 1) << (spec.n - spec.k)
}

fn assemble(spec: &FoolingSpec, masses: Vec<f64>) -> Result<SparseDistribution> {
    let support = masses.into_iter().enumerate().map(|(i, p)| (support_point(spec, i as u64 + 1), p)).collect();
    SparseDistribution::new(spec.n, support)
}

/// The collision-entropy fooler: `P(x^d) = γ(d) − γ(d − 1)` with the closed-form
/// `γ(d) = 2^{−n} d + √((2^n − d) d (2^{−k−n} − 2^{−2n}))`, on `2^k` points.
///
/// Its sorted prefix sums equal `γ(d)`, so it has `k` bits of metric collision
/// entropy against boolean distinguishers while its collision entropy is only
/// `k − Θ(log k)`.
pub fn build_collision_fooler(spec: &FoolingSpec) -> Result<SparseDistribution> {
    spec.validate()?;
    if spec.order != EntropyOrder::COLLISION {
        return Err(Error::param("order", "the collision construction needs alpha=2"));
    }
    let size = math::pow2(spec.n);
    let base = math::exp2(-(spec.n as f64));
    let spread = math::exp2(-((spec.k + spec.n) as f64) / 2.0) * math::sqrt(1.0 - math::exp2(spec.k as f64 - spec.n as f64));
    let masses = (1..=1u64 << spec.k)
        .map(|d| {
            let d = d as f64;
            // √(d(N−d)) − √((d−1)(N−d+1)) without cancellation.
            let step = (size - 2.0 * d + 1.0) / (math::sqrt(d * (size - d)) + math::sqrt((d - 1.0) * (size - d + 1.0)));
            base + step * spread
        })
        .collect();
    assemble(spec, masses)
}

/// The Shannon fooler: `P(x^d) = γ(d) − γ(d − 1)` with `γ(d)` the two-level extreme for
/// Shannon entropy `k`, found by root finding for each `d ≤ 2^k`.
pub fn build_shannon_fooler(spec: &FoolingSpec) -> Result<SparseDistribution> {
    spec.validate()?;
    if spec.order != EntropyOrder::Shannon {
        return Err(Error::param("order", "the Shannon construction needs order shannon"));
    }
    let gammas = extreme::gamma_curve(EntropyOrder::Shannon, spec.n, spec.k as f64, 1u64 << spec.k)?;
    let mut prev = 0.0;
    let masses = gammas
        .into_iter()
        .map(|g| {
            let mass = g - prev;
            prev = g;
            mass
        })
        .collect();
    assemble(spec, masses)
}

/// Builds the construction matching the spec's order.
pub fn build_fooler(spec: &FoolingSpec) -> Result<SparseDistribution> {
    match spec.order {
        EntropyOrder::Shannon => build_shannon_fooler(spec),
        _ => build_collision_fooler(spec),
    }
}

/// Memoised constructions keyed by `(order, n, k)`.
#[derive(Debug, Default, Clone)]
pub struct FoolerCache {
    entries: BTreeMap<(bool, u32, u32), SparseDistribution>,
}

impl FoolerCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_build(&mut self, spec: &FoolingSpec) -> Result<&SparseDistribution> {
        let key = (spec.order == EntropyOrder::Shannon, spec.n, spec.k);
        Ok(match self.entries.entry(key) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(build_fooler(spec)?),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
