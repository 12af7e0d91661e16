//! Extreme distributions of entropy superlevel sets.
//!
//! For a boolean distinguisher `D` with `|D| = d` the maximum of `E D(Y)` over
//! `{Y : H_α(Y) ≥ k}` is attained by a two-level `Y`: mass `p` on each point of
//! `D` and `q` on each point of its complement, with
//!
//! ```text
//!     p^α d + q^α (2^n − d) = 2^{−(α−1)k}
//!     p d   + q   (2^n − d) = 1
//! ```
//!
//! and `p` the greatest solution. Writing `γ = p d` turns the pair into one
//! scalar equation in `γ` that is convex (decreasing then increasing, with the
//! minimum at the uniform point `γ = d / 2^n`), so the wanted root is the
//! unique one on `[d / 2^n, 1]`. Shannon entropy (`α → 1`) and min-entropy
//! (`α → ∞`) are the limiting cases; `α = 2` has a closed form.

use alloc::vec::Vec;

use crate::dist::EntropyOrder;
use crate::error::{Error, Result};
use crate::math;
use crate::roots;

/// The two-level maximiser `(p, q)` together with `γ = p·d`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ExtremeSolution {
    pub p: f64,
    pub q: f64,
    pub gamma: f64,
    /// False when the system also has a root on the decreasing branch
    /// (possible only for `k ≥ n − 1`); the returned root is still the greatest.
    pub unique: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootMethod {
    Bisection,
    Brent,
}

/// Relative slack when comparing `d` against `2^k`.
const SATURATION_SLACK: f64 = 1e-12;

fn check_inputs(order: EntropyOrder, bits: u32, k: f64, d: f64) -> Result<()> {
    order.validate()?;
    if bits == 0 || bits > 64 {
        return Err(Error::param("n", alloc::format!("bit-width {bits} outside 1..=64")));
    }
    let n = bits as f64;
    if !(k >= 0.0 && k <= n) {
        return Err(Error::param("k", alloc::format!("need 0 <= k <= n = {bits}, got {k}")));
    }
    if !(d >= 1.0 && d <= math::pow2(bits)) {
        return Err(Error::param("d", alloc::format!("need 1 <= d <= 2^n, got {d}")));
    }
    Ok(())
}

/// Greatest solution of the extreme-distribution system, by bisection.
pub fn solve_extreme(order: EntropyOrder, bits: u32, k: f64, d: f64) -> Result<ExtremeSolution> {
    solve_extreme_with(order, bits, k, d, RootMethod::Bisection)
}

pub fn solve_extreme_with(order: EntropyOrder, bits: u32, k: f64, d: f64, method: RootMethod) -> Result<ExtremeSolution> {
    check_inputs(order, bits, k, d)?;
    let size = math::pow2(bits);
    let cap = math::exp2(k);
    if d > cap * (1.0 + SATURATION_SLACK) {
        return Err(Error::Saturated { d, cap });
    }
    let rest = size - d;
    let unique = rest > cap;
    let finish = |gamma: f64| {
        let gamma = gamma.min(1.0);
        let q = if rest > 0.0 { ((1.0 - gamma) / rest).max(0.0) } else { 0.0 };
        ExtremeSolution { p: gamma / d, q, gamma, unique }
    };
    if d >= cap * (1.0 - SATURATION_SLACK) {
        // Full budget: the uniform distribution on D itself.
        return Ok(ExtremeSolution { p: 1.0 / d, q: 0.0, gamma: 1.0, unique });
    }
    let gamma = match order {
        EntropyOrder::Min => d / cap,
        EntropyOrder::Finite(alpha) if alpha == 2.0 && method == RootMethod::Bisection => {
            let spread = (math::exp2(-k) - math::exp2(-(bits as f64))).max(0.0);
            d / size + math::sqrt(d * rest * spread / size)
        }
        EntropyOrder::Finite(alpha) => {
            let residual = |gamma: f64| finite_residual(alpha, k, d, rest, gamma);
            find_root(residual, d / size, method)?
        }
        EntropyOrder::Shannon => {
            let residual = |gamma: f64| shannon_f(bits, d, gamma) + k;
            find_root(residual, d / size, method)?
        }
    };
    Ok(finish(gamma))
}

fn find_root<F: FnMut(f64) -> f64>(mut residual: F, lo: f64, method: RootMethod) -> Result<f64> {
    if residual(lo) >= 0.0 {
        // k = n: the uniform point is the only feasible one.
        return Ok(lo);
    }
    if residual(1.0) <= 0.0 {
        return Ok(1.0);
    }
    match method {
        RootMethod::Bisection => roots::bisect(residual, lo, 1.0, 1e-16, roots::BISECTION_MAX_ITER),
        RootMethod::Brent => roots::brent(residual, lo, 1.0, 1e-16, 500),
    }
}

/// `(Σ y^α) / 2^{−(α−1)k} − 1` for the two-level `y` with total mass `gamma` on `d` points,
/// evaluated in units of `2^{−k}` so huge orders neither underflow nor overflow early.
fn finite_residual(alpha: f64, k: f64, d: f64, rest: f64, gamma: f64) -> f64 {
    let scale = math::exp2(k);
    let on = gamma * scale / d;
    let off = (1.0 - gamma) * scale / rest;
    let a = d * math::powf(on, alpha) / scale;
    let b = if off > 0.0 { rest * math::powf(off, alpha) / scale } else { 0.0 };
    a + b - 1.0
}

/// `F(γ) = γ log γ + (1−γ) log(1−γ) − γ log d − (1−γ) log(2^n − d)`, i.e. minus the Shannon
/// entropy of the two-level distribution with mass `γ` on `d` points.
pub fn shannon_f(bits: u32, d: f64, gamma: f64) -> f64 {
    let log_rest = bits as f64 + math::ln_1p(-d / math::pow2(bits)) / math::LN_2;
    math::plogp(gamma) + math::plogp(1.0 - gamma) - gamma * math::log2(d) - (1.0 - gamma) * log_rest
}

/// `max_{H_α(Y) ≥ k} E D(Y)` for `|D| = d`: `γ(d)` below `2^k`, one from there on.
pub fn max_expectation(order: EntropyOrder, bits: u32, k: f64, d: f64) -> Result<f64> {
    match solve_extreme(order, bits, k, d) {
        Ok(sol) => Ok(sol.gamma),
        Err(Error::Saturated { .. }) => Ok(1.0),
        Err(e) => Err(e),
    }
}

/// `γ(1), …, γ(d_max)`.
pub fn gamma_curve(order: EntropyOrder, bits: u32, k: f64, d_max: u64) -> Result<Vec<f64>> {
    (1..=d_max).map(|d| solve_extreme(order, bits, k, d as f64).map(|s| s.gamma)).collect()
}

/// `∂γ/∂d` at a non-saturated `d` (`1 ≤ d < 2^k`), from implicit differentiation.
///
/// Shannon: `(p − q)/(ln p − ln q)`. Finite `α`: `(α−1)(p^α − q^α) / (α (p^{α−1} − q^{α−1}))`.
/// Min-entropy: `2^{−k}`.
pub fn gamma_derivative(order: EntropyOrder, bits: u32, k: f64, d: f64) -> Result<f64> {
    check_inputs(order, bits, k, d)?;
    let cap = math::exp2(k);
    if d >= cap * (1.0 - SATURATION_SLACK) {
        return Err(Error::Saturated { d, cap });
    }
    let sol = solve_extreme(order, bits, k, d)?;
    let degenerate = || Error::Degenerate(alloc::format!("p = q = {} at d = {d}", sol.p));
    match order {
        EntropyOrder::Min => Ok(1.0 / cap),
        EntropyOrder::Shannon => {
            if !(sol.p > sol.q) || sol.q <= 0.0 {
                return Err(degenerate());
            }
            Ok((sol.p - sol.q) / (math::ln(sol.p) - math::ln(sol.q)))
        }
        EntropyOrder::Finite(alpha) => {
            let (u, v) = (sol.p * cap, sol.q * cap);
            let den = math::powf(u, alpha - 1.0) - math::powf(v, alpha - 1.0);
            if !(den > 0.0) {
                return Err(degenerate());
            }
            let num = math::powf(u, alpha) - math::powf(v, alpha);
            Ok((alpha - 1.0) / alpha * num / den / cap)
        }
    }
}

/// Residuals of the two equations: `(normalisation, entropy)`.
///
/// The entropy residual is relative (`Σ y^α` against `2^{−(α−1)k}`) for finite
/// orders, in bits for Shannon, and `|p·2^k − 1|` for min-entropy.
pub fn residuals(order: EntropyOrder, bits: u32, k: f64, d: f64, sol: &ExtremeSolution) -> (f64, f64) {
    let rest = math::pow2(bits) - d;
    let mass = (sol.p * d + sol.q * rest - 1.0).abs();
    let entropy = match order {
        EntropyOrder::Min => (sol.p * math::exp2(k) - 1.0).abs(),
        EntropyOrder::Shannon => {
            let q_part = if sol.q > 0.0 { (1.0 - sol.gamma) * math::log2(sol.q) } else { 0.0 };
            (-sol.gamma * math::log2(sol.p) - q_part - k).abs()
        }
        EntropyOrder::Finite(alpha) => finite_residual(alpha, k, d, rest, sol.gamma).abs(),
    };
    (mass, entropy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn min_entropy_specialisation() {
        let s = solve_extreme(EntropyOrder::Min, 4, 2.0, 3.0).unwrap();
        assert_eq!(s.p, 0.25);
        assert_eq!(s.gamma, 0.75);
    }

    #[test]
    fn collision_closed_form() {
        let s = solve_extreme(EntropyOrder::COLLISION, 2, 1.0, 1.0).unwrap();
        let p = 0.25 + (3.0f64 * (0.125 - 0.0625)).sqrt();
        assert_abs_diff_eq!(s.p, p, epsilon = 1e-15);
        assert_abs_diff_eq!(s.p, 0.683013, epsilon = 1e-6);
        assert_abs_diff_eq!(s.q, 0.105662, epsilon = 1e-6);
        assert_abs_diff_eq!(s.p * s.p + 3.0 * s.q * s.q, 0.5, epsilon = 1e-15);
        // The generic bisection path reaches the same root.
        let generic = solve_extreme(EntropyOrder::Finite(2.0 + 1e-13), 2, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(generic.p, s.p, epsilon = 1e-10);
    }

    #[test]
    fn shannon_examples() {
        for bits in [5, 10, 40] {
            let s = solve_extreme(EntropyOrder::Shannon, bits, 3.0, 8.0).unwrap();
            assert_eq!(s.gamma, 1.0);
            assert_eq!(s.p, 0.125);
        }
        let s = solve_extreme(EntropyOrder::Shannon, 2, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(s.gamma, 0.8107, epsilon = 1e-3);
        assert!((shannon_f(2, 1.0, s.gamma) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn saturation_and_bad_inputs() {
        assert!(matches!(solve_extreme(EntropyOrder::Shannon, 4, 2.0, 5.0), Err(Error::Saturated { .. })));
        assert_eq!(max_expectation(EntropyOrder::Shannon, 4, 2.0, 5.0).unwrap(), 1.0);
        assert!(solve_extreme(EntropyOrder::Shannon, 4, 5.0, 1.0).is_err());
        assert!(solve_extreme(EntropyOrder::Shannon, 4, 2.0, 0.5).is_err());
        assert!(solve_extreme(EntropyOrder::Finite(0.5), 4, 2.0, 1.0).is_err());
    }

    #[test]
    fn uniqueness_flag() {
        assert!(solve_extreme(EntropyOrder::COLLISION, 6, 4.0, 3.0).unwrap().unique);
        // 2^n - d = 13 <= 2^k = 14.9...: a second root exists on the low branch.
        assert!(!solve_extreme(EntropyOrder::COLLISION, 4, 3.9, 3.0).unwrap().unique);
    }

    #[test]
    fn collision_curve_examples() {
        let curve = gamma_curve(EntropyOrder::COLLISION, 3, 3.0, 8).unwrap();
        for (i, g) in curve.iter().enumerate() {
            assert_abs_diff_eq!(*g, (i + 1) as f64 / 8.0, epsilon = 1e-15);
        }
        let curve = gamma_curve(EntropyOrder::COLLISION, 4, 2.0, 4).unwrap();
        assert_eq!(curve[3], 1.0);
        assert_abs_diff_eq!(curve[0], 1.0 / 16.0 + (45.0f64 / 256.0).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(curve[0], 0.481763, epsilon = 1e-6);
        let via_bisection = solve_extreme(EntropyOrder::Finite(2.0), 4, 2.0, 1.0).unwrap();
        let via_brent = solve_extreme_with(EntropyOrder::Finite(2.0), 4, 2.0, 1.0, RootMethod::Brent).unwrap();
        assert_abs_diff_eq!(via_bisection.gamma, via_brent.gamma, epsilon = 1e-12);
        assert!(gamma_curve(EntropyOrder::COLLISION, 4, 2.0, 5).is_err());
    }

    #[test]
    fn derivative_degenerate_at_saturation() {
        assert!(matches!(gamma_derivative(EntropyOrder::Shannon, 6, 3.0, 8.0), Err(Error::Saturated { .. })));
        assert_eq!(gamma_derivative(EntropyOrder::Min, 6, 3.0, 2.0).unwrap(), 0.125);
    }
}
