use proptest::prelude::*;

use pseudoentropy::extreme::{gamma_curve, gamma_derivative, max_expectation, solve_extreme, solve_extreme_with, RootMethod};
use pseudoentropy::EntropyOrder;

const ORDERS: [EntropyOrder; 6] = [
    EntropyOrder::Shannon,
    EntropyOrder::Finite(1.5),
    EntropyOrder::COLLISION,
    EntropyOrder::Finite(5.0),
    EntropyOrder::Finite(32.0),
    EntropyOrder::Min,
];

/// `(n, k, d)` with `k < n − 1` and `1 ≤ d ≤ 2^k`.
fn instance() -> impl Strategy<Value = (u32, f64, f64)> {
    (3u32..=40).prop_flat_map(|n| {
        (Just(n), 0.0f64..(n as f64 - 1.0)).prop_flat_map(|(n, k)| {
            let top = k.exp2().floor().max(1.0);
            (Just(n), Just(k), 0.0f64..=1.0).prop_map(move |(n, k, u)| (n, k, (u * top.log2()).exp2().floor().clamp(1.0, top)))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn bisection_and_brent_agree((n, k, d) in instance(), which in 0usize..6) {
        let order = ORDERS[which];
        let a = solve_extreme_with(order, n, k, d, RootMethod::Bisection).unwrap();
        let b = solve_extreme_with(order, n, k, d, RootMethod::Brent).unwrap();
        prop_assert!((a.gamma - b.gamma).abs() <= 1e-10, "{a:?} vs {b:?}");
        prop_assert!(a.unique);
    }

    #[test]
    fn the_maximiser_is_a_distribution((n, k, d) in instance(), which in 0usize..6) {
        let sol = solve_extreme(ORDERS[which], n, k, d).unwrap();
        prop_assert!(sol.p >= sol.q && sol.q >= 0.0);
        prop_assert!((sol.gamma - sol.p * d).abs() <= 1e-12);
        prop_assert!(sol.gamma >= d / (n as f64).exp2() - 1e-15 && sol.gamma <= 1.0);
    }

    #[test]
    fn the_value_falls_as_k_grows((n, k, d) in instance(), which in 0usize..6, step in 0.01f64..1.0) {
        let order = ORDERS[which];
        let k2 = (k + step).min(n as f64);
        prop_assume!(d <= k2.exp2());
        let lower = max_expectation(order, n, k, d).unwrap();
        let higher = max_expectation(order, n, k2, d).unwrap();
        prop_assert!(higher <= lower + 1e-12);
    }

    #[test]
    fn derivative_matches_finite_differences(n in 8u32..=30, k in 2.0f64..7.0, u in 0.05f64..0.95, which in 0usize..2) {
        let order = [EntropyOrder::Shannon, EntropyOrder::COLLISION][which];
        let d = (u * k.exp2()).max(2.0);
        let h = 1e-4 * d;
        let up = solve_extreme(order, n, k, d + h).unwrap().gamma;
        let down = solve_extreme(order, n, k, d - h).unwrap().gamma;
        let numeric = (up - down) / (2.0 * h);
        let exact = gamma_derivative(order, n, k, d).unwrap();
        prop_assert!(exact > 0.0);
        prop_assert!((numeric - exact).abs() <= 1e-5 * exact.abs().max(1e-3), "{numeric} vs {exact}");
    }
}

#[test]
fn gamma_is_increasing_and_concave_over_the_whole_range() {
    for order in [EntropyOrder::COLLISION, EntropyOrder::Shannon] {
        for (n, k) in [(6u32, 3u32), (10, 4), (12, 8), (16, 6), (24, 10)] {
            let curve = gamma_curve(order, n, k as f64, 1u64 << k).unwrap();
            assert!(curve.windows(2).all(|w| w[1] > w[0]), "{order} n={n} k={k} not increasing");
            let steps: Vec<f64> = curve.windows(2).map(|w| w[1] - w[0]).collect();
            assert!(steps.windows(2).all(|w| w[1] <= w[0] + 1e-15), "{order} n={n} k={k} not concave");
            assert!((curve.last().unwrap() - 1.0).abs() <= 1e-9);
        }
    }
}

#[test]
fn derivative_is_positive_and_decreasing() {
    for order in [EntropyOrder::COLLISION, EntropyOrder::Shannon] {
        let values: Vec<f64> = (1..64).map(|d| gamma_derivative(order, 20, 6.0, d as f64).unwrap()).collect();
        assert!(values.iter().all(|&v| v > 0.0));
        assert!(values.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)), "{order}: {values:?}");
    }
}

#[test]
fn full_distinguisher_captures_everything() {
    for order in ORDERS {
        for (n, k) in [(4u32, 2.0f64), (10, 7.0), (20, 12.0), (40, 20.0), (8, 8.0)] {
            let sol = solve_extreme(order, n, k, k.exp2()).unwrap();
            assert!((sol.gamma - 1.0).abs() <= 1e-9, "{order} n={n} k={k}: {sol:?}");
        }
    }
}

#[test]
fn large_orders_approach_min_entropy() {
    for (n, k, d) in [(8u32, 4.0f64, 3.0f64), (12, 6.0, 1.0), (16, 10.0, 100.0), (20, 3.5, 5.0)] {
        let gaps: Vec<f64> = [8.0, 64.0, 256.0]
            .iter()
            .map(|&alpha| (solve_extreme(EntropyOrder::Finite(alpha), n, k, d).unwrap().p - (-k).exp2()).abs())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "n={n} k={k} d={d}: {gaps:?}");
        assert!(gaps[2] <= 1e-3, "n={n} k={k} d={d}: {gaps:?}");
    }
}

#[test]
fn saturation_beyond_the_distinguisher_budget() {
    assert!(solve_extreme(EntropyOrder::COLLISION, 6, 2.0, 5.0).is_err());
    assert_eq!(max_expectation(EntropyOrder::COLLISION, 6, 2.0, 5.0).unwrap(), 1.0);
}
