use proptest::prelude::*;

use pseudoentropy::dist::renyi_entropy;
use pseudoentropy::metric::{
    metric_entropy_decide, metric_entropy_search, min_metric_conditional_decide, min_metric_conditional_search,
    relaxed_metric_decide, relaxed_metric_search, top_mass, Conditioning, MetricAnswer, MetricQuery,
};
use pseudoentropy::sampling::{random_joint, stream_rng};
use pseudoentropy::{Distribution, EntropyOrder, JointDistribution, SparseDistribution};

const ORDERS: [EntropyOrder; 5] =
    [EntropyOrder::Shannon, EntropyOrder::Finite(1.5), EntropyOrder::COLLISION, EntropyOrder::Finite(4.0), EntropyOrder::Min];

fn distribution(max_bits: u32) -> impl Strategy<Value = Distribution> {
    (1..=max_bits).prop_flat_map(|bits| {
        (prop::collection::vec(0.0f64..1.0, 1usize << bits), 0.5f64..8.0, 0usize..(1usize << bits)).prop_map(
            move |(w, power, anchor)| {
                let mut w: Vec<f64> = w.into_iter().map(|v| v.powf(power)).collect();
                w[anchor] += 1e-3;
                Distribution::normalized(bits, w).unwrap()
            },
        )
    })
}

fn joint() -> impl Strategy<Value = JointDistribution> {
    (1u32..=4, 0u32..=3, any::<u64>(), 0usize..3).prop_map(|(n, m, seed, s)| {
        random_joint(n, m, [0.0, 0.3, 0.6][s], &mut stream_rng(seed, 0)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn metric_entropy_is_at_least_the_plain_entropy(x in distribution(7), which in 0usize..5, eps in 0.0f64..0.3) {
        let order = ORDERS[which];
        let h = renyi_entropy(&x, order).unwrap();
        let metric = metric_entropy_search(&x, order, eps).unwrap();
        prop_assert!(h <= metric + 1e-9, "{order}: entropy {h} above metric {metric}");
    }

    #[test]
    fn metric_entropy_grows_with_epsilon(x in distribution(6), which in 0usize..5, a in 0.0f64..0.5, b in 0.0f64..0.5) {
        let order = ORDERS[which];
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(metric_entropy_search(&x, order, lo).unwrap() <= metric_entropy_search(&x, order, hi).unwrap() + 1e-12);
    }

    #[test]
    fn metric_entropy_falls_with_the_order(x in distribution(6), eps in 0.0f64..0.3) {
        let values: Vec<f64> = ORDERS.iter().map(|&o| metric_entropy_search(&x, o, eps).unwrap()).collect();
        for w in values.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9, "{values:?}");
        }
    }

    #[test]
    fn failing_witnesses_stay_within_the_budget(x in distribution(8), which in 0usize..5, share in 0.0f64..1.0, eps in 0.0f64..0.2) {
        let order = ORDERS[which];
        let k = share * x.bits() as f64;
        let decision = metric_entropy_decide(&x, order, k, eps).unwrap();
        if let Some(w) = &decision.witness {
            prop_assert!(!decision.holds);
            prop_assert!(w.d as f64 <= k.exp2() * (1.0 + 1e-12));
            prop_assert_eq!(w.points.len() as u64, w.d);
            let mass: f64 = w.points.iter().map(|&p| x.prob(p)).sum();
            prop_assert!((mass - top_mass(&x, w.d).unwrap()).abs() < 1e-12);
            prop_assert!(w.top_mass - w.bound > eps);
        } else {
            prop_assert!(decision.holds);
        }
    }

    #[test]
    fn sparse_and_dense_views_agree(x in distribution(6), which in 0usize..5, eps in 0.0f64..0.2) {
        let order = ORDERS[which];
        let sparse = SparseDistribution::from(&x);
        prop_assert_eq!(metric_entropy_search(&x, order, eps).unwrap(), metric_entropy_search(&sparse, order, eps).unwrap());
    }

    #[test]
    fn relaxed_dominates_average_dominates_worst(xz in joint(), eps in 0.0f64..0.3) {
        let relaxed = relaxed_metric_search(&xz, eps).unwrap();
        let avg = min_metric_conditional_search(&xz, eps, Conditioning::Average).unwrap();
        let worst = min_metric_conditional_search(&xz, eps, Conditioning::Worst).unwrap();
        prop_assert!(worst <= avg + 1e-9 && avg <= relaxed + 1e-9, "worst {worst}, average {avg}, relaxed {relaxed}");
    }

    #[test]
    fn non_relaxed_decisions_imply_relaxed_ones(xz in joint(), share in 0.0f64..1.0, eps in 0.0f64..0.3) {
        let k = share * xz.x_bits() as f64;
        for kind in [Conditioning::Worst, Conditioning::Average] {
            if min_metric_conditional_decide(&xz, k, eps, kind).unwrap() {
                prop_assert!(relaxed_metric_decide(&xz, k, eps).unwrap().holds);
            }
        }
    }

    #[test]
    fn trivial_side_information_matches_the_plain_metric(x in distribution(6), eps in 0.0f64..0.3) {
        let xz = JointDistribution::from_marginal(&x);
        let plain = metric_entropy_search(&x, EntropyOrder::Min, eps).unwrap();
        prop_assert!((relaxed_metric_search(&xz, eps).unwrap() - plain).abs() < 1e-9);
        for kind in [Conditioning::Worst, Conditioning::Average] {
            prop_assert!((min_metric_conditional_search(&xz, eps, kind).unwrap() - plain).abs() < 1e-9);
        }
    }
}

#[test]
fn relaxed_witness_shows_the_violation() {
    // X = Z: knowing Z reveals X.
    let xz = JointDistribution::new(1, 1, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
    let decision = relaxed_metric_decide(&xz, 1.0, 0.0).unwrap();
    assert!(!decision.holds);
    let w = decision.witness.unwrap();
    assert_eq!(w.t, 1);
    assert_eq!(w.pairs, vec![(0, 0), (1, 1)]);
    assert!((w.value - 1.0).abs() < 1e-12 && (w.bound - 0.5).abs() < 1e-12);
}

#[test]
fn queries_dispatch_on_the_target() {
    let x = Distribution::new(2, vec![0.5, 0.25, 0.125, 0.125]).unwrap();
    let decide = MetricQuery::new(EntropyOrder::Min, 0.0, Some(1.0)).unwrap().run(&x).unwrap();
    assert!(matches!(decide, MetricAnswer::Decision(ref d) if d.holds));
    let search = MetricQuery::new(EntropyOrder::Min, 0.0, None).unwrap().run(&x).unwrap();
    assert!(matches!(search, MetricAnswer::Value(v) if (v - 1.0).abs() < 1e-9));
    assert!(MetricQuery::new(EntropyOrder::Min, 1.5, None).is_err());
}
