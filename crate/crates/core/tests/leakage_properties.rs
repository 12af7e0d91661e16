use proptest::prelude::*;

use pseudoentropy::leakage::{verify_chain_rule, verify_leakage_lemma, verify_leakage_map, LeakageInstance};
use pseudoentropy::sampling::{random_distribution, random_joint, stream_rng};
use pseudoentropy::{Distribution, JointDistribution};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn chain_rule_on_random_joints(n in 1u32..=4, m1 in 0u32..=2, m2 in 0u32..=2, seed in any::<u64>(), eps in 0.0f64..0.2, share in 0.0f64..1.0) {
        let joint = random_joint(n, m1 + m2, 0.3, &mut stream_rng(seed, 0)).unwrap();
        let report = verify_chain_rule(&LeakageInstance::new(joint, m2, Some(share * n as f64), eps).unwrap()).unwrap();
        prop_assert!(report.holds, "{report:?}");
        prop_assert!(report.scaled_epsilon <= 1.0);
    }

    #[test]
    fn leakage_lemma_on_random_joints(n in 1u32..=4, m in 0u32..=3, seed in any::<u64>(), eps in 0.0f64..0.2, share in 0.0f64..1.0) {
        let xz = random_joint(n, m, 0.3, &mut stream_rng(seed, 0)).unwrap();
        let report = verify_leakage_lemma(&xz, Some(share * n as f64), eps).unwrap();
        prop_assert!(report.holds, "{report:?}");
        prop_assert!(report.worst_case <= report.lhs + 1e-9);
    }

    #[test]
    fn deterministic_leaks_cost_at_most_their_length(n in 1u32..=6, m in 0u32..=3, seed in any::<u64>(), salt in any::<u64>()) {
        let x = random_distribution(n, 0.2, &mut stream_rng(seed, 0)).unwrap();
        let leak = move |v: u64| (v.wrapping_mul(salt | 1) >> 7) & ((1 << m) - 1);
        let report = verify_leakage_map(&x, m, leak, None, 0.0).unwrap();
        prop_assert!(report.holds, "{report:?}");
    }
}

#[test]
fn parity_of_a_uniform_source_costs_one_bit() {
    let x = Distribution::uniform(4).unwrap();
    let report = verify_leakage_map(&x, 1, |v| (v.count_ones() & 1) as u64, Some(4.0), 0.0).unwrap();
    assert!((report.metric - 4.0).abs() < 1e-9);
    assert!((report.lhs - 3.0).abs() < 1e-9);
    assert!(report.slack.abs() < 1e-9);
}

#[test]
fn chain_rule_on_the_worked_joint() {
    let joint = JointDistribution::new(1, 1, vec![0.25, 0.25, 0.375, 0.125]).unwrap();
    let report = verify_chain_rule(&LeakageInstance::new(joint, 1, Some(0.5), 0.0).unwrap()).unwrap();
    assert!(report.holds);
    assert_eq!(report.m1, 0);
    assert!(report.k2 >= report.k1 - 1.0 - 1e-9);
}

#[test]
fn oversized_instances_are_rejected() {
    let joint = random_joint(8, 5, 0.0, &mut stream_rng(1, 0)).unwrap();
    assert!(LeakageInstance::new(joint, 2, None, 0.0).is_err());
    let joint = random_joint(2, 2, 0.0, &mut stream_rng(1, 0)).unwrap();
    assert!(LeakageInstance::new(joint.clone(), 3, None, 0.0).is_err());
    assert!(LeakageInstance::new(joint, 1, None, 1.5).is_err());
}
