//! The non-relaxed conditional advantage checked against exhaustive enumeration
//! of every boolean `D` on `(x, z)`, with the inner maximum over `(Y, Z)` solved
//! as a linear program.

use std::collections::HashMap;

use pseudoentropy::lp::{self, Constraint, Relation};
use pseudoentropy::metric::{conditional_advantage, min_metric_conditional_search, Conditioning};
use pseudoentropy::oracle::{conditional_real_metric, threshold_extract_masses, RealDistinguisher};
use pseudoentropy::sampling::{random_joint, stream_rng};
use pseudoentropy::JointDistribution;

/// `max E D(Y, Z)` over `(Y, Z)` with the law of `Z` kept and conditional min-entropy at least `k`.
fn inner_max(xz: &JointDistribution, accept: &[bool], k: f64, kind: Conditioning) -> f64 {
    let (x_len, z_len) = (xz.x_len(), xz.z_len());
    let cells = x_len * z_len;
    let pz = xz.marginal_z();
    let cap = (-k).exp2();
    let vars = match kind {
        Conditioning::Worst => cells,
        Conditioning::Average => cells + z_len,
    };
    let mut objective = vec![0.0; vars];
    for (i, &a) in accept.iter().enumerate() {
        objective[i] = if a { 1.0 } else { 0.0 };
    }
    let mut cons = Vec::new();
    for z in 0..z_len {
        let mut row = vec![0.0; vars];
        for x in 0..x_len {
            row[x * z_len + z] = 1.0;
        }
        cons.push(Constraint::new(row, Relation::Eq, pz[z]));
        for x in 0..x_len {
            let mut row = vec![0.0; vars];
            row[x * z_len + z] = 1.0;
            match kind {
                Conditioning::Worst => cons.push(Constraint::new(row, Relation::Le, cap * pz[z])),
                Conditioning::Average => {
                    row[cells + z] = -1.0;
                    cons.push(Constraint::new(row, Relation::Le, 0.0));
                }
            }
        }
    }
    if kind == Conditioning::Average {
        let mut row = vec![0.0; vars];
        row[cells..].fill(1.0);
        cons.push(Constraint::new(row, Relation::Le, cap));
    }
    lp::maximize(&objective, &cons).unwrap().value
}

/// `max_D [E D(X,Z) − max E D(Y,Z)]` over all `2^{|cells|}` boolean `D`.
///
/// The inner value only depends on how many points `D` accepts in each column, so it is
/// cached per count profile.
fn enumerated_advantage(xz: &JointDistribution, k: f64, kind: Conditioning) -> f64 {
    let (x_len, z_len) = (xz.x_len(), xz.z_len());
    let cells = x_len * z_len;
    let mut cache: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut best = 0.0f64;
    for mask in 0u64..(1u64 << cells) {
        let accept: Vec<bool> = (0..cells).map(|i| mask >> i & 1 == 1).collect();
        let counts: Vec<usize> = (0..z_len).map(|z| (0..x_len).filter(|&x| accept[x * z_len + z]).count()).collect();
        let inner = *cache.entry(counts).or_insert_with(|| inner_max(xz, &accept, k, kind));
        let ed: f64 = xz.probs().iter().zip(&accept).filter(|(_, &a)| a).map(|(p, _)| p).sum();
        best = best.max(ed - inner);
    }
    best
}

#[test]
fn reduction_matches_enumeration() {
    let profiles = [(1u32, 1u32), (2, 1), (1, 2), (2, 2), (3, 1), (1, 3), (4, 0)];
    let mut rng = stream_rng(21, 0);
    for (i, &(n, m)) in profiles.iter().cycle().take(28).enumerate() {
        let sparsity = if i % 2 == 0 { 0.0 } else { 0.4 };
        let xz = random_joint(n, m, sparsity, &mut rng).unwrap();
        for share in [0.0, 0.3, 0.55, 0.8, 1.0] {
            let k = share * n as f64;
            for kind in [Conditioning::Worst, Conditioning::Average] {
                let fast = conditional_advantage(&xz, k, kind).unwrap();
                let slow = enumerated_advantage(&xz, k, kind);
                assert!((fast - slow).abs() < 1e-9, "n={n} m={m} k={k} {kind:?}: reduction {fast}, enumeration {slow}");
            }
        }
    }
}

#[test]
fn thresholds_of_a_real_distinguisher_on_joints_do_as_well() {
    let mut rng = stream_rng(22, 0);
    for _ in 0..50 {
        let xz = random_joint(2, 2, 0.0, &mut rng).unwrap();
        let other = random_joint(2, 2, 0.3, &mut rng).unwrap();
        // The likelihood ratio is the natural real-valued test.
        let values: Vec<f64> = xz.probs().iter().zip(other.probs()).map(|(a, b)| a / (a + b)).collect();
        let d = RealDistinguisher::new(4, values).unwrap();
        let e = threshold_extract_masses(&d, xz.probs(), other.probs()).unwrap();
        assert!(e.advantage >= e.real_advantage - 1e-12);
        let accepted: f64 = (0..16u64).filter(|&c| e.distinguisher.accepts(c)).map(|c| xz.probs()[c as usize] - other.probs()[c as usize]).sum();
        assert!((accepted - e.advantage).abs() < 1e-12);
    }
}

#[test]
fn real_and_boolean_conditional_values_coincide() {
    let mut rng = stream_rng(23, 0);
    for (n, m) in [(1u32, 2u32), (2, 2), (3, 1), (2, 1)] {
        let xz = random_joint(n, m, 0.2, &mut rng).unwrap();
        for eps in [0.0, 0.1] {
            for kind in [Conditioning::Worst, Conditioning::Average] {
                let real = conditional_real_metric(&xz, eps, kind).unwrap();
                let boolean = min_metric_conditional_search(&xz, eps, kind).unwrap();
                assert!((real - boolean).abs() < 1e-9, "n={n} m={m} eps={eps} {kind:?}: real {real}, boolean {boolean}");
            }
        }
    }
}
