use std::collections::BTreeSet;
use std::path::Path;

use clap::Parser as _;

use pseudoentropy::dist::{cond_min_entropy_avg, cond_min_entropy_worst, max_entropy_within, renyi_entropy, smooth_entropy_bruteforce};
use pseudoentropy::extreme::{gamma_curve, max_expectation, residuals, solve_extreme_with, RootMethod};
use pseudoentropy::forge::{build_fooler, run_separation_trial, FoolingSpec, SeparationReport, SeparationSpec, DEFAULT_SHANNON_RATIO};
use pseudoentropy::leakage::{verify_chain_rule, verify_leakage_lemma, LeakageInstance, MAX_LEMMA_BITS};
use pseudoentropy::metric::{
    metric_entropy_search, min_metric_conditional_decide, min_metric_conditional_search, relaxed_metric_decide, relaxed_metric_search,
    Conditioning, MetricAnswer, MetricQuery,
};
use pseudoentropy::oracle::{
    bruteforce_metric, bruteforce_metric_abs, hill_entropy_unbounded, metric_equals_hill_check, real_metric, separating_hyperplane,
    simulate_randomized, threshold_extract, RealDistinguisher,
};
use pseudoentropy::sampling::{stream_rng, unit_f64};
use pseudoentropy::{Distribution, EntropyOrder};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cli::*;
use crate::io::{self, DistributionFile};
use crate::record::{Failure, Outcome, RunRecord};

/// Agreement required between the engine and the enumeration oracle, in bits.
const ORACLE_TOLERANCE: f64 = 1e-9;

/// Execution settings that do not change any output.
#[derive(Debug, Clone, Copy)]
pub struct Context {
    pub threads: usize,
    /// False during replay: nothing but the outputs is produced.
    pub write_files: bool,
}

fn value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("outputs are plain data")
}

fn usage(message: impl Into<String>) -> Failure {
    Failure::Usage(message.into())
}

fn done(outputs: Value, seed: Option<u64>, claim: Option<bool>) -> Result<Outcome, Failure> {
    Ok(Outcome { outputs, seed, claim })
}

fn dense(file: DistributionFile, what: &str) -> Result<Distribution, Failure> {
    match file {
        DistributionFile::Dense(x) => Ok(x),
        DistributionFile::Sparse(x) => Ok(x.to_dense()?),
        DistributionFile::Joint(_) => Err(usage(format!("{what} takes a distribution on X alone, not a joint file"))),
    }
}

fn require_min(order: EntropyOrder) -> Result<(), Failure> {
    if order != EntropyOrder::Min {
        return Err(usage("conditional entropy of a joint is only defined for --order min"));
    }
    Ok(())
}

pub fn execute(command: &Command, ctx: Context) -> Result<Outcome, Failure> {
    match command {
        Command::Entropy(a) => entropy(a),
        Command::Extreme(a) => extreme(a),
        Command::Metric(a) => metric(a),
        Command::Oracle(a) => oracle(a),
        Command::ConstructFooling(a) => construct_fooling(a, ctx),
        Command::SimulateSeparation(a) => simulate_separation(a, ctx),
        Command::ChainRule(a) => chain_rule(a),
        Command::SimulateDistinguisher(a) => simulate_distinguisher(a),
        Command::Replay(a) => replay(a, ctx),
    }
}

/// Where the run record goes, if anywhere.
pub fn report_path(command: &Command) -> Option<&Path> {
    let report = match command {
        Command::Entropy(a) => &a.report,
        Command::Extreme(a) => &a.report,
        Command::Metric(a) => &a.report,
        Command::Oracle(a) => &a.report,
        Command::SimulateSeparation(a) => &a.report,
        Command::ChainRule(a) => &a.report,
        Command::SimulateDistinguisher(a) => &a.report,
        Command::ConstructFooling(_) | Command::Replay(_) => return None,
    };
    report.out.as_deref()
}

fn entropy(a: &EntropyArgs) -> Result<Outcome, Failure> {
    let file = io::read_distribution(&a.input)?;
    let kind = file.kind();
    let outputs = match file {
        DistributionFile::Joint(xz) => {
            require_min(a.order)?;
            if a.epsilon.is_some() {
                return Err(usage("--epsilon is not supported for joint files"));
            }
            json!({
                "kind": kind,
                "n": xz.x_bits(),
                "m": xz.z_bits(),
                "order": a.order.to_string(),
                "worst_case": cond_min_entropy_worst(&xz)?,
                "average_case": cond_min_entropy_avg(&xz)?,
            })
        }
        file => {
            let bits = io::x_bits(&file);
            let h = match &file {
                DistributionFile::Dense(x) => renyi_entropy(x, a.order)?,
                DistributionFile::Sparse(x) => renyi_entropy(x, a.order)?,
                DistributionFile::Joint(_) => unreachable!(),
            };
            let mut out = json!({ "kind": kind, "n": bits, "order": a.order.to_string(), "entropy": h });
            if let Some(eps) = a.epsilon {
                let x = dense(file, "smoothing")?;
                out["epsilon"] = json!(eps);
                out["smooth_entropy"] = json!(max_entropy_within(&x, a.order, eps)?);
            }
            out
        }
    };
    done(outputs, None, None)
}

fn extreme(a: &ExtremeArgs) -> Result<Outcome, Failure> {
    let method = match a.method {
        Method::Bisection => RootMethod::Bisection,
        Method::Brent => RootMethod::Brent,
    };
    let mut out = json!({ "order": a.order.to_string(), "n": a.n, "k": a.k, "d": a.d, "max_expectation": max_expectation(a.order, a.n, a.k, a.d)? });
    match solve_extreme_with(a.order, a.n, a.k, a.d, method) {
        Ok(sol) => {
            let (mass, entropy) = residuals(a.order, a.n, a.k, a.d, &sol);
            out["solution"] = value(&sol);
            out["residuals"] = json!({ "mass": mass, "entropy": entropy });
        }
        // Past 2^k points the maximum is 1 and there is no two-level maximiser to report.
        Err(pseudoentropy::Error::Saturated { .. }) => out["saturated"] = json!(true),
        Err(e) => return Err(e.into()),
    }
    if a.curve {
        if !(a.d >= 1.0 && a.d <= 1e6 && a.d.fract() == 0.0) {
            return Err(usage("--curve needs an integer --d between 1 and 10^6"));
        }
        out["curve"] = value(&gamma_curve(a.order, a.n, a.k, a.d as u64)?);
    }
    done(out, None, None)
}

fn metric(a: &MetricArgs) -> Result<Outcome, Failure> {
    let file = io::read_distribution(&a.input)?;
    let kind = file.kind();
    let mut out = json!({ "kind": kind, "n": io::x_bits(&file), "order": a.order.to_string(), "epsilon": a.epsilon });
    let answer = match file {
        DistributionFile::Joint(xz) => {
            require_min(a.order)?;
            out["m"] = json!(xz.z_bits());
            out["conditioning"] = value(&a.conditioning);
            let kind = match a.conditioning {
                ConditioningArg::Relaxed => None,
                ConditioningArg::Worst => Some(Conditioning::Worst),
                ConditioningArg::Average => Some(Conditioning::Average),
            };
            match (a.k, kind) {
                (None, None) => MetricAnswer::Value(relaxed_metric_search(&xz, a.epsilon)?),
                (None, Some(c)) => MetricAnswer::Value(min_metric_conditional_search(&xz, a.epsilon, c)?),
                (Some(k), None) => {
                    let d = relaxed_metric_decide(&xz, k, a.epsilon)?;
                    out["k"] = json!(k);
                    out["decision"] = value(&d);
                    return done(out, None, Some(d.holds));
                }
                (Some(k), Some(c)) => {
                    let holds = min_metric_conditional_decide(&xz, k, a.epsilon, c)?;
                    out["k"] = json!(k);
                    out["decision"] = json!({ "holds": holds });
                    return done(out, None, Some(holds));
                }
            }
        }
        file => {
            if let Some(k) = a.k.filter(|&k| k > io::x_bits(&file) as f64) {
                // More entropy than bits is a false claim, not a malformed request.
                out["k"] = json!(k);
                out["decision"] = json!({ "holds": false, "reason": "k exceeds the bit-width" });
                return done(out, None, Some(false));
            }
            let query = MetricQuery::new(a.order, a.epsilon, a.k)?;
            match &file {
                DistributionFile::Dense(x) => query.run(x)?,
                DistributionFile::Sparse(x) => query.run(x)?,
                DistributionFile::Joint(_) => unreachable!(),
            }
        }
    };
    match answer {
        MetricAnswer::Value(v) => {
            out["metric_entropy"] = json!(v);
            done(out, None, None)
        }
        MetricAnswer::Decision(d) => {
            out["k"] = json!(a.k);
            out["decision"] = value(&d);
            done(out, None, Some(d.holds))
        }
    }
}

fn need_k(k: Option<f64>, what: &str) -> Result<f64, Failure> {
    k.ok_or_else(|| usage(format!("{what} needs --k")))
}

fn oracle(a: &OracleArgs) -> Result<Outcome, Failure> {
    let x = dense(io::read_distribution(&a.input)?, "the oracle")?;
    let mut out = json!({ "method": value(&a.method), "n": x.bits(), "order": a.order.to_string(), "epsilon": a.epsilon });
    let claim = match a.method {
        OracleMethod::Brute => {
            let one_sided = bruteforce_metric(&x, a.order, a.epsilon)?;
            let two_sided = bruteforce_metric_abs(&x, a.order, a.epsilon)?;
            let engine = metric_entropy_search(&x, a.order, a.epsilon)?;
            out["bruteforce"] = json!(one_sided);
            out["bruteforce_two_sided"] = json!(two_sided);
            out["engine"] = json!(engine);
            Some((one_sided - engine).abs() <= ORACLE_TOLERANCE && (two_sided - engine).abs() <= ORACLE_TOLERANCE)
        }
        OracleMethod::Hill => {
            out["hill"] = json!(hill_entropy_unbounded(&x, a.order, a.epsilon)?);
            out["real_metric"] = json!(real_metric(&x, a.order, a.epsilon)?);
            out["boolean_metric"] = json!(metric_entropy_search(&x, a.order, a.epsilon)?);
            None
        }
        OracleMethod::Check => {
            let equal = metric_equals_hill_check(&x, a.order, a.epsilon)?;
            out["metric_equals_hill"] = json!(equal);
            Some(equal)
        }
        OracleMethod::Separate => {
            let k = need_k(a.k, "--method separate")?;
            out["k"] = json!(k);
            out["distance"] = json!(smooth_entropy_bruteforce(&x, a.order, k)?);
            out["separation"] = value(&separating_hyperplane(&x, a.order, k)?);
            None
        }
        OracleMethod::Threshold => {
            let (Some(d_path), Some(y_path)) = (&a.distinguisher, &a.against) else {
                return Err(usage("--method threshold needs --distinguisher and --against"));
            };
            let d = io::read_distinguisher(d_path)?;
            let y = dense(io::read_distribution(y_path)?, "the oracle")?;
            let e = threshold_extract(&d, &x, &y)?;
            let holds = e.advantage >= e.real_advantage - 1e-12;
            out["extraction"] = value(&e);
            Some(holds)
        }
    };
    done(out, None, claim)
}

fn construct_fooling(a: &FoolingArgs, ctx: Context) -> Result<Outcome, Failure> {
    let spec = FoolingSpec { order: a.order, n: a.n, k: a.k, shannon_ratio: a.shannon_ratio.unwrap_or(DEFAULT_SHANNON_RATIO) };
    spec.validate()?;
    let x = build_fooler(&spec)?;
    let decision = pseudoentropy::metric::metric_entropy_decide(&x, a.order, a.k as f64, 0.0)?;
    let h = renyi_entropy(&x, a.order)?;
    if let (Some(path), true) = (&a.out, ctx.write_files) {
        io::write_distribution(path, &DistributionFile::Sparse(x.clone()))
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let out = json!({
        "spec": value(&spec),
        "file": a.out.as_ref().map(|p| p.display().to_string()),
        "support": x.entries().len(),
        "entropy": h,
        "metric_decision_at_k": value(&decision),
        "gap_lower_bound": a.k as f64 - h,
    });
    done(out, None, Some(decision.holds))
}

fn simulate_separation(a: &SeparationArgs, ctx: Context) -> Result<Outcome, Failure> {
    let epsilon = match (a.epsilon, a.delta) {
        (Some(e), None) => e,
        (None, Some(d)) => SeparationSpec::epsilon_for_delta(d, a.c),
        _ => return Err(usage("give exactly one of --epsilon and --delta")),
    };
    if !(0.0..=1.0).contains(&a.min_pass_rate) {
        return Err(usage("--min-pass-rate must lie in [0, 1]"));
    }
    let spec = SeparationSpec {
        k: a.k,
        c: a.c,
        n: a.n,
        m: a.m,
        epsilon,
        trials: a.trials,
        family_size: a.family_size,
        family_weight: a.family_weight,
        seed: a.seed,
    };
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.threads)
        .build()
        .map_err(|e| Failure::Numeric(format!("cannot start worker threads: {e}")))?;
    // Each trial draws from its own stream, so the split across workers cannot change the result.
    let trials = pool.install(|| (0..spec.trials).into_par_iter().map(|t| run_separation_trial(&spec, t)).collect::<Result<Vec<_>, _>>())?;
    let report = SeparationReport::from_trials(&spec, trials);
    let required = (a.min_pass_rate * spec.trials as f64).ceil() as u32;
    let holds = report.exact_passes == spec.trials && (report.vacuous || report.distinguishing_passes >= required);
    let mut out = value(&report);
    out["required_distinguishing_passes"] = json!(required);
    done(out, Some(a.seed), Some(holds))
}

fn chain_rule(a: &ChainRuleArgs) -> Result<Outcome, Failure> {
    let DistributionFile::Joint(xz) = io::read_distribution(&a.input)? else {
        return Err(usage("chain-rule needs a joint file (with `m`)"));
    };
    let m2 = a.m2.unwrap_or(xz.z_bits());
    let inst = LeakageInstance::new(xz, m2, a.k, a.epsilon)?;
    let chain = verify_chain_rule(&inst)?;
    let mut holds = chain.holds;
    let mut out = json!({ "chain_rule": value(&chain) });
    // Without an earlier leak the ordinary average-case variant applies as well.
    if inst.m1() == 0 && inst.joint.x_bits() + inst.joint.z_bits() <= MAX_LEMMA_BITS {
        let lemma = verify_leakage_lemma(&inst.joint, a.k, a.epsilon)?;
        holds &= lemma.holds;
        out["leakage_lemma"] = value(&lemma);
    }
    out["holds"] = json!(holds);
    done(out, None, Some(holds))
}

fn simulate_distinguisher(a: &SimulateArgs) -> Result<Outcome, Failure> {
    let d = match (&a.input, a.n) {
        (Some(path), _) => io::read_distinguisher(path)?,
        (None, Some(n)) => {
            if n == 0 || n > pseudoentropy::dist::MAX_BITS {
                return Err(usage(format!("--n must lie in 1..={}", pseudoentropy::dist::MAX_BITS)));
            }
            let mut rng = stream_rng(a.seed, u64::MAX);
            RealDistinguisher::new(n, (0..1u64 << n).map(|_| unit_f64(&mut rng)).collect())?
        }
        (None, None) => return Err(usage("give --input or --n")),
    };
    let report = simulate_randomized(&d, a.ell, a.samples, a.seed)?;
    let precision = (-(a.ell as f64)).exp2();
    // The exact acceptance probability is D truncated to ell digits, short by at most
    // 2^-ell (exactly that at D = 1); sampling adds noise on top.
    let allowance = precision + 5.0 * report.standard_error;
    let holds = report.max_truncation_error <= precision && report.bias.abs() <= allowance;
    let mut out = value(&report);
    out["n"] = json!(d.bits());
    out["bias_allowance"] = json!(allowance);
    out["holds"] = json!(holds);
    done(out, Some(a.seed), Some(holds))
}

fn replay(a: &ReplayArgs, ctx: Context) -> Result<Outcome, Failure> {
    let text = std::fs::read_to_string(&a.record)
        .map_err(|e| io::InputError { file: a.record.clone(), field: ".".into(), message: e.to_string() })?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let record: RunRecord = serde_path_to_error::deserialize(&mut de).map_err(|e| io::InputError {
        file: a.record.clone(),
        field: e.path().to_string(),
        message: e.into_inner().to_string(),
    })?;
    let argv = std::iter::once(crate::record::TOOL.to_string()).chain(record.command.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| usage(format!("stored command does not parse: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(usage("a replay record cannot be replayed"));
    }
    let ctx = Context { write_files: false, ..ctx };
    let replayed = execute(&cli.command, ctx)?;
    let exit_code = replayed.exit_code();
    let outputs = replayed.outputs;
    let differing: Vec<&String> = match (&outputs, &record.outputs) {
        (Value::Object(now), Value::Object(then)) => {
            now.keys().chain(then.keys()).filter(|k| now.get(*k) != then.get(*k)).collect::<BTreeSet<_>>().into_iter().collect()
        }
        _ => Vec::new(),
    };
    let matches = outputs == record.outputs && exit_code == record.exit_code;
    let out = json!({
        "record": a.record.display().to_string(),
        "recorded_version": record.version,
        "matches": matches,
        "exit_code": { "recorded": record.exit_code, "replayed": exit_code },
        "differing_outputs": differing,
    });
    done(out, record.seed, Some(matches))
}
