use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pseudoentropy::EntropyOrder;
use serde::Serialize;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "PSEUDOENTROPY_THREADS";

fn order(s: &str) -> Result<EntropyOrder, String> {
    s.parse().map_err(|e: pseudoentropy::Error| e.to_string())
}

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "pseudoentropy", version, about = "Metric and HILL computational entropy of explicit distributions")]
pub struct Cli {
    /// Rendering on stdout; files written with --out are always JSON.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Worker threads for parallel experiments (0 picks one per core).
    #[arg(long, global = true, env = THREADS_ENV, default_value_t = 0)]
    #[serde(skip)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Rényi entropy of a distribution, or conditional min-entropy of a joint.
    Entropy(EntropyArgs),
    /// Two-level distribution maximising the mass of d points under an entropy floor.
    Extreme(ExtremeArgs),
    /// Metric entropy against boolean distinguishers, by search or as a decision at --k.
    Metric(MetricArgs),
    /// Ground-truth oracles: enumeration, HILL, separating hyperplanes, threshold extraction.
    Oracle(OracleArgs),
    /// Writes a distribution whose metric entropy exceeds its Rényi entropy.
    ConstructFooling(FoolingArgs),
    /// Hard-subset experiment separating metric from HILL entropy.
    SimulateSeparation(SeparationArgs),
    /// Checks the leakage chain rule (and the leakage lemma when there is no prior leak).
    ChainRule(ChainRuleArgs),
    /// Simulates a real-valued distinguisher with coin flips.
    SimulateDistinguisher(SimulateArgs),
    /// Re-runs the command stored in a report and compares the outputs bit for bit.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Report {
    /// Write the run record (command, configuration, outputs) to this JSON file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EntropyArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// shannon | alpha=<v> | min (joints need min).
    #[arg(long, value_parser = order, default_value = "min")]
    pub order: EntropyOrder,
    /// Also report the best entropy within this statistical distance.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub report: Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bisection,
    Brent,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExtremeArgs {
    #[arg(long, value_parser = order)]
    pub order: EntropyOrder,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: f64,
    /// Number of points on the high level.
    #[arg(long)]
    pub d: f64,
    #[arg(long, value_enum, default_value_t = Method::Brent)]
    pub method: Method,
    /// Also report the whole curve γ(1), …, γ(d).
    #[arg(long)]
    pub curve: bool,
    #[command(flatten)]
    pub report: Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditioningArg {
    Relaxed,
    Worst,
    Average,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MetricArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// shannon | alpha=<v> | min (joints need min).
    #[arg(long, value_parser = order, default_value = "min")]
    pub order: EntropyOrder,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// Decide `H ≥ k` instead of searching for the largest such k; exit 1 when it fails.
    #[arg(long)]
    pub k: Option<f64>,
    /// Conditional variant for joint inputs.
    #[arg(long, value_enum, default_value_t = ConditioningArg::Relaxed)]
    pub conditioning: ConditioningArg,
    #[command(flatten)]
    pub report: Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleMethod {
    /// Enumerate every boolean distinguisher (n ≤ 4).
    Brute,
    /// HILL entropy and metric entropy against real-valued distinguishers.
    Hill,
    /// Check that metric and HILL entropy agree for the real class; exit 1 if not.
    Check,
    /// Distance to the superlevel set at --k with a separating distinguisher.
    Separate,
    /// Best boolean threshold of the distinguisher in --distinguisher for telling --input from --against.
    Threshold,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OracleArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = OracleMethod::Hill)]
    pub method: OracleMethod,
    #[arg(long, value_parser = order, default_value = "min")]
    pub order: EntropyOrder,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub distinguisher: Option<PathBuf>,
    #[arg(long)]
    pub against: Option<PathBuf>,
    #[command(flatten)]
    pub report: Report,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FoolingArgs {
    /// alpha=2 for the collision construction, shannon for the Shannon one.
    #[arg(long, value_parser = order)]
    pub order: EntropyOrder,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u32,
    /// Shannon construction only: require k ≤ ratio · n.
    #[arg(long)]
    pub shannon_ratio: Option<f64>,
    /// Where to write the distribution; the run record goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SeparationArgs {
    #[arg(long)]
    pub k: u32,
    /// |S| = 2^(k+c).
    #[arg(long)]
    pub c: u32,
    #[arg(long)]
    pub n: u32,
    /// Conditioning bits.
    #[arg(long, default_value_t = 0)]
    pub m: u32,
    /// Advantage parameter; exclusive with --delta.
    #[arg(long, conflicts_with = "delta")]
    pub epsilon: Option<f64>,
    /// Required separation; sets ε = δ(1 − 2^-c).
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub trials: u32,
    #[arg(long, default_value_t = 10_000)]
    pub family_size: u64,
    /// Points per sampled distinguisher (default 2^k).
    #[arg(long)]
    pub family_weight: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Share of trials that must distinguish; exit 1 below it.
    #[arg(long, default_value_t = 0.99)]
    pub min_pass_rate: f64,
    #[command(flatten)]
    pub report: Report,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChainRuleArgs {
    /// Joint file of X with (Z1, Z2); Z2 occupies the trailing --m2 bits of z.
    #[arg(long)]
    pub input: PathBuf,
    /// Bits of newly leaked Z2 (default: all of z).
    #[arg(long)]
    pub m2: Option<u32>,
    /// Also check the implication at this entropy level.
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[command(flatten)]
    pub report: Report,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    /// Distinguisher file; a random one on --n bits is drawn from --seed when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, required_unless_present = "input")]
    pub n: Option<u32>,
    /// Binary digits of precision.
    #[arg(long, default_value_t = 10)]
    pub ell: u32,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub report: Report,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReplayArgs {
    /// A report written with --out.
    pub record: PathBuf,
}
