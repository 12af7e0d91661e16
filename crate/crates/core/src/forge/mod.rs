//! Fooling distributions and separation experiments.
//!
//! The fooling distributions have sorted prefix sums equal to the extreme
//! curve `γ(d)`, so every boolean distinguisher is matched by some high-entropy
//! distribution even though their own entropy is much lower.

mod fooler;
mod separation;

pub use fooler::{
    build_collision_fooler, build_fooler, build_shannon_fooler, FoolerCache, FoolingSpec, DEFAULT_SHANNON_RATIO,
    MAX_SHANNON_FOOLER_K,
};
pub use separation::{
    run_conditional_separation, run_separation_trial, run_unconditional_separation, SeparationReport, SeparationSpec,
    TrialResult, MAX_FAMILY_SIZE, MAX_SEPARATION_BITS, MAX_SEPARATION_Z_BITS,
};
