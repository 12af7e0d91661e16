//! Computational entropy of explicit distributions over `{0,1}^n`.
//!
//! The crate treats metric and HILL pseudoentropy as convex separation problems
//! over the probability simplex:
//!
//! * [`dist`] holds dense and sparse distributions, Rényi entropies, statistical
//!   distance, conditional min-entropy and smooth entropy.
//! * [`extreme`] solves for the two-level distributions that maximise `E D(Y)`
//!   over an entropy superlevel set.
//! * [`metric`] decides and searches metric entropy against every boolean
//!   distinguisher, including relaxed and ordinary conditional variants.
//! * [`oracle`] is the ground-truth layer: exhaustive enumeration, separating
//!   hyperplanes for real-valued distinguishers and the randomized simulator.
//! * [`forge`] builds the fooling distributions and runs the hard-subset
//!   separation experiments.
//! * [`leakage`] checks the leakage chain rule and the leakage lemma.
//!
//! The crate is `no_std` with `alloc`; all transcendental functions go through
//! `libm`, so results are bit-identical across platforms.
#![cfg_attr(not(feature = "std"), no_std)]
// `!(a > b)` is how the input checks reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod math;

pub mod dist;
pub mod error;
pub mod extreme;
pub mod forge;
pub mod leakage;
pub mod lp;
pub mod metric;
pub mod oracle;
pub mod roots;
pub mod sampling;

pub use dist::{Distribution, EntropyOrder, JointDistribution, PointMasses, SparseDistribution};
pub use error::{Error, Result};
pub use extreme::ExtremeSolution;
