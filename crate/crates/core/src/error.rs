use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("dimension mismatch: {left} bits vs {right} bits")]
    DimensionMismatch { left: u32, right: u32 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("size cap exceeded: {what} is {actual}, limit {limit}")]
    SizeCap { what: &'static str, actual: u64, limit: u64 },

    /// `|D| > 2^k`: every distinguisher this large is saturated, the maximum is 1.
    #[error("distinguisher size {d} exceeds 2^k = {cap} (saturated, maximum is 1)")]
    Saturated { d: f64, cap: f64 },

    #[error("no root in bracket [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    NoRoot { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NoRoot { .. } | Error::Degenerate(_) | Error::Infeasible | Error::Unbounded)
    }
}
