// Thin wrappers over libm; `core` has no transcendental functions.

pub(crate) const LN_2: f64 = core::f64::consts::LN_2;

#[inline]
pub(crate) fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub(crate) fn exp2(x: f64) -> f64 {
    libm::exp2(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// `p log2 p` with the convention `0 log 0 = 0`.
#[inline]
pub(crate) fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * log2(p)
    } else {
        0.0
    }
}

/// `2^bits` as a float; exact for every bit-width used here.
#[inline]
pub(crate) fn pow2(bits: u32) -> f64 {
    exp2(bits as f64)
}

/// Compensated summation; keeps prefix sums of many tiny masses honest.
pub(crate) fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}
