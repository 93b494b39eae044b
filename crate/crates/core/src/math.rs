//! Float helpers routed through `libm` so results are identical with and
//! without `std`.

use rand::Rng;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

/// `log(sum(exp(xs)))`, `-inf` for an empty or all `-inf` slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = xs.iter().map(|&x| exp(x - max)).sum();
    max + ln(sum)
}

/// Draws an index with probability proportional to `exp(log_weights[k])`.
///
/// Linear scan; returns `None` when every weight is `-inf` or NaN.
pub fn sample_log_categorical<R: Rng + ?Sized>(log_weights: &[f64], rng: &mut R) -> Option<usize> {
    let lse = log_sum_exp(log_weights);
    if !lse.is_finite() {
        return None;
    }
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = None;
    for (k, &w) in log_weights.iter().enumerate() {
        let p = exp(w - lse);
        if p > 0.0 {
            last_positive = Some(k);
        }
        acc += p;
        if u < acc {
            return Some(k);
        }
    }
    // round-off left u beyond the accumulated mass
    last_positive
}

/// Sum of `ln(k)` for `k = 1..=m`, i.e. `ln(m!)`.
pub fn ln_factorial(m: usize) -> f64 {
    (2..=m).map(|k| ln(k as f64)).sum()
}
