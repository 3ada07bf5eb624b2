//! Normal distribution truncated below, used as the Metropolis-Hastings
//! proposal for supports of the form `[lower, ∞)`.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::numerics::rng::RngStream;
use crate::numerics::special::{normal_cdf, normal_ln_sf, normal_quantile, normal_sf};

/// Standardised truncation points beyond this use exponential rejection.
const TAIL_SWITCH: f64 = 8.0;

/// Draws from `N(mean, sd²)` conditioned on `[lower, ∞)`.
///
/// Inverse CDF on the truncated uniform range, using the upper-tail form
/// when the truncation point lies above the mean; Robert's (1995)
/// exponential rejection sampler once `lower - mean > 8 sd`.
pub fn sample_trunc_normal(rng: &mut RngStream, mean: f64, sd: f64, lower: f64) -> Result<f64> {
    if !(sd > 0.0) || !sd.is_finite() {
        return Err(invalid(format!("sd must be positive, got {sd}")));
    }
    if !mean.is_finite() || lower.is_nan() {
        return Err(invalid("mean must be finite and lower not NaN"));
    }
    let a = (lower - mean) / sd;
    let z = if a > TAIL_SWITCH {
        let rate = 0.5 * (a + (a * a + 4.0).sqrt());
        loop {
            let z = a - rng.next_open01().ln() / rate;
            if rng.next_f64() <= (-0.5 * (z - rate) * (z - rate)).exp() {
                break z;
            }
        }
    } else if a >= 0.0 {
        let q = normal_sf(a);
        let v = q * rng.next_open01();
        -normal_quantile(v)?
    } else {
        let p = normal_cdf(a);
        let u = p + (1.0 - p) * rng.next_f64();
        if u <= 0.0 {
            a
        } else if u >= 1.0 {
            // 1 - 2^-53 rounding; the upper tail is negligible here
            normal_quantile(1.0 - f64::EPSILON / 2.0)?
        } else {
            normal_quantile(u)?
        }
    };
    Ok((mean + sd * z).max(lower))
}

/// Log density of `N(mean, sd²)` truncated to `[lower, ∞)`; `-∞` below
/// the support.
pub fn trunc_normal_logpdf(x: f64, mean: f64, sd: f64, lower: f64) -> f64 {
    if x < lower || !(sd > 0.0) {
        return f64::NEG_INFINITY;
    }
    let z = (x - mean) / sd;
    let a = (lower - mean) / sd;
    -0.5 * z * z - 0.5 * (2.0 * PI).ln() - sd.ln() - normal_ln_sf(a)
}
