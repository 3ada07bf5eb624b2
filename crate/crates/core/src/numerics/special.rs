//! Gamma family and standard normal helpers.

use std::f64::consts::SQRT_2;

use statrs::function::{erf, gamma};

use crate::error::{Error, Result};
use crate::numerics::quad::integrate;

const CF_EPS: f64 = 1e-16;
const CF_TINY: f64 = 1e-300;
const CF_MAX_ITER: usize = 10_000;
// Beyond this the tail e^{-t} t^s is below 1e-20 of any value reached in the
// quadrature branch (s <= 1/2, x <= 3/2).
const QUAD_T_MAX: f64 = 60.0;

/// Complete gamma function for `s > 0`.
pub fn gamma_fn(s: f64) -> Result<f64> {
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::Domain(format!("gamma_fn requires s > 0, got {s}")));
    }
    Ok(gamma::gamma(s))
}

/// `ln Γ(s)` for `s > 0`.
pub fn ln_gamma(s: f64) -> Result<f64> {
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::Domain(format!("ln_gamma requires s > 0, got {s}")));
    }
    Ok(gamma::ln_gamma(s))
}

/// Lentz evaluation of the continued fraction for Γ(s, x). Valid for any
/// real `s`; converges quickly once `x` exceeds `max(1, s + 1)`.
fn upper_gamma_cf(s: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / CF_TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=CF_MAX_ITER {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = b + an / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            return Ok((s * x.ln() - x).exp() * h);
        }
    }
    Err(Error::MaxIterations(CF_MAX_ITER))
}

/// Power series for the lower incomplete gamma γ(s, x), `s > 0`.
fn lower_gamma_series(s: f64, x: f64) -> Result<f64> {
    let mut ap = s;
    let mut del = 1.0 / s;
    let mut sum = del;
    for _ in 0..CF_MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * CF_EPS {
            return Ok(sum * (s * x.ln() - x).exp());
        }
    }
    Err(Error::MaxIterations(CF_MAX_ITER))
}

/// Γ(s, x) by quadrature in `u = ln(t / x)`; the integrand `t^s e^{-t}` is
/// smooth in `u` and no cancellation occurs for any sign of `s`.
fn upper_gamma_quad(s: f64, x: f64) -> Result<f64> {
    let lnx = x.ln();
    let upper = (QUAD_T_MAX.max(2.0 * x) / x).ln();
    integrate(|u| (s * (lnx + u) - x * u.exp()).exp(), 0.0, upper, 1e-13)
}

/// Upper incomplete gamma function Γ(s, x) = ∫_x^∞ t^{s-1} e^{-t} dt.
///
/// Any real `s` is accepted. `x = 0` is allowed only for `s > 0`, where the
/// result is Γ(s). Branches:
/// - `x > max(1, s + 1)`: continued fraction;
/// - `x <= s + 1` with `s > 1/2`: Γ(s) minus the lower series;
/// - otherwise: adaptive quadrature of the defining integral.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    if !s.is_finite() || !x.is_finite() {
        return Err(Error::NonFinite(format!("upper_incomplete_gamma({s}, {x})")));
    }
    if x < 0.0 {
        return Err(Error::Domain(format!("upper_incomplete_gamma requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        if s > 0.0 {
            return gamma_fn(s);
        }
        return Err(Error::Domain(format!(
            "Γ({s}, 0) diverges for s <= 0"
        )));
    }
    if x > 1.0 && x > s + 1.0 {
        upper_gamma_cf(s, x)
    } else if s > 0.5 {
        Ok(gamma::gamma(s) - lower_gamma_series(s, x)?)
    } else {
        upper_gamma_quad(s, x)
    }
}

/// Lower incomplete gamma function γ(s, x) for `s > 0`, `x >= 0`.
pub fn lower_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("lower_incomplete_gamma requires s > 0, got {s}")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("lower_incomplete_gamma requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x <= s + 1.0 {
        lower_gamma_series(s, x)
    } else {
        Ok(gamma::gamma(s) - upper_gamma_cf(s, x)?)
    }
}

/// Standard normal CDF Φ(z).
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erf::erfc(-z / SQRT_2)
}

/// Standard normal survival 1 - Φ(z), accurate in the upper tail.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erf::erfc(z / SQRT_2)
}

/// `ln(1 - Φ(z))` without underflow for large `z`.
pub fn normal_ln_sf(z: f64) -> f64 {
    if z < 30.0 {
        normal_sf(z).ln()
    } else {
        // Mills ratio expansion: Q(z) ≈ φ(z)/z · (1 - 1/z² + 3/z⁴ - 15/z⁶)
        let z2 = z * z;
        let series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
        -0.5 * z2 - z.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln() + series.ln()
    }
}

/// Standard normal quantile Φ⁻¹(p) for `p` in `(0, 1)`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("normal_quantile requires 0 < p < 1, got {p}")));
    }
    Ok(-SQRT_2 * erf::erfc_inv(2.0 * p))
}
