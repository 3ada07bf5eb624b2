//! Maximum-likelihood fitting for censored Weibull samples, the Weibull
//! mixture cure model and the power law with exponential cutoff, with
//! observed-information standard errors and Wald intervals.
//!
//! For type-I, type-II and random censoring the likelihood kernel in
//! `(t, δ)` is the same:
//! `ℓ(α, β) = r ln α + r ln β + (α - 1) Σ δ_i ln t_i - β Σ t_i^α`,
//! where censored times contribute to `Σ t^α`. The type-II kernel omits the
//! parameter-free `n! / (n - r)!` factor.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::censoring::CensoredSample;
use crate::error::{invalid, Error, Result};
use crate::numerics::hessian::{default_steps, hessian_fd_with_steps};
use crate::numerics::optim::{maximize_with, MaximizeOptions};
use crate::numerics::root::{find_root, Bracket};
use crate::numerics::special::{normal_quantile, upper_incomplete_gamma};

/// Confidence level used by the fitting functions.
pub const DEFAULT_XI: f64 = 0.05;

/// Wald intervals at level `1 - xi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceIntervals {
    pub level: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Outcome of a maximum-likelihood fit.
///
/// `hessian` is the second-derivative matrix of the log-likelihood at the
/// estimate. `std_errors` and `ci` are `None` when the negated Hessian is
/// not invertible or its inverse has a non-positive diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub parameters: Vec<String>,
    pub estimates: Vec<f64>,
    pub std_errors: Option<Vec<f64>>,
    pub ci: Option<ConfidenceIntervals>,
    pub loglik: f64,
    pub converged: bool,
    pub n: usize,
    pub r: usize,
    pub censored_fraction: f64,
    pub hessian: Option<Vec<Vec<f64>>>,
    /// Why standard errors are unavailable, if they are.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl FitResult {
    fn build<F: FnMut(&[f64]) -> f64>(
        names: &[&str],
        estimates: Vec<f64>,
        loglik: F,
        converged: bool,
        n: usize,
        r: usize,
    ) -> Result<Self> {
        let mut ll = loglik;
        let value = ll(&estimates);
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("log-likelihood at the estimate is {value}")));
        }
        let mut fit = FitResult {
            parameters: names.iter().map(|s| s.to_string()).collect(),
            std_errors: None,
            ci: None,
            loglik: value,
            converged,
            n,
            r,
            censored_fraction: if n == 0 { 0.0 } else { 1.0 - r as f64 / n as f64 },
            hessian: None,
            note: None,
            estimates,
        };
        match hessian_fd_with_steps(&mut ll, &fit.estimates, &default_steps(&fit.estimates)) {
            Ok(h) => {
                fit.hessian = Some(h);
                if let Err(e) = fit.attach_intervals(DEFAULT_XI) {
                    fit.note = Some(e.to_string());
                }
            }
            Err(e) => fit.note = Some(e.to_string()),
        }
        Ok(fit)
    }

    fn attach_intervals(&mut self, xi: f64) -> Result<()> {
        let h = self
            .hessian
            .as_ref()
            .ok_or_else(|| Error::Singular("no Hessian available".into()))?;
        let se = std_errors_from_hessian(h)?;
        let ci = intervals(&self.estimates, &se, xi)?;
        self.std_errors = Some(se);
        self.ci = Some(ci);
        Ok(())
    }

    /// Named estimate lookup.
    pub fn estimate(&self, name: &str) -> Option<f64> {
        self.parameters.iter().position(|p| p == name).map(|i| self.estimates[i])
    }
}

/// `sqrt(diag((-H)^-1))`.
pub fn std_errors_from_hessian(hessian: &[Vec<f64>]) -> Result<Vec<f64>> {
    let k = hessian.len();
    if k == 0 || hessian.iter().any(|row| row.len() != k) {
        return Err(invalid("Hessian must be a non-empty square matrix"));
    }
    let neg = DMatrix::from_fn(k, k, |i, j| -hessian[i][j]);
    let inv = neg
        .try_inverse()
        .ok_or_else(|| Error::Singular("negated Hessian is not invertible".into()))?;
    (0..k)
        .map(|i| {
            let v = inv[(i, i)];
            if v >= 0.0 && v.is_finite() {
                Ok(v.sqrt())
            } else {
                Err(Error::Singular(format!(
                    "inverse information has diagonal {v} for parameter {i}; not identifiable"
                )))
            }
        })
        .collect()
}

/// Symmetric Wald interval `estimate ± z_{1-xi/2} std_error`.
pub fn wald_interval(estimate: f64, std_error: f64, xi: f64) -> Result<(f64, f64)> {
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(invalid(format!("xi must lie in (0, 1], got {xi}")));
    }
    if !(std_error >= 0.0) {
        return Err(invalid(format!("standard error must be >= 0, got {std_error}")));
    }
    let z = normal_quantile(1.0 - xi / 2.0)?;
    Ok((estimate - z * std_error, estimate + z * std_error))
}

fn intervals(estimates: &[f64], se: &[f64], xi: f64) -> Result<ConfidenceIntervals> {
    let mut lower = Vec::with_capacity(se.len());
    let mut upper = Vec::with_capacity(se.len());
    for (&e, &s) in estimates.iter().zip(se) {
        let (a, b) = wald_interval(e, s, xi)?;
        lower.push(a);
        upper.push(b);
    }
    Ok(ConfidenceIntervals { level: 1.0 - xi, lower, upper })
}

/// Recomputes standard errors and Wald intervals at level `1 - xi` from the
/// stored Hessian.
pub fn confidence_intervals(result: &FitResult, xi: f64) -> Result<FitResult> {
    let mut out = result.clone();
    out.attach_intervals(xi)?;
    out.note = None;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Weibull under type-I / type-II / random censoring

/// Sufficient pieces of a censored sample for the Weibull kernel.
struct WeibullData<'a> {
    t: &'a [f64],
    r: usize,
    sum_log_events: f64,
    t_max: f64,
}

impl<'a> WeibullData<'a> {
    fn new(sample: &'a CensoredSample, min_events: usize) -> Result<Self> {
        if sample.t.len() != sample.delta.len() {
            return Err(invalid("t and delta differ in length"));
        }
        let mut r = 0;
        let mut sum_log_events = 0.0;
        let mut t_max: f64 = 0.0;
        for (&t, &d) in sample.t.iter().zip(&sample.delta) {
            if !t.is_finite() || t < 0.0 {
                return Err(invalid(format!("times must be finite and >= 0, got {t}")));
            }
            if d {
                if t == 0.0 {
                    return Err(Error::Domain("an observed event at time 0 has zero likelihood".into()));
                }
                r += 1;
                sum_log_events += t.ln();
            }
            t_max = t_max.max(t);
        }
        if r < min_events {
            return Err(Error::TooFewEvents { needed: min_events, got: r });
        }
        Ok(Self { t: &sample.t, r, sum_log_events, t_max })
    }

    /// `(Σ s^α, Σ s^α ln s)` with `s = t / max t`.
    fn scaled_sums(&self, alpha: f64) -> (f64, f64) {
        let mut s0 = 0.0;
        let mut s1 = 0.0;
        for &t in self.t {
            if t > 0.0 {
                let s = t / self.t_max;
                let ls = s.ln();
                let p = (alpha * ls).exp();
                s0 += p;
                s1 += p * ls;
            }
        }
        (s0, s1)
    }

    /// Profile score in α with β replaced by `r / Σ t^α`.
    fn profile_score(&self, alpha: f64) -> f64 {
        let (s0, s1) = self.scaled_sums(alpha);
        let r = self.r as f64;
        r / alpha + self.sum_log_events - r * (s1 / s0 + self.t_max.ln())
    }

    fn beta_hat(&self, alpha: f64) -> f64 {
        let (s0, _) = self.scaled_sums(alpha);
        self.r as f64 / (s0 * self.t_max.powf(alpha))
    }
}

/// Weibull kernel `ℓ(α, β)` for a censored sample; `-∞` outside the
/// parameter space.
pub fn weibull_loglik(sample: &CensoredSample, alpha: f64, beta: f64) -> f64 {
    if !(alpha > 0.0 && beta > 0.0) {
        return f64::NEG_INFINITY;
    }
    let mut r = 0.0;
    let mut acc = 0.0;
    for (&t, &d) in sample.t.iter().zip(&sample.delta) {
        if d {
            r += 1.0;
            acc += (alpha - 1.0) * t.ln();
        }
        if t > 0.0 {
            acc -= beta * t.powf(alpha);
        }
    }
    r * (alpha.ln() + beta.ln()) + acc
}

/// Score `(∂ℓ/∂α, ∂ℓ/∂β)` of [`weibull_loglik`].
pub fn weibull_score(sample: &CensoredSample, alpha: f64, beta: f64) -> [f64; 2] {
    let mut r = 0.0;
    let mut sum_log = 0.0;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    for (&t, &d) in sample.t.iter().zip(&sample.delta) {
        if d {
            r += 1.0;
            sum_log += t.ln();
        }
        if t > 0.0 {
            let p = t.powf(alpha);
            s0 += p;
            s1 += p * t.ln();
        }
    }
    [r / alpha + sum_log - beta * s1, r / beta - s0]
}

fn fit_weibull(sample: &CensoredSample) -> Result<FitResult> {
    let data = WeibullData::new(sample, 2)?;
    let alpha = find_root(|a| data.profile_score(a), Bracket::default(), 0.0)?;
    let beta = data.beta_hat(alpha);
    FitResult::build(
        &["alpha", "beta"],
        vec![alpha, beta],
        |p| weibull_loglik(sample, p[0], p[1]),
        true,
        sample.len(),
        data.r,
    )
}

/// Type-II fit: censored units must share one time no smaller than any
/// observed failure.
pub fn fit_type_ii(sample: &CensoredSample) -> Result<FitResult> {
    let last_event = sample
        .t
        .iter()
        .zip(&sample.delta)
        .filter(|(_, &d)| d)
        .map(|(&t, _)| t)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut censored = sample.t.iter().zip(&sample.delta).filter(|(_, &d)| !d).map(|(&t, _)| t);
    if let Some(first) = censored.next() {
        if first < last_event || censored.any(|t| t != first) {
            return Err(invalid(
                "type-II sample must censor every unit at one time at or after the last failure",
            ));
        }
    }
    fit_weibull(sample)
}

/// Type-I fit with censoring time `t_c`: censored units must sit at `t_c`.
pub fn fit_type_i(sample: &CensoredSample, t_c: f64) -> Result<FitResult> {
    if !(t_c > 0.0) || !t_c.is_finite() {
        return Err(invalid(format!("t_c must be positive, got {t_c}")));
    }
    for (&t, &d) in sample.t.iter().zip(&sample.delta) {
        if !d && (t - t_c).abs() > 1e-9 * t_c {
            return Err(invalid(format!("censored time {t} differs from t_c = {t_c}")));
        }
    }
    let at_tc = CensoredSample {
        t: sample.t.iter().zip(&sample.delta).map(|(&t, &d)| if d { t } else { t_c }).collect(),
        delta: sample.delta.clone(),
    };
    fit_weibull(&at_tc)
}

/// Random-censoring fit.
pub fn fit_random(sample: &CensoredSample) -> Result<FitResult> {
    fit_weibull(sample)
}

// ---------------------------------------------------------------------------
// Mixture cure model

/// `r ln α + r ln β + r ln(1-p) + (α-1) Σ δ ln t - β Σ δ t^α
///  + Σ (1-δ) ln(p + (1-p) e^{-β t^α})`; `-∞` outside `α, β > 0, 0 <= p < 1`.
pub fn cure_loglik(sample: &CensoredSample, alpha: f64, beta: f64, p: f64) -> f64 {
    if !(alpha > 0.0 && beta > 0.0 && (0.0..1.0).contains(&p)) {
        return f64::NEG_INFINITY;
    }
    let mut r = 0.0;
    let mut acc = 0.0;
    for (&t, &d) in sample.t.iter().zip(&sample.delta) {
        let h = if t > 0.0 { beta * t.powf(alpha) } else { 0.0 };
        if d {
            r += 1.0;
            acc += (alpha - 1.0) * t.ln() - h;
        } else {
            acc += (p + (1.0 - p) * (-h).exp()).ln();
        }
    }
    r * (alpha.ln() + beta.ln() + (1.0 - p).ln()) + acc
}

/// Finite-difference Hessian of [`cure_loglik`] at `(alpha, beta, p)`.
pub fn cure_hessian(sample: &CensoredSample, theta: [f64; 3]) -> Result<Vec<Vec<f64>>> {
    hessian_fd_with_steps(
        |q| cure_loglik(sample, q[0], q[1], q[2]),
        &theta,
        &default_steps(&theta),
    )
}

fn optimizer_options() -> MaximizeOptions {
    MaximizeOptions {
        max_iter: 20_000,
        tol: 1e-10,
        restarts: 2,
        ..MaximizeOptions::default()
    }
}

/// Default cure-model start: the random-censoring `(α̂, β̂)` and the
/// empirical censored fraction, clamped into `[0.01, 0.99]`.
pub fn default_cure_init(sample: &CensoredSample) -> Result<[f64; 3]> {
    let base = fit_random(sample)?;
    let p = sample.censored_fraction().clamp(0.01, 0.99);
    Ok([base.estimates[0], base.estimates[1], p])
}

/// Maximises the cure log-likelihood under `α, β > 0`, `0 < p < 1`.
pub fn fit_cure_random(sample: &CensoredSample, init: Option<[f64; 3]>) -> Result<FitResult> {
    let data = WeibullData::new(sample, 3)?;
    let init = match init {
        Some(v) => v,
        None => default_cure_init(sample)?,
    };
    if !(init[0] > 0.0 && init[1] > 0.0 && init[2] > 0.0 && init[2] < 1.0) {
        return Err(invalid(format!("cure init {init:?} outside (0, ∞)² × (0, 1)")));
    }
    let opt = maximize_with(
        |q| cure_loglik(sample, q[0], q[1], q[2]),
        &init,
        &[0.0, 0.0, 0.0],
        &[f64::INFINITY, f64::INFINITY, 1.0],
        optimizer_options(),
    )?;
    FitResult::build(
        &["alpha", "beta", "p"],
        opt.argmax,
        |q| cure_loglik(sample, q[0], q[1], q[2]),
        opt.converged,
        sample.len(),
        data.r,
    )
}

// ---------------------------------------------------------------------------
// Power law with exponential cutoff

/// `n(1-α) ln β - α Σ ln x - β Σ x - n ln Γ(1-α, β x_min)` from summary
/// statistics; `-∞` where undefined.
fn plc_loglik_sums(n: f64, sum_log: f64, sum: f64, x_min: f64, alpha: f64, beta: f64) -> f64 {
    if !(beta > 0.0) || !alpha.is_finite() {
        return f64::NEG_INFINITY;
    }
    match upper_incomplete_gamma(1.0 - alpha, beta * x_min) {
        Ok(g) if g > 0.0 && g.is_finite() => {
            n * (1.0 - alpha) * beta.ln() - alpha * sum_log - beta * sum - n * g.ln()
        }
        _ => f64::NEG_INFINITY,
    }
}

/// PLC log-likelihood of `x` on `[x_min, ∞)`.
pub fn plc_loglik(x: &[f64], x_min: f64, alpha: f64, beta: f64) -> f64 {
    if x.iter().any(|&v| v < x_min) {
        return f64::NEG_INFINITY;
    }
    let sum_log: f64 = x.iter().map(|v| v.ln()).sum();
    let sum: f64 = x.iter().sum();
    plc_loglik_sums(x.len() as f64, sum_log, sum, x_min, alpha, beta)
}

/// Maximises the PLC likelihood over `α ∈ ℝ`, `β > 0`.
pub fn fit_plc(x: &[f64], x_min: f64, init: [f64; 2]) -> Result<FitResult> {
    if !(x_min > 0.0) || !x_min.is_finite() {
        return Err(invalid(format!("x_min must be positive, got {x_min}")));
    }
    if x.len() < 3 {
        return Err(invalid(format!("PLC fit needs at least 3 observations, got {}", x.len())));
    }
    if let Some(v) = x.iter().find(|&&v| !(v >= x_min) || !v.is_finite()) {
        return Err(Error::Domain(format!("observation {v} lies below x_min = {x_min}")));
    }
    if !(init[1] > 0.0) || !init[0].is_finite() {
        return Err(invalid(format!("PLC init {init:?} needs a finite alpha and beta > 0")));
    }
    let n = x.len() as f64;
    let sum_log: f64 = x.iter().map(|v| v.ln()).sum();
    let sum: f64 = x.iter().sum();
    let ll = |q: &[f64]| plc_loglik_sums(n, sum_log, sum, x_min, q[0], q[1]);
    let opt = maximize_with(
        ll,
        &init,
        &[f64::NEG_INFINITY, 0.0],
        &[f64::INFINITY, f64::INFINITY],
        optimizer_options(),
    )?;
    FitResult::build(&["alpha", "beta"], opt.argmax, ll, opt.converged, x.len(), x.len())
}
