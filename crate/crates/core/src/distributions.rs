//! Lifetime families: Weibull, finite Weibull mixtures, power law with
//! exponential cutoff (PLC), and the mixture / negative-binomial cure
//! rate models.
//!
//! The Weibull is parametrised by shape `alpha` and rate-like scale `beta`:
//! `S(x) = exp(-beta x^alpha)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::special::upper_incomplete_gamma;

fn check_time(x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("time must be >= 0, got {x}")));
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Weibull shape `alpha > 0` and scale `beta > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeibull")]
pub struct WeibullParams {
    alpha: f64,
    beta: f64,
}

#[derive(Deserialize)]
struct RawWeibull {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawWeibull> for WeibullParams {
    type Error = Error;
    fn try_from(raw: RawWeibull) -> Result<Self> {
        WeibullParams::new(raw.alpha, raw.beta)
    }
}

impl WeibullParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        positive("beta", beta)?;
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Density; `+∞` at `x = 0` when `alpha < 1`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        Ok(self.hazard(x)? * self.survival(x)?)
    }

    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        check_time(x)?;
        Ok(self.alpha.ln() + self.beta.ln() + (self.alpha - 1.0) * x.ln() - self.beta * x.powf(self.alpha))
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        check_time(x)?;
        Ok(-(-self.beta * x.powf(self.alpha)).exp_m1())
    }

    pub fn survival(&self, x: f64) -> Result<f64> {
        check_time(x)?;
        Ok((-self.beta * x.powf(self.alpha)).exp())
    }

    /// `alpha beta x^(alpha-1)`; `+∞` at `x = 0` when `alpha < 1`.
    pub fn hazard(&self, x: f64) -> Result<f64> {
        check_time(x)?;
        if x == 0.0 {
            return Ok(match self.alpha.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Less) => f64::INFINITY,
                Some(std::cmp::Ordering::Equal) => self.beta,
                _ => 0.0,
            });
        }
        Ok(self.alpha * self.beta * x.powf(self.alpha - 1.0))
    }

    /// `(-ln(1-u) / beta)^(1/alpha)` for `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::Domain(format!("quantile level must lie in [0, 1), got {u}")));
        }
        Ok((-(-u).ln_1p() / self.beta).powf(1.0 / self.alpha))
    }

    /// `beta^(-1/alpha) Γ(1 + 1/alpha)`.
    pub fn mean(&self) -> f64 {
        self.beta.powf(-1.0 / self.alpha) * statrs::function::gamma::gamma(1.0 + 1.0 / self.alpha)
    }
}

/// One weighted component of a [`MixtureParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub params: WeibullParams,
}

/// Finite mixture of Weibull components with weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureParams {
    components: Vec<MixtureComponent>,
}

impl MixtureParams {
    pub fn new(components: Vec<MixtureComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(invalid("a mixture needs at least one component"));
        }
        for c in &components {
            if !(c.weight > 0.0) || !c.weight.is_finite() {
                return Err(invalid(format!("mixture weights must be positive, got {}", c.weight)));
            }
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(Self { components })
    }

    /// Two-component mixture with weight `p1` on the first component.
    pub fn two(p1: f64, first: WeibullParams, second: WeibullParams) -> Result<Self> {
        Self::new(vec![
            MixtureComponent { weight: p1, params: first },
            MixtureComponent { weight: 1.0 - p1, params: second },
        ])
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.components
            .iter()
            .map(|c| Ok(c.weight * c.params.pdf(x)?))
            .sum()
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.components
            .iter()
            .map(|c| Ok(c.weight * c.params.cdf(x)?))
            .sum()
    }

    pub fn survival(&self, x: f64) -> Result<f64> {
        self.components
            .iter()
            .map(|c| Ok(c.weight * c.params.survival(x)?))
            .sum()
    }
}

/// Unnormalised PLC log density `-alpha ln x - beta x`, valid for any real
/// `alpha` and `beta >= 0`.
pub fn plc_log_kernel(x: f64, alpha: f64, beta: f64) -> f64 {
    -alpha * x.ln() - beta * x
}

/// Power law with exponential cutoff on `[x_min, ∞)`:
/// `f(x) = C x^(-alpha) e^(-beta x)`, `C = beta^(1-alpha) / Γ(1-alpha, beta x_min)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlcParams {
    alpha: f64,
    beta: f64,
    x_min: f64,
}

impl PlcParams {
    pub fn new(alpha: f64, beta: f64, x_min: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        positive("beta", beta)?;
        positive("x_min", x_min)?;
        Ok(Self { alpha, beta, x_min })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    /// Log density up to the normalising constant; `-∞` below `x_min`.
    pub fn log_unnormalized(&self, x: f64) -> f64 {
        if x < self.x_min || x.is_nan() {
            return f64::NEG_INFINITY;
        }
        plc_log_kernel(x, self.alpha, self.beta)
    }

    /// `Γ(1 - alpha, beta x_min)`.
    pub fn tail_gamma(&self) -> Result<f64> {
        upper_incomplete_gamma(1.0 - self.alpha, self.beta * self.x_min)
    }

    /// `ln C(alpha, beta, x_min)`.
    pub fn ln_normalizer(&self) -> Result<f64> {
        Ok((1.0 - self.alpha) * self.beta.ln() - self.tail_gamma()?.ln())
    }

    fn check_support(&self, x: f64) -> Result<()> {
        if x.is_nan() || x < self.x_min {
            return Err(Error::Domain(format!("x = {x} lies below x_min = {}", self.x_min)));
        }
        Ok(())
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        Ok((self.ln_normalizer()? + plc_log_kernel(x, self.alpha, self.beta)).exp())
    }

    /// `1 - Γ(1-alpha, beta x) / Γ(1-alpha, beta x_min)`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        Ok(1.0 - self.survival(x)?)
    }

    pub fn survival(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        if x.is_infinite() {
            return Ok(0.0);
        }
        Ok(upper_incomplete_gamma(1.0 - self.alpha, self.beta * x)? / self.tail_gamma()?)
    }

    /// `Γ(2-alpha, beta x_min) / (beta Γ(1-alpha, beta x_min))`.
    pub fn mean(&self) -> Result<f64> {
        let num = upper_incomplete_gamma(2.0 - self.alpha, self.beta * self.x_min)?;
        Ok(num / (self.beta * self.tail_gamma()?))
    }
}

/// Mixture cure model `S_pop(x) = p + (1-p) S(x)` with Weibull `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureCureParams {
    p: f64,
    base: WeibullParams,
}

impl MixtureCureParams {
    pub fn new(p: f64, base: WeibullParams) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(invalid(format!("cure fraction must lie in [0, 1), got {p}")));
        }
        Ok(Self { p, base })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn base(&self) -> WeibullParams {
        self.base
    }

    pub fn survival(&self, x: f64) -> Result<f64> {
        Ok(self.p + (1.0 - self.p) * self.base.survival(x)?)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        Ok((1.0 - self.p) * self.base.cdf(x)?)
    }

    /// Improper density `(1-p) f(x)`, integrating to `1 - p`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        Ok((1.0 - self.p) * self.base.pdf(x)?)
    }
}

/// Below this `|kappa|` the negative-binomial cure survival is evaluated by
/// its Poisson limit `exp(-gamma (1 - S))`.
pub const KAPPA_POISSON_LIMIT: f64 = 1e-8;

/// Negative-binomial cure model
/// `S_pop(x) = (1 + kappa gamma (1 - S(x)))^(-1/kappa)`.
///
/// `kappa = -1` recovers the mixture cure model with `p = 1 - gamma`;
/// `kappa → 0` the promotion-time model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegBinCureParams {
    kappa: f64,
    gamma_rate: f64,
    base: WeibullParams,
}

impl NegBinCureParams {
    pub fn new(kappa: f64, gamma_rate: f64, base: WeibullParams) -> Result<Self> {
        positive("gamma_rate", gamma_rate)?;
        if !kappa.is_finite() || kappa * gamma_rate < -1.0 {
            return Err(invalid(format!(
                "kappa * gamma_rate must be >= -1, got {}",
                kappa * gamma_rate
            )));
        }
        Ok(Self { kappa, gamma_rate, base })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn gamma_rate(&self) -> f64 {
        self.gamma_rate
    }

    pub fn base(&self) -> WeibullParams {
        self.base
    }

    /// Population survival as a function of the baseline survival value.
    pub fn survival_given_base(&self, base_survival: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&base_survival) {
            return Err(Error::Domain(format!("baseline survival {base_survival} outside [0, 1]")));
        }
        let f = 1.0 - base_survival;
        if self.kappa.abs() < KAPPA_POISSON_LIMIT {
            return Ok((-self.gamma_rate * f).exp());
        }
        let arg = 1.0 + self.kappa * self.gamma_rate * f;
        if arg <= 0.0 {
            return Err(Error::Domain(format!(
                "1 + kappa gamma (1 - S) = {arg} is not positive"
            )));
        }
        Ok((-(arg.ln()) / self.kappa).exp())
    }

    pub fn survival(&self, x: f64) -> Result<f64> {
        self.survival_given_base(self.base.survival(x)?)
    }
}
