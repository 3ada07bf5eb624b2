//! Random variate generation: inverse transform, label-then-draw mixture
//! sampling, and a Metropolis-Hastings engine for targets on `[lower, ∞)`.

use serde::{Deserialize, Serialize};

use crate::distributions::{MixtureParams, PlcParams, WeibullParams};
use crate::error::{invalid, Result};
use crate::numerics::rng::RngStream;
use crate::numerics::truncnorm::{sample_trunc_normal, trunc_normal_logpdf};

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("sample size must be at least 1"));
    }
    Ok(())
}

/// Draws `n` values as `quantile(u)` with `u` uniform on `[0, 1)`.
pub fn sample_inverse<F: FnMut(f64) -> f64>(rng: &mut RngStream, mut quantile: F, n: usize) -> Result<Vec<f64>> {
    check_n(n)?;
    Ok((0..n).map(|_| quantile(rng.next_f64())).collect())
}

pub fn sample_weibull(rng: &mut RngStream, params: &WeibullParams, n: usize) -> Result<Vec<f64>> {
    check_n(n)?;
    (0..n).map(|_| params.quantile(rng.next_f64())).collect()
}

/// Mixture draws together with the 1-based component label of each draw.
///
/// Component `j` is chosen when `P_{j-1} < u <= P_j` for cumulative weights
/// `P`; the lifetime then uses a fresh uniform.
pub fn sample_mixture(rng: &mut RngStream, params: &MixtureParams, n: usize) -> Result<(Vec<f64>, Vec<usize>)> {
    check_n(n)?;
    let comps = params.components();
    let mut cumulative = Vec::with_capacity(comps.len());
    let mut acc = 0.0;
    for c in comps {
        acc += c.weight;
        cumulative.push(acc);
    }
    let last = comps.len() - 1;
    let mut xs = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let u = rng.next_f64();
        let j = cumulative.iter().position(|&p| u <= p).unwrap_or(last);
        xs.push(comps[j].params.quantile(rng.next_f64())?);
        labels.push(j + 1);
    }
    Ok((xs, labels))
}

/// Metropolis-Hastings settings. `initial = None` starts the chain at
/// `lower + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MhConfig {
    pub burnin: usize,
    pub thin: usize,
    pub proposal_sd: f64,
    pub initial: Option<f64>,
}

impl Default for MhConfig {
    fn default() -> Self {
        Self {
            burnin: 1000,
            thin: 50,
            proposal_sd: 0.5,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MhDiagnostics {
    /// Accepted proposals over proposals made.
    pub acceptance_rate: f64,
    /// Number of proposals, `n * thin + burnin`.
    pub chain_length: usize,
}

/// Runs a chain on `[lower, ∞)` for the unnormalised log density
/// `log_target` with lower-truncated normal proposals centred at the
/// current state.
///
/// The chain makes `n * thin + burnin` transitions and returns the states
/// after transitions `burnin + thin, burnin + 2 thin, ..., burnin + n thin`.
/// A rejected proposal repeats the current state.
pub fn sample_mh<F: FnMut(f64) -> f64>(
    rng: &mut RngStream,
    mut log_target: F,
    lower: f64,
    n: usize,
    config: &MhConfig,
) -> Result<(Vec<f64>, MhDiagnostics)> {
    check_n(n)?;
    if config.thin == 0 {
        return Err(invalid("thin must be at least 1"));
    }
    if !(config.proposal_sd > 0.0) || !config.proposal_sd.is_finite() {
        return Err(invalid(format!("proposal sd must be positive, got {}", config.proposal_sd)));
    }
    if !lower.is_finite() {
        return Err(invalid("lower bound must be finite"));
    }
    let mut current = config.initial.unwrap_or(lower + 1.0);
    if !(current >= lower) || !current.is_finite() {
        return Err(invalid(format!("initial state {current} lies below {lower}")));
    }
    let mut current_ld = log_target(current);
    if !current_ld.is_finite() {
        return Err(invalid(format!("target log density is not finite at initial state {current}")));
    }
    let sd = config.proposal_sd;
    let steps = n
        .checked_mul(config.thin)
        .and_then(|v| v.checked_add(config.burnin))
        .ok_or_else(|| invalid("chain length overflows"))?;

    let mut out = Vec::with_capacity(n);
    let mut accepted = 0usize;
    for step in 1..=steps {
        let proposal = sample_trunc_normal(rng, current, sd, lower)?;
        let proposal_ld = log_target(proposal);
        let u = rng.next_open01();
        if proposal_ld.is_finite() {
            let log_ratio = proposal_ld - current_ld + trunc_normal_logpdf(current, proposal, sd, lower)
                - trunc_normal_logpdf(proposal, current, sd, lower);
            if u.ln() < log_ratio {
                current = proposal;
                current_ld = proposal_ld;
                accepted += 1;
            }
        }
        if step > config.burnin && (step - config.burnin).is_multiple_of(config.thin) {
            out.push(current);
        }
    }
    Ok((
        out,
        MhDiagnostics {
            acceptance_rate: accepted as f64 / steps as f64,
            chain_length: steps,
        },
    ))
}

/// Power law with exponential cutoff via [`sample_mh`]; every output is at
/// least `x_min`.
pub fn sample_plc_mh(
    rng: &mut RngStream,
    params: &PlcParams,
    n: usize,
    config: &MhConfig,
) -> Result<(Vec<f64>, MhDiagnostics)> {
    sample_mh(rng, |x| params.log_unnormalized(x), params.x_min(), n, config)
}

/// Kolmogorov-Smirnov distance between the empirical distribution of
/// `samples` and `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (((i + 1) as f64 / n) - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value `sqrt(-ln(level/2) / 2) / sqrt(n)`.
pub fn ks_critical(n: usize, level: f64) -> f64 {
    (-(level / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}
