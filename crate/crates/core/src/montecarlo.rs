//! Replicated simulation studies: bias, MSE and coverage probability of
//! the maximum-likelihood estimators across sample sizes.
//!
//! Replication `j` at grid position `k` draws from
//! `RngStream::substream(master_seed, k * 2^32 + j)`, so every replication
//! can be reproduced in isolation. Replications run in parallel in fixed
//! chunks whose accumulators are merged in chunk order, which makes the
//! report bit-identical for any thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::censoring::{
    apply_random, apply_type_i, apply_type_ii, calibrate_random_analytic, calibrate_random_exact,
    calibrate_type_i, sample_cure, CensoredSample,
};
use crate::distributions::{MixtureCureParams, WeibullParams};
use crate::error::{Error, Result};
use crate::estimation::{confidence_intervals, fit_cure_random, fit_random, fit_type_i, fit_type_ii, FitResult};
use crate::numerics::rng::RngStream;
use crate::sampling::sample_weibull;

/// Replications per parallel work unit.
const CHUNK: usize = 256;

/// Failed replications above this share of a cell abort the study.
pub const MAX_FAILURE_SHARE: f64 = 0.10;

/// How the random-censoring window is derived from the target proportion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomCalibration {
    #[default]
    Exact,
    Analytic,
}

/// Censoring scheme of a study. `censoring` is the target censored
/// proportion; the cure scheme takes the true cured fraction and the
/// censoring window directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case", deny_unknown_fields)]
pub enum SchemeSpec {
    #[serde(rename = "type1")]
    TypeI { censoring: f64 },
    #[serde(rename = "type2")]
    TypeII { censoring: f64 },
    Random {
        censoring: f64,
        #[serde(default)]
        calibration: RandomCalibration,
    },
    Cure { p: f64, lambda: f64 },
}

impl SchemeSpec {
    pub fn label(&self) -> &'static str {
        match self {
            SchemeSpec::TypeI { .. } => "type1",
            SchemeSpec::TypeII { .. } => "type2",
            SchemeSpec::Random { .. } => "random",
            SchemeSpec::Cure { .. } => "cure",
        }
    }

    /// Label used in reports; cure studies carry their cured fraction.
    pub fn report_name(&self) -> String {
        match self {
            SchemeSpec::Cure { p, .. } => format!("cure_p{p}"),
            other => other.label().to_string(),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        match *self {
            SchemeSpec::TypeI { censoring } | SchemeSpec::TypeII { censoring } | SchemeSpec::Random { censoring, .. } => {
                if !(censoring > 0.0 && censoring < 1.0) {
                    return bad(format!("{}: censoring proportion must lie in (0, 1), got {censoring}", self.label()));
                }
            }
            SchemeSpec::Cure { p, lambda } => {
                if !(0.0..1.0).contains(&p) {
                    return bad(format!("cure: p must lie in [0, 1), got {p}"));
                }
                if !(lambda > 0.0) || !lambda.is_finite() {
                    return bad(format!("cure: lambda must be positive, got {lambda}"));
                }
            }
        }
        Ok(())
    }
}

/// One study: a scheme, the true Weibull parameters and the design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub scheme: SchemeSpec,
    pub alpha: f64,
    pub beta: f64,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    #[serde(default = "default_level")]
    pub level: f64,
    pub master_seed: u64,
    /// Keep every successful estimate vector in the report.
    #[serde(default)]
    pub store_estimates: bool,
}

fn default_level() -> f64 {
    0.95
}

fn validate_design(alpha: f64, beta: f64, n_grid: &[usize], replications: usize, level: f64) -> Result<WeibullParams> {
    if n_grid.is_empty() {
        return Err(Error::Config("n_grid must not be empty".into()));
    }
    if let Some(&n) = n_grid.iter().find(|&&n| n < 2) {
        return Err(Error::Config(format!("sample sizes must be at least 2, got {n}")));
    }
    if replications == 0 {
        return Err(Error::Config("replications must be at least 1".into()));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Config(format!("level must lie in (0, 1), got {level}")));
    }
    WeibullParams::new(alpha, beta).map_err(|e| Error::Config(e.to_string()))
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        self.scheme.validate()?;
        validate_design(self.alpha, self.beta, &self.n_grid, self.replications, self.level)?;
        Ok(())
    }

    /// True parameter vector: `(alpha, beta)` or `(alpha, beta, p)`.
    pub fn truth(&self) -> Vec<f64> {
        match self.scheme {
            SchemeSpec::Cure { p, .. } => vec![self.alpha, self.beta, p],
            _ => vec![self.alpha, self.beta],
        }
    }

    pub fn parameter_names(&self) -> Vec<String> {
        parameter_names(&self.scheme)
    }
}

fn parameter_names(scheme: &SchemeSpec) -> Vec<String> {
    let mut names = vec!["alpha".to_string(), "beta".to_string()];
    if matches!(scheme, SchemeSpec::Cure { .. }) {
        names.push("p".to_string());
    }
    names
}

/// A scheme with its censoring value resolved for one sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResolvedScheme {
    TypeI { t_c: f64 },
    TypeII { m: usize },
    Random { lambda: f64 },
    Cure { params: MixtureCureParams, lambda: f64 },
}

impl ResolvedScheme {
    /// The censoring value reported per cell: `t_c`, `m` or `lambda`.
    pub fn censoring_value(&self) -> f64 {
        match *self {
            ResolvedScheme::TypeI { t_c } => t_c,
            ResolvedScheme::TypeII { m } => m as f64,
            ResolvedScheme::Random { lambda } | ResolvedScheme::Cure { lambda, .. } => lambda,
        }
    }
}

/// Type-II count `round(pi n)`, kept below `n - 1` so two failures remain.
pub fn type_ii_count(pi: f64, n: usize) -> usize {
    ((pi * n as f64).round() as usize).min(n.saturating_sub(2))
}

fn resolve(scheme: &SchemeSpec, base: &WeibullParams, n: usize) -> Result<ResolvedScheme> {
    Ok(match *scheme {
        SchemeSpec::TypeI { censoring } => ResolvedScheme::TypeI { t_c: calibrate_type_i(base, censoring)? },
        SchemeSpec::TypeII { censoring } => ResolvedScheme::TypeII { m: type_ii_count(censoring, n) },
        SchemeSpec::Random { censoring, calibration } => ResolvedScheme::Random {
            lambda: match calibration {
                RandomCalibration::Exact => calibrate_random_exact(base, censoring)?,
                RandomCalibration::Analytic => calibrate_random_analytic(base, censoring)?,
            },
        },
        SchemeSpec::Cure { p, lambda } => ResolvedScheme::Cure {
            params: MixtureCureParams::new(p, *base)?,
            lambda,
        },
    })
}

/// Draws one censored sample. Non-cure schemes censor the supplied
/// complete sample.
fn censor(rng: &mut RngStream, scheme: &ResolvedScheme, complete: &[f64]) -> Result<CensoredSample> {
    match *scheme {
        ResolvedScheme::TypeI { t_c } => apply_type_i(complete, t_c),
        ResolvedScheme::TypeII { m } => apply_type_ii(complete, m),
        ResolvedScheme::Random { lambda } => apply_random(rng, complete, lambda),
        ResolvedScheme::Cure { .. } => unreachable!("cure samples are drawn directly"),
    }
}

/// Point estimates with interval bounds at the study level.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub estimates: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// What a fitter sees about the replication it serves.
#[derive(Debug, Clone, Copy)]
pub struct FitContext<'a> {
    pub scheme: &'a ResolvedScheme,
    pub truth: &'a [f64],
    pub n: usize,
    pub replication: usize,
    pub level: f64,
}

/// Estimation step of a study. Errors count as failed replications.
pub trait Fitter: Sync {
    fn fit(&self, ctx: &FitContext<'_>, sample: &CensoredSample) -> Result<Estimate>;
}

/// Maximum likelihood for the scheme at hand; a fit without intervals or
/// without convergence counts as failed.
#[derive(Debug, Clone, Copy, Default)]
pub struct MleFitter;

fn estimate_from(fit: FitResult, level: f64) -> Result<Estimate> {
    if !fit.converged {
        return Err(Error::MaxIterations(0));
    }
    let fit = if fit.ci.as_ref().is_some_and(|c| (c.level - level).abs() < 1e-12) {
        fit
    } else {
        confidence_intervals(&fit, 1.0 - level)?
    };
    let ci = fit
        .ci
        .ok_or_else(|| Error::Singular(fit.note.unwrap_or_else(|| "no intervals".into())))?;
    Ok(Estimate {
        estimates: fit.estimates,
        lower: ci.lower,
        upper: ci.upper,
    })
}

impl Fitter for MleFitter {
    fn fit(&self, ctx: &FitContext<'_>, sample: &CensoredSample) -> Result<Estimate> {
        let fit = match *ctx.scheme {
            ResolvedScheme::TypeI { t_c } => fit_type_i(sample, t_c)?,
            ResolvedScheme::TypeII { .. } => fit_type_ii(sample)?,
            ResolvedScheme::Random { .. } => fit_random(sample)?,
            ResolvedScheme::Cure { .. } => fit_cure_random(sample, None)?,
        };
        estimate_from(fit, ctx.level)
    }
}

/// Returns the truth with intervals `truth ± half_width`; checks the
/// harness itself.
#[derive(Debug, Clone, Copy)]
pub struct OracleFitter {
    pub half_width: f64,
}

impl Default for OracleFitter {
    fn default() -> Self {
        Self { half_width: 1.0 }
    }
}

impl Fitter for OracleFitter {
    fn fit(&self, ctx: &FitContext<'_>, _sample: &CensoredSample) -> Result<Estimate> {
        Ok(Estimate {
            estimates: ctx.truth.to_vec(),
            lower: ctx.truth.iter().map(|t| t - self.half_width).collect(),
            upper: ctx.truth.iter().map(|t| t + self.half_width).collect(),
        })
    }
}

/// Per-parameter summary of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamMetrics {
    pub parameter: String,
    pub truth: f64,
    pub bias: f64,
    pub mse: f64,
    /// Spread of the estimates around their own mean.
    pub variance: f64,
    pub cp: f64,
}

/// One sample size of a study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub n: usize,
    pub censoring_value: f64,
    pub succeeded: usize,
    pub failed: usize,
    /// Mean censored fraction over all generated samples.
    pub censored_fraction: f64,
    pub metrics: Vec<ParamMetrics>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub estimates: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub scheme: String,
    pub parameters: Vec<String>,
    pub truth: Vec<f64>,
    pub level: f64,
    pub replications: usize,
    pub master_seed: u64,
    pub cells: Vec<CellReport>,
}

impl McReport {
    pub fn cell(&self, n: usize) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.n == n)
    }

    pub fn metric(&self, n: usize, parameter: &str) -> Option<&ParamMetrics> {
        self.cell(n)?.metrics.iter().find(|m| m.parameter == parameter)
    }

    pub fn total_failed(&self) -> usize {
        self.cells.iter().map(|c| c.failed).sum()
    }
}

/// Running sums for one parameter. The merge is order-dependent in
/// floating point, so callers always merge in a fixed order.
#[derive(Debug, Clone, Default)]
struct ParamAcc {
    count: f64,
    sum_sq: f64,
    mean: f64,
    m2: f64,
    covered: usize,
}

impl ParamAcc {
    fn push(&mut self, deviation: f64, covered: bool) {
        self.count += 1.0;
        self.sum_sq += deviation * deviation;
        let delta = deviation - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (deviation - self.mean);
        self.covered += covered as usize;
    }

    fn merge(&mut self, other: &ParamAcc) {
        if other.count == 0.0 {
            return;
        }
        if self.count == 0.0 {
            *self = other.clone();
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count / total;
        self.m2 += other.m2 + delta * delta * self.count * other.count / total;
        self.sum_sq += other.sum_sq;
        self.count = total;
        self.covered += other.covered;
    }
}

#[derive(Debug, Clone, Default)]
struct CellAcc {
    params: Vec<ParamAcc>,
    failed: usize,
    censored_sum: f64,
    samples: usize,
    estimates: Vec<Vec<f64>>,
}

impl CellAcc {
    fn new(k: usize) -> Self {
        Self { params: vec![ParamAcc::default(); k], ..Self::default() }
    }

    fn record(&mut self, outcome: &Outcome, truth: &[f64], store: bool) {
        if let Some(frac) = outcome.censored_fraction {
            self.censored_sum += frac;
            self.samples += 1;
        }
        match &outcome.estimate {
            Some(e) => {
                for (i, acc) in self.params.iter_mut().enumerate() {
                    let covered = e.lower[i] < truth[i] && truth[i] < e.upper[i];
                    acc.push(e.estimates[i] - truth[i], covered);
                }
                if store {
                    self.estimates.push(e.estimates.clone());
                }
            }
            None => self.failed += 1,
        }
    }

    fn merge(&mut self, other: CellAcc) {
        for (a, b) in self.params.iter_mut().zip(&other.params) {
            a.merge(b);
        }
        self.failed += other.failed;
        self.censored_sum += other.censored_sum;
        self.samples += other.samples;
        self.estimates.extend(other.estimates);
    }

    fn report(self, n: usize, censoring_value: f64, names: &[String], truth: &[f64], store: bool) -> CellReport {
        let succeeded = self.params.first().map_or(0, |p| p.count as usize);
        let metrics = self
            .params
            .iter()
            .zip(names)
            .zip(truth)
            .map(|((acc, name), &t)| {
                let (bias, mse, variance, cp) = if acc.count > 0.0 {
                    (acc.mean, acc.sum_sq / acc.count, acc.m2 / acc.count, acc.covered as f64 / acc.count)
                } else {
                    (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
                };
                ParamMetrics { parameter: name.clone(), truth: t, bias, mse, variance, cp }
            })
            .collect();
        CellReport {
            n,
            censoring_value,
            succeeded,
            failed: self.failed,
            censored_fraction: if self.samples > 0 { self.censored_sum / self.samples as f64 } else { f64::NAN },
            metrics,
            estimates: store.then_some(self.estimates),
        }
    }
}

/// Result of one replication for one scheme.
struct Outcome {
    estimate: Option<Estimate>,
    censored_fraction: Option<f64>,
}

/// One scheme within a (possibly shared) study.
struct Arm {
    spec: SchemeSpec,
    names: Vec<String>,
    truth: Vec<f64>,
}

/// Runs `replications` replications for every `n` in `n_grid`, each
/// producing one outcome per arm, and aggregates per arm.
#[allow(clippy::too_many_arguments)]
fn run_arms<F: Fitter>(
    arms: &[Arm],
    base: &WeibullParams,
    n_grid: &[usize],
    replications: usize,
    level: f64,
    master_seed: u64,
    store: bool,
    fitter: &F,
) -> Result<Vec<McReport>> {
    let mut reports: Vec<McReport> = arms
        .iter()
        .map(|a| McReport {
            scheme: a.spec.report_name(),
            parameters: a.names.clone(),
            truth: a.truth.clone(),
            level,
            replications,
            master_seed,
            cells: Vec::with_capacity(n_grid.len()),
        })
        .collect();
    let shared_sample = arms.iter().all(|a| !matches!(a.spec, SchemeSpec::Cure { .. }));

    for (k, &n) in n_grid.iter().enumerate() {
        let resolved: Vec<ResolvedScheme> = arms.iter().map(|a| resolve(&a.spec, base, n)).collect::<Result<_>>()?;
        let replicate = |j: usize| -> Vec<Outcome> {
            let mut rng = RngStream::substream(master_seed, ((k as u64) << 32) + j as u64);
            let complete = if shared_sample { sample_weibull(&mut rng, base, n).ok() } else { None };
            arms.iter()
                .zip(&resolved)
                .map(|(arm, scheme)| {
                    let sample = match scheme {
                        ResolvedScheme::Cure { params, lambda } => {
                            sample_cure(&mut rng, params, *lambda, n).map(|t| t.censored)
                        }
                        _ => match &complete {
                            Some(x) => censor(&mut rng, scheme, x),
                            None => Err(Error::Config("complete sample unavailable".into())),
                        },
                    };
                    let Ok(sample) = sample else {
                        return Outcome { estimate: None, censored_fraction: None };
                    };
                    let ctx = FitContext { scheme, truth: &arm.truth, n, replication: j, level };
                    Outcome {
                        censored_fraction: Some(sample.censored_fraction()),
                        estimate: fitter.fit(&ctx, &sample).ok().filter(|e| {
                            e.estimates.len() == arm.truth.len()
                                && e.lower.len() == arm.truth.len()
                                && e.upper.len() == arm.truth.len()
                        }),
                    }
                })
                .collect()
        };

        let chunk_accs: Vec<Vec<CellAcc>> = (0..replications.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut accs: Vec<CellAcc> = arms.iter().map(|a| CellAcc::new(a.truth.len())).collect();
                for j in c * CHUNK..((c + 1) * CHUNK).min(replications) {
                    for ((acc, outcome), arm) in accs.iter_mut().zip(replicate(j)).zip(arms) {
                        acc.record(&outcome, &arm.truth, store);
                    }
                }
                accs
            })
            .collect();

        let mut totals: Vec<CellAcc> = arms.iter().map(|a| CellAcc::new(a.truth.len())).collect();
        for accs in chunk_accs {
            for (t, a) in totals.iter_mut().zip(accs) {
                t.merge(a);
            }
        }
        for (((report, acc), arm), scheme) in reports.iter_mut().zip(totals).zip(arms).zip(&resolved) {
            if acc.failed as f64 > MAX_FAILURE_SHARE * replications as f64 {
                return Err(Error::TooManyFailures { n, failed: acc.failed, total: replications });
            }
            report.cells.push(acc.report(n, scheme.censoring_value(), &arm.names, &arm.truth, store));
        }
    }
    Ok(reports)
}

fn arm(spec: SchemeSpec, alpha: f64, beta: f64) -> Arm {
    let truth = match spec {
        SchemeSpec::Cure { p, .. } => vec![alpha, beta, p],
        _ => vec![alpha, beta],
    };
    Arm { names: parameter_names(&spec), spec, truth }
}

/// Runs a study with maximum-likelihood fits.
pub fn run_study(config: &McConfig) -> Result<McReport> {
    run_study_with(config, &MleFitter)
}

pub fn run_study_with<F: Fitter>(config: &McConfig, fitter: &F) -> Result<McReport> {
    config.validate()?;
    let base = WeibullParams::new(config.alpha, config.beta)?;
    let mut reports = run_arms(
        &[arm(config.scheme, config.alpha, config.beta)],
        &base,
        &config.n_grid,
        config.replications,
        config.level,
        config.master_seed,
        config.store_estimates,
        fitter,
    )?;
    Ok(reports.remove(0))
}

/// Cure-model study; the scheme must be [`SchemeSpec::Cure`].
pub fn cure_study(config: &McConfig) -> Result<McReport> {
    if !matches!(config.scheme, SchemeSpec::Cure { .. }) {
        return Err(Error::Config("cure_study needs a cure scheme".into()));
    }
    run_study(config)
}

/// Type I, type II and random censoring applied to one shared complete
/// sample per replication, all at the same target proportion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharedConfig {
    pub censoring: f64,
    #[serde(default)]
    pub calibration: RandomCalibration,
    pub alpha: f64,
    pub beta: f64,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    #[serde(default = "default_level")]
    pub level: f64,
    pub master_seed: u64,
    #[serde(default)]
    pub store_estimates: bool,
}

impl SharedConfig {
    fn arms(&self) -> [SchemeSpec; 3] {
        [
            SchemeSpec::TypeI { censoring: self.censoring },
            SchemeSpec::TypeII { censoring: self.censoring },
            SchemeSpec::Random { censoring: self.censoring, calibration: self.calibration },
        ]
    }
}

/// Reports in the order type I, type II, random.
pub fn shared_complete_sample_mode(config: &SharedConfig) -> Result<[McReport; 3]> {
    shared_complete_sample_mode_with(config, &MleFitter)
}

pub fn shared_complete_sample_mode_with<F: Fitter>(config: &SharedConfig, fitter: &F) -> Result<[McReport; 3]> {
    let base = validate_design(config.alpha, config.beta, &config.n_grid, config.replications, config.level)?;
    let arms: Vec<Arm> = config.arms().into_iter().map(|s| arm(s, config.alpha, config.beta)).collect();
    for a in &arms {
        a.spec.validate()?;
    }
    let reports = run_arms(
        &arms,
        &base,
        &config.n_grid,
        config.replications,
        config.level,
        config.master_seed,
        config.store_estimates,
        fitter,
    )?;
    reports
        .try_into()
        .map_err(|_| Error::Config("shared mode produced an unexpected number of reports".into()))
}

/// Study file: one or more schemes over a common design. With `shared`,
/// the schemes must be exactly one type-I, one type-II and one random
/// scheme at a common censoring proportion, and they share complete
/// samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyPlan {
    pub schemes: Vec<SchemeSpec>,
    pub alpha: f64,
    pub beta: f64,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    #[serde(default = "default_level")]
    pub level: f64,
    pub master_seed: u64,
    #[serde(default)]
    pub shared: bool,
    #[serde(default)]
    pub store_estimates: bool,
}

impl StudyPlan {
    pub fn from_json(text: &str) -> Result<Self> {
        let plan: StudyPlan = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() {
            return Err(Error::Config("schemes must not be empty".into()));
        }
        for s in &self.schemes {
            s.validate()?;
        }
        validate_design(self.alpha, self.beta, &self.n_grid, self.replications, self.level)?;
        if self.shared {
            self.shared_config()?;
        }
        Ok(())
    }

    fn shared_config(&self) -> Result<SharedConfig> {
        let mut censoring = None;
        let mut calibration = RandomCalibration::default();
        let mut seen = [false; 3];
        for s in &self.schemes {
            let (slot, c) = match *s {
                SchemeSpec::TypeI { censoring } => (0, censoring),
                SchemeSpec::TypeII { censoring } => (1, censoring),
                SchemeSpec::Random { censoring, calibration: cal } => {
                    calibration = cal;
                    (2, censoring)
                }
                SchemeSpec::Cure { .. } => {
                    return Err(Error::Config("shared mode does not support the cure scheme".into()))
                }
            };
            if seen[slot] || censoring.is_some_and(|v| v != c) {
                return Err(Error::Config(
                    "shared mode needs one type1, one type2 and one random scheme with equal censoring".into(),
                ));
            }
            seen[slot] = true;
            censoring = Some(c);
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::Config("shared mode needs type1, type2 and random schemes".into()));
        }
        Ok(SharedConfig {
            censoring: censoring.unwrap_or_default(),
            calibration,
            alpha: self.alpha,
            beta: self.beta,
            n_grid: self.n_grid.clone(),
            replications: self.replications,
            level: self.level,
            master_seed: self.master_seed,
            store_estimates: self.store_estimates,
        })
    }

    pub fn study_configs(&self) -> Vec<McConfig> {
        self.schemes
            .iter()
            .map(|&scheme| McConfig {
                scheme,
                alpha: self.alpha,
                beta: self.beta,
                n_grid: self.n_grid.clone(),
                replications: self.replications,
                level: self.level,
                master_seed: self.master_seed,
                store_estimates: self.store_estimates,
            })
            .collect()
    }
}

/// Runs every study of a plan, in scheme order.
pub fn run_plan<F: Fitter>(plan: &StudyPlan, fitter: &F) -> Result<Vec<McReport>> {
    plan.validate()?;
    if plan.shared {
        let reports = shared_complete_sample_mode_with(&plan.shared_config()?, fitter)?;
        let by_label: Vec<McReport> = plan
            .schemes
            .iter()
            .map(|s| reports.iter().find(|r| r.scheme == s.label()).cloned())
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Config("missing shared report".into()))?;
        return Ok(by_label);
    }
    plan.study_configs().iter().map(|c| run_study_with(c, fitter)).collect()
}
