use std::io::Write;
use std::path::Path;
use std::time::Instant;

use censim_core::censoring::{
    apply_random, apply_type_i, apply_type_ii, calibrate_cure_exact, calibrate_cure_grid, calibrate_random_analytic,
    calibrate_random_exact, calibrate_type_i, pilot_lambda0, sample_cure, CensoredSample, GridSearch,
};
use censim_core::distributions::{MixtureCureParams, MixtureParams, PlcParams, WeibullParams};
use censim_core::estimation::{confidence_intervals, fit_cure_random, fit_plc, fit_random, fit_type_i, fit_type_ii};
use censim_core::io::{parse_sample_csv, reports_to_json, write_latent_csv, write_report_csv, write_sample_csv, write_times_csv};
use censim_core::montecarlo::{run_plan, MleFitter, OracleFitter, RandomCalibration, SchemeSpec, StudyPlan};
use censim_core::numerics::RngStream;
use censim_core::sampling::{sample_mixture, sample_plc_mh, sample_weibull, MhConfig};
use censim_core::Error;

use crate::args::*;

/// Failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

pub fn usage(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_USAGE, message: message.into() }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) | Error::Parse { .. } | Error::Config(_) => EXIT_USAGE,
            _ => EXIT_NUMERIC,
        };
        CliError { code, message: e.to_string() }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Formats with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.5}");
    }
    let decimals = 5 - x.abs().log10().floor() as i64;
    if decimals >= 0 {
        format!("{x:.*}", decimals as usize)
    } else {
        format!("{x:.0}")
    }
}

/// Writes `bytes` to `path` through a temporary file in the same
/// directory, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    let io = |e: std::io::Error| CliError { code: EXIT_NUMERIC, message: format!("write failed: {e}") };
    match path {
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
            tmp.write_all(bytes).map_err(io)?;
            tmp.persist(path).map_err(|e| io(e.error))?;
            Ok(())
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(io)
        }
    }
}

fn effective_seed(seed: Option<u64>) -> u64 {
    let seed = seed.unwrap_or_else(rand::random);
    eprintln!("seed: {seed}");
    seed
}

fn need<T: Copy>(value: Option<T>, flag: &str, context: &str) -> CliResult<T> {
    value.ok_or_else(|| usage(format!("{flag} is required {context}")))
}

fn weibull_from(flags: &WeibullFlags, context: &str) -> CliResult<WeibullParams> {
    let alpha = need(flags.alpha, "--alpha", context)?;
    let beta = need(flags.beta, "--beta", context)?;
    if !(alpha > 0.0) {
        return Err(usage(format!("--alpha must be positive, got {alpha}")));
    }
    if !(beta > 0.0) {
        return Err(usage(format!("--beta must be positive, got {beta}")));
    }
    Ok(WeibullParams::new(alpha, beta)?)
}

fn check_pi(pi: f64, flag: &str) -> CliResult<()> {
    if pi > 0.0 && pi < 1.0 {
        Ok(())
    } else {
        Err(usage(format!("{flag} must lie in (0, 1), got {pi}")))
    }
}

fn check_cure_p(p: f64) -> CliResult<()> {
    if (0.0..1.0).contains(&p) {
        Ok(())
    } else {
        Err(usage(format!("--cure-p must lie in [0, 1), got {p}")))
    }
}

fn positive(value: f64, flag: &str) -> CliResult<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(usage(format!("{flag} must be positive, got {value}")))
    }
}

fn random_lambda(base: Option<&WeibullParams>, a: &SampleArgs) -> CliResult<f64> {
    match (a.lambda, a.pi) {
        (Some(l), None) => positive(l, "--lambda"),
        (None, Some(pi)) => {
            check_pi(pi, "--pi")?;
            let base = base.ok_or_else(|| usage("--pi calibration needs --dist weibull"))?;
            Ok(if a.analytic_lambda {
                calibrate_random_analytic(base, pi)?
            } else {
                calibrate_random_exact(base, pi)?
            })
        }
        (Some(_), Some(_)) => Err(usage("give either --lambda or --pi, not both")),
        (None, None) => Err(usage("random censoring needs --lambda or --pi")),
    }
}

pub fn sample(a: &SampleArgs) -> CliResult<()> {
    if a.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let used = |flag: bool, name: &str, dists: &str| {
        if flag {
            Err(usage(format!("{name} only applies to {dists}")))
        } else {
            Ok(())
        }
    };
    used(a.dist != Dist::Mixture && (a.alpha2.is_some() || a.beta2.is_some() || a.p1.is_some()), "--alpha2/--beta2/--p1", "--dist mixture")?;
    used(a.dist != Dist::Plc && a.xmin.is_some(), "--xmin", "--dist plc")?;
    used(a.dist != Dist::Cure && a.cure_p.is_some(), "--cure-p", "--dist cure")?;
    used(a.dist != Dist::Cure && a.latent_out.is_some(), "--latent-out", "--dist cure")?;

    let seed = effective_seed(a.seed);
    let mut rng = RngStream::new(seed);

    if a.dist == Dist::Cure {
        let base = weibull_from(&a.weibull, "for --dist cure")?;
        let p = need(a.cure_p, "--cure-p", "for --dist cure")?;
        check_cure_p(p)?;
        if !matches!(a.censoring, Censoring::None | Censoring::Random) {
            return Err(usage("--dist cure always uses random censoring; use --censoring random or omit it"));
        }
        if a.pi.is_some() {
            return Err(usage("--dist cure takes --lambda; use `calibrate --scheme cure-grid` for a target proportion"));
        }
        let lambda = positive(need(a.lambda, "--lambda", "for --dist cure")?, "--lambda")?;
        let truth = sample_cure(&mut rng, &MixtureCureParams::new(p, base)?, lambda, a.n)?;
        let mut buf = Vec::new();
        write_sample_csv(&mut buf, &truth.censored)?;
        if let Some(path) = &a.latent_out {
            let mut latent = Vec::new();
            write_latent_csv(&mut latent, &truth)?;
            emit(Some(path), &latent)?;
        }
        emit(a.out.as_deref(), &buf)?;
        eprintln!("censored fraction: {}", sig6(truth.censored.censored_fraction()));
        return Ok(());
    }

    let (x, base) = match a.dist {
        Dist::Weibull => {
            let d = weibull_from(&a.weibull, "for --dist weibull")?;
            (sample_weibull(&mut rng, &d, a.n)?, Some(d))
        }
        Dist::Mixture => {
            let first = weibull_from(&a.weibull, "for --dist mixture")?;
            let second = weibull_from(
                &WeibullFlags { alpha: a.alpha2, beta: a.beta2 },
                "for the second mixture component",
            )
            .map_err(|e| usage(e.message.replace("--alpha", "--alpha2").replace("--beta", "--beta2")))?;
            let p1 = need(a.p1, "--p1", "for --dist mixture")?;
            if !(p1 > 0.0 && p1 < 1.0) {
                return Err(usage(format!("--p1 must lie in (0, 1), got {p1}")));
            }
            (sample_mixture(&mut rng, &MixtureParams::two(p1, first, second)?, a.n)?.0, None)
        }
        Dist::Plc => {
            let alpha = positive(need(a.weibull.alpha, "--alpha", "for --dist plc")?, "--alpha")?;
            let beta = positive(need(a.weibull.beta, "--beta", "for --dist plc")?, "--beta")?;
            let xmin = positive(need(a.xmin, "--xmin", "for --dist plc")?, "--xmin")?;
            if a.thin == 0 {
                return Err(usage("--thin must be at least 1"));
            }
            positive(a.proposal_sd, "--proposal-sd")?;
            let config = MhConfig { burnin: a.burnin, thin: a.thin, proposal_sd: a.proposal_sd, initial: None };
            let (x, diag) = sample_plc_mh(&mut rng, &PlcParams::new(alpha, beta, xmin)?, a.n, &config)?;
            eprintln!("acceptance rate: {}", sig6(diag.acceptance_rate));
            (x, None)
        }
        Dist::Cure => unreachable!(),
    };

    let no_flags = |names: &[(&str, bool)]| -> CliResult<()> {
        for (name, set) in names {
            if *set {
                return Err(usage(format!("{name} does not apply to --censoring {:?}", a.censoring).to_lowercase()));
            }
        }
        Ok(())
    };
    let sample: Option<CensoredSample> = match a.censoring {
        Censoring::None => {
            no_flags(&[("--tc", a.tc.is_some()), ("--m", a.m.is_some()), ("--lambda", a.lambda.is_some()), ("--pi", a.pi.is_some())])?;
            None
        }
        Censoring::Type1 => {
            no_flags(&[("--m", a.m.is_some()), ("--lambda", a.lambda.is_some())])?;
            let t_c = match (a.tc, a.pi) {
                (Some(t), None) => positive(t, "--tc")?,
                (None, Some(pi)) => {
                    check_pi(pi, "--pi")?;
                    calibrate_type_i(base.as_ref().ok_or_else(|| usage("--pi calibration needs --dist weibull"))?, pi)?
                }
                (Some(_), Some(_)) => return Err(usage("give either --tc or --pi, not both")),
                (None, None) => return Err(usage("type-I censoring needs --tc or --pi")),
            };
            Some(apply_type_i(&x, t_c)?)
        }
        Censoring::Type2 => {
            no_flags(&[("--tc", a.tc.is_some()), ("--lambda", a.lambda.is_some())])?;
            let m = match (a.m, a.pi) {
                (Some(m), None) => m,
                (None, Some(pi)) => {
                    check_pi(pi, "--pi")?;
                    (pi * a.n as f64).round() as usize
                }
                (Some(_), Some(_)) => return Err(usage("give either --m or --pi, not both")),
                (None, None) => return Err(usage("type-II censoring needs --m or --pi")),
            };
            if m >= a.n {
                return Err(usage(format!("--m must be smaller than --n ({m} >= {})", a.n)));
            }
            Some(apply_type_ii(&x, m)?)
        }
        Censoring::Random => {
            no_flags(&[("--tc", a.tc.is_some()), ("--m", a.m.is_some())])?;
            let lambda = random_lambda(base.as_ref(), a)?;
            Some(apply_random(&mut rng, &x, lambda)?)
        }
    };

    let mut buf = Vec::new();
    match &sample {
        Some(s) => write_sample_csv(&mut buf, s)?,
        None => write_times_csv(&mut buf, &x)?,
    }
    emit(a.out.as_deref(), &buf)?;
    let fraction = sample.as_ref().map_or(0.0, |s| s.censored_fraction());
    eprintln!("censored fraction: {}", sig6(fraction));
    Ok(())
}

pub fn calibrate(a: &CalibrateArgs) -> CliResult<()> {
    check_pi(a.pi, "--pi")?;
    let base = weibull_from(&a.weibull, "for calibration")?;
    let value = match a.scheme {
        CalibrateScheme::Type1 => calibrate_type_i(&base, a.pi)?,
        CalibrateScheme::Random => calibrate_random_analytic(&base, a.pi)?,
        CalibrateScheme::RandomExact => calibrate_random_exact(&base, a.pi)?,
        CalibrateScheme::CureExact | CalibrateScheme::CureGrid => {
            let p = need(a.cure_p, "--cure-p", "for cure calibration")?;
            check_cure_p(p)?;
            let cure = MixtureCureParams::new(p, base)?;
            if a.pi <= p {
                return Err(CliError {
                    code: EXIT_NUMERIC,
                    message: format!(
                        "target --pi {} is unreachable: cured units are always censored, so the proportion stays above --cure-p {p}",
                        a.pi
                    ),
                });
            }
            if a.scheme == CalibrateScheme::CureExact {
                calibrate_cure_exact(&cure, a.pi)?
            } else {
                positive(a.epsilon, "--epsilon")?;
                if a.grid_n == 0 {
                    return Err(usage("--grid-n must be at least 1"));
                }
                let seed = effective_seed(a.seed);
                let mut rng = RngStream::new(seed);
                let lambda0 = match a.lambda0 {
                    Some(l) => positive(l, "--lambda0")?,
                    None => pilot_lambda0(&mut rng, &base, a.grid_n)?,
                };
                let config = GridSearch { epsilon: a.epsilon, n: a.grid_n, max_steps: a.max_steps };
                let out = calibrate_cure_grid(&mut rng, &cure, a.pi, lambda0, &config)?;
                eprintln!("steps: {}, censored fraction: {}", out.steps, sig6(out.censored_fraction));
                out.lambda
            }
        }
    };
    emit(None, format!("{}\n", sig6(value)).as_bytes())
}

pub fn fit(a: &FitArgs) -> CliResult<()> {
    if !(a.level > 0.0 && a.level < 1.0) {
        return Err(usage(format!("--level must lie in (0, 1), got {}", a.level)));
    }
    let text = std::fs::read_to_string(&a.input)
        .map_err(|e| usage(format!("--in {}: {e}", a.input.display())))?;
    let table = parse_sample_csv(&text).map_err(|e| usage(format!("{}: {e}", a.input.display())))?;
    let init = a.init.as_deref();
    let want = |k: usize| -> CliResult<()> {
        match init {
            Some(v) if v.len() != k => Err(usage(format!("--init needs {k} comma-separated values, got {}", v.len()))),
            _ => Ok(()),
        }
    };
    let censored = |table: censim_core::io::SampleCsv| -> CliResult<CensoredSample> {
        if table.delta.is_none() {
            return Err(usage(format!("--scheme {:?} needs a delta column in {}", a.scheme, a.input.display()).to_lowercase()));
        }
        Ok(table.censored()?)
    };
    if a.scheme != FitScheme::Plc && a.xmin.is_some() {
        return Err(usage("--xmin only applies to --scheme plc"));
    }
    if a.scheme != FitScheme::Type1 && a.tc.is_some() {
        return Err(usage("--tc only applies to --scheme type1"));
    }
    if !matches!(a.scheme, FitScheme::Cure | FitScheme::Plc) && init.is_some() {
        return Err(usage("--init only applies to --scheme cure and --scheme plc"));
    }
    let result = match a.scheme {
        FitScheme::Type2 => fit_type_ii(&censored(table)?)?,
        FitScheme::Type1 => {
            let t_c = positive(need(a.tc, "--tc", "for --scheme type1")?, "--tc")?;
            fit_type_i(&censored(table)?, t_c)?
        }
        FitScheme::Random => fit_random(&censored(table)?)?,
        FitScheme::Cure => {
            want(3)?;
            fit_cure_random(&censored(table)?, init.map(|v| [v[0], v[1], v[2]]))?
        }
        FitScheme::Plc => {
            want(2)?;
            let xmin = positive(need(a.xmin, "--xmin", "for --scheme plc")?, "--xmin")?;
            let start = init.map_or([0.5, 0.5], |v| [v[0], v[1]]);
            fit_plc(&table.t, xmin, start)?
        }
    };
    let result = if (a.level - 0.95).abs() > 1e-12 && result.hessian.is_some() {
        confidence_intervals(&result, 1.0 - a.level).unwrap_or(result)
    } else {
        result
    };
    let mut json = serde_json::to_string_pretty(&result).map_err(|e| CliError { code: EXIT_NUMERIC, message: e.to_string() })?;
    json.push('\n');
    emit(a.out.as_deref(), json.as_bytes())?;
    if !result.converged {
        return Err(CliError { code: EXIT_NOT_CONVERGED, message: "optimizer did not converge".into() });
    }
    Ok(())
}

fn inline_plan(a: &McArgs) -> CliResult<StudyPlan> {
    if a.scheme.is_empty() {
        return Err(usage("give --config or at least one --scheme"));
    }
    let alpha = need(a.weibull.alpha, "--alpha", "for an inline study")?;
    let beta = need(a.weibull.beta, "--beta", "for an inline study")?;
    if a.n_grid.is_empty() {
        return Err(usage("--n-grid is required for an inline study"));
    }
    let calibration = if a.analytic_lambda { RandomCalibration::Analytic } else { RandomCalibration::Exact };
    let mut schemes = Vec::new();
    for s in &a.scheme {
        let pi = || -> CliResult<f64> {
            let pi = need(a.pi, "--pi", "for type1, type2 and random studies")?;
            check_pi(pi, "--pi")?;
            Ok(pi)
        };
        schemes.push(match s {
            McScheme::Type1 => SchemeSpec::TypeI { censoring: pi()? },
            McScheme::Type2 => SchemeSpec::TypeII { censoring: pi()? },
            McScheme::Random => SchemeSpec::Random { censoring: pi()?, calibration },
            McScheme::Cure => {
                let p = need(a.cure_p, "--cure-p", "for cure studies")?;
                check_cure_p(p)?;
                let lambda = positive(need(a.lambda, "--lambda", "for cure studies")?, "--lambda")?;
                SchemeSpec::Cure { p, lambda }
            }
        });
    }
    Ok(StudyPlan {
        schemes,
        alpha,
        beta,
        n_grid: a.n_grid.clone(),
        replications: a.replications,
        level: a.level,
        master_seed: 0,
        shared: a.shared,
        store_estimates: false,
    })
}

pub fn mc(a: &McArgs) -> CliResult<()> {
    let mut plan = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("--config {}: {e}", path.display())))?;
            StudyPlan::from_json(&text).map_err(|e| usage(format!("--config {}: {e}", path.display())))?
        }
        None => {
            let mut plan = inline_plan(a)?;
            plan.master_seed = a.seed.unwrap_or_else(rand::random);
            plan
        }
    };
    if let Some(seed) = a.seed {
        plan.master_seed = seed;
    }
    plan.validate().map_err(|e| usage(e.to_string()))?;
    eprintln!("seed: {}", plan.master_seed);

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = a.threads {
        if t == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| CliError { code: EXIT_NUMERIC, message: e.to_string() })?;

    let start = Instant::now();
    let reports = pool.install(|| {
        if a.oracle_fitter {
            run_plan(&plan, &OracleFitter::default())
        } else {
            run_plan(&plan, &MleFitter)
        }
    })?;
    let elapsed = start.elapsed();

    let mut csv = Vec::new();
    write_report_csv(&mut csv, &reports)?;
    let mut json = reports_to_json(&reports)?;
    json.push('\n');
    let prefix = a.out_prefix.to_string_lossy();
    emit(Some(Path::new(&format!("{prefix}.csv"))), &csv)?;
    emit(Some(Path::new(&format!("{prefix}.json"))), json.as_bytes())?;

    eprintln!("wall clock: {:.2} s", elapsed.as_secs_f64());
    for r in &reports {
        eprintln!("{}: {} failed replications", r.scheme, r.total_failed());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::sig6;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.512148), "0.512148");
        assert_eq!(sig6(1.2252139), "1.22521");
        assert_eq!(sig6(12345.678), "12345.7");
        assert_eq!(sig6(1234567.0), "1234567");
        assert_eq!(sig6(0.0), "0.00000");
    }
}
