//! Right-censoring schemes (type I, type II, random, cure fraction) and
//! calibration of their parameters to a target censoring proportion.

use serde::{Deserialize, Serialize};

use crate::distributions::{MixtureCureParams, WeibullParams};
use crate::error::{invalid, Error, Result};
use crate::numerics::quad::integrate;
use crate::numerics::rng::RngStream;
use crate::numerics::root::{find_root, Bracket};
use crate::numerics::special::gamma_fn;

/// Observed times with event indicators (`true` = event, `false` = censored).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensoredSample {
    pub t: Vec<f64>,
    pub delta: Vec<bool>,
}

impl CensoredSample {
    pub fn new(t: Vec<f64>, delta: Vec<bool>) -> Result<Self> {
        if t.len() != delta.len() {
            return Err(invalid(format!(
                "t has {} entries but delta has {}",
                t.len(),
                delta.len()
            )));
        }
        check_times(&t)?;
        Ok(Self { t, delta })
    }

    /// Every unit observed.
    pub fn complete(t: Vec<f64>) -> Result<Self> {
        let delta = vec![true; t.len()];
        Self::new(t, delta)
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Number of observed events.
    pub fn events(&self) -> usize {
        self.delta.iter().filter(|&&d| d).count()
    }

    pub fn censored_fraction(&self) -> f64 {
        if self.t.is_empty() {
            return 0.0;
        }
        1.0 - self.events() as f64 / self.t.len() as f64
    }
}

fn check_times(x: &[f64]) -> Result<()> {
    for (i, &v) in x.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(invalid(format!("time {i} must be finite and >= 0, got {v}")));
        }
    }
    Ok(())
}

/// A censoring mechanism with its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum CensoringScheme {
    TypeI { t_c: f64 },
    TypeII { m: usize },
    Random { lambda: f64 },
    Cure { p: f64, lambda: f64 },
}

/// Cure-model sample together with the latent quantities that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CureSampleTruth {
    pub censored: CensoredSample,
    /// `b_i`: unit `i` belongs to the cured fraction.
    pub cured_flags: Vec<bool>,
    /// Latent lifetime; `None` for cured units, whose lifetime is infinite.
    pub latent: Vec<Option<f64>>,
    /// Censoring times `c_i`.
    pub censoring_times: Vec<f64>,
}

/// Sorts `x`, keeps the first `n - m` values as events and censors the last
/// `m` at the `(n - m)`-th order statistic.
pub fn apply_type_ii(x: &[f64], m: usize) -> Result<CensoredSample> {
    let n = x.len();
    if m >= n {
        return Err(invalid(format!("type-II censoring needs m < n, got m = {m}, n = {n}")));
    }
    check_times(x)?;
    let mut t = x.to_vec();
    t.sort_by(f64::total_cmp);
    let r = n - m;
    let last = t[r - 1];
    let mut delta = vec![true; n];
    for i in r..n {
        t[i] = last;
        delta[i] = false;
    }
    Ok(CensoredSample { t, delta })
}

/// `t_i = min(x_i, t_c)`, event iff `x_i < t_c`.
pub fn apply_type_i(x: &[f64], t_c: f64) -> Result<CensoredSample> {
    if !(t_c > 0.0) || !t_c.is_finite() {
        return Err(invalid(format!("t_c must be positive, got {t_c}")));
    }
    check_times(x)?;
    let t = x.iter().map(|&v| v.min(t_c)).collect();
    let delta = x.iter().map(|&v| v < t_c).collect();
    Ok(CensoredSample { t, delta })
}

/// Censoring against given censoring times: event iff `x_i <= c_i`.
pub fn censor_against(x: &[f64], c: &[f64]) -> Result<CensoredSample> {
    if x.len() != c.len() {
        return Err(invalid("lifetimes and censoring times differ in length"));
    }
    check_times(x)?;
    check_times(c)?;
    let t = x.iter().zip(c).map(|(&a, &b)| a.min(b)).collect();
    let delta = x.iter().zip(c).map(|(&a, &b)| a <= b).collect();
    Ok(CensoredSample { t, delta })
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid(format!("lambda must be positive and finite, got {lambda}")));
    }
    Ok(())
}

/// Random censoring with `C_i ~ U(0, lambda)`.
pub fn apply_random(rng: &mut RngStream, x: &[f64], lambda: f64) -> Result<CensoredSample> {
    check_lambda(lambda)?;
    let c: Vec<f64> = (0..x.len()).map(|_| rng.uniform_unchecked(0.0, lambda)).collect();
    censor_against(x, &c)
}

/// Mixture cure sample with `U(0, lambda)` censoring.
pub fn sample_cure(
    rng: &mut RngStream,
    params: &MixtureCureParams,
    lambda: f64,
    n: usize,
) -> Result<CureSampleTruth> {
    sample_cure_with(rng, params.p(), &params.base(), lambda, n)
}

/// As [`sample_cure`], but accepting the degenerate `p = 1`.
///
/// Draw order: for each unit the cure flag and, if not cured, its
/// lifetime; then all censoring times.
pub fn sample_cure_with(
    rng: &mut RngStream,
    p: f64,
    base: &WeibullParams,
    lambda: f64,
    n: usize,
) -> Result<CureSampleTruth> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("cure fraction must lie in [0, 1], got {p}")));
    }
    check_lambda(lambda)?;
    if n == 0 {
        return Err(invalid("sample size must be at least 1"));
    }
    let mut cured_flags = Vec::with_capacity(n);
    let mut latent = Vec::with_capacity(n);
    for _ in 0..n {
        let cured = rng.bernoulli(p);
        cured_flags.push(cured);
        latent.push(if cured { None } else { Some(base.quantile(rng.next_f64())?) });
    }
    let c: Vec<f64> = (0..n).map(|_| rng.uniform_unchecked(0.0, lambda)).collect();
    let t = latent.iter().zip(&c).map(|(y, &ci)| y.map_or(ci, |y| y.min(ci))).collect();
    let delta = latent.iter().zip(&c).map(|(y, &ci)| y.is_some_and(|y| y <= ci)).collect();
    Ok(CureSampleTruth {
        censored: CensoredSample { t, delta },
        cured_flags,
        latent,
        censoring_times: c,
    })
}

fn check_pi(pi: f64) -> Result<()> {
    if !(pi > 0.0 && pi < 1.0) {
        return Err(invalid(format!("censoring proportion must lie in (0, 1), got {pi}")));
    }
    Ok(())
}

/// `t_c = (-ln pi / beta)^(1/alpha)`, so that `S(t_c) = pi`.
pub fn calibrate_type_i(params: &WeibullParams, pi: f64) -> Result<f64> {
    check_pi(pi)?;
    Ok((-pi.ln() / params.beta()).powf(1.0 / params.alpha()))
}

/// Closed-form `lambda = beta^(-1/alpha) Γ(1/alpha) / (alpha pi)`.
///
/// Treats every lifetime as lying below `lambda`, so the achieved
/// proportion `E[min(X, lambda)] / lambda` falls short of `pi` by roughly
/// the neglected upper-tail mass.
pub fn calibrate_random_analytic(params: &WeibullParams, pi: f64) -> Result<f64> {
    check_pi(pi)?;
    let (a, b) = (params.alpha(), params.beta());
    Ok(b.powf(-1.0 / a) * gamma_fn(1.0 / a)? / (a * pi))
}

/// `E[min(X, lambda)] / lambda = P(C < X)` for `C ~ U(0, lambda)`, by
/// quadrature of the survival function.
pub fn random_censoring_proportion(params: &WeibullParams, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let area = integrate(|x| (-params.beta() * x.powf(params.alpha())).exp(), 0.0, lambda, 1e-12)?;
    Ok(area / lambda)
}

/// `p + (1 - p) E[min(X, lambda)] / lambda`.
pub fn cure_censoring_proportion(params: &MixtureCureParams, lambda: f64) -> Result<f64> {
    let q = random_censoring_proportion(&params.base(), lambda)?;
    Ok(params.p() + (1.0 - params.p()) * q)
}

fn solve_lambda<F: Fn(f64) -> Result<f64>>(proportion: F, target: f64, scale: f64) -> Result<f64> {
    let mut failure = None;
    let root = find_root(
        |lambda| match proportion(lambda) {
            Ok(q) => q - target,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        Bracket::new(scale * 1e-6, scale * 10.0)?,
        1e-12,
    );
    match (failure, root) {
        (Some(e), _) => Err(e),
        (None, Err(Error::NoBracket { .. })) => Err(Error::Unreachable(format!(
            "censoring proportion {target} is not reachable"
        ))),
        (None, r) => r,
    }
}

fn weibull_scale(params: &WeibullParams) -> f64 {
    params.beta().powf(-1.0 / params.alpha())
}

/// Solves `E[min(X, lambda)] / lambda = pi` exactly.
pub fn calibrate_random_exact(params: &WeibullParams, pi: f64) -> Result<f64> {
    check_pi(pi)?;
    solve_lambda(|l| random_censoring_proportion(params, l), pi, weibull_scale(params))
}

/// Deterministic cure calibration: solves
/// `p + (1 - p) E[min(X, lambda)] / lambda = target`, reachable only for
/// `target > p`.
pub fn calibrate_cure_exact(params: &MixtureCureParams, target: f64) -> Result<f64> {
    check_pi(target)?;
    if target <= params.p() {
        return Err(Error::Unreachable(format!(
            "target {target} does not exceed the cured fraction {}",
            params.p()
        )));
    }
    solve_lambda(|l| cure_censoring_proportion(params, l), target, weibull_scale(&params.base()))
}

/// Settings for [`calibrate_grid`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSearch {
    pub epsilon: f64,
    /// Draws simulated at each step.
    pub n: usize,
    pub max_steps: usize,
}

impl Default for GridSearch {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            n: 10_000,
            max_steps: 1_000_000,
        }
    }
}

/// Result of a grid search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOutcome {
    pub lambda: f64,
    pub censored_fraction: f64,
    pub steps: usize,
}

/// Stochastic grid search: starting from `lambda0`, simulates `n` units
/// at the current `lambda` and stops as soon as the censored fraction is at
/// or below `target`, otherwise increments `lambda` by `epsilon`.
///
/// Each step draws fresh variates from `rng`, so the returned `lambda` is a
/// first-passage value that varies by `O(epsilon)` plus sampling noise.
pub fn calibrate_grid<F>(
    rng: &mut RngStream,
    mut sampler: F,
    target: f64,
    lambda0: f64,
    config: &GridSearch,
) -> Result<GridOutcome>
where
    F: FnMut(&mut RngStream, f64, usize) -> Result<CensoredSample>,
{
    check_pi(target)?;
    if !(config.epsilon > 0.0) || !config.epsilon.is_finite() {
        return Err(invalid(format!("epsilon must be positive, got {}", config.epsilon)));
    }
    if config.n == 0 {
        return Err(invalid("grid search needs n >= 1"));
    }
    check_lambda(lambda0)?;
    let mut lambda = lambda0;
    for step in 0..config.max_steps {
        let fraction = sampler(rng, lambda, config.n)?.censored_fraction();
        if fraction <= target {
            return Ok(GridOutcome {
                lambda,
                censored_fraction: fraction,
                steps: step + 1,
            });
        }
        lambda += config.epsilon;
    }
    Err(Error::MaxIterations(config.max_steps))
}

/// Grid search for the mixture cure model.
pub fn calibrate_cure_grid(
    rng: &mut RngStream,
    params: &MixtureCureParams,
    target: f64,
    lambda0: f64,
    config: &GridSearch,
) -> Result<GridOutcome> {
    calibrate_grid(
        rng,
        |r, lambda, n| Ok(sample_cure(r, params, lambda, n)?.censored),
        target,
        lambda0,
        config,
    )
}

/// Starting value for the grid search: the minimum of `n` Weibull draws.
pub fn pilot_lambda0(rng: &mut RngStream, params: &WeibullParams, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("pilot sample needs n >= 1"));
    }
    let mut min = f64::INFINITY;
    for _ in 0..n {
        min = min.min(params.quantile(rng.next_f64())?);
    }
    // a zero draw would make an invalid starting point
    Ok(min.max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::special::lower_incomplete_gamma;
    use crate::sampling::sample_weibull;
    use proptest::prelude::*;

    fn w(a: f64, b: f64) -> WeibullParams {
        WeibullParams::new(a, b).unwrap()
    }

    /// `E[min(X, lambda)] / lambda` through the lower incomplete gamma.
    fn proportion_oracle(a: f64, b: f64, lambda: f64) -> f64 {
        b.powf(-1.0 / a) / a * lower_incomplete_gamma(1.0 / a, b * lambda.powf(a)).unwrap() / lambda
    }

    fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (f(lo) > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn type_ii_examples() {
        let s = apply_type_ii(&[3.0, 1.0, 2.0], 1).unwrap();
        assert_eq!(s.t, vec![1.0, 2.0, 2.0]);
        assert_eq!(s.delta, vec![true, true, false]);
        let s = apply_type_ii(&[3.0, 1.0, 2.0], 0).unwrap();
        assert_eq!(s.t, vec![1.0, 2.0, 3.0]);
        assert!(s.delta.iter().all(|&d| d));
        assert!(apply_type_ii(&[1.0, 2.0], 2).is_err());
    }

    #[test]
    fn type_i_examples() {
        let s = apply_type_i(&[0.3, 0.7], 0.5).unwrap();
        assert_eq!(s.t, vec![0.3, 0.5]);
        assert_eq!(s.delta, vec![true, false]);
        let s = apply_type_i(&[0.3, 0.7], 5.0).unwrap();
        assert_eq!(s.t, vec![0.3, 0.7]);
        assert_eq!(s.events(), 2);
        assert!(apply_type_i(&[0.3], 0.0).is_err());
    }

    #[test]
    fn random_by_definition() {
        let s = censor_against(&[0.2, 0.6], &[0.5, 0.5]).unwrap();
        assert_eq!(s.t, vec![0.2, 0.5]);
        assert_eq!(s.delta, vec![true, false]);
        let x = sample_weibull(&mut RngStream::new(1), &w(1.5, 2.5), 1000).unwrap();
        let s = apply_random(&mut RngStream::new(2), &x, 1e9).unwrap();
        assert_eq!(s.events(), 1000);
    }

    #[test]
    fn random_fraction_matches_oracle() {
        let d = w(1.5, 2.5);
        let oracle = proportion_oracle(1.5, 2.5, 1.22);
        assert!((random_censoring_proportion(&d, 1.22).unwrap() - oracle).abs() < 1e-12);
        assert!((oracle - 0.395).abs() < 0.001, "{oracle}");
        let mut rng = RngStream::new(5);
        let x = sample_weibull(&mut rng, &d, 100_000).unwrap();
        let s = apply_random(&mut rng, &x, 1.22).unwrap();
        assert!((s.censored_fraction() - oracle).abs() < 0.01);
    }

    #[test]
    fn cure_degenerate_fractions() {
        let d = w(1.5, 2.5);
        let all = sample_cure_with(&mut RngStream::new(3), 1.0, &d, 1.22, 200).unwrap();
        assert_eq!(all.censored.events(), 0);
        assert_eq!(all.censored.t, all.censoring_times);
        assert!(all.latent.iter().all(Option::is_none));

        // p = 0 consumes one uniform per flag, so compare against the same draws
        let none = sample_cure_with(&mut RngStream::new(4), 0.0, &d, 1.22, 20_000).unwrap();
        assert!(none.cured_flags.iter().all(|&b| !b));
        let oracle = proportion_oracle(1.5, 2.5, 1.22);
        let sd = (oracle * (1.0 - oracle) / 20_000.0).sqrt();
        assert!((none.censored.censored_fraction() - oracle).abs() < 4.0 * sd);
    }

    #[test]
    fn cure_fraction_matches_oracle() {
        let cure = MixtureCureParams::new(0.3, w(1.5, 2.5)).unwrap();
        let truth = sample_cure(&mut RngStream::new(6), &cure, 1.22, 10_000).unwrap();
        let oracle = 0.3 + 0.7 * proportion_oracle(1.5, 2.5, 1.22);
        assert!((oracle - 0.58).abs() < 0.01, "{oracle}");
        assert!((truth.censored.censored_fraction() - oracle).abs() < 0.02);
        for (i, &b) in truth.cured_flags.iter().enumerate() {
            if b {
                assert!(!truth.censored.delta[i]);
            }
        }
    }

    #[test]
    fn type_i_calibration() {
        let t = calibrate_type_i(&w(1.5, 2.5), 0.4).unwrap();
        assert!((t - 0.5121).abs() < 5e-5, "{t}");
        let beta = 0.8;
        assert!((calibrate_type_i(&w(1.0, beta), (-beta).exp()).unwrap() - 1.0).abs() < 1e-14);
        assert!(calibrate_type_i(&w(1.5, 2.5), 1.0 - 1e-12).unwrap() < 1e-6);
        assert!(calibrate_type_i(&w(1.5, 2.5), 0.0).is_err());
        assert!(calibrate_type_i(&w(1.5, 2.5), 1.0).is_err());
    }

    #[test]
    fn type_i_empirical_fraction() {
        let d = w(1.5, 2.5);
        let t_c = calibrate_type_i(&d, 0.4).unwrap();
        let x = sample_weibull(&mut RngStream::new(12), &d, 100_000).unwrap();
        let s = apply_type_i(&x, t_c).unwrap();
        assert!((s.censored_fraction() - 0.4).abs() < 3.0 * (0.24f64 / 1e5).sqrt());
    }

    #[test]
    fn analytic_random_calibration() {
        let l = calibrate_random_analytic(&w(1.5, 2.5), 0.4).unwrap();
        assert!((l - 1.2251).abs() < 1e-3, "{l}");
        assert!((l - 1.225213863242072).abs() < 1e-12);
        assert!((calibrate_random_analytic(&w(1.0, 1.0), 0.5).unwrap() - 2.0).abs() < 1e-14);
        let l2 = calibrate_random_analytic(&w(1.5, 2.5), 0.2).unwrap();
        assert!((l2 - 2.0 * l).abs() < 1e-12);
        // the achieved proportion falls short of the target
        assert!(random_censoring_proportion(&w(1.5, 2.5), l).unwrap() < 0.4);
    }

    #[test]
    fn exact_random_calibration() {
        let l = calibrate_random_exact(&w(1.0, 1.0), 0.5).unwrap();
        let oracle = bisect(|x| (1.0 - (-x).exp()) / x - 0.5, 0.1, 10.0);
        assert!((l - oracle).abs() < 1e-8, "{l} vs {oracle}");
        assert!((l - 1.5936).abs() < 1e-4);

        let d = w(1.5, 2.5);
        let l = calibrate_random_exact(&d, 0.4).unwrap();
        let oracle = bisect(|x| proportion_oracle(1.5, 2.5, x) - 0.4, 0.5, 5.0);
        assert!((l - oracle).abs() < 1e-8, "{l} vs {oracle}");
        // more censoring than the closed form delivers needs a shorter window
        assert!((l - 1.2046104849238428).abs() < 1e-8);
        assert!(l < calibrate_random_analytic(&d, 0.4).unwrap());
        assert!((random_censoring_proportion(&d, l).unwrap() - 0.4).abs() < 1e-6);

        let l01 = calibrate_random_exact(&d, 0.01).unwrap();
        let l1 = calibrate_random_exact(&d, 0.1).unwrap();
        assert!(l01 > l1 && l1 > l);
    }

    #[test]
    fn exact_random_empirical_fraction() {
        let d = w(1.5, 2.5);
        let l = calibrate_random_exact(&d, 0.4).unwrap();
        let mut rng = RngStream::new(13);
        let x = sample_weibull(&mut rng, &d, 100_000).unwrap();
        let s = apply_random(&mut rng, &x, l).unwrap();
        assert!((s.censored_fraction() - 0.4).abs() < 3.0 * (0.24f64 / 1e5).sqrt());
    }

    #[test]
    fn cure_exact_calibration() {
        let cure = MixtureCureParams::new(0.3, w(1.5, 2.5)).unwrap();
        let l = calibrate_cure_exact(&cure, 0.6).unwrap();
        let oracle = bisect(|x| 0.3 + 0.7 * proportion_oracle(1.5, 2.5, x) - 0.6, 0.1, 10.0);
        assert!((l - oracle).abs() < 1e-8);
        assert!(matches!(calibrate_cure_exact(&cure, 0.2), Err(Error::Unreachable(_))));
    }

    #[test]
    fn grid_search_cure_example() {
        let cure = MixtureCureParams::new(0.3, w(1.5, 2.5)).unwrap();
        let mut rng = RngStream::new(2024);
        let l0 = pilot_lambda0(&mut rng, &cure.base(), 10_000).unwrap();
        let out = calibrate_cure_grid(&mut rng, &cure, 0.6, l0, &GridSearch::default()).unwrap();
        assert!((out.lambda - 1.11).abs() < 0.1, "{out:?}");
        assert!(out.censored_fraction <= 0.6);
    }

    #[test]
    fn grid_search_cap_when_below_cure_fraction() {
        let cure = MixtureCureParams::new(0.3, w(1.5, 2.5)).unwrap();
        let cfg = GridSearch { n: 200, max_steps: 500, ..GridSearch::default() };
        let r = calibrate_cure_grid(&mut RngStream::new(1), &cure, 0.2, 0.1, &cfg);
        assert_eq!(r, Err(Error::MaxIterations(500)));
    }

    #[test]
    fn censored_sample_validation() {
        assert!(CensoredSample::new(vec![1.0], vec![]).is_err());
        assert!(CensoredSample::new(vec![-1.0], vec![true]).is_err());
        assert!(CensoredSample::new(vec![f64::NAN], vec![true]).is_err());
    }

    proptest! {
        #[test]
        fn censored_entries_carry_the_censoring_value(
            x in prop::collection::vec(0.0f64..5.0, 1..60),
            t_c in 0.01f64..4.0,
            seed in any::<u64>(),
            m_frac in 0.0f64..1.0,
        ) {
            let n = x.len();
            let s = apply_type_i(&x, t_c).unwrap();
            prop_assert_eq!(s.len(), n);
            for (t, d) in s.t.iter().zip(&s.delta) {
                if !d { prop_assert_eq!(*t, t_c); }
            }

            let m = ((n as f64) * m_frac) as usize % n;
            let s = apply_type_ii(&x, m).unwrap();
            prop_assert_eq!(s.len(), n);
            prop_assert_eq!(n - s.events(), m);
            let stat = s.t[n - m - 1];
            for (t, d) in s.t.iter().zip(&s.delta) {
                if !d { prop_assert_eq!(*t, stat); }
            }

            let mut rng = RngStream::new(seed);
            let c: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, 2.0).unwrap()).collect();
            let s = censor_against(&x, &c).unwrap();
            for ((&t, &d), &ci) in s.t.iter().zip(&s.delta).zip(&c) {
                if !d { prop_assert_eq!(t, ci); }
            }
        }
    }
}
