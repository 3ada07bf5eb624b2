//! Derivative-free maximisation: Nelder-Mead on a box-transformed space.
//!
//! Each coordinate is mapped to an unconstrained variable `y`:
//! `(lo, hi)` by the logistic map, `(lo, ∞)` by `lo + e^y`, `(-∞, hi)` by
//! `hi - e^y`, and free coordinates by the identity. Convergence is
//! declared when the simplex diameter in `y` falls below the tolerance;
//! one fresh restart from the reported optimum guards against premature
//! collapse.

use crate::error::{invalid, Error, Result};

/// Outcome of [`maximize`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub argmax: Vec<f64>,
    /// Objective value at `argmax`.
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct MaximizeOptions {
    pub max_iter: usize,
    /// Simplex diameter (transformed coordinates) at which to stop.
    pub tol: f64,
    /// Edge length of the initial simplex in transformed coordinates.
    pub initial_step: f64,
    pub restarts: usize,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        Self {
            max_iter: 10_000,
            tol: 1e-8,
            initial_step: 0.1,
            restarts: 1,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Map {
    Free,
    Lower(f64),
    Upper(f64),
    Both(f64, f64),
}

impl Map {
    fn new(lo: f64, hi: f64) -> Self {
        match (lo.is_finite(), hi.is_finite()) {
            (false, false) => Map::Free,
            (true, false) => Map::Lower(lo),
            (false, true) => Map::Upper(hi),
            (true, true) => Map::Both(lo, hi),
        }
    }

    fn to_box(self, y: f64) -> f64 {
        match self {
            Map::Free => y,
            Map::Lower(lo) => lo + y.exp(),
            Map::Upper(hi) => hi - y.exp(),
            Map::Both(lo, hi) => {
                let s = 1.0 / (1.0 + (-y).exp());
                lo + (hi - lo) * s
            }
        }
    }

    fn unbox(self, x: f64) -> f64 {
        match self {
            Map::Free => x,
            Map::Lower(lo) => (x - lo).ln(),
            Map::Upper(hi) => (hi - x).ln(),
            Map::Both(lo, hi) => {
                let s = (x - lo) / (hi - lo);
                (s / (1.0 - s)).ln()
            }
        }
    }
}

/// Maximises `f` over the open box `(lower, upper)` starting from `init`
/// with default options. Use `f64::NEG_INFINITY` / `f64::INFINITY` for
/// unbounded coordinates.
pub fn maximize<F: FnMut(&[f64]) -> f64>(
    f: F,
    init: &[f64],
    lower: &[f64],
    upper: &[f64],
) -> Result<OptimResult> {
    maximize_with(f, init, lower, upper, MaximizeOptions::default())
}

pub fn maximize_with<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    init: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: MaximizeOptions,
) -> Result<OptimResult> {
    let dim = init.len();
    if dim == 0 || lower.len() != dim || upper.len() != dim {
        return Err(invalid("init, lower and upper must have the same non-zero length"));
    }
    for i in 0..dim {
        if !(lower[i] < init[i] && init[i] < upper[i]) {
            return Err(invalid(format!(
                "init[{i}] = {} is not strictly inside ({}, {})",
                init[i], lower[i], upper[i]
            )));
        }
    }
    let maps: Vec<Map> = lower.iter().zip(upper).map(|(&l, &u)| Map::new(l, u)).collect();
    let mut x = vec![0.0; dim];
    let mut objective = |y: &[f64]| -> f64 {
        for i in 0..dim {
            x[i] = maps[i].to_box(y[i]);
        }
        let v = f(&x);
        // minimise the negation; anything non-finite is rejected
        if v.is_nan() {
            f64::INFINITY
        } else {
            -v
        }
    };
    let y0: Vec<f64> = init.iter().zip(&maps).map(|(&v, m)| m.unbox(v)).collect();
    let f0 = objective(&y0);
    if !f0.is_finite() {
        return Err(Error::NonFinite("objective is not finite at the initial point".into()));
    }

    let mut start = y0;
    let mut total = 0;
    let mut run = nelder_mead(&mut objective, &start, opts, opts.max_iter);
    total += run.iterations;
    for _ in 0..opts.restarts {
        if !run.converged || total >= opts.max_iter {
            break;
        }
        start = run.best.clone();
        run = nelder_mead(&mut objective, &start, opts, opts.max_iter - total);
        total += run.iterations;
    }
    let argmax = run.best.iter().zip(&maps).map(|(&y, m)| m.to_box(y)).collect();
    Ok(OptimResult {
        argmax,
        value: -run.value,
        converged: run.converged,
        iterations: total,
    })
}

struct Run {
    best: Vec<f64>,
    value: f64,
    converged: bool,
    iterations: usize,
}

fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    start: &[f64],
    opts: MaximizeOptions,
    budget: usize,
) -> Run {
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let dim = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    for i in 0..dim {
        let mut v = start.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut order: Vec<usize> = (0..=dim).collect();
    let mut iterations = 0;
    let mut converged = false;
    let mut centroid = vec![0.0; dim];
    let mut trial = vec![0.0; dim];
    let mut trial2 = vec![0.0; dim];

    while iterations < budget {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[dim];
        let diameter = simplex
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < opts.tol {
            converged = true;
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &k in &order[..dim] {
            for (c, v) in centroid.iter_mut().zip(&simplex[k]) {
                *c += v / dim as f64;
            }
        }
        let second_worst = values[order[dim - 1]];
        for i in 0..dim {
            trial[i] = centroid[i] + REFLECT * (centroid[i] - simplex[worst][i]);
        }
        let fr = f(&trial);
        if fr < values[best] {
            for i in 0..dim {
                trial2[i] = centroid[i] + EXPAND * (trial[i] - centroid[i]);
            }
            let fe = f(&trial2);
            if fe < fr {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = fe;
            } else {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = fr;
            }
            continue;
        }
        if fr < second_worst {
            simplex[worst].copy_from_slice(&trial);
            values[worst] = fr;
            continue;
        }
        // contraction, outside if the reflection improved on the worst
        let outside = fr < values[worst];
        for i in 0..dim {
            let towards = if outside { trial[i] } else { simplex[worst][i] };
            trial2[i] = centroid[i] + CONTRACT * (towards - centroid[i]);
        }
        let fc = f(&trial2);
        if fc < fr.min(values[worst]) {
            simplex[worst].copy_from_slice(&trial2);
            values[worst] = fc;
            continue;
        }
        let anchor = simplex[best].clone();
        for &k in &order[1..] {
            for i in 0..dim {
                simplex[k][i] = anchor[i] + SHRINK * (simplex[k][i] - anchor[i]);
            }
            values[k] = f(&simplex[k]);
        }
    }
    let best = (0..=dim)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    Run {
        best: simplex[best].clone(),
        value: values[best],
        converged,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn quadratic_bowl() {
        let f = |v: &[f64]| -(v[0] - 1.0).powi(2) - (v[1] - 2.0).powi(2);
        let r = maximize(f, &[0.0, 0.0], &[-INF, -INF], &[INF, INF]).unwrap();
        assert!(r.converged);
        assert!((r.argmax[0] - 1.0).abs() < 1e-6);
        assert!((r.argmax[1] - 2.0).abs() < 1e-6);
        assert!(r.value >= -5.0);
    }

    #[test]
    fn bounded_coordinates() {
        let f = |v: &[f64]| -(v[0] - 0.3).powi(2) - (v[1] - 4.0).powi(2);
        let r = maximize(f, &[0.9, 1.0], &[0.0, 0.0], &[1.0, INF]).unwrap();
        assert!(r.converged);
        assert!((r.argmax[0] - 0.3).abs() < 1e-6);
        assert!((r.argmax[1] - 4.0).abs() < 1e-6);
    }

    #[test]
    fn one_dimensional() {
        let r = maximize(|v: &[f64]| -(v[0] - 3.0).powi(2), &[1.0], &[0.0], &[INF]).unwrap();
        assert!(r.converged);
        assert!((r.argmax[0] - 3.0).abs() < 1e-6);
    }

    #[test]
    fn non_finite_at_init() {
        let err = maximize(|_: &[f64]| f64::NAN, &[1.0], &[0.0], &[INF]).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
        assert!(maximize(|_: &[f64]| 0.0, &[0.0], &[0.0], &[INF]).is_err());
    }

    #[test]
    fn iteration_cap() {
        let opts = MaximizeOptions {
            max_iter: 5,
            ..Default::default()
        };
        let f = |v: &[f64]| -(v[0] - 1.0).powi(2) - (v[1] - 2.0).powi(2);
        let r = maximize_with(f, &[0.0, 0.0], &[-INF, -INF], &[INF, INF], opts).unwrap();
        assert!(!r.converged);
        assert!(r.iterations <= 5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn concave_quadratics(
            cx in -5.0f64..5.0, cy in -5.0f64..5.0,
            a in 0.5f64..5.0, b in 0.5f64..5.0, c in -0.4f64..0.4,
            x0 in -9.0f64..9.0, y0 in -9.0f64..9.0,
        ) {
            // -(d' A d) with A = [[a, c√(ab)], [c√(ab), b]] positive definite
            let off = c * (a * b).sqrt();
            let f = |v: &[f64]| {
                let dx = v[0] - cx;
                let dy = v[1] - cy;
                -(a * dx * dx + 2.0 * off * dx * dy + b * dy * dy)
            };
            let r = maximize(f, &[x0, y0], &[-10.0, -10.0], &[10.0, 10.0]).unwrap();
            prop_assert!(r.converged);
            prop_assert!((r.argmax[0] - cx).abs() < 1e-6, "{:?}", r.argmax);
            prop_assert!((r.argmax[1] - cy).abs() < 1e-6, "{:?}", r.argmax);
        }
    }
}
