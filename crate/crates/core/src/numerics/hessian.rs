//! Central-difference Hessians.

use crate::error::{invalid, Error, Result};

/// Per-coordinate default step `max(1e-5, 1e-4 |θ_i|)`.
pub fn default_steps(point: &[f64]) -> Vec<f64> {
    point.iter().map(|v| (1e-4 * v.abs()).max(1e-5)).collect()
}

/// Hessian of `f` at `point` with a common step.
pub fn hessian_fd<F: FnMut(&[f64]) -> f64>(f: F, point: &[f64], step: f64) -> Result<Vec<Vec<f64>>> {
    hessian_fd_with_steps(f, point, &vec![step; point.len()])
}

/// Hessian of `f` at `point` by central second differences, returned
/// symmetrised as `(H + Hᵀ) / 2`.
pub fn hessian_fd_with_steps<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    point: &[f64],
    steps: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let k = point.len();
    if steps.len() != k {
        return Err(invalid("one step per coordinate is required"));
    }
    if steps.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
        return Err(invalid("finite-difference steps must be positive"));
    }
    let mut x = point.to_vec();
    let mut eval = |x: &[f64]| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("f({x:?}) = {v} inside the difference stencil")))
        }
    };
    let f0 = eval(&x)?;
    let mut h = vec![vec![0.0; k]; k];
    for i in 0..k {
        let hi = steps[i];
        x[i] = point[i] + hi;
        let fp = eval(&x)?;
        x[i] = point[i] - hi;
        let fm = eval(&x)?;
        x[i] = point[i];
        h[i][i] = (fp - 2.0 * f0 + fm) / (hi * hi);
        for j in 0..i {
            let hj = steps[j];
            let mut corner = |si: f64, sj: f64| -> Result<f64> {
                x[i] = point[i] + si * hi;
                x[j] = point[j] + sj * hj;
                let v = eval(&x);
                x[i] = point[i];
                x[j] = point[j];
                v
            };
            let pp = corner(1.0, 1.0)?;
            let pm = corner(1.0, -1.0)?;
            let mp = corner(-1.0, 1.0)?;
            let mm = corner(-1.0, -1.0)?;
            let v = (pp - pm - mp + mm) / (4.0 * hi * hj);
            h[i][j] = v;
            h[j][i] = v;
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn diagonal_quadratic() {
        let h = hessian_fd(|v: &[f64]| -(v[0] * v[0] + 3.0 * v[1] * v[1]) / 2.0, &[0.0, 0.0], 1e-4).unwrap();
        assert!((h[0][0] + 1.0).abs() < 1e-5);
        assert!((h[1][1] + 3.0).abs() < 1e-5);
        assert!(h[0][1].abs() < 1e-5);
    }

    #[test]
    fn quartic() {
        // d²/dx² (-x⁴) = -12x² = -12 at x = 1
        let h = hessian_fd(|v: &[f64]| -v[0].powi(4), &[1.0], 1e-4).unwrap();
        assert!((h[0][0] + 12.0).abs() < 1e-3);
    }

    #[test]
    fn non_finite_in_stencil() {
        let err = hessian_fd(|v: &[f64]| v[0].ln(), &[1e-6], 1e-5).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
        assert!(hessian_fd(|v: &[f64]| v[0], &[1.0], 0.0).is_err());
    }

    #[test]
    fn default_step_rule() {
        assert_eq!(default_steps(&[0.0, 0.5, 20.0]), vec![1e-5, 5e-5, 2e-3]);
    }

    proptest! {
        // Quadratic forms ½(x-c)ᵀA(x-c) evaluated at their centre, where the
        // objective itself is zero and rounding stays at the O(h²) scale.
        #[test]
        fn quadratic_forms_are_exact(
            a in -4.0f64..4.0, b in -4.0f64..4.0, d in -4.0f64..4.0,
            cx in -3.0f64..3.0, cy in -3.0f64..3.0,
            log_step in -6.0f64..-3.0,
        ) {
            let step = 10f64.powf(log_step);
            let f = |v: &[f64]| {
                let (dx, dy) = (v[0] - cx, v[1] - cy);
                0.5 * (a * dx * dx + 2.0 * b * dx * dy + d * dy * dy)
            };
            let h = hessian_fd(f, &[cx, cy], step).unwrap();
            let close = |got: f64, want: f64| (got - want).abs() <= 1e-6 * want.abs().max(1.0);
            prop_assert!(close(h[0][0], a), "{} vs {}", h[0][0], a);
            prop_assert!(close(h[1][1], d), "{} vs {}", h[1][1], d);
            prop_assert!(close(h[0][1], b), "{} vs {}", h[0][1], b);
            prop_assert_eq!(h[0][1], h[1][0]);
        }
    }
}
