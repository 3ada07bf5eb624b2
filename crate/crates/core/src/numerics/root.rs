//! Bracketed scalar root finding (Brent's bisection / secant / inverse
//! quadratic hybrid).

use crate::error::{invalid, Error, Result};

/// Largest upper end reached by geometric bracket expansion.
pub const MAX_EXPANDED_HI: f64 = 1e6;
const MAX_ITER: usize = 1_000;

/// An interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(invalid(format!("bracket requires finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }
}

impl Default for Bracket {
    /// `(1e-6, 100]`: positive shape-like parameters.
    fn default() -> Self {
        Self { lo: 1e-6, hi: 100.0 }
    }
}

/// Finds a root of `f` inside `bracket`.
///
/// When `f(lo)` and `f(hi)` share a sign the upper end is doubled until a
/// sign change appears or it passes [`MAX_EXPANDED_HI`]. Iteration stops
/// once `|f(x)| <= tol * max(1, |f(lo)|, |f(hi)|)` or the bracket has shrunk
/// to machine resolution; `tol = 0` therefore solves to full precision.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, bracket: Bracket, tol: f64) -> Result<f64> {
    if !(tol >= 0.0) {
        return Err(invalid(format!("tolerance must be non-negative, got {tol}")));
    }
    let mut a = bracket.lo;
    let mut b = bracket.hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::NonFinite(format!("f is NaN at a bracket end ({a}, {b})")));
    }
    while fa.signum() == fb.signum() && fa != 0.0 && fb != 0.0 {
        if b >= MAX_EXPANDED_HI {
            return Err(Error::NoBracket { lo: bracket.lo, hi: b });
        }
        b = (2.0 * b).min(MAX_EXPANDED_HI);
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::NonFinite(format!("f is NaN at {b}")));
        }
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let ftol = tol * 1f64.max(fa.abs()).max(fb.abs());

    // Brent (1973), zeroin. `b` is the current best estimate, `c` the
    // previous contra-point so that f(b) and f(c) bracket the root.
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let xtol = 2.0 * f64::EPSILON * b.abs() + f64::MIN_POSITIVE;
        let m = 0.5 * (c - b);
        if fb.abs() <= ftol || m.abs() <= xtol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= xtol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic interpolation
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (xtol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > xtol { d } else { xtol.copysign(m) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::NonFinite(format!("f is NaN at {b}")));
        }
    }
    Err(Error::MaxIterations(MAX_ITER))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn linear_root() {
        let x = find_root(|x| x - 2.0, Bracket::new(0.0, 100.0).unwrap(), 1e-12).unwrap();
        assert!((x - 2.0).abs() < 1e-10);
    }

    #[test]
    fn sqrt_two() {
        let x = find_root(|x| x * x - 2.0, Bracket::new(0.0, 2.0).unwrap(), 0.0).unwrap();
        assert!((x - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn bracket_expansion() {
        let x = find_root(|x| x - 1234.5, Bracket::default(), 0.0).unwrap();
        assert!((x - 1234.5).abs() < 1e-9);
    }

    #[test]
    fn no_sign_change_fails() {
        let err = find_root(|x| x * x + 1.0, Bracket::default(), 1e-12).unwrap_err();
        assert!(matches!(err, Error::NoBracket { .. }));
    }

    #[test]
    fn invalid_bracket() {
        assert!(Bracket::new(1.0, 1.0).is_err());
        assert!(Bracket::new(2.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn polynomial_roots_meet_tolerance(
            roots in proptest::collection::vec(-3.0f64..3.0, 1..=5),
            scale in 0.1f64..10.0,
        ) {
            // odd-multiplicity root guaranteed at roots[0]: bracket just around it
            let f = |x: f64| scale * roots.iter().map(|r| x - r).product::<f64>();
            let lo = -3.5;
            let hi = 3.5;
            prop_assume!(f(lo).signum() != f(hi).signum());
            let tol = 1e-10;
            let x = find_root(f, Bracket::new(lo, hi).unwrap(), tol).unwrap();
            let scale_f = 1f64.max(f(lo).abs()).max(f(hi).abs());
            prop_assert!(f(x).abs() < tol * scale_f, "|f({})| = {}", x, f(x).abs());
        }
    }
}
