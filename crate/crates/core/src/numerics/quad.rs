//! Adaptive Gauss-Kronrod (7/15) quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: u32 = 60;
const MAX_SEGMENTS: usize = 20_000;

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct State {
    segments: usize,
    non_finite: bool,
}

fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: (f64, f64),
    tol: f64,
    depth: u32,
    state: &mut State,
) -> f64 {
    let (value, err) = whole;
    state.segments += 1;
    if !value.is_finite() {
        state.non_finite = true;
        return value;
    }
    if err <= tol || depth >= MAX_DEPTH || state.segments >= MAX_SEGMENTS || b - a <= f64::EPSILON * a.abs().max(b.abs()) {
        return value;
    }
    let mid = 0.5 * (a + b);
    let left = gk15(f, a, mid);
    let right = gk15(f, mid, b);
    // accept the refinement when the two halves agree with the parent
    let refined = left.0 + right.0;
    if left.1 + right.1 <= tol && (refined - value).abs() <= 10.0 * tol.max(f64::EPSILON * refined.abs()) {
        return refined;
    }
    adapt(f, a, mid, left, 0.5 * tol, depth + 1, state)
        + adapt(f, mid, b, right, 0.5 * tol, depth + 1, state)
}

/// Integrates `f` over the finite interval `[a, b]` to the requested
/// relative tolerance (an absolute floor of `1e-300` applies).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite(format!("integration bounds [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, rel_tol).map(|v| -v);
    }
    let first = gk15(&f, a, b);
    // a coarse pass over 8 panels gives a scale for the tolerance
    let mut scale = 0.0;
    let width = (b - a) / 8.0;
    for k in 0..8 {
        let lo = a + width * k as f64;
        scale += gk15(&f, lo, lo + width).0.abs();
    }
    let tol = (rel_tol * scale.max(first.0.abs())).max(1e-300);
    let mut state = State {
        segments: 0,
        non_finite: false,
    };
    let value = adapt(&f, a, b, first, tol, 0, &mut state);
    if state.non_finite || !value.is_finite() {
        return Err(Error::NonFinite("integrand produced a non-finite value".into()));
    }
    Ok(value)
}

/// Integrates `f` over `[a, ∞)` through the map `x = a + v / (1 - v)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, rel_tol: f64) -> Result<f64> {
    let g = |v: f64| {
        if v >= 1.0 {
            return 0.0;
        }
        let w = 1.0 - v;
        let y = f(a + v / w) / (w * w);
        if y.is_finite() {
            y
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, rel_tol)
}
