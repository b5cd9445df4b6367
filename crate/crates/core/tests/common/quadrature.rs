//! Adaptive Simpson quadrature, used as an independent normalization oracle.

fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, a, m);
    let right = simpson(fm, frm, fb, m, b);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    refine(&f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 50)
}

/// Integral of a density on `(0, inf)` via `x = exp(y)`, over `y` within
/// `half_width` log-space standard deviations of `center`.
pub fn integrate_positive_axis<F: Fn(f64) -> f64>(
    density: F,
    center: f64,
    log_sd: f64,
    half_width: f64,
) -> f64 {
    let lo = center - half_width * log_sd;
    let hi = center + half_width * log_sd;
    adaptive_simpson(|y| density(y.exp()) * y.exp(), lo, hi, 1e-13)
}

#[test]
fn simpson_integrates_known_functions() {
    let v = adaptive_simpson(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-13);
    assert!((v - 2.0).abs() < 1e-11);
    let v = adaptive_simpson(|x| (-x * x).exp(), -10.0, 10.0, 1e-13);
    assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-11);
}
