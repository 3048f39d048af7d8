//! Adaptive Simpson quadrature, used to cross-check the Q-function based
//! BER expressions against direct integration of the Gaussian density.

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

/// Integral of `f` over `[a, b]` to roughly absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    refine(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// `P(lo < Y <= hi)` for `Y ~ N(mean, variance)`, integrating the density.
/// Infinite limits are cut 40 standard deviations from the mean.
pub fn gaussian_interval(mean: f64, variance: f64, lo: f64, hi: f64) -> f64 {
    let sd = variance.sqrt();
    let lo = lo.max(mean - 40.0 * sd);
    let hi = hi.min(mean + 40.0 * sd);
    if lo >= hi {
        return 0.0;
    }
    let norm = 1.0 / (2.0 * std::f64::consts::PI * variance).sqrt();
    let pdf = |y: f64| norm * (-(y - mean) * (y - mean) / (2.0 * variance)).exp();
    // split at the mean so the peak is always a node
    if lo < mean && mean < hi {
        adaptive_simpson(pdf, lo, mean, 1e-15) + adaptive_simpson(pdf, mean, hi, 1e-15)
    } else {
        adaptive_simpson(pdf, lo, hi, 1e-15)
    }
}
