//! Small quadrature helpers: adaptive Simpson for smooth (possibly
//! oscillatory) integrands and trapezoid sums over explicit grids.

use num_complex::Complex64;

/// Adaptive Simpson on `[a, b]` with absolute tolerance `tol` and a default
/// minimum refinement depth of 8 (256 panels before the error estimate may
/// accept — guards against sampling grids that alias an oscillation).
///
/// Returns `None` when the recursion depth cap is hit before the local error
/// estimate falls below the tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Option<f64> {
    adaptive_simpson_depth(f, a, b, tol, 8)
}

/// Adaptive Simpson with an explicit minimum refinement depth; pick
/// `min_depth` so that `(b−a)/2^min_depth` resolves the fastest oscillation.
pub fn adaptive_simpson_depth<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    min_depth: u32,
) -> Option<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 52, min_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    force: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if force == 0 && delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let nf = force.saturating_sub(1);
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, nf)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, nf)?;
    Some(l + r)
}

/// Adaptive Simpson for a complex integrand (real and imaginary parts share
/// the subdivision, the error estimate uses the complex modulus).
pub fn adaptive_simpson_complex<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    min_depth: u32,
) -> Option<Complex64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (fa + 4.0 * fm + fb) * ((b - a) / 6.0);
    simpson_step_complex(f, a, b, fa, fm, fb, whole, tol, 52, min_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step_complex<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
    force: u32,
) -> Option<Complex64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (fa + 4.0 * flm + fm) * ((m - a) / 6.0);
    let right = (fm + 4.0 * frm + fb) * ((b - m) / 6.0);
    let delta = left + right - whole;
    if force == 0 && delta.norm() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let nf = force.saturating_sub(1);
    let l = simpson_step_complex(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, nf)?;
    let r = simpson_step_complex(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, nf)?;
    Some(l + r)
}

/// Trapezoid sum of samples `y` over grid `x` (arbitrary spacing).
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for i in 1..x.len() {
        acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    }
    acc
}
