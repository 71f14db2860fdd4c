//! Momentum-representation amplitudes of the initial state and the λ → ∞
//! half-line limit of the evolution.
//!
//! Two amplitudes matter: the true p-representation of the ground state,
//! normalized to 1, and the "naive" kernel read off the Fourier-looking
//! integral of the infinite-expansion limit, whose norm is 2 — the integral
//! representation only holds on the half line, so the kernel is not the
//! momentum wavefunction.

use crate::model::ReducedUnits;
use crate::quad::{adaptive_simpson, adaptive_simpson_complex};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MomentumError {
    #[error("adaptive quadrature did not converge (cutoff {0}, tolerance {1})")]
    QuadratureFailed(f64, f64),
}

/// Switch radius (in units of p₀) around the apparent singularities ±p₀
/// inside which a 3-term Taylor expansion replaces the 0/0 quotient.
const TAYLOR_RADIUS: f64 = 1e-4;

/// `cos(πu/2)/(1−u²)`, analytic across u = ±1.
fn cos_kernel(u: f64) -> f64 {
    let ua = u.abs();
    if (ua - 1.0).abs() < TAYLOR_RADIUS {
        // u = ±(1+v): cos(πu/2) = −sin(πv/2)·sign-free, 1−u² = −v(2+v)
        let v = ua - 1.0;
        let w = FRAC_PI_2 * v;
        let series = FRAC_PI_2 * (1.0 - w * w / 6.0 + w.powi(4) / 120.0);
        series / (2.0 + v)
    } else {
        (FRAC_PI_2 * u).cos() / (1.0 - u * u)
    }
}

/// `sin(πu)/(1−u²)`, analytic across u = ±1 but odd in u.
fn sin_kernel(u: f64) -> f64 {
    let sign = if u < 0.0 { -1.0 } else { 1.0 };
    let ua = u.abs();
    if (ua - 1.0).abs() < TAYLOR_RADIUS {
        // sin(πu) = −sin(πv) at u = 1+v; 1−u² = −v(2+v)
        let v = ua - 1.0;
        let w = PI * v;
        let series = PI * (1.0 - w * w / 6.0 + w.powi(4) / 120.0);
        sign * series / (2.0 + v)
    } else {
        sign * (PI * ua).sin() / (1.0 - ua * ua)
    }
}

/// True momentum amplitude of the initial ground state,
/// `Φ(p, 0) = (1/π)·p₀^{3/2}·(1+e^{−iπp/p₀})/(p₀²−p²)`, evaluated at
/// `u = p/p₀`. Normalized to unity.
pub fn momentum_true(u: f64) -> Complex64 {
    let amp = 2.0 / (PI * ReducedUnits::P0.sqrt());
    amp * cos_kernel(u) * Complex64::from_polar(1.0, -FRAC_PI_2 * u)
}

/// Naive kernel of the half-line Fourier integral,
/// `Φ̃(p) = (2p₀^{3/2}/iπ)·sin(πp/p₀)/(p₀²−p²)`, at `u = p/p₀`. Odd in p,
/// real up to the global −i, and with squared norm 2 instead of 1.
pub fn momentum_naive(u: f64) -> Complex64 {
    let amp = 2.0 / (PI * ReducedUnits::P0.sqrt());
    Complex64::new(0.0, -amp * sin_kernel(u))
}

/// Quadrature cutoff (units of p₀) for the norm integrals.
const NORM_CUTOFF: f64 = 40.0;

/// Analytic bound-state tail `∫_K^∞ du/(u²−1)²` of the norm integrands
/// (their trigonometric factors average to 1/2).
fn norm_tail(k: f64) -> f64 {
    0.25 * (1.0 / (k - 1.0) + 1.0 / (k + 1.0) - ((k + 1.0) / (k - 1.0)).ln())
}

/// `∫|Φ(p,0)|² dp` by adaptive quadrature over |p| ≤ 40 p₀ plus the
/// analytic tail. Comes out 1.
pub fn norm_true() -> f64 {
    let integrand = |u: f64| {
        let h = cos_kernel(u);
        4.0 / (PI * PI) * h * h
    };
    let body = adaptive_simpson(&integrand, -NORM_CUTOFF, NORM_CUTOFF, 1e-10)
        .expect("smooth integrand on a finite interval");
    body + 2.0 * (2.0 / (PI * PI)) * norm_tail(NORM_CUTOFF)
}

/// `∫|Φ̃(p)|² dp`: equals 2, not 1 — the reductio against reading the
/// half-line kernel as a momentum wavefunction.
pub fn norm_naive() -> f64 {
    let integrand = |u: f64| {
        let g = sin_kernel(u);
        4.0 / (PI * PI) * g * g
    };
    let body = adaptive_simpson(&integrand, -NORM_CUTOFF, NORM_CUTOFF, 1e-10)
        .expect("smooth integrand on a finite interval");
    body + 2.0 * (2.0 / (PI * PI)) * norm_tail(NORM_CUTOFF)
}

/// `sin(k)/(k² − π²)`, analytic across k = ±π.
fn halfline_kernel(k: f64) -> f64 {
    let sign = if k < 0.0 { -1.0 } else { 1.0 };
    let ka = k.abs();
    if (ka - PI).abs() < 1e-4 {
        let v = ka - PI;
        let series = 1.0 - v * v / 6.0 + v.powi(4) / 120.0;
        sign * -series / (2.0 * PI + v)
    } else {
        sign * ka.sin() / (ka * ka - PI * PI)
    }
}

/// Free evolution on the half line from the initial ground-state arch
/// (ħ = m = a = 1):
///
/// `Ψ(x, t) = i√2 ∫_{−K}^{K} sin(k)/(k²−π²) · e^{ikx} e^{−ik²t/2} dk`
///
/// This is the λ → ∞ limit of the boxed series (the mode sum becomes a
/// Darboux sum in n/λ). The denominator zeros are apparent and handled by a
/// local series; `cutoff` is K and must be large enough for the oscillatory
/// tail to be negligible at the requested accuracy.
pub fn halfline_wavefunction(x: f64, t: f64, cutoff: f64) -> Result<Complex64, MomentumError> {
    debug_assert!(x >= 0.0 && t >= 0.0);
    let tol = 1e-9;
    let integrand = |k: f64| {
        let phase = Complex64::from_polar(1.0, k * x - 0.5 * k * k * t);
        Complex64::new(0.0, SQRT_2) * halfline_kernel(k) * phase
    };
    // resolve the fastest local phase |x − kt| + 1 before the error estimate
    // may accept a panel
    let max_freq = x + cutoff * t + 1.0;
    let panels = (2.0 * cutoff * max_freq / 3.0).max(64.0);
    let min_depth = (panels.log2().ceil() as u32).clamp(6, 18);
    adaptive_simpson_complex(&integrand, -cutoff, cutoff, tol, min_depth)
        .ok_or(MomentumError::QuadratureFailed(cutoff, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::evaluate_wavefunction;
    use crate::model::{make_model, reduce_time, SpatialGrid};
    use crate::quad::trapezoid;
    use crate::spectral::build_spectral_set;

    #[test]
    fn true_amplitude_at_zero() {
        let want = 2.0 / (PI * PI.sqrt());
        let got = momentum_true(0.0);
        assert!((got.re - want).abs() < 1e-14 && got.im.abs() < 1e-15);
    }

    #[test]
    fn true_amplitude_conjugate_symmetry_and_decay() {
        for u in [0.3, 0.999, 1.0001, 2.7, 14.0] {
            let plus = momentum_true(u);
            let minus = momentum_true(-u);
            assert!((minus - plus.conj()).norm() < 1e-14);
        }
        for u in [5.0, 10.0, 30.0] {
            // |Φ| decays like p⁻², so u²·|Φ| stays bounded
            assert!(u * u * momentum_true(u).norm() < 1.0);
        }
    }

    #[test]
    fn naive_amplitude_is_odd_and_zero_at_origin() {
        assert_eq!(momentum_naive(0.0).norm(), 0.0);
        for u in [0.4, 1.0, 3.3] {
            let a = momentum_naive(u);
            let b = momentum_naive(-u);
            assert!((a + b).norm() < 1e-14);
            // real-valued up to the constant phase −i
            assert_eq!(a.re, 0.0);
        }
    }

    #[test]
    fn norms_one_and_two() {
        assert!((norm_true() - 1.0).abs() < 1e-6, "{}", norm_true());
        assert!((norm_naive() - 2.0).abs() < 1e-6, "{}", norm_naive());
    }

    #[test]
    fn difference_smooth_across_apparent_singularity() {
        // both amplitudes are finite and slowly varying through |p| = p₀
        let mut prev: Option<Complex64> = None;
        let mut u = 0.995;
        while u <= 1.005 {
            let d = momentum_true(u) - momentum_naive(u);
            assert!(d.norm() < 1.0);
            if let Some(p) = prev {
                assert!((d - p).norm() < 1e-2, "kink near u={u}");
            }
            prev = Some(d);
            u += 1e-4;
        }
    }

    #[test]
    fn kernels_match_quotients_off_singularity() {
        for u in [0.5, 0.9, 1.1, 2.0] {
            assert!((cos_kernel(u) - (FRAC_PI_2 * u).cos() / (1.0 - u * u)).abs() < 1e-13);
            assert!((sin_kernel(u) - (PI * u).sin() / (1.0 - u * u)).abs() < 1e-13);
        }
        // continuity across the Taylor switch
        for base in [1.0 - TAYLOR_RADIUS, 1.0 + TAYLOR_RADIUS] {
            let inside = cos_kernel(base - 1e-9);
            let outside = cos_kernel(base + 1e-9);
            assert!((inside - outside).abs() < 1e-9);
        }
    }

    #[test]
    fn halfline_initial_condition() {
        let k = 2000.0;
        for (x, want) in [(0.25, SQRT_2 * (PI * 0.25).sin()), (0.5, SQRT_2), (1.5, 0.0)] {
            let v = halfline_wavefunction(x, 0.0, k).unwrap();
            assert!(
                (v.re - want).abs() < 1e-4 && v.im.abs() < 1e-4,
                "x={x}: {v}"
            );
        }
    }

    #[test]
    fn halfline_matches_wide_well_series() {
        // λ = 50 at the same physical time t = T₁: τ = π t /(4λ²) = 1/2500
        let t = ReducedUnits::T1;
        let lambda = 50.0;
        let model = make_model(lambda).unwrap();
        let set = build_spectral_set(&model, 1e-4).unwrap();
        let x = 0.5;
        let grid = SpatialGrid::new(vec![x]).unwrap();
        let tau = reduce_time(1, 2500).unwrap();
        assert!((tau.value() - ReducedUnits::tau_from_physical(t, lambda)).abs() < 1e-15);
        let series = evaluate_wavefunction(&set, &grid, tau).unwrap().values()[0];
        let integral = halfline_wavefunction(x, t, 60.0).unwrap();
        assert!(
            (series - integral).norm() < 1e-3,
            "series {series} vs integral {integral}"
        );
    }

    #[test]
    fn halfline_norm_conserved() {
        let t = 0.3;
        let k = 80.0;
        let n = 400;
        let x_max = 8.0;
        let xs: Vec<f64> = (0..=n).map(|i| x_max * i as f64 / n as f64).collect();
        let dens: Vec<f64> = xs
            .iter()
            .map(|&x| halfline_wavefunction(x, t, k).unwrap().norm_sqr())
            .collect();
        let total = trapezoid(&xs, &dens);
        assert!((total - 1.0).abs() < 1e-3, "norm {total}");
    }
}
