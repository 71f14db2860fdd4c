//! Truncated Gauss-series evaluation of the post-quench wavefunction,
//! density and probability current, with exact rational-time phases.
//!
//! Pairing the ±n modes of the two-sided expansion gives, in reduced units,
//!
//! `√a·Ψ(ξ, τ) = (2√2·λ/π) Σ_{n≥1} sin(nπ/λ)·sin(nπξ/λ)/(λ²−n²) · e^{−2πi n² τ}`
//!
//! The spatial sines advance by a two-term recurrence resynchronized in
//! blocks, and for τ = p/q the quadratic phase is an exact table lookup at
//! index `n²·p mod q`, so no phase drift accumulates even at n ~ 10⁷.

use crate::model::{RationalTime, SpatialGrid};
use crate::spectral::SpectralSet;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EvolutionError {
    #[error("grid point {0} lies outside the well [0, {1}]")]
    PointOutsideWell(f64, f64),
    #[error("real-time phases support n_max ≤ {0} (n² must stay exact), got {1}")]
    RealTimeTruncation(usize, usize),
}

/// Evolution time: an exact fraction of the period or a plain real τ.
///
/// The real path reduces τ mod 1 and computes `frac(n²τ)` with a
/// compensated two-product split; it is documented as the lower-accuracy
/// path (~1e-15 cycles of phase error instead of none).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeSpec {
    Rational(RationalTime),
    Real(f64),
}

impl TimeSpec {
    pub fn value(&self) -> f64 {
        match self {
            TimeSpec::Rational(t) => t.value(),
            TimeSpec::Real(t) => t.rem_euclid(1.0),
        }
    }
}

impl From<RationalTime> for TimeSpec {
    fn from(t: RationalTime) -> Self {
        TimeSpec::Rational(t)
    }
}

impl From<f64> for TimeSpec {
    fn from(t: f64) -> Self {
        TimeSpec::Real(t)
    }
}

/// Gibbs damping for the term-wise derivative series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothing {
    None,
    /// Lanczos σ-factors `sinc(n/n_max)` on the derivative terms.
    Sigma,
}

/// Sampled complex wavefunction `√a·Ψ(ξ, τ)` with its certified sup-norm
/// truncation bound.
#[derive(Debug, Clone)]
pub struct WaveField {
    grid: SpatialGrid,
    values: Vec<Complex64>,
    time: TimeSpec,
    lambda: f64,
    error_bound: f64,
}

impl WaveField {
    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn time(&self) -> TimeSpec {
        self.time
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn error_bound(&self) -> f64 {
        self.error_bound
    }

    /// Trapezoid estimate of ‖Ψ‖² over the grid.
    pub fn norm_squared(&self) -> f64 {
        let dens: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        crate::quad::trapezoid(self.grid.points(), &dens)
    }
}

/// Sampled dimensionless density `a·ρ`.
#[derive(Debug, Clone)]
pub struct DensityProfile {
    grid: SpatialGrid,
    values: Vec<f64>,
    time: TimeSpec,
    lambda: f64,
    error_bound: f64,
}

impl DensityProfile {
    pub fn new(
        grid: SpatialGrid,
        values: Vec<f64>,
        time: TimeSpec,
        lambda: f64,
        error_bound: f64,
    ) -> Self {
        assert_eq!(grid.len(), values.len());
        DensityProfile {
            grid,
            values,
            time,
            lambda,
            error_bound,
        }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self) -> TimeSpec {
        self.time
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Pointwise bound on the density error implied by the field bound.
    pub fn error_bound(&self) -> f64 {
        self.error_bound
    }

    /// Trapezoid estimate of ∫ a·ρ dξ (→ 1).
    pub fn integral(&self) -> f64 {
        crate::quad::trapezoid(self.grid.points(), &self.values)
    }
}

/// Sampled dimensionless current `ĵ = j·m a²/(πħ)`.
///
/// At rational times the true current is piecewise constant in ξ; truncated
/// values ring near the jumps, so downstream comparisons should use interval
/// medians rather than pointwise values there.
#[derive(Debug, Clone)]
pub struct CurrentProfile {
    grid: SpatialGrid,
    values: Vec<f64>,
    time: TimeSpec,
    lambda: f64,
    smoothing: Smoothing,
    piecewise_constant_expected: bool,
}

impl CurrentProfile {
    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self) -> TimeSpec {
        self.time
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn smoothing(&self) -> Smoothing {
        self.smoothing
    }

    pub fn piecewise_constant_expected(&self) -> bool {
        self.piecewise_constant_expected
    }

    /// Median of the sampled values with ξ strictly inside `(lo, hi)`.
    pub fn interval_median(&self, lo: f64, hi: f64) -> Option<f64> {
        let mut vals: Vec<f64> = self
            .grid
            .points()
            .iter()
            .zip(&self.values)
            .filter(|(x, _)| **x > lo && **x < hi)
            .map(|(_, v)| *v)
            .collect();
        if vals.is_empty() {
            return None;
        }
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Some(vals[vals.len() / 2])
    }
}

// ---------------------------------------------------------------------------
// phases and weights

/// n² must stay exactly representable for the compensated real-τ product.
const REAL_TIME_N_CAP: usize = 94_906_265;

enum Phases {
    /// q-th roots of unity; term n uses index (n²·p) mod q.
    Table { roots: Vec<Complex64>, p: u64, q: u64 },
    Real { tau: f64 },
}

impl Phases {
    fn new(time: TimeSpec) -> Phases {
        match time {
            TimeSpec::Rational(t) => {
                let q = t.denominator();
                let roots = (0..q)
                    .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / q as f64))
                    .collect();
                Phases::Table {
                    roots,
                    p: t.numerator(),
                    q,
                }
            }
            TimeSpec::Real(t) => Phases::Real {
                tau: t.rem_euclid(1.0),
            },
        }
    }

    #[inline]
    fn phase(&self, n: u64) -> Complex64 {
        match self {
            Phases::Table { roots, p, q } => {
                let r = n % q;
                let idx = ((r as u128 * r as u128 % *q as u128) * *p as u128 % *q as u128) as usize;
                roots[idx]
            }
            Phases::Real { tau } => {
                // exact split of n²·τ: hi + lo with lo = fma(n², τ, −hi)
                let m = (n * n) as f64;
                let hi = m * *tau;
                let lo = f64::mul_add(m, *tau, -hi);
                let cycles = (hi - hi.floor() + lo).rem_euclid(1.0);
                Complex64::from_polar(1.0, -2.0 * PI * cycles)
            }
        }
    }
}

/// Resynchronize the sine recurrences every this many terms.
const RESYNC: usize = 1024;

/// Complex weights `w_n = (2√2λ/π)·sin(nπ/λ)/(λ²−n²)·e^{−2πi n² τ}` for
/// n = 1..=n_max, as separate re/im streams.
fn build_weights(lambda: f64, n_max: usize, time: TimeSpec) -> (Vec<f64>, Vec<f64>) {
    let phases = Phases::new(time);
    let prefactor = 2.0 * std::f64::consts::SQRT_2 * lambda / PI;
    let theta = PI / lambda;
    let two_cos = 2.0 * theta.cos();
    let l2 = lambda * lambda;
    let mut w_re = vec![0.0; n_max];
    let mut w_im = vec![0.0; n_max];
    let mut n = 1usize;
    while n <= n_max {
        let end = (n + RESYNC - 1).min(n_max);
        let mut s_prev = ((n - 1) as f64 * theta).sin();
        let mut s = (n as f64 * theta).sin();
        for k in n..=end {
            let kf = k as f64;
            let amp = prefactor * s / (l2 - kf * kf);
            let ph = phases.phase(k as u64);
            w_re[k - 1] = amp * ph.re;
            w_im[k - 1] = amp * ph.im;
            let next = two_cos * s - s_prev;
            s_prev = s;
            s = next;
        }
        n = end + 1;
    }
    // the mode resonant with an integer-adjacent λ needs the gap form:
    // sin(nπ/λ) and λ²−n² both vanish linearly in gap = λ−n
    let n0 = lambda.round();
    let gap = lambda - n0;
    if n0 >= 1.0 && (n0 as usize) <= n_max && gap.abs() < 1e-3 {
        let k = n0 as usize;
        let amp = if gap.abs() < crate::spectral::EPS_INT {
            // c_n → 1/√n; weight = c_n·√(2/λ)
            (2.0 / lambda).sqrt() / n0.sqrt()
        } else {
            prefactor * (PI * gap / lambda).sin() / (gap * (lambda + n0))
        };
        let ph = phases.phase(k as u64);
        w_re[k - 1] = amp * ph.re;
        w_im[k - 1] = amp * ph.im;
    }
    (w_re, w_im)
}

/// Derivative-term factors `(nπ/λ)·σ_n` applied on top of `w`.
fn derivative_factors(lambda: f64, n_max: usize, smoothing: Smoothing) -> Vec<f64> {
    let base = PI / lambda;
    (1..=n_max)
        .map(|n| {
            let nf = n as f64;
            let sigma = match smoothing {
                Smoothing::None => 1.0,
                Smoothing::Sigma => {
                    let x = PI * nf / n_max as f64;
                    if x == 0.0 {
                        1.0
                    } else {
                        x.sin() / x
                    }
                }
            };
            base * nf * sigma
        })
        .collect()
}

// ---------------------------------------------------------------------------
// summation kernel

const LANES: usize = 8;

#[inline]
fn kahan_add(sum: &mut f64, carry: &mut f64, x: f64) {
    let y = x - *carry;
    let t = *sum + y;
    *carry = (t - *sum) - y;
    *sum = t;
}

/// Accumulate Σ w_n·sin(nθ) (and, with `DERIV`, Σ w_n·d_n·cos(nθ)) for up to
/// LANES grid points at once. Lane-major inner loops autovectorize; the
/// recurrences are resynchronized from libm sines every RESYNC terms.
fn sum_lanes<const DERIV: bool>(
    thetas: &[f64],
    w_re: &[f64],
    w_im: &[f64],
    d_fac: &[f64],
    out_val: &mut [Complex64],
    out_der: &mut [Complex64],
) {
    let n_max = w_re.len();
    let active = thetas.len();
    let mut theta = [0.0f64; LANES];
    theta[..active].copy_from_slice(thetas);
    let mut two_cos = [0.0f64; LANES];
    for j in 0..LANES {
        two_cos[j] = 2.0 * theta[j].cos();
    }

    let mut acc = [[0.0f64; LANES]; 4]; // val re, val im, der re, der im
    let mut car = [[0.0f64; LANES]; 4];

    let mut n = 1usize;
    let mut s_prev = [0.0f64; LANES];
    let mut s = [0.0f64; LANES];
    let mut c_prev = [0.0f64; LANES];
    let mut c = [0.0f64; LANES];
    while n <= n_max {
        let end = (n + RESYNC - 1).min(n_max);
        for j in 0..LANES {
            let t0 = (n - 1) as f64 * theta[j];
            let t1 = n as f64 * theta[j];
            s_prev[j] = t0.sin();
            s[j] = t1.sin();
            if DERIV {
                c_prev[j] = t0.cos();
                c[j] = t1.cos();
            }
        }
        let mut blk = [[0.0f64; LANES]; 4];
        let wr = &w_re[n - 1..end];
        let wi = &w_im[n - 1..end];
        if DERIV {
            let df = &d_fac[n - 1..end];
            for ((&wr_n, &wi_n), &d_n) in wr.iter().zip(wi).zip(df) {
                for j in 0..LANES {
                    blk[0][j] += wr_n * s[j];
                    blk[1][j] += wi_n * s[j];
                    blk[2][j] += wr_n * d_n * c[j];
                    blk[3][j] += wi_n * d_n * c[j];
                    let sn = two_cos[j] * s[j] - s_prev[j];
                    s_prev[j] = s[j];
                    s[j] = sn;
                    let cn = two_cos[j] * c[j] - c_prev[j];
                    c_prev[j] = c[j];
                    c[j] = cn;
                }
            }
        } else {
            for (&wr_n, &wi_n) in wr.iter().zip(wi) {
                for j in 0..LANES {
                    blk[0][j] += wr_n * s[j];
                    blk[1][j] += wi_n * s[j];
                    let sn = two_cos[j] * s[j] - s_prev[j];
                    s_prev[j] = s[j];
                    s[j] = sn;
                }
            }
        }
        for k in 0..4 {
            for j in 0..LANES {
                kahan_add(&mut acc[k][j], &mut car[k][j], blk[k][j]);
            }
        }
        n = end + 1;
    }

    for j in 0..active {
        out_val[j] = Complex64::new(acc[0][j], acc[1][j]);
        if DERIV {
            out_der[j] = Complex64::new(acc[2][j], acc[3][j]);
        }
    }
}

fn check_grid(grid: &SpatialGrid, lambda: f64) -> Result<(), EvolutionError> {
    let hi = lambda * (1.0 + 1e-12);
    for &x in grid.points() {
        if !(0.0..=hi).contains(&x) {
            return Err(EvolutionError::PointOutsideWell(x, lambda));
        }
    }
    Ok(())
}

fn check_time(time: TimeSpec, n_max: usize) -> Result<(), EvolutionError> {
    if matches!(time, TimeSpec::Real(_)) && n_max > REAL_TIME_N_CAP {
        return Err(EvolutionError::RealTimeTruncation(REAL_TIME_N_CAP, n_max));
    }
    Ok(())
}

fn evaluate_impl(
    set: &SpectralSet,
    grid: &SpatialGrid,
    time: TimeSpec,
    deriv: Option<Smoothing>,
) -> Result<(Vec<Complex64>, Vec<Complex64>), EvolutionError> {
    let lambda = set.lambda();
    check_grid(grid, lambda)?;
    check_time(time, set.n_max())?;
    let (w_re, w_im) = build_weights(lambda, set.n_max(), time);
    let d_fac = match deriv {
        Some(s) => derivative_factors(lambda, set.n_max(), s),
        None => Vec::new(),
    };
    let points = grid.points();
    let n_pts = points.len();
    let mut values = vec![Complex64::default(); n_pts];
    let mut derivs = vec![Complex64::default(); if deriv.is_some() { n_pts } else { 0 }];

    let scale = PI / lambda;
    let theta: Vec<f64> = points.iter().map(|x| scale * x).collect();
    if deriv.is_some() {
        values
            .par_chunks_mut(LANES)
            .zip(derivs.par_chunks_mut(LANES))
            .zip(theta.par_chunks(LANES))
            .for_each(|((v, d), t)| sum_lanes::<true>(t, &w_re, &w_im, &d_fac, v, d));
    } else {
        values
            .par_chunks_mut(LANES)
            .zip(theta.par_chunks(LANES))
            .for_each(|(v, t)| {
                let mut dummy = [];
                sum_lanes::<false>(t, &w_re, &w_im, &d_fac, v, &mut dummy)
            });
    }
    Ok((values, derivs))
}

/// Evaluate `√a·Ψ` on the grid at the given time. The field's `error_bound`
/// is the spectral set's certified sup-norm tail bound.
pub fn evaluate_wavefunction(
    set: &SpectralSet,
    grid: &SpatialGrid,
    time: impl Into<TimeSpec>,
) -> Result<WaveField, EvolutionError> {
    let time = time.into();
    let (values, _) = evaluate_impl(set, grid, time, None)?;
    Ok(WaveField {
        grid: grid.clone(),
        values,
        time,
        lambda: set.lambda(),
        error_bound: set.tail_bound(),
    })
}

/// Pointwise density `a·ρ = |√a·Ψ|²`.
pub fn density(field: &WaveField) -> DensityProfile {
    let values: Vec<f64> = field.values.iter().map(|v| v.norm_sqr()).collect();
    let sup = field.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let e = field.error_bound;
    DensityProfile {
        grid: field.grid.clone(),
        values,
        time: field.time,
        lambda: field.lambda,
        error_bound: e * (2.0 * sup + e),
    }
}

/// Current from the term-wise derivative series,
/// `ĵ = (1/π)·Im[(√aΨ)* ∂_ξ(√aΨ)]`.
pub fn current(
    set: &SpectralSet,
    grid: &SpatialGrid,
    time: impl Into<TimeSpec>,
    smoothing: Smoothing,
) -> Result<CurrentProfile, EvolutionError> {
    let time = time.into();
    let (values, derivs) = evaluate_impl(set, grid, time, Some(smoothing))?;
    let current: Vec<f64> = values
        .iter()
        .zip(&derivs)
        .map(|(v, d)| (v.re * d.im - v.im * d.re) / PI)
        .collect();
    Ok(CurrentProfile {
        grid: grid.clone(),
        values: current,
        time,
        lambda: set.lambda(),
        smoothing,
        piecewise_constant_expected: true,
    })
}

/// Sup-norm deviations of the exact time-space symmetries of the evolution.
#[derive(Debug, Clone)]
pub struct SymmetryReport {
    /// `Ψ(ξ, τ+1/2) + Ψ(λ−ξ, τ)`
    pub half_period: f64,
    /// `Ψ(ξ, 1−τ) − Ψ*(ξ, τ)`
    pub conjugation: f64,
    /// `ρ(ξ, τ) − ρ(ξ, 1−τ)`
    pub density_time_reflection: f64,
    /// `ĵ(ξ, 1−τ) + ĵ(ξ, τ)`
    pub current_reversal: f64,
    /// `ρ(ξ, τ) − ρ(λ−ξ, τ)`, reported at quarter period only
    pub quarter_evenness: Option<f64>,
    /// `2 ×` the field truncation bound: every deviation should sit below it
    pub tolerance: f64,
}

impl SymmetryReport {
    pub fn max_deviation(&self) -> f64 {
        [
            self.half_period,
            self.conjugation,
            self.density_time_reflection,
            self.current_reversal,
            self.quarter_evenness.unwrap_or(0.0),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn all_within_tolerance(&self) -> bool {
        self.max_deviation() <= self.tolerance
    }
}

fn reflected_grid(grid: &SpatialGrid, lambda: f64) -> SpatialGrid {
    let mut pts: Vec<f64> = grid.points().iter().map(|x| lambda - x).collect();
    pts.reverse();
    // strictly decreasing input reversed is strictly increasing; clamp the
    // endpoints against rounding
    for p in pts.iter_mut() {
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    SpatialGrid::new(pts).expect("reflection preserves monotonicity")
}

/// Evaluate the series at the partner times/positions of each symmetry and
/// report sup-norm deviations over the grid.
pub fn check_symmetries(
    set: &SpectralSet,
    grid: &SpatialGrid,
    tau: RationalTime,
) -> Result<SymmetryReport, EvolutionError> {
    let lambda = set.lambda();
    let f_tau = evaluate_wavefunction(set, grid, tau)?;
    let f_half = evaluate_wavefunction(set, grid, tau.plus_half())?;
    let f_conj = evaluate_wavefunction(set, grid, tau.reflected())?;
    let rgrid = reflected_grid(grid, lambda);
    let f_refl = evaluate_wavefunction(set, &rgrid, tau)?;

    let n = grid.len();
    let mut half_period = 0.0f64;
    let mut conjugation = 0.0f64;
    let mut density_time_reflection = 0.0f64;
    for i in 0..n {
        let v = f_tau.values()[i];
        let mirrored = f_refl.values()[n - 1 - i];
        half_period = half_period.max((f_half.values()[i] + mirrored).norm());
        conjugation = conjugation.max((f_conj.values()[i] - v.conj()).norm());
        density_time_reflection =
            density_time_reflection.max((f_conj.values()[i].norm_sqr() - v.norm_sqr()).abs());
    }

    let j_tau = current(set, grid, tau, Smoothing::None)?;
    let j_refl = current(set, grid, tau.reflected(), Smoothing::None)?;
    let current_reversal = j_tau
        .values()
        .iter()
        .zip(j_refl.values())
        .map(|(a, b)| (a + b).abs())
        .fold(0.0, f64::max);

    let quarter = tau == crate::model::reduce_time(1, 4).unwrap()
        || tau == crate::model::reduce_time(3, 4).unwrap();
    let quarter_evenness = quarter.then(|| {
        (0..n)
            .map(|i| (f_tau.values()[i].norm_sqr() - f_refl.values()[n - 1 - i].norm_sqr()).abs())
            .fold(0.0, f64::max)
    });

    Ok(SymmetryReport {
        half_period,
        conjugation,
        density_time_reflection,
        current_reversal,
        quarter_evenness,
        tolerance: 2.0 * set.tail_bound(),
    })
}
