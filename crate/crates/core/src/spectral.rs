//! Expansion coefficients of the post-quench state, measurement statistics,
//! and the G-function sum rules (norm and mean energy).

use crate::model::WellModel;
use std::f64::consts::{PI, SQRT_2};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error("lambda = {0} is an integer: pole of the two-sided mode sum")]
    IntegerLambda(f64),
    #[error("tolerance requires n_max = {0}, above the supported cap {1}")]
    TruncationTooLarge(usize, usize),
}

/// Switch radius around integer λ inside which `coefficient` returns the
/// analytic limit 1/√n; the generic formula is a 0/0 there.
pub const EPS_INT: f64 = 1e-9;

/// Radius around integer λ inside which the coefficient is evaluated from
/// the gap ε = λ − n directly. The generic formula loses ~|λ−n|⁻¹ digits to
/// cancellation in both sin(nπ/λ) and λ² − n².
const NEAR_INT: f64 = 1e-3;

/// Largest supported truncation order (keeps coefficient storage bounded).
const N_MAX_CAP: usize = 100_000_000;

/// Overlap coefficient `c_n = (2λ^{3/2}/π) · sin(nπ/λ)/(λ² − n²)` of the
/// initial ground state on mode `n` of the expanded well, with the integer-λ
/// indetermination resolved to the limit `1/√n`.
pub fn coefficient(lambda: f64, n: usize) -> f64 {
    debug_assert!(n >= 1);
    let nf = n as f64;
    let prefactor = 2.0 * lambda.powf(1.5) / PI;
    let gap = lambda - nf;
    if gap.abs() < EPS_INT {
        return 1.0 / nf.sqrt();
    }
    if gap.abs() < NEAR_INT {
        // n is the integer nearest λ: nπ/λ = π − π·gap/λ and λ²−n² = gap(λ+n)
        return prefactor * (PI * gap / lambda).sin() / (gap * (lambda + nf));
    }
    prefactor * (nf * PI / lambda).sin() / (lambda * lambda - nf * nf)
}

/// Eigenenergy of mode `n` of the expanded well in units of E₁: `n²/λ²`.
pub fn eigenenergy(model: &WellModel, n: usize) -> f64 {
    let nf = n as f64;
    nf * nf / (model.lambda() * model.lambda())
}

/// Truncated coefficient list with a certified sup-norm bound on the
/// discarded wavefunction tail (units of a^{-1/2}).
#[derive(Debug, Clone)]
pub struct SpectralSet {
    lambda: f64,
    n_max: usize,
    coefficients: Vec<f64>,
    tail_bound: f64,
}

impl SpectralSet {
    /// Explicit truncation order; the stored tail bound is the integral
    /// bound evaluated at that order (may exceed 1 for tiny n_max ≤ λ).
    pub fn with_n_max(model: &WellModel, n_max: usize) -> SpectralSet {
        let n_max = n_max.max(1);
        let lambda = model.lambda();
        let coefficients = (1..=n_max).map(|n| coefficient(lambda, n)).collect();
        let tail_bound = if n_max as f64 > lambda {
            sup_tail_bound(lambda, n_max)
        } else {
            f64::INFINITY
        };
        SpectralSet {
            lambda,
            n_max,
            coefficients,
            tail_bound,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `c_n` for n = 1..=n_max (index 0 is n = 1).
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Partial norm Σ c_n² over the retained modes (≤ 1, → 1 as n_max → ∞).
    pub fn norm_partial(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }
}

/// Sup-norm bound on the discarded tail `√(2/a)·(2λ/π)·Σ_{n>N} 1/(n²−λ²)`,
/// by comparison with `∫_N^∞ dx/(x²−λ²)`:
/// `tail(N) = (√2/π)·ln((N+λ)/(N−λ))`, valid for N > λ.
fn sup_tail_bound(lambda: f64, n_max: usize) -> f64 {
    let n = n_max as f64;
    SQRT_2 / PI * ((n + lambda) / (n - lambda)).ln()
}

/// Build the smallest truncation `n_max > λ` whose certified tail bound is
/// at most `epsilon`.
pub fn build_spectral_set(model: &WellModel, epsilon: f64) -> Result<SpectralSet, SpectralError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(SpectralError::InvalidEpsilon(epsilon));
    }
    let lambda = model.lambda();
    let floor = lambda.floor() as usize + 1;
    // tail(N) ≤ ε  ⇔  N ≥ λ/tanh(πε/(2√2))
    let beta = PI * epsilon / SQRT_2;
    let target = lambda / (0.5 * beta).tanh();
    if !target.is_finite() || target > N_MAX_CAP as f64 {
        return Err(SpectralError::TruncationTooLarge(
            target as usize,
            N_MAX_CAP,
        ));
    }
    let mut n_max = (target.floor() as usize).max(floor);
    while sup_tail_bound(lambda, n_max) > epsilon {
        n_max += 1;
    }
    while n_max > floor && sup_tail_bound(lambda, n_max - 1) <= epsilon {
        n_max -= 1;
    }
    Ok(SpectralSet::with_n_max(model, n_max))
}

/// Probabilities `P_n = c_n²` of finding eigenenergy `E_{λ,n}` when the
/// energy is measured at any t > 0.
#[derive(Debug, Clone)]
pub struct MeasurementDistribution {
    probabilities: Vec<f64>,
    partial_sum: f64,
}

impl MeasurementDistribution {
    /// `P_n` for n = 1..=n_max (index 0 is n = 1).
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn partial_sum(&self) -> f64 {
        self.partial_sum
    }

    /// Index n (1-based) of the most probable measured level.
    pub fn argmax(&self) -> usize {
        self.probabilities
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i + 1)
            .unwrap_or(1)
    }
}

/// Measurement distribution `P_n = (4λ³/π²)·sin²(nπ/λ)/(λ²−n²)²` with the
/// integer-λ limit `P_{n₀} = 1/n₀`.
pub fn measurement_distribution(model: &WellModel, n_max: usize) -> MeasurementDistribution {
    let lambda = model.lambda();
    let probabilities: Vec<f64> = (1..=n_max.max(1))
        .map(|n| {
            let c = coefficient(lambda, n);
            c * c
        })
        .collect();
    let partial_sum = probabilities.iter().sum();
    MeasurementDistribution {
        probabilities,
        partial_sum,
    }
}

/// Number of oscillatory tail terms summed directly in `mean_energy`.
const OSC_TAIL_TERMS: usize = 2_000_000;

/// Mean energy `Σ P_n E_{λ,n}` in units of E₁, with an analytic estimate of
/// the `n > n_max` tail. Equals 1 for every λ (no work is done by the
/// expansion).
///
/// The tail terms behave as `(4λ/π²)·sin²(nπ/λ)/n²`, too slow to truncate
/// bluntly; the monotone half is replaced by a midpoint integral and the
/// oscillatory half summed far enough that its Dirichlet remainder is
/// negligible.
pub fn mean_energy(set: &SpectralSet) -> f64 {
    let lambda = set.lambda;
    let inv_l2 = 1.0 / (lambda * lambda);
    let direct: f64 = set
        .coefficients
        .iter()
        .zip(1..)
        .map(|(c, n)| c * c * (n as f64) * (n as f64) * inv_l2)
        .sum();

    // Σ_{n>N} P_n·n²/λ² = (2λ/π²)[ Σ n²/(n²−λ²)² − Σ n²cos(2nπ/λ)/(n²−λ²)² ]
    let n0 = set.n_max;
    let mono = {
        // midpoint-rule integral of x²/(x²−λ²)² from N+1/2
        let x = n0 as f64 + 0.5;
        x / (2.0 * (x * x - lambda * lambda)) + ((x + lambda) / (x - lambda)).ln() / (4.0 * lambda)
    };
    let theta = 2.0 * PI / lambda;
    let mut osc = 0.0;
    for n in (n0 + 1)..=(n0 + OSC_TAIL_TERMS) {
        let nf = n as f64;
        let d = nf * nf - lambda * lambda;
        osc += nf * nf * (theta * nf).cos() / (d * d);
    }
    direct + 2.0 * lambda / (PI * PI) * (mono - osc)
}

/// Partial sums `S(N) = Σ_{n≤N} P_n (n²/λ²)²` of the (divergent) second
/// energy moment, at N = n_max/4, n_max/2, n_max. Their linear growth
/// (S(2N)/S(N) → 2) exhibits the infinite energy variance.
pub fn second_moment_partial(set: &SpectralSet) -> Vec<(usize, f64)> {
    let lambda = set.lambda;
    let inv_l2 = 1.0 / (lambda * lambda);
    let cuts = [set.n_max / 4, set.n_max / 2, set.n_max];
    let mut out = Vec::with_capacity(3);
    let mut acc = 0.0;
    let mut next = 0;
    for (i, c) in set.coefficients.iter().enumerate() {
        let n = (i + 1) as f64;
        let e = n * n * inv_l2;
        acc += c * c * e * e;
        while next < cuts.len() && i + 1 == cuts[next] {
            out.push((cuts[next], acc));
            next += 1;
        }
    }
    out
}

/// Evaluation mode for [`g_function`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GMode {
    /// Symmetric partial sum over |n| ≤ N (including the n = 0 term 1/λ²).
    Series(usize),
    /// Closed form `π·cos(λ(2|φ|−π))/(λ·sin πλ)` on the reduced branch.
    Closed,
}

fn is_integer(lambda: f64) -> bool {
    lambda == lambda.round()
}

/// Reduce φ to [0, π/2] using the even π-periodicity of G.
fn reduce_phi(phi: f64) -> f64 {
    let mut p = phi.abs() % PI;
    if p > 0.5 * PI {
        p = PI - p;
    }
    p
}

/// The two-sided mode sum `G(λ, φ) = Σ_{n∈ℤ} e^{2inφ}/(λ²−n²)`, either as a
/// symmetric partial sum or through its closed form.
///
/// Integer λ is a pole of the sum itself (and of 1/sin πλ in the closed
/// form) and is rejected in both modes.
pub fn g_function(lambda: f64, phi: f64, mode: GMode) -> Result<f64, SpectralError> {
    if is_integer(lambda) {
        return Err(SpectralError::IntegerLambda(lambda));
    }
    match mode {
        GMode::Series(n_terms) => {
            let l2 = lambda * lambda;
            let mut acc = 1.0 / l2;
            for n in 1..=n_terms {
                let nf = n as f64;
                acc += 2.0 * (2.0 * nf * phi).cos() / (l2 - nf * nf);
            }
            Ok(acc)
        }
        GMode::Closed => {
            let p = reduce_phi(phi);
            Ok(PI * (lambda * (2.0 * p - PI)).cos() / (lambda * (PI * lambda).sin()))
        }
    }
}

/// ∂G/∂λ at fixed φ, from the closed form. Valid for φ ∈ [0, π]: the
/// literal expression is invariant under φ ↦ π − φ, matching G itself.
fn g_dlambda_closed(lambda: f64, phi: f64) -> f64 {
    let w = 2.0 * phi - PI;
    let u = (lambda * w).cos();
    let du = -w * (lambda * w).sin();
    let s = (PI * lambda).sin();
    let v = lambda * s;
    let dv = s + PI * lambda * (PI * lambda).cos();
    PI * (du * v - u * dv) / (v * v)
}

/// Norm and mean energy (units of E₁) from the λ-derivative of the closed
/// G form, hand-differentiated:
///
/// `‖Ψ‖² = −(λ²/2π²)·∂_λ[G(λ,0) − G(λ,φ)]|_{φ=π/λ}`
///
/// `⟨H⟩/E₁ = −(λ/π²)·[G(λ,0) − G(λ,π/λ)] + ‖Ψ‖²`
///
/// The bracket in the energy relation vanishes identically (it is
/// proportional to the initial wavefunction at the old wall), so both
/// returned values equal 1 up to floating error.
pub fn norm_and_energy_via_g(lambda: f64) -> Result<(f64, f64), SpectralError> {
    if is_integer(lambda) {
        return Err(SpectralError::IntegerLambda(lambda));
    }
    let phi = PI / lambda;
    let d0 = g_dlambda_closed(lambda, 0.0);
    let d1 = g_dlambda_closed(lambda, phi);
    let norm = -lambda * lambda / (2.0 * PI * PI) * (d0 - d1);
    let g0 = g_function(lambda, 0.0, GMode::Closed)?;
    let g1 = g_function(lambda, phi, GMode::Closed)?;
    let energy = -lambda / (PI * PI) * (g0 - g1) + norm;
    Ok((norm, energy))
}
