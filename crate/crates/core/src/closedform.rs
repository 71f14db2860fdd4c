//! Exact piecewise-trigonometric wavefunctions, densities and currents at
//! t = T/2, T/4, T/8, the five T/8 cusp abscissae, and the fragmented
//! density patterns above the critical expansion.
//!
//! Step-function products are normalized into explicit interval partitions
//! at construction time, so knot positions are exact, continuity is
//! checkable to roundoff and densities integrate in closed form.

use crate::evolution::{DensityProfile, TimeSpec, WaveField};
use crate::model::{SpatialGrid, WellModel};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ClosedFormError {
    #[error(
        "fragmentation requires lambda > 2^N = {threshold}; lambda = {lambda} is below the \
         critical expansion — evaluate the series instead"
    )]
    BelowThreshold { lambda: f64, threshold: f64 },
}

/// One contribution `amplitude · sin(freq·ξ + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigTerm {
    pub amplitude: Complex64,
    pub freq: f64,
    pub phase: f64,
}

impl TrigTerm {
    fn eval(&self, xi: f64) -> Complex64 {
        self.amplitude * (self.freq * xi + self.phase).sin()
    }

    fn eval_deriv(&self, xi: f64) -> Complex64 {
        self.amplitude * self.freq * (self.freq * xi + self.phase).cos()
    }
}

/// Half-open interval `(lo, hi]` (the first piece is closed at 0) carrying
/// the terms active there.
#[derive(Debug, Clone)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub terms: Vec<TrigTerm>,
}

/// Exact piecewise-trigonometric representation of `√a·Ψ(ξ)` at a fixed
/// remarkable time.
#[derive(Debug, Clone)]
pub struct PiecewiseTrig {
    lambda: f64,
    pieces: Vec<Piece>,
}

/// Term with an explicit support, before partitioning.
struct RawTerm {
    amplitude: Complex64,
    freq: f64,
    phase: f64,
    lo: f64,
    hi: f64,
}

fn dedup_knots(mut knots: Vec<f64>) -> Vec<f64> {
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    knots
}

impl PiecewiseTrig {
    fn assemble(lambda: f64, raw: Vec<RawTerm>) -> PiecewiseTrig {
        let mut knots = vec![0.0, lambda];
        for t in &raw {
            for k in [t.lo, t.hi] {
                if k > 1e-12 && k < lambda - 1e-12 {
                    knots.push(k);
                }
            }
        }
        let knots = dedup_knots(knots);
        let pieces = knots
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let terms = raw
                    .iter()
                    .filter(|t| t.lo < mid && mid < t.hi)
                    .map(|t| TrigTerm {
                        amplitude: t.amplitude,
                        freq: t.freq,
                        phase: t.phase,
                    })
                    .collect();
                Piece {
                    lo: w[0],
                    hi: w[1],
                    terms,
                }
            })
            .collect();
        PiecewiseTrig { lambda, pieces }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Interior knots (piece boundaries excluding the walls).
    pub fn knots(&self) -> Vec<f64> {
        self.pieces.iter().skip(1).map(|p| p.lo).collect()
    }

    fn piece_index(&self, xi: f64) -> usize {
        // (lo, hi] with the first piece closed at 0
        let mut idx = self
            .pieces
            .partition_point(|p| p.hi < xi)
            .min(self.pieces.len() - 1);
        if xi <= self.pieces[idx].lo && idx > 0 {
            idx -= 1;
        }
        idx
    }

    /// Evaluate `√a·Ψ` (0 outside the well).
    pub fn eval(&self, xi: f64) -> Complex64 {
        if !(0.0..=self.lambda).contains(&xi) {
            return Complex64::default();
        }
        self.pieces[self.piece_index(xi)]
            .terms
            .iter()
            .map(|t| t.eval(xi))
            .sum()
    }

    /// Derivative within a piece (the function is continuous across knots,
    /// its derivative generally is not).
    pub fn eval_deriv(&self, xi: f64) -> Complex64 {
        if !(0.0..=self.lambda).contains(&xi) {
            return Complex64::default();
        }
        self.pieces[self.piece_index(xi)]
            .terms
            .iter()
            .map(|t| t.eval_deriv(xi))
            .sum()
    }

    /// `|ψ'(knot⁻) − ψ'(knot⁺)|` at each interior knot. A cusp of the
    /// density needs a nonzero jump here (and a nonvanishing ψ).
    pub fn knot_derivative_jumps(&self) -> Vec<(f64, f64)> {
        self.pieces
            .windows(2)
            .map(|w| {
                let x = w[1].lo;
                let left: Complex64 = w[0].terms.iter().map(|t| t.eval_deriv(x)).sum();
                let right: Complex64 = w[1].terms.iter().map(|t| t.eval_deriv(x)).sum();
                (x, (left - right).norm())
            })
            .collect()
    }

    /// Largest |left − right| mismatch over the interior knots.
    pub fn max_knot_jump(&self) -> f64 {
        self.pieces
            .windows(2)
            .map(|w| {
                let x = w[1].lo;
                let left: Complex64 = w[0].terms.iter().map(|t| t.eval(x)).sum();
                let right: Complex64 = w[1].terms.iter().map(|t| t.eval(x)).sum();
                (left - right).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Symbolic density `a·ρ = |√a·Ψ|²` as a piecewise constant-plus-cosines
    /// form (exactly integrable).
    pub fn density(&self) -> PiecewiseReal {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let mut rp = RealPiece::new(p.lo, p.hi);
                for (j, a) in p.terms.iter().enumerate() {
                    rp.constant += 0.5 * a.amplitude.norm_sqr();
                    rp.add_cos(
                        -0.5 * a.amplitude.norm_sqr(),
                        2.0 * a.freq,
                        2.0 * a.phase,
                    );
                    for b in &p.terms[j + 1..] {
                        let w = (a.amplitude * b.amplitude.conj()).re;
                        rp.add_cos(w, a.freq - b.freq, a.phase - b.phase);
                        rp.add_cos(-w, a.freq + b.freq, a.phase + b.phase);
                    }
                }
                rp
            })
            .collect();
        PiecewiseReal {
            lambda: self.lambda,
            pieces,
        }
    }

    /// Sup-norm of `√a·Ψ_series − √a·Ψ_closed` over the field's grid.
    pub fn max_field_deviation(&self, field: &WaveField) -> f64 {
        field
            .grid()
            .points()
            .iter()
            .zip(field.values())
            .map(|(&x, v)| (v - self.eval(x)).norm())
            .fold(0.0, f64::max)
    }
}

/// One interval of a real piecewise profile: `constant + Σ a·cos(fξ + φ)`.
#[derive(Debug, Clone)]
pub struct RealPiece {
    pub lo: f64,
    pub hi: f64,
    pub constant: f64,
    pub cosines: Vec<(f64, f64, f64)>,
}

impl RealPiece {
    fn new(lo: f64, hi: f64) -> Self {
        RealPiece {
            lo,
            hi,
            constant: 0.0,
            cosines: Vec::new(),
        }
    }

    fn add_cos(&mut self, amp: f64, freq: f64, phase: f64) {
        if amp == 0.0 {
            return;
        }
        if freq.abs() < 1e-14 {
            self.constant += amp * phase.cos();
        } else if freq < 0.0 {
            self.cosines.push((amp, -freq, -phase));
        } else {
            self.cosines.push((amp, freq, phase));
        }
    }

    fn eval(&self, xi: f64) -> f64 {
        self.constant
            + self
                .cosines
                .iter()
                .map(|(a, f, p)| a * (f * xi + p).cos())
                .sum::<f64>()
    }

    /// Exact antiderivative difference over the piece.
    fn integral(&self) -> f64 {
        let mut acc = self.constant * (self.hi - self.lo);
        for (a, f, p) in &self.cosines {
            acc += a / f * ((f * self.hi + p).sin() - (f * self.lo + p).sin());
        }
        acc
    }
}

/// Real-valued piecewise profile (densities and piecewise-constant
/// currents), exactly evaluable and integrable.
#[derive(Debug, Clone)]
pub struct PiecewiseReal {
    lambda: f64,
    pieces: Vec<RealPiece>,
}

impl PiecewiseReal {
    fn from_constants(lambda: f64, knots: Vec<f64>, values: impl Fn(f64) -> f64) -> Self {
        let knots = dedup_knots(knots);
        let pieces = knots
            .windows(2)
            .map(|w| {
                let mut p = RealPiece::new(w[0], w[1]);
                p.constant = values(0.5 * (w[0] + w[1]));
                p
            })
            .collect();
        PiecewiseReal { lambda, pieces }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn pieces(&self) -> &[RealPiece] {
        &self.pieces
    }

    pub fn knots(&self) -> Vec<f64> {
        self.pieces.iter().skip(1).map(|p| p.lo).collect()
    }

    pub fn eval(&self, xi: f64) -> f64 {
        if !(0.0..=self.lambda).contains(&xi) {
            return 0.0;
        }
        let mut idx = self
            .pieces
            .partition_point(|p| p.hi < xi)
            .min(self.pieces.len() - 1);
        if xi <= self.pieces[idx].lo && idx > 0 {
            idx -= 1;
        }
        self.pieces[idx].eval(xi)
    }

    /// Exact integral over `[0, λ]`.
    pub fn integral(&self) -> f64 {
        self.pieces.iter().map(|p| p.integral()).sum()
    }

    pub fn sample(&self, grid: &SpatialGrid) -> Vec<f64> {
        grid.points().iter().map(|&x| self.eval(x)).collect()
    }

    /// Package exact samples as a density profile (zero error bound).
    pub fn to_density_profile(&self, grid: &SpatialGrid, time: TimeSpec) -> DensityProfile {
        DensityProfile::new(grid.clone(), self.sample(grid), time, self.lambda, 0.0)
    }
}

// ---------------------------------------------------------------------------
// snapshots

/// `Ψ(ξ, T/2) = −Ψ(λ−ξ, 0)`: the initial sine arch reflected to the far
/// wall with flipped sign. Support `[λ−1, λ]`.
pub fn psi_half(model: &WellModel) -> PiecewiseTrig {
    let lambda = model.lambda();
    PiecewiseTrig::assemble(
        lambda,
        vec![RawTerm {
            amplitude: Complex64::new(-SQRT_2, 0.0),
            freq: -PI,
            phase: PI * lambda,
            lo: lambda - 1.0,
            hi: lambda,
        }],
    )
}

/// `√a·Ψ(ξ, T/4) = e^{−iπ/4}θ(1−ξ)sin πξ − e^{iπ/4}θ(ξ−(λ−1))sin π(λ−ξ)`.
pub fn psi_quarter(model: &WellModel) -> PiecewiseTrig {
    let lambda = model.lambda();
    PiecewiseTrig::assemble(
        lambda,
        vec![
            RawTerm {
                amplitude: Complex64::from_polar(1.0, -FRAC_PI_4),
                freq: PI,
                phase: 0.0,
                lo: 0.0,
                hi: 1.0,
            },
            RawTerm {
                amplitude: -Complex64::from_polar(1.0, FRAC_PI_4),
                freq: -PI,
                phase: PI * lambda,
                lo: lambda - 1.0,
                hi: lambda,
            },
        ],
    )
}

/// Density at T/4: `θ(1−ξ)sin²πξ + θ(ξ−(λ−1))sin²π(λ−ξ)` — the two branch
/// cases (overlap for λ < 2, disjoint clones for λ > 2) fall out of the
/// partition.
pub fn density_quarter(model: &WellModel) -> PiecewiseReal {
    psi_quarter(model).density()
}

/// Current at T/4: `ĵ = sin(πλ)` on the overlap `(λ−1, 1)`, zero elsewhere
/// (identically zero once λ ≥ 2).
pub fn current_quarter(model: &WellModel) -> PiecewiseReal {
    let lambda = model.lambda();
    let j = (PI * lambda).sin();
    let knots = vec![0.0, lambda - 1.0, 1.0_f64.min(lambda), lambda];
    PiecewiseReal::from_constants(lambda, knots, move |xi| {
        if xi > lambda - 1.0 && xi < 1.0 {
            j
        } else {
            0.0
        }
    })
}

/// `√(2a)·Ψ(ξ, T/8)` assembled from its two half-well branches plus the
/// quarter-period pair; stored scaled to the `√a·Ψ` convention.
pub fn psi_eighth(model: &WellModel) -> PiecewiseTrig {
    let lambda = model.lambda();
    let h = lambda / 2.0;
    let real = |x: f64| Complex64::new(x, 0.0);
    let s = 1.0 / SQRT_2;
    let e4 = Complex64::from_polar(s, -FRAC_PI_4);
    let raw = vec![
        // ξ < λ/2 branch
        RawTerm {
            amplitude: real(s),
            freq: PI,
            phase: PI * h,
            lo: 0.0,
            hi: 1.0 - h,
        },
        RawTerm {
            amplitude: real(s),
            freq: PI,
            phase: -PI * h,
            lo: (h - 1.0).max(0.0),
            hi: h,
        },
        // ξ > λ/2 branch
        RawTerm {
            amplitude: real(s),
            freq: PI,
            phase: -PI * h,
            lo: h,
            hi: (1.0 + h).min(lambda),
        },
        RawTerm {
            amplitude: real(s),
            freq: PI,
            phase: -3.0 * PI * h,
            lo: 3.0 * h - 1.0,
            hi: lambda,
        },
        // quarter-period pair, common to both branches
        RawTerm {
            amplitude: e4,
            freq: PI,
            phase: 0.0,
            lo: 0.0,
            hi: 1.0,
        },
        RawTerm {
            amplitude: -e4,
            freq: PI,
            phase: -PI * lambda,
            lo: lambda - 1.0,
            hi: lambda,
        },
    ];
    let raw = raw.into_iter().filter(|t| t.hi > t.lo + 1e-12).collect();
    PiecewiseTrig::assemble(lambda, raw)
}

/// Density at T/8 (five-interval form for λ = 3/2).
pub fn density_eighth(model: &WellModel) -> PiecewiseReal {
    psi_eighth(model).density()
}

fn theta(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Current at T/8:
/// `ĵ = (1/2√2)·[c₁±(ξ)·sin(πλ/2) + c₃±(ξ)·sin(3πλ/2)]`, with the step-
/// function products `c_{r±}` switching at λ/2. Piecewise constant; zero
/// everywhere once λ > 4.
pub fn current_eighth(model: &WellModel) -> PiecewiseReal {
    let lambda = model.lambda();
    let h = lambda / 2.0;
    let s1 = (PI * h).sin();
    let s3 = (3.0 * PI * h).sin();
    let value = move |xi: f64| {
        let (c1, c3) = if xi < h {
            let c1 = theta(1.0 - xi) * (-theta(1.0 - h - xi) + theta(1.0 - h + xi))
                + theta(1.0 - h + xi) * theta(1.0 - lambda + xi);
            let c3 = theta(1.0 - lambda + xi) * theta(1.0 - h - xi);
            (c1, c3)
        } else {
            let c1 = theta(1.0 + h - xi) * (theta(1.0 - xi) + theta(1.0 - lambda + xi))
                - theta(1.0 - 3.0 * h + xi) * theta(1.0 - lambda + xi);
            let c3 = theta(1.0 - xi) * theta(1.0 - 3.0 * h + xi);
            (c1, c3)
        };
        (c1 * s1 + c3 * s3) / (2.0 * SQRT_2)
    };
    let knots: Vec<f64> = [
        0.0,
        lambda,
        h,
        1.0,
        1.0 - h,
        h - 1.0,
        lambda - 1.0,
        1.0 + h,
        3.0 * h - 1.0,
    ]
    .into_iter()
    .filter(|&k| (0.0..=lambda).contains(&k))
    .collect();
    PiecewiseReal::from_constants(lambda, knots, value)
}

/// The five cusp abscissae of the T/8 snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspSet {
    abscissae: [f64; 5],
    degenerate_pairs: Vec<(usize, usize)>,
}

impl CuspSet {
    /// In the source ordering x₁..x₅.
    pub fn abscissae(&self) -> &[f64; 5] {
        &self.abscissae
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.abscissae.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    /// Index pairs (into x₁..x₅) that coincide, e.g. both pairs at λ = 4.
    pub fn degenerate_pairs(&self) -> &[(usize, usize)] {
        &self.degenerate_pairs
    }
}

/// Cusp candidates `{1, |λ/2−1|, λ/2, x₄, λ−1}` with the branch
/// `x₄ = 3λ/2−1` below λ = 2 and `x₄ = 1+λ/2` above.
pub fn cusp_abscissae_eighth(model: &WellModel) -> CuspSet {
    let lambda = model.lambda();
    let x4 = if lambda < 2.0 {
        1.5 * lambda - 1.0
    } else {
        1.0 + 0.5 * lambda
    };
    let abscissae = [
        1.0,
        (0.5 * lambda - 1.0).abs(),
        0.5 * lambda,
        x4,
        lambda - 1.0,
    ];
    let mut degenerate_pairs = Vec::new();
    for i in 0..5 {
        for j in i + 1..5 {
            if (abscissae[i] - abscissae[j]).abs() < 1e-12 {
                degenerate_pairs.push((i, j));
            }
        }
    }
    CuspSet {
        abscissae,
        degenerate_pairs,
    }
}

/// Fragmented density pattern at t = T/2^{N+1} for λ above the critical
/// expansion 2^N.
#[derive(Debug, Clone)]
pub struct FragmentedDensity {
    pub profile: PiecewiseReal,
    /// Centers of the 2^N unit-width peaks, in increasing order.
    pub peak_centers: Vec<f64>,
    /// True for N ≥ 3: the pattern is the numerically supported conjecture,
    /// proven only for N = 1, 2.
    pub conjecture: bool,
}

/// Build the predicted density at t = T/2^{N+1}: the elementary pattern
/// `2^{−N}[ρ₀(ξ) + ρ₀(λ/2^{N−1} − ξ)]` and its clones translated by
/// multiples of λ/2^{N−1}. Requires λ > 2^N.
pub fn fragmented_density(model: &WellModel, n: u32) -> Result<FragmentedDensity, ClosedFormError> {
    assert!(n >= 1, "fragmentation order starts at N = 1 (t = T/4)");
    let lambda = model.lambda();
    let threshold = (1u64 << n) as f64;
    if lambda <= threshold {
        return Err(ClosedFormError::BelowThreshold { lambda, threshold });
    }
    let cells = 1usize << (n - 1);
    let cell_width = lambda / cells as f64;
    let weight = 1.0 / threshold;
    // peak supports [s, s+1]; ρ₀(u) = 1 − cos 2πu
    let mut starts = Vec::with_capacity(2 * cells);
    for k in 0..cells {
        let base = k as f64 * cell_width;
        starts.push(base);
        starts.push(base + cell_width - 1.0);
    }
    let mut knots = vec![0.0, lambda];
    for &s in &starts {
        knots.push(s);
        knots.push(s + 1.0);
    }
    let knots = dedup_knots(knots.into_iter().filter(|&k| (0.0..=lambda).contains(&k)).collect());
    let pieces = knots
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let mut p = RealPiece::new(w[0], w[1]);
            for &s in &starts {
                if mid > s && mid < s + 1.0 {
                    p.constant += weight;
                    p.add_cos(-weight, 2.0 * PI, -2.0 * PI * s);
                }
            }
            p
        })
        .collect();
    let mut peak_centers: Vec<f64> = starts.iter().map(|s| s + 0.5).collect();
    peak_centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(FragmentedDensity {
        profile: PiecewiseReal {
            lambda,
            pieces,
        },
        peak_centers,
        conjecture: n >= 3,
    })
}
