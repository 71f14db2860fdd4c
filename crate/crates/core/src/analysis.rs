//! Structure detection on sampled profiles (plateaux, cusps, fragments),
//! expectation-value traces, and the series-vs-closed-form comparison
//! harness.

use crate::closedform::ClosedFormError;
use crate::evolution::{evaluate_wavefunction, density, DensityProfile, EvolutionError};
use crate::model::{reduce_time, RationalTime, SpatialGrid, WellModel};
use crate::quad::trapezoid;
use crate::spectral::{build_spectral_set, mean_energy, SpectralError, SpectralSet};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("grid too coarse: step {step} exceeds min_width/20 = {required}")]
    UnderResolved { step: f64, required: f64 },
    #[error("profiles sampled on different grids")]
    GridMismatch,
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
}

/// Default spike threshold multiplier for the cusp detector.
pub const DEFAULT_CUSP_KAPPA: f64 = 20.0;

// ---------------------------------------------------------------------------
// plateaux

#[derive(Debug, Clone, PartialEq)]
pub struct Plateau {
    pub interval: (f64, f64),
    pub value: f64,
    pub max_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct PlateauReport {
    pub plateaux: Vec<Plateau>,
    pub tolerance: f64,
    pub min_width: f64,
}

impl PlateauReport {
    /// The detected plateau containing ξ, if any.
    pub fn covering(&self, xi: f64) -> Option<&Plateau> {
        self.plateaux
            .iter()
            .find(|p| p.interval.0 <= xi && xi <= p.interval.1)
    }
}

/// Maximal intervals on which the sampled values stay within `tol` of each
/// other, at least `min_width` wide. Adjacent qualifying windows are merged
/// greedily when the merged spread still fits the tolerance.
pub fn detect_plateaux(
    profile: &DensityProfile,
    tol: f64,
    min_width: f64,
) -> Result<PlateauReport, AnalysisError> {
    let step = profile.grid().max_step();
    if step > min_width / 20.0 {
        return Err(AnalysisError::UnderResolved {
            step,
            required: min_width / 20.0,
        });
    }
    let xs = profile.grid().points();
    let ys = profile.values();
    let n = xs.len();

    // two-pointer sweep with monotonic deques for window extrema
    let mut maxdq: std::collections::VecDeque<usize> = Default::default();
    let mut mindq: std::collections::VecDeque<usize> = Default::default();
    let mut windows: Vec<(usize, usize)> = Vec::new();
    let mut r = 0usize;
    let mut last_r = usize::MAX;
    for l in 0..n {
        if r < l {
            r = l;
            maxdq.clear();
            mindq.clear();
        }
        loop {
            // extend right while the spread including ys[r] stays within tol
            if r < n {
                let spread_ok = {
                    let hi = maxdq.front().map_or(ys[r], |&i| ys[i].max(ys[r]));
                    let lo = mindq.front().map_or(ys[r], |&i| ys[i].min(ys[r]));
                    hi - lo <= tol
                };
                if spread_ok {
                    while maxdq.back().is_some_and(|&i| ys[i] <= ys[r]) {
                        maxdq.pop_back();
                    }
                    maxdq.push_back(r);
                    while mindq.back().is_some_and(|&i| ys[i] >= ys[r]) {
                        mindq.pop_back();
                    }
                    mindq.push_back(r);
                    r += 1;
                    continue;
                }
            }
            break;
        }
        // window is [l, r-1]; record if it is maximal (extends the previous)
        if r > l && (last_r == usize::MAX || r - 1 > last_r) {
            windows.push((l, r - 1));
            last_r = r - 1;
        }
        if maxdq.front() == Some(&l) {
            maxdq.pop_front();
        }
        if mindq.front() == Some(&l) {
            mindq.pop_front();
        }
    }

    let spread = |a: usize, b: usize| -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &y in &ys[a..=b] {
            lo = lo.min(y);
            hi = hi.max(y);
        }
        hi - lo
    };

    // keep wide-enough windows, merging neighbours when allowed
    let mut merged: Vec<(usize, usize)> = Vec::new();
    for (a, b) in windows {
        if xs[b] - xs[a] < min_width {
            continue;
        }
        if let Some(&mut (pa, ref mut pb)) = merged.last_mut() {
            if a <= *pb + 1 {
                if spread(pa, b) <= tol {
                    *pb = b;
                    continue;
                } else if b <= *pb {
                    continue;
                }
            }
        }
        merged.push((a, b));
    }

    let plateaux = merged
        .into_iter()
        .map(|(a, b)| {
            let value = ys[a..=b].iter().sum::<f64>() / (b - a + 1) as f64;
            let max_deviation = ys[a..=b]
                .iter()
                .map(|y| (y - value).abs())
                .fold(0.0, f64::max);
            Plateau {
                interval: (xs[a], xs[b]),
                value,
                max_deviation,
            }
        })
        .collect();
    Ok(PlateauReport {
        plateaux,
        tolerance: tol,
        min_width,
    })
}

// ---------------------------------------------------------------------------
// cusps

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cusp {
    pub xi: f64,
    /// Half the local grid step.
    pub uncertainty: f64,
}

/// Find abscissae where the derivative of the density jumps: the centered
/// second difference spikes like (slope jump)/h there, far above the smooth
/// background ~h·ρ''. Points whose spike metric exceeds `kappa ×` the
/// background median are clustered and reported at the strongest sample.
pub fn detect_cusps(profile: &DensityProfile, kappa: f64) -> Vec<Cusp> {
    let xs = profile.grid().points();
    let ys = profile.values();
    let n = xs.len();
    if n < 5 {
        return Vec::new();
    }
    // spike metric |slope jump| ≈ |2nd divided difference| × local半 step
    let mut metric = vec![0.0f64; n];
    for i in 1..n - 1 {
        let hl = xs[i] - xs[i - 1];
        let hr = xs[i + 1] - xs[i];
        let d2 = 2.0 * ((ys[i + 1] - ys[i]) / hr - (ys[i] - ys[i - 1]) / hl) / (hl + hr);
        metric[i] = d2.abs() * 0.5 * (hl + hr);
    }
    let mut sorted: Vec<f64> = metric[1..n - 1].to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    let max = *sorted.last().unwrap();
    if max == 0.0 {
        return Vec::new();
    }
    let threshold = kappa * median.max(1e-3 * max);

    let mut cusps = Vec::new();
    let mut i = 1;
    while i < n - 1 {
        if metric[i] > threshold {
            let mut best = i;
            let mut j = i;
            while j < n - 1 && metric[j] > threshold {
                if metric[j] > metric[best] {
                    best = j;
                }
                j += 1;
            }
            let h = 0.5 * (xs[(best + 1).min(n - 1)] - xs[best.saturating_sub(1)]);
            cusps.push(Cusp {
                xi: xs[best],
                uncertainty: 0.5 * h,
            });
            i = j;
        } else {
            i += 1;
        }
    }
    cusps
}

// ---------------------------------------------------------------------------
// fragments

#[derive(Debug, Clone)]
pub struct Fragment {
    pub interval: (f64, f64),
    pub mass: f64,
    pub centroid: f64,
    /// Min-over-translations L² distance to the mass-scaled initial density.
    pub shape_distance: f64,
}

#[derive(Debug, Clone)]
pub struct FragmentReport {
    pub components: Vec<Fragment>,
    pub zero_tol: f64,
    pub total_mass: f64,
}

fn initial_density(u: f64) -> f64 {
    if (0.0..=1.0).contains(&u) {
        2.0 * (PI * u).sin().powi(2)
    } else {
        0.0
    }
}

/// Squared L² residual against a translated initial bump, with the
/// amplitude fit by least squares on the same quadrature weights (scaling
/// by the trapezoid mass instead would inject its own quadrature bias into
/// an exact-clone comparison).
fn shape_distance_sq(xs: &[f64], ys: &[f64], shift: f64) -> f64 {
    let g: Vec<f64> = xs.iter().map(|&x| initial_density(x - shift)).collect();
    let yg: Vec<f64> = ys.iter().zip(&g).map(|(y, gi)| y * gi).collect();
    let gg: Vec<f64> = g.iter().map(|gi| gi * gi).collect();
    let denom = trapezoid(xs, &gg);
    if denom == 0.0 {
        let yy: Vec<f64> = ys.iter().map(|y| y * y).collect();
        return trapezoid(xs, &yy);
    }
    let scale = trapezoid(xs, &yg) / denom;
    let diffs: Vec<f64> = ys
        .iter()
        .zip(&g)
        .map(|(y, gi)| {
            let d = y - scale * gi;
            d * d
        })
        .collect();
    trapezoid(xs, &diffs)
}

/// Connected support components of `{a·ρ > zero_tol}` with masses,
/// centroids, and the shape distance of each component to the initial
/// density scaled by the component mass.
pub fn detect_fragments(profile: &DensityProfile, zero_tol: f64) -> FragmentReport {
    let xs = profile.grid().points();
    let ys = profile.values();
    let n = xs.len();
    let mut components = Vec::new();
    let mut i = 0;
    while i < n {
        if ys[i] > zero_tol {
            let start = i;
            while i < n && ys[i] > zero_tol {
                i += 1;
            }
            let end = i - 1;
            if end - start < 2 {
                continue;
            }
            // include one sub-threshold neighbour each side so the tails of
            // the bump are integrated
            let a = start.saturating_sub(1);
            let b = (end + 1).min(n - 1);
            let seg_x = &xs[a..=b];
            let seg_y = &ys[a..=b];
            let mass = trapezoid(seg_x, seg_y);
            let weighted: Vec<f64> = seg_x.iter().zip(seg_y).map(|(x, y)| x * y).collect();
            let centroid = trapezoid(seg_x, &weighted) / mass;
            // align the scaled initial bump: centroid seed, golden refine
            let mut lo = centroid - 0.5 - profile.grid().max_step();
            let mut hi = centroid - 0.5 + profile.grid().max_step();
            let phi = 0.5 * (5f64.sqrt() - 1.0);
            let mut x1 = hi - phi * (hi - lo);
            let mut x2 = lo + phi * (hi - lo);
            let mut f1 = shape_distance_sq(seg_x, seg_y, x1);
            let mut f2 = shape_distance_sq(seg_x, seg_y, x2);
            for _ in 0..48 {
                if f1 < f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - phi * (hi - lo);
                    f1 = shape_distance_sq(seg_x, seg_y, x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + phi * (hi - lo);
                    f2 = shape_distance_sq(seg_x, seg_y, x2);
                }
            }
            components.push(Fragment {
                interval: (xs[start], xs[end]),
                mass,
                centroid,
                shape_distance: f1.min(f2).max(0.0).sqrt(),
            });
        } else {
            i += 1;
        }
    }
    let total_mass = components.iter().map(|c| c.mass).sum();
    FragmentReport {
        components,
        zero_tol,
        total_mass,
    }
}

/// Number of half-maximum crossings: maximal runs with `a·ρ > max/2`.
/// Touching bumps dip to zero between their maxima, so this counts peaks
/// even when supports are adjacent.
pub fn count_peaks(profile: &DensityProfile) -> usize {
    let ys = profile.values();
    let max = ys.iter().cloned().fold(0.0f64, f64::max);
    if max <= 0.0 {
        return 0;
    }
    let half = 0.5 * max;
    let mut count = 0;
    let mut inside = false;
    for &y in ys {
        if y > half && !inside {
            count += 1;
            inside = true;
        } else if y <= half {
            inside = false;
        }
    }
    count
}

/// Fragment scan of the series density at τ = p/M.
#[derive(Debug, Clone)]
pub struct ScanOutcome {
    pub tau: RationalTime,
    pub report: FragmentReport,
    pub peak_count: usize,
    /// Every component's shape matches the scaled initial density — the
    /// "complete fragmentation" state of the conjectures.
    pub complete: bool,
}

const SCAN_EPSILON: f64 = 1e-4;
const SCAN_ZERO_TOL: f64 = 1e-6;

/// Evaluate the series at τ = p/M and report components and peak count.
pub fn conjecture_scan(model: &WellModel, m: u64, p: u64) -> Result<ScanOutcome, AnalysisError> {
    let tau = reduce_time(p, m)?;
    let set = build_spectral_set(model, SCAN_EPSILON)?;
    let n_grid = (200.0 * model.lambda()).max(1200.0) as usize;
    let grid = SpatialGrid::uniform(model, n_grid);
    let field = evaluate_wavefunction(&set, &grid, tau)?;
    let dens = density(&field);
    let report = detect_fragments(&dens, SCAN_ZERO_TOL);
    let peak_count = count_peaks(&dens);
    let shape_tol = (10.0 * dens.error_bound()).max(1e-3);
    let complete = !report.components.is_empty()
        && report.components.iter().all(|c| c.shape_distance <= shape_tol)
        && report.components.len() == peak_count;
    Ok(ScanOutcome {
        tau,
        report,
        peak_count,
        complete,
    })
}

impl From<crate::model::ModelError> for AnalysisError {
    fn from(_: crate::model::ModelError) -> Self {
        AnalysisError::GridMismatch
    }
}

// ---------------------------------------------------------------------------
// expectations

/// Time traces of ⟨ξ⟩, ⟨p̂⟩ (units of p₀ = πħ/a), their spreads and the
/// uncertainty product in units of ħ.
#[derive(Debug, Clone)]
pub struct ExpectationTrace {
    pub taus: Vec<f64>,
    pub mean_xi: Vec<f64>,
    pub mean_p: Vec<f64>,
    pub delta_xi: Vec<f64>,
    pub delta_p: Vec<f64>,
    /// `Δx·Δp / ħ = π·Δξ·Δp̂`
    pub product_hbar: Vec<f64>,
}

impl ExpectationTrace {
    /// Spans of consecutive samples where the packet is at rest on average:
    /// ⟨ξ⟩ pinned at λ/2 and ⟨p̂⟩ ≈ 0 within `tol`.
    pub fn rest_spans(&self, lambda: f64, tol: f64) -> Vec<(f64, f64)> {
        let mut spans = Vec::new();
        let mut start: Option<usize> = None;
        for i in 0..self.taus.len() {
            let resting =
                (self.mean_xi[i] - 0.5 * lambda).abs() <= tol && self.mean_p[i].abs() <= tol;
            match (resting, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    if i - s >= 2 {
                        spans.push((self.taus[s], self.taus[i - 1]));
                    }
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            if self.taus.len() - s >= 2 {
                spans.push((self.taus[s], self.taus[self.taus.len() - 1]));
            }
        }
        spans
    }
}

/// Position/momentum moments from the exact double-sum matrix elements of
/// the mode basis (absolutely convergent in the truncation order; no
/// quadrature or Gibbs error). ⟨p̂²⟩ is diagonal and time-independent: it is
/// the mean energy in p₀² units, computed with its analytic tail.
///
/// Cost is O(n_max²) per sample; truncations of a few hundred modes reach
/// ~1e-8 already.
pub fn expectations(set: &SpectralSet, tau_samples: &[f64]) -> ExpectationTrace {
    let lambda = set.lambda();
    let c = set.coefficients();
    let m = c.len();
    let p_sq = mean_energy(set); // = ⟨p̂²⟩ in p₀² units

    // diagonal (time-independent) parts
    let norm: f64 = set.norm_partial();
    let mut xi_diag = 0.0;
    let mut xi2_diag = 0.0;
    for (i, cn) in c.iter().enumerate() {
        let nf = (i + 1) as f64;
        xi_diag += cn * cn * 0.5 * lambda;
        xi2_diag += cn * cn * lambda * lambda * (1.0 / 3.0 - 0.5 / (PI * PI * nf * nf));
    }

    let mut trace = ExpectationTrace {
        taus: tau_samples.to_vec(),
        mean_xi: Vec::with_capacity(tau_samples.len()),
        mean_p: Vec::with_capacity(tau_samples.len()),
        delta_xi: Vec::with_capacity(tau_samples.len()),
        delta_p: Vec::with_capacity(tau_samples.len()),
        product_hbar: Vec::with_capacity(tau_samples.len()),
    };

    let mut ang = vec![0.0f64; m + 1];
    for &tau in tau_samples {
        let t = tau.rem_euclid(1.0);
        for (n, a) in ang.iter_mut().enumerate() {
            // frac(n²τ) with an exact product split keeps phases accurate
            let sq = (n * n) as f64;
            let hi = sq * t;
            let lo = f64::mul_add(sq, t, -hi);
            *a = 2.0 * PI * ((hi - hi.floor() + lo).rem_euclid(1.0));
        }
        let mut xi = xi_diag;
        let mut xi2 = xi2_diag;
        let mut p = 0.0;
        for i in 0..m {
            let mi = (i + 1) as f64;
            for j in (i + 1)..m {
                let nj = (j + 1) as f64;
                let cc = c[i] * c[j];
                if cc == 0.0 {
                    continue;
                }
                let dphi = ang[i + 1] - ang[j + 1];
                let dm = mi - nj;
                let sm = mi + nj;
                let parity_odd = ((i + 1) + (j + 1)) % 2 == 1;
                let bracket = 1.0 / (dm * dm) - 1.0 / (sm * sm);
                if parity_odd {
                    xi -= 2.0 * cc * dphi.cos() * (2.0 * lambda / (PI * PI)) * bracket;
                    xi2 -= 2.0 * cc * dphi.cos() * (2.0 * lambda * lambda / (PI * PI)) * bracket;
                    p += cc * (8.0 * mi * nj / (lambda * (mi * mi - nj * nj))) * dphi.sin() / PI;
                } else {
                    xi2 += 2.0 * cc * dphi.cos() * (2.0 * lambda * lambda / (PI * PI)) * bracket;
                }
            }
        }
        // renormalize by the retained mass
        let xi_n = xi / norm;
        let xi2_n = xi2 / norm;
        let p_n = p / norm;
        let var_xi = (xi2_n - xi_n * xi_n).max(0.0);
        let var_p = (p_sq / norm - p_n * p_n).max(0.0);
        trace.mean_xi.push(xi_n);
        trace.mean_p.push(p_n);
        trace.delta_xi.push(var_xi.sqrt());
        trace.delta_p.push(var_p.sqrt());
        trace.product_hbar.push(PI * var_xi.sqrt() * var_p.sqrt());
    }
    trace
}

// ---------------------------------------------------------------------------
// comparison

#[derive(Debug, Clone, Copy)]
pub struct Deviation {
    pub sup: f64,
    pub l2: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Sup-norm and L² deviation between two profiles on a common grid,
/// judged against the combined error bound.
pub fn compare(a: &DensityProfile, b: &DensityProfile) -> Result<Deviation, AnalysisError> {
    if a.grid() != b.grid() {
        return Err(AnalysisError::GridMismatch);
    }
    let mut sup = 0.0f64;
    let diffs: Vec<f64> = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| {
            let d = (x - y).abs();
            sup = sup.max(d);
            d * d
        })
        .collect();
    let l2 = trapezoid(a.grid().points(), &diffs).max(0.0).sqrt();
    let bound = a.error_bound() + b.error_bound();
    Ok(Deviation {
        sup,
        l2,
        bound,
        pass: sup <= bound,
    })
}
