//! Geometry, unit conventions and time representations shared by all modules.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    /// A sudden compression (λ ≤ 1) cannot produce a valid post-quench state:
    /// no instantaneous process maps a function finite on (λa, a) to one that
    /// vanishes there.
    #[error("compression impossible: expansion factor must satisfy lambda > 1, got {0}")]
    CompressionImpossible(f64),
    #[error("expansion factor must be finite, got {0}")]
    NonFiniteLambda(f64),
    #[error("rational time needs a positive denominator")]
    ZeroDenominator,
    #[error("grid points must be finite, strictly increasing and non-negative")]
    InvalidGrid,
}

/// Expanded-well geometry in reduced units: the original width is fixed to
/// `a = 1` and the well occupies `[0, λ]` after the quench.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellModel {
    lambda: f64,
}

impl WellModel {
    /// Expansion factor λ > 1.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Width of the expanded well (equals λ since a = 1).
    pub fn width(&self) -> f64 {
        self.lambda
    }
}

/// Validate λ and build the model.
pub fn make_model(lambda: f64) -> Result<WellModel, ModelError> {
    if !lambda.is_finite() {
        return Err(ModelError::NonFiniteLambda(lambda));
    }
    if lambda <= 1.0 {
        return Err(ModelError::CompressionImpossible(lambda));
    }
    Ok(WellModel { lambda })
}

/// The reduced-unit conventions used throughout the crate.
///
/// * positions: `ξ = x/a ∈ [0, λ]`
/// * times: `τ = t/T ∈ [0, 1)` with revival period `T = λ²T₁`, so every mode
///   carries the phase `exp(−2πi n² τ)`
/// * densities: `a·ρ` (dimensionless)
/// * currents: `ĵ = j · m a²/(π ħ)`
/// * energies: units of `E₁ = π²ħ²/(2ma²)`
/// * momenta: units of `p₀ = πħ/a`
///
/// With `ħ = m = a = 1` the physical constants below follow.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReducedUnits;

impl ReducedUnits {
    /// Ground-state energy of the unexpanded well, `E₁ = π²/2` (ħ = m = a = 1).
    pub const E1: f64 = std::f64::consts::PI * std::f64::consts::PI / 2.0;

    /// Period of the unexpanded ground problem, `T₁ = 2π/E₁ = 4/π`.
    pub const T1: f64 = 4.0 / std::f64::consts::PI;

    /// Reference momentum `p₀ = π` (ħ = a = 1).
    pub const P0: f64 = std::f64::consts::PI;

    /// Revival period `T = λ² T₁` in physical (ħ = m = a = 1) units.
    pub fn period(lambda: f64) -> f64 {
        lambda * lambda * Self::T1
    }

    /// Reduced time τ = t/T for a physical time t.
    pub fn tau_from_physical(t: f64, lambda: f64) -> f64 {
        t / Self::period(lambda)
    }
}

/// An exact fraction `τ = p/q` of the period, kept coprime and reduced
/// modulo the period so that `0 ≤ p < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalTime {
    p: u64,
    q: u64,
}

impl RationalTime {
    pub fn numerator(&self) -> u64 {
        self.p
    }

    pub fn denominator(&self) -> u64 {
        self.q
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// τ + 1/2, reduced (used by the half-period symmetry).
    pub fn plus_half(&self) -> RationalTime {
        reduce_time(2 * self.p + self.q, 2 * self.q).expect("denominator nonzero")
    }

    /// 1 − τ, reduced (time-reversal partner).
    pub fn reflected(&self) -> RationalTime {
        reduce_time(self.q - self.p, self.q).expect("denominator nonzero")
    }
}

impl std::fmt::Display for RationalTime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Reduce `p/q` modulo the period to a coprime fraction in `[0, 1)`.
pub fn reduce_time(p: u64, q: u64) -> Result<RationalTime, ModelError> {
    if q == 0 {
        return Err(ModelError::ZeroDenominator);
    }
    let p = p % q;
    if p == 0 {
        return Ok(RationalTime { p: 0, q: 1 });
    }
    let g = gcd(p, q);
    Ok(RationalTime { p: p / g, q: q / g })
}

/// An explicit, strictly increasing list of sample positions in `[0, λ]`.
///
/// Grids are stored as point lists rather than `(min, max, n)` triples so
/// that distinguished abscissae (the cusp points of the T/8 snapshot) can be
/// injected exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    points: Vec<f64>,
}

impl SpatialGrid {
    /// Build from an explicit point list. Points must be finite,
    /// non-negative and strictly increasing.
    pub fn new(points: Vec<f64>) -> Result<Self, ModelError> {
        if points.is_empty() || !points.iter().all(|x| x.is_finite() && *x >= 0.0) {
            return Err(ModelError::InvalidGrid);
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ModelError::InvalidGrid);
        }
        Ok(SpatialGrid { points })
    }

    /// `n + 1` equally spaced points covering `[0, λ]`, endpoints included.
    pub fn uniform(model: &WellModel, n: usize) -> Self {
        let n = n.max(1);
        let lambda = model.lambda();
        let points = (0..=n)
            .map(|i| lambda * i as f64 / n as f64)
            .collect::<Vec<_>>();
        SpatialGrid { points }
    }

    /// Uniform grid with the five T/8 cusp abscissae injected exactly.
    ///
    /// Injection is skipped for a cusp that already coincides with a grid
    /// point to within 1e-12 (the grid must stay strictly increasing).
    pub fn for_model(model: &WellModel, n: usize) -> Self {
        let mut grid = Self::uniform(model, n);
        let cusps = crate::closedform::cusp_abscissae_eighth(model);
        for &c in cusps.abscissae() {
            let pos = grid
                .points
                .binary_search_by(|x| x.partial_cmp(&c).unwrap())
                .unwrap_or_else(|e| e);
            let close = |x: Option<&f64>| x.is_some_and(|x| (x - c).abs() < 1e-12);
            if close(grid.points.get(pos)) || (pos > 0 && close(grid.points.get(pos - 1))) {
                continue;
            }
            grid.points.insert(pos, c);
        }
        grid
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest gap between consecutive points.
    pub fn max_step(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn contains_point(&self, x: f64) -> bool {
        self.points
            .binary_search_by(|p| p.partial_cmp(&x).unwrap())
            .is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_accepts_expansion() {
        assert_eq!(make_model(1.5).unwrap().lambda(), 1.5);
    }

    #[test]
    fn model_rejects_compression_and_identity() {
        assert_eq!(
            make_model(0.5),
            Err(ModelError::CompressionImpossible(0.5))
        );
        assert_eq!(
            make_model(1.0),
            Err(ModelError::CompressionImpossible(1.0))
        );
        assert!(matches!(
            make_model(f64::NAN),
            Err(ModelError::NonFiniteLambda(_))
        ));
        assert!(matches!(
            make_model(f64::INFINITY),
            Err(ModelError::NonFiniteLambda(_))
        ));
    }

    #[test]
    fn reduce_time_examples() {
        let t = reduce_time(2, 8).unwrap();
        assert_eq!((t.numerator(), t.denominator()), (1, 4));
        let t = reduce_time(5, 4).unwrap();
        assert_eq!((t.numerator(), t.denominator()), (1, 4));
        let t = reduce_time(0, 7).unwrap();
        assert_eq!((t.numerator(), t.denominator()), (0, 1));
        assert_eq!(reduce_time(1, 0), Err(ModelError::ZeroDenominator));
    }

    #[test]
    fn rational_time_arithmetic() {
        let t = reduce_time(1, 5).unwrap();
        assert_eq!(t.plus_half(), reduce_time(7, 10).unwrap());
        assert_eq!(t.reflected(), reduce_time(4, 5).unwrap());
        assert_eq!(reduce_time(0, 1).unwrap().reflected(), reduce_time(0, 1).unwrap());
    }

    #[test]
    fn grid_validation() {
        assert!(SpatialGrid::new(vec![0.0, 0.5, 1.0]).is_ok());
        assert!(SpatialGrid::new(vec![0.0, 0.5, 0.5]).is_err());
        assert!(SpatialGrid::new(vec![-0.1, 0.5]).is_err());
        assert!(SpatialGrid::new(vec![]).is_err());
    }

    #[test]
    fn grid_for_rational_lambda_contains_cusps_exactly() {
        for lambda in [1.5, 2.5, 8.0] {
            let model = make_model(lambda).unwrap();
            let grid = SpatialGrid::for_model(&model, 777);
            for &c in crate::closedform::cusp_abscissae_eighth(&model).abscissae() {
                assert!(
                    grid.points().iter().any(|&x| x == c || (x - c).abs() < 1e-12),
                    "cusp {c} missing for lambda={lambda}"
                );
            }
        }
    }

    #[test]
    fn reduced_units_period() {
        let t = ReducedUnits::period(1.5);
        assert!((t - 2.25 * 4.0 / std::f64::consts::PI).abs() < 1e-15);
        assert!((ReducedUnits::tau_from_physical(t, 1.5) - 1.0).abs() < 1e-15);
    }
}
