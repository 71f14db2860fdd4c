//! Dynamics of a quantum particle after a sudden expansion of an infinite
//! well from width `a` to `λa`.
//!
//! The state starts as the ground state of the narrow well and evolves as a
//! Gauss series (phases quadratic in the mode index) in the wide well. This
//! crate evaluates that series with a certified truncation bound, builds the
//! exact piecewise-trigonometric snapshots at t = T/2, T/4, T/8, detects
//! plateaux / cusps / fragments in sampled profiles, and checks the norm and
//! mean-energy sum rules.
//!
//! Everything is expressed in reduced units: `a = 1`, positions `ξ ∈ [0, λ]`,
//! times as fractions `τ = t/T` of the revival period `T = λ²T₁`, energies in
//! units of the initial ground-state energy `E₁`, currents scaled by
//! `m a²/(π ħ)`. See [`model::ReducedUnits`].

pub mod analysis;
pub mod closedform;
pub mod evolution;
pub mod model;
pub mod momentum;
pub mod quad;
pub mod spectral;

pub use analysis::{
    compare, conjecture_scan, count_peaks, detect_cusps, detect_fragments, detect_plateaux,
    expectations, AnalysisError, Cusp, Deviation, ExpectationTrace, Fragment, FragmentReport,
    Plateau, PlateauReport, ScanOutcome, DEFAULT_CUSP_KAPPA,
};
pub use closedform::{
    cusp_abscissae_eighth, current_eighth, current_quarter, density_eighth, density_quarter,
    fragmented_density, psi_eighth, psi_half, psi_quarter, ClosedFormError, CuspSet,
    PiecewiseReal, PiecewiseTrig,
};
pub use evolution::{
    check_symmetries, current, density, evaluate_wavefunction, CurrentProfile, DensityProfile,
    EvolutionError, Smoothing, SymmetryReport, TimeSpec, WaveField,
};
pub use model::{
    make_model, reduce_time, ModelError, RationalTime, ReducedUnits, SpatialGrid, WellModel,
};
pub use spectral::{
    build_spectral_set, coefficient, eigenenergy, g_function, mean_energy,
    measurement_distribution, norm_and_energy_via_g, second_moment_partial, GMode,
    MeasurementDistribution, SpectralError, SpectralSet,
};

/// Crate version, embedded in every output file for reproducibility.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
