//! Simulation and analysis of a wire scanned through a two-beam
//! interference region.
//!
//! Two coherent Gaussian beams cross at a small angle and build a fringe
//! pattern in their overlap volume. A thin wire stepped through that volume
//! casts a shadow whose strength depends on where the wire sits relative to
//! the fringes — yet the light it removes can partly return to the detector
//! as near-forward diffraction, the wire acting (by Babinet's principle)
//! like a complementary slit. This crate models that experiment end to end:
//!
//! * [`model`] — beam geometry, intersection intensity, the
//!   wire/slit field decomposition, and field momentum densities;
//! * [`numerics`] — adaptive quadrature and a damped Gauss-Newton
//!   least-squares fitter, both deterministic;
//! * [`experiment`] — photon-budget bookkeeping, capture fractions,
//!   fractional count rates, and reproducible simulated wire scans;
//! * [`analysis`] — fringe-parameter fitting, which-way
//!   distinguishability, the `K^2 + V^2 <= 1` complementarity audit, and a
//!   momentum-resolution audit;
//! * [`config`] — experiment parameters parsed from a simple
//!   `key = value` text format with unit suffixes.
//!
//! Everything internal is SI; conversions happen only at the text
//! boundaries (config files, scan CSVs, reports).

pub mod analysis;
pub mod config;
pub mod error;
pub mod experiment;
pub mod model;
pub mod numerics;
pub mod units;

pub use analysis::{
    average_which_way, classify_pattern, complementarity_audit, fit_scan,
    momentum_uncertainty_audit, visibility_from_asymmetry, which_way, which_way_from_ratio,
    ComplementarityReport, Conventions, GroupSummary, MomentumAudit, PatternClass, WhichWayPoint,
};
pub use config::{ApertureConvention, ExperimentConfig};
pub use error::{Error, Result};
pub use experiment::{
    capture_fraction, fractional_count, fractional_count_single_beam, photons_blocked,
    photons_passed, simulate_scan, total_photons, NoiseModel, ScanMode, ScanPoint, ScanSeries,
};
pub use model::{
    babinet_decompose, beam_directions, field_momentum_density, fringe_spacing,
    intersection_intensity, particle_momenta, slit_intensity, BeamArrangement, FieldSample,
    MomentumProfile, MomentumSample, Vec3,
};
pub use numerics::{
    finite_diff_gradient, fit_least_squares, integrate, DataPoint, FitOptions, FitResult,
    LeastSquaresSolution, QuadratureSpec,
};
