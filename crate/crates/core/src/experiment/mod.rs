//! Photon bookkeeping for the wire scan.
//!
//! The photon budget `N0` is spread over the scan window in proportion to
//! the local intensity. A wire at `y_w` intercepts the flux on its strip,
//! `N_SW`. In the far field the intercepted amplitude subtracts coherently
//! from the unobstructed beam inside the detector acceptance (costing
//! `2 N_SW` — its own flux plus the interference cross term), while the
//! same amplitude, diffracted like the complementary slit, returns a
//! fraction `eta` through the aperture. The expected detector counts are
//! therefore
//!
//! ```text
//! N = N0 - 2 N_SW + eta N_SW,      f = N / N0 = 1 - (2 - eta) N_SW / N0
//! ```
//!
//! `eta` is the slit diffraction pattern integrated over the detector
//! acceptance, relative to the full half-space — the captured fraction.
//! Every public quantity here is either a count expectation built from
//! these pieces or a simulated measurement of one.

mod scan;
pub use scan::{NoiseModel, ScanMode, ScanPoint, ScanSeries};

use crate::config::{ApertureConvention, ExperimentConfig};
use crate::error::{Error, Result};
use crate::model;
use crate::numerics::{integrate, QuadratureSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;

/// Quadrature for photon-flux integrals, tight enough that splitting the
/// window into sub-intervals conserves counts to well below 1e-9 relative.
pub(crate) fn flux_quadrature() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-18,
        rel_tol: 1e-12,
        max_subdivisions: 1_000_000,
    }
}

/// Fraction of the wire-diffracted light captured by the detector
/// aperture: the slit pattern integrated over the acceptance angle,
/// relative to the full forward half-space.
///
/// The acceptance half-angle has sine `aperture / arm`
/// ([`ApertureConvention::FullExtent`], the default) or
/// `(aperture / 2) / arm` ([`ApertureConvention::HalfExtent`]); ratios
/// above 1 saturate at a half-space acceptance, making the fraction 1.
pub fn capture_fraction(config: &ExperimentConfig) -> Result<f64> {
    let sine = match config.aperture_convention {
        ApertureConvention::FullExtent => config.detector_aperture / config.wire_to_detector,
        ApertureConvention::HalfExtent => {
            config.detector_aperture / 2.0 / config.wire_to_detector
        }
    };
    let theta_max = sine.min(1.0).asin();
    let spec = QuadratureSpec::default();
    let pattern = |theta: f64| model::slit_intensity(config, theta);
    let captured = integrate(pattern, -theta_max, theta_max, &spec)?;
    let total = integrate(pattern, -FRAC_PI_2, FRAC_PI_2, &spec)?;
    Ok(captured / total)
}

/// Expected detector counts with no wire present: the whole budget.
pub fn total_photons(config: &ExperimentConfig) -> f64 {
    config.photon_budget
}

/// The wire strip clipped to an interval; `None` when they do not overlap.
pub(crate) fn clipped_strip(
    window: (f64, f64),
    wire_position: f64,
    thickness: f64,
) -> Option<(f64, f64)> {
    let lo = (wire_position - thickness / 2.0).max(window.0);
    let hi = (wire_position + thickness / 2.0).min(window.1);
    (hi > lo).then_some((lo, hi))
}

/// Intensity integral over the window for arbitrary pattern parameters
/// (the normalising flux the fitter also uses). The window is centred on
/// the given `y0`, not the configured offset.
pub(crate) fn window_flux_with(
    config: &ExperimentConfig,
    y0: f64,
    sigma: f64,
    a: f64,
) -> Result<f64> {
    let half = config.intersection_width / 2.0;
    integrate(
        |y| model::intensity_with(config, y, y0, sigma, a),
        y0 - half,
        y0 + half,
        &flux_quadrature(),
    )
}

/// Intensity integral over the wire strip clipped to `window`, for
/// arbitrary pattern parameters; zero when the wire sits outside.
pub(crate) fn strip_flux_with(
    config: &ExperimentConfig,
    y0: f64,
    sigma: f64,
    a: f64,
    window: (f64, f64),
    wire_position: f64,
) -> Result<f64> {
    match clipped_strip(window, wire_position, config.wire_thickness) {
        None => Ok(0.0),
        Some((lo, hi)) => integrate(
            |y| model::intensity_with(config, y, y0, sigma, a),
            lo,
            hi,
            &flux_quadrature(),
        ),
    }
}

pub(crate) fn configured_window_flux(config: &ExperimentConfig) -> Result<f64> {
    window_flux_with(
        config,
        config.pattern_offset,
        config.gaussian_radius,
        config.amplitude_asymmetry,
    )
}

pub(crate) fn configured_strip_flux(config: &ExperimentConfig, wire_position: f64) -> Result<f64> {
    strip_flux_with(
        config,
        config.pattern_offset,
        config.gaussian_radius,
        config.amplitude_asymmetry,
        config.window(),
        wire_position,
    )
}

/// Expected photons incident on the wire strip (the slit-equivalent flux).
pub fn photons_blocked(config: &ExperimentConfig, wire_position: f64) -> Result<f64> {
    Ok(config.photon_budget * configured_strip_flux(config, wire_position)?
        / configured_window_flux(config)?)
}

/// Expected photons that pass beside the wire, integrated over the window
/// on each side of the strip. Together with [`photons_blocked`] this
/// partitions the budget: blocked + passed = total.
pub fn photons_passed(config: &ExperimentConfig, wire_position: f64) -> Result<f64> {
    let window = config.window();
    let strip = clipped_strip(window, wire_position, config.wire_thickness);
    let Some((strip_lo, strip_hi)) = strip else {
        return Ok(config.photon_budget);
    };
    let intensity = |y: f64| model::intersection_intensity(config, y);
    let spec = flux_quadrature();
    let left = integrate(intensity, window.0, strip_lo, &spec)?;
    let right = integrate(intensity, strip_hi, window.1, &spec)?;
    Ok(config.photon_budget * (left + right) / configured_window_flux(config)?)
}

/// The count ratio `f` from a strip-to-window flux ratio and a captured
/// fraction.
fn fraction_from_ratio(eta: f64, strip_over_window: f64) -> f64 {
    1.0 - (2.0 - eta) * strip_over_window
}

/// Expected fractional count rate with both beams crossing and the wire at
/// `wire_position`.
pub fn fractional_count(config: &ExperimentConfig, wire_position: f64) -> Result<f64> {
    let eta = capture_fraction(config)?;
    let ratio =
        configured_strip_flux(config, wire_position)? / configured_window_flux(config)?;
    Ok(fraction_from_ratio(eta, ratio))
}

/// Expected fractional count rate with one beam blocked upstream: the
/// intensity reduces to the Gaussian envelope (the uniform fringe factor
/// cancels in the ratio), so the scan shows a smooth dip and no fringes.
pub fn fractional_count_single_beam(
    config: &ExperimentConfig,
    wire_position: f64,
) -> Result<f64> {
    let eta = capture_fraction(config)?;
    let window = config.window();
    let spec = flux_quadrature();
    let envelope =
        |y: f64| model::envelope_with(y, config.pattern_offset, config.gaussian_radius);
    let window_flux = integrate(envelope, window.0, window.1, &spec)?;
    let strip_flux = match clipped_strip(window, wire_position, config.wire_thickness) {
        None => 0.0,
        Some((lo, hi)) => integrate(envelope, lo, hi, &spec)?,
    };
    Ok(fraction_from_ratio(eta, strip_flux / window_flux))
}

/// Simulate a wire scan: the expected ratio at each position, optionally
/// degraded to Poisson counting statistics at `photons_per_point` photons.
///
/// Each point draws from its own RNG stream derived from (`seed`, point
/// index), so a point's counts do not depend on how many other points the
/// scan has. Positions must be finite and strictly increasing, but may lie
/// outside the window (the wire then blocks nothing and `f = 1`).
pub fn simulate_scan(
    config: &ExperimentConfig,
    positions: &[f64],
    photons_per_point: f64,
    seed: u64,
    mode: ScanMode,
    noise: NoiseModel,
) -> Result<ScanSeries> {
    if positions.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if !(photons_per_point.is_finite() && photons_per_point >= 1.0) {
        return Err(Error::Domain(format!(
            "photons_per_point must be at least 1, got {photons_per_point}"
        )));
    }
    for pair in positions.windows(2) {
        // Negated comparison on purpose: NaN positions must also error.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(pair[1] > pair[0]) {
            return Err(Error::Domain(format!(
                "scan positions must increase strictly ({} then {})",
                pair[0], pair[1]
            )));
        }
    }
    if !positions[0].is_finite() || !positions[positions.len() - 1].is_finite() {
        return Err(Error::Domain("scan positions must be finite".into()));
    }

    let eta = capture_fraction(config)?;
    let window = config.window();
    let spec = flux_quadrature();
    // Precompute the normalising flux once; only the strip varies per point.
    let (window_flux, strip_flux): (f64, Box<dyn Fn(f64) -> Result<f64> + '_>) = match mode {
        ScanMode::BothBeams => (
            configured_window_flux(config)?,
            Box::new(move |wire| configured_strip_flux(config, wire)),
        ),
        ScanMode::OneBeamBlocked => {
            let envelope = move |y: f64| {
                model::envelope_with(y, config.pattern_offset, config.gaussian_radius)
            };
            let flux = integrate(envelope, window.0, window.1, &spec)?;
            (
                flux,
                Box::new(move |wire| {
                    match clipped_strip(window, wire, config.wire_thickness) {
                        None => Ok(0.0),
                        Some((lo, hi)) => integrate(envelope, lo, hi, &spec),
                    }
                }),
            )
        }
    };

    let mut points = Vec::with_capacity(positions.len());
    for (index, &position) in positions.iter().enumerate() {
        let expected = fraction_from_ratio(eta, strip_flux(position)? / window_flux);
        let (f, f_err) = match noise {
            NoiseModel::NoiseFree => {
                // The uncertainty the budget would give a noiseless reading.
                (expected, (expected / photons_per_point).sqrt())
            }
            NoiseModel::Poisson => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(index as u64);
                let counts = scan::poisson_draw(&mut rng, photons_per_point * expected);
                // max(counts, 1) keeps the error bar positive when a point
                // records nothing.
                (
                    counts as f64 / photons_per_point,
                    (counts.max(1) as f64).sqrt() / photons_per_point,
                )
            }
        };
        points.push(ScanPoint { position, f, f_err });
    }

    Ok(ScanSeries {
        points,
        mode,
        seed,
        config_fingerprint: config.fingerprint(),
    })
}
