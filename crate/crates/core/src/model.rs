//! Optical field model for two crossed Gaussian beams and a thin wire.
//!
//! Two beams of wavelength lambda cross at a small full angle alpha,
//! producing straight interference fringes of spacing `l = lambda / alpha`
//! along the transverse axis `y`. The time-averaged intensity in the
//! crossing plane is
//!
//! ```text
//! I(y) = exp(-((y - y0)^2) / (2 sigma^2)) * (a + cos^2(k (y - y0) sin(alpha/2)))
//! ```
//!
//! where `k = 2 pi / lambda`, `y0` centres the pattern, `sigma` is the
//! Gaussian envelope radius and the pedestal `a` captures unequal beam
//! powers (`a = (A1 - A2)^2 / (4 A1 A2)`, zero for balanced beams).
//!
//! A wire of width `dy` placed at `y_w` removes the field on the strip
//! `|y - y_w| <= dy/2`. Writing the unobstructed field as the sum of the
//! part the wire intercepts and the part that passes, the intercepted part
//! equals (up to sign) the field transmitted by a slit of the same width,
//! so the wire's far-field diffraction is computed from the slit pattern
//! `sinc^2((k dy / 2) sin(theta))`.
//!
//! Intensities and field amplitudes use one arbitrary common unit; every
//! reported quantity is a ratio, so the unit cancels.

use crate::config::ExperimentConfig;
use serde::{Deserialize, Serialize};

/// Planck constant (J s), 2019 SI exact value.
pub const PLANCK: f64 = 6.62607015e-34;

/// A three-component vector; `y` is the transverse fringe axis, `z` points
/// along the mean propagation direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// Which beams illuminate the crossing region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamArrangement {
    /// Both beams present: fringed intensity and momentum profiles.
    Crossed,
    /// Only beam 1 survives (the other is blocked upstream): uniform
    /// profiles, no fringes.
    SingleBeam,
}

/// Fringe spacing `l = lambda / alpha` (m).
pub fn fringe_spacing(config: &ExperimentConfig) -> f64 {
    config.wavelength / config.crossing_angle
}

/// Vacuum wavenumber `k = 2 pi / lambda` (1/m).
fn wavenumber(config: &ExperimentConfig) -> f64 {
    std::f64::consts::TAU / config.wavelength
}

/// Two-beam intensity at transverse position `y` in the crossing plane.
pub fn intersection_intensity(config: &ExperimentConfig, y: f64) -> f64 {
    intensity_with(
        config,
        y,
        config.pattern_offset,
        config.gaussian_radius,
        config.amplitude_asymmetry,
    )
}

/// Intensity with explicit pattern parameters, sharing the geometry
/// (wavelength, crossing angle) of `config`. This is the form the fitter
/// varies.
pub(crate) fn intensity_with(
    config: &ExperimentConfig,
    y: f64,
    y0: f64,
    sigma: f64,
    a: f64,
) -> f64 {
    let u = y - y0;
    let envelope = (-0.5 * (u / sigma).powi(2)).exp();
    let phase = wavenumber(config) * u * (config.crossing_angle / 2.0).sin();
    envelope * (a + phase.cos().powi(2))
}

/// Gaussian envelope alone, the intensity profile with one beam blocked
/// (the fringe factor collapses to a constant, which cancels in every
/// count ratio).
pub(crate) fn envelope_with(y: f64, y0: f64, sigma: f64) -> f64 {
    (-0.5 * ((y - y0) / sigma).powi(2)).exp()
}

/// Far-field diffraction intensity of a slit as wide as the wire, relative
/// to its forward value: `sinc^2((k dy / 2) sin(theta))`.
pub fn slit_intensity(config: &ExperimentConfig, theta: f64) -> f64 {
    let u = wavenumber(config) * config.wire_thickness / 2.0 * theta.sin();
    sinc(u).powi(2)
}

/// `sin(x)/x`, continuous at zero.
fn sinc(x: f64) -> f64 {
    // Below ~1e-4 the Taylor form is exact to double precision and avoids
    // 0/0 at the origin.
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Field amplitudes at one transverse position with a wire at
/// `wire_position`: the unobstructed amplitude and its split into the part
/// the wire intercepts and the part that passes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    /// Transverse position (m).
    pub position: f64,
    /// Unobstructed two-beam amplitude `sqrt(I(y))` (arbitrary unit).
    pub e0: f64,
    /// Amplitude passing beside the wire: `e0` off the strip, 0 on it.
    pub e_wire: f64,
    /// Amplitude the wire intercepts, equal to what a complementary slit
    /// would transmit: `e0` on the strip, 0 off it.
    pub e_slit: f64,
}

/// Split the unobstructed field at `y` into blocked and passed parts for a
/// wire centred at `wire_position`.
///
/// The decomposition is exact by construction: `e0 = e_wire + e_slit` at
/// every point, with `e_slit` supported on `|y - wire_position| <= dy/2`
/// (boundary inclusive).
pub fn babinet_decompose(
    config: &ExperimentConfig,
    wire_position: f64,
    y: f64,
) -> FieldSample {
    let e0 = intersection_intensity(config, y).sqrt();
    let on_strip = (y - wire_position).abs() <= config.wire_thickness / 2.0;
    let e_slit = if on_strip { e0 } else { 0.0 };
    FieldSample {
        position: y,
        e0,
        e_wire: e0 - e_slit,
        e_slit,
    }
}

/// Time-averaged field momentum density at `y` (arbitrary unit, direction
/// exact).
///
/// With both beams present the transverse components cancel and the density
/// points along `z`, modulated by the fringe profile: magnitude
/// `a + cos^2(k (y - y0) sin(alpha/2))`, which for balanced beams (`a = 0`)
/// vanishes on the dark fringes. With one beam blocked the density is
/// uniform, `1/2` in the same unit, along that beam's travel direction —
/// nothing in the field then singles out the fringe period.
pub fn field_momentum_density(
    config: &ExperimentConfig,
    y: f64,
    beams: BeamArrangement,
) -> Vec3 {
    match beams {
        BeamArrangement::Crossed => {
            let u = y - config.pattern_offset;
            let phase = wavenumber(config) * u * (config.crossing_angle / 2.0).sin();
            let magnitude = config.amplitude_asymmetry + phase.cos().powi(2);
            Vec3::new(0.0, 0.0, magnitude)
        }
        BeamArrangement::SingleBeam => {
            let (k1, _) = beam_directions(config);
            Vec3::new(0.5 * k1.x, 0.5 * k1.y, 0.5 * k1.z)
        }
    }
}

/// Unit propagation vectors of the two beams, tilted by half the crossing
/// angle on either side of `z`; beam 2 tilts toward +y.
pub fn beam_directions(config: &ExperimentConfig) -> (Vec3, Vec3) {
    let half = config.crossing_angle / 2.0;
    let (s, c) = half.sin_cos();
    (Vec3::new(0.0, -s, c), Vec3::new(0.0, s, c))
}

/// Photon momentum vectors `p k_hat` for the two beams (kg m/s), with
/// `p = h / lambda`.
///
/// Each photon carries one of these two momenta; only their distribution
/// over the beam pair — never any single photon — reflects the fringe
/// period. The transverse components are equal and opposite, so the pair
/// sum has zero `y` component exactly.
pub fn particle_momenta(config: &ExperimentConfig) -> (Vec3, Vec3) {
    let p = PLANCK / config.wavelength;
    let (k1, k2) = beam_directions(config);
    (
        Vec3::new(p * k1.x, p * k1.y, p * k1.z),
        Vec3::new(p * k2.x, p * k2.y, p * k2.z),
    )
}

/// One sample of the field momentum-density profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumSample {
    /// Transverse position (m).
    pub position: f64,
    /// `z` component of the momentum density (arbitrary unit).
    pub density_z: f64,
}

/// The field-level momentum picture across the scan window together with
/// the particle-level momenta of the two beams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumProfile {
    pub samples: Vec<MomentumSample>,
    /// Momentum vector of each beam's photons (kg m/s).
    pub particle_momenta: (Vec3, Vec3),
}

impl MomentumProfile {
    /// Sample the crossed-beam momentum density at `n` evenly spaced
    /// positions across the scan window (endpoints included; `n >= 2`).
    pub fn sample(config: &ExperimentConfig, n: usize) -> Self {
        assert!(n >= 2, "need at least two profile samples");
        let (lo, hi) = config.window();
        let step = (hi - lo) / (n - 1) as f64;
        let samples = (0..n)
            .map(|i| {
                let y = lo + step * i as f64;
                MomentumSample {
                    position: y,
                    density_z: field_momentum_density(config, y, BeamArrangement::Crossed).z,
                }
            })
            .collect();
        MomentumProfile {
            samples,
            particle_momenta: particle_momenta(config),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_config() -> ExperimentConfig {
        crate::config::tests::BASE.parse().unwrap()
    }

    const EPSILON: f64 = 1e-12;

    #[test]
    fn fringe_spacing_matches_wavelength_over_angle() {
        let cfg = paper_config();
        let l = fringe_spacing(&cfg);
        assert!((l - 2.1279461279461279e-4).abs() < 1e-18);
    }

    #[test]
    fn intensity_peaks_at_pattern_centre() {
        let cfg = paper_config();
        let peak = intersection_intensity(&cfg, cfg.pattern_offset);
        assert!((peak - (cfg.amplitude_asymmetry + 1.0)).abs() < EPSILON);
    }

    #[test]
    fn intensity_dark_fringe_sits_half_a_period_out() {
        let cfg = paper_config();
        let y = cfg.pattern_offset + fringe_spacing(&cfg) / 2.0;
        let dark = intersection_intensity(&cfg, y);
        let envelope = envelope_with(y, cfg.pattern_offset, cfg.gaussian_radius);
        // At the dark fringe only the pedestal survives (up to the tiny
        // difference between l and the exact cosine period).
        assert!((dark - envelope * cfg.amplitude_asymmetry).abs() < 1e-9);
    }

    #[test]
    fn intensity_is_periodic_with_the_fringe_spacing() {
        let cfg = paper_config();
        // Compare the oscillatory factor directly over one period by
        // removing the envelope.
        let l = fringe_spacing(&cfg);
        for i in 0..7 {
            let y = cfg.pattern_offset + 0.13e-3 + 0.05e-3 * i as f64;
            let osc = |y: f64| {
                intersection_intensity(&cfg, y)
                    / envelope_with(y, cfg.pattern_offset, cfg.gaussian_radius)
            };
            // l = lambda/alpha differs from the exact cosine period by a
            // relative alpha^2/24, a few parts in 1e7 here.
            assert!(
                (osc(y) - osc(y + l)).abs() < 1e-5,
                "fringe factor should repeat every l"
            );
        }
    }

    #[test]
    fn intensity_is_nonnegative_everywhere() {
        let cfg = paper_config();
        for i in 0..2000 {
            let y = -2e-3 + i as f64 * 2.5e-6;
            assert!(intersection_intensity(&cfg, y) >= 0.0);
        }
    }

    #[test]
    fn slit_intensity_is_even_normalised_and_bounded() {
        let cfg = paper_config();
        assert!((slit_intensity(&cfg, 0.0) - 1.0).abs() < EPSILON);
        for i in 1..200 {
            let theta = i as f64 * 7.5e-3;
            let v = slit_intensity(&cfg, theta);
            assert!((0.0..=1.0).contains(&v));
            assert!((v - slit_intensity(&cfg, -theta)).abs() < EPSILON);
        }
    }

    #[test]
    fn slit_intensity_first_zero_at_wavelength_over_width() {
        let cfg = paper_config();
        // sinc^2 vanishes where (k dy / 2) sin(theta) = pi, i.e.
        // sin(theta) = lambda / dy.
        let theta = (cfg.wavelength / cfg.wire_thickness).asin();
        assert!(slit_intensity(&cfg, theta) < 1e-20);
    }

    #[test]
    fn decomposition_is_exact_and_supported_on_the_strip() {
        let cfg = paper_config();
        let wire = cfg.pattern_offset + 0.1e-3;
        for i in 0..400 {
            let y = cfg.pattern_offset - 0.5e-3 + i as f64 * 2.5e-6;
            let s = babinet_decompose(&cfg, wire, y);
            assert_eq!(s.e0, s.e_wire + s.e_slit);
            let on_strip = (y - wire).abs() <= cfg.wire_thickness / 2.0;
            if on_strip {
                assert_eq!(s.e_wire, 0.0);
                assert_eq!(s.e_slit, s.e0);
            } else {
                assert_eq!(s.e_slit, 0.0);
            }
        }
    }

    #[test]
    fn decomposition_includes_strip_boundary() {
        // A wire at 0 makes the strip edge exactly representable, so the
        // boundary point lands on the strip with no rounding slack.
        let cfg = paper_config();
        let wire = 0.0;
        let edge = cfg.wire_thickness / 2.0;
        let s = babinet_decompose(&cfg, wire, edge);
        assert_eq!(s.e_wire, 0.0, "boundary belongs to the strip");
    }

    #[test]
    fn crossed_momentum_density_points_along_z_and_follows_fringes() {
        let cfg = paper_config();
        let g_peak = field_momentum_density(&cfg, cfg.pattern_offset, BeamArrangement::Crossed);
        assert_eq!(g_peak.x, 0.0);
        assert_eq!(g_peak.y, 0.0);
        assert!((g_peak.z - (1.0 + cfg.amplitude_asymmetry)).abs() < EPSILON);
        // Same period as the intensity fringes.
        let l = fringe_spacing(&cfg);
        let g = |y: f64| field_momentum_density(&cfg, y, BeamArrangement::Crossed).z;
        let y = cfg.pattern_offset + 0.07e-3;
        assert!((g(y) - g(y + l)).abs() < 1e-5);
    }

    #[test]
    fn balanced_beams_momentum_density_vanishes_on_dark_fringes() {
        let text = crate::config::tests::BASE.replace("0.05", "0.0");
        let cfg: ExperimentConfig = text.parse().unwrap();
        let l = fringe_spacing(&cfg);
        for n in 0..4 {
            let y = cfg.pattern_offset + (n as f64 + 0.5) * l;
            let g = field_momentum_density(&cfg, y, BeamArrangement::Crossed);
            assert!(
                g.z.abs() < 1e-9,
                "dark fringe {n} should carry no momentum density, got {}",
                g.z
            );
            assert!(g.z >= 0.0);
        }
    }

    #[test]
    fn single_beam_momentum_density_is_uniform() {
        let cfg = paper_config();
        let g1 = field_momentum_density(&cfg, 0.1e-3, BeamArrangement::SingleBeam);
        let g2 = field_momentum_density(&cfg, 0.9e-3, BeamArrangement::SingleBeam);
        assert_eq!(g1, g2);
        assert!((g1.norm() - 0.5).abs() < EPSILON);
        assert!(g1.y < 0.0, "beam 1 tilts toward -y");
    }

    #[test]
    fn particle_momenta_have_photon_magnitude_and_opposite_tilts() {
        let cfg = paper_config();
        let (p1, p2) = particle_momenta(&cfg);
        let p = PLANCK / cfg.wavelength;
        assert!((p1.norm() - p).abs() / p < EPSILON);
        assert!((p2.norm() - p).abs() / p < EPSILON);
        // Transverse components cancel exactly.
        assert_eq!(p1.y + p2.y, 0.0);
        assert_eq!(p1.x, 0.0);
        // The y split matches p * alpha to small-angle accuracy (the exact
        // geometric value uses sin(alpha/2)).
        let split = p2.y - p1.y;
        let small_angle = p * cfg.crossing_angle;
        assert!(((split - small_angle) / small_angle).abs() < 1e-6);
    }

    #[test]
    fn momentum_profile_spans_the_window() {
        let cfg = paper_config();
        let profile = MomentumProfile::sample(&cfg, 64);
        assert_eq!(profile.samples.len(), 64);
        let (lo, hi) = cfg.window();
        assert_eq!(profile.samples.first().unwrap().position, lo);
        assert!((profile.samples.last().unwrap().position - hi).abs() < 1e-15);
        assert!(profile.samples.iter().all(|s| s.density_z >= 0.0));
    }
}
