//! Fringe fitting, which-way knowledge, and the complementarity audit.
//!
//! A wire scan yields two headline numbers. The fringe **visibility**
//! `V = 1 / (1 + 2a)` measures how strongly the scanned dip is modulated
//! by the interference pattern (the pedestal `a` comes from the fitted
//! fringe profile). The **which-way knowledge** `K` measures how reliably
//! one can bet that a detected photon passed beside the wire rather than
//! through its strip:
//!
//! ```text
//! K(y_w) = (N0 - 2 N_SW) / (N0 - (2 - eta) N_SW)
//!        = (1 - 2 x) / (1 - (2 - eta) x),     x = N_SW / N0
//! ```
//!
//! Averaged over wire positions, `K` stays near 1 — the wire almost never
//! intercepts a photon — while `V` stays near 1 as well, so the pooled sum
//! `K^2 + V^2` lands far above 1. That is not a violation of the duality
//! bound: the two numbers describe different photon ensembles. The photons
//! the wire absorbs carry the fringe record (`V^2` alone, their
//! interception yields no which-beam tag because the wire's momentum
//! spread swamps the beams' momentum split); the photons reaching the
//! detector carry the passage record (`K^2` alone, their pooled count
//! keeps no fringe). Each ensemble respects `K^2 + V^2 <= 1` — the audit
//! in [`complementarity_audit`] makes both the pooled and the per-ensemble
//! bookkeeping explicit, alongside the momentum-resolution argument in
//! [`momentum_uncertainty_audit`].

use crate::config::{ApertureConvention, ExperimentConfig};
use crate::error::{Error, Result};
use crate::experiment::{self, ScanMode, ScanSeries};
use crate::model;
use crate::numerics::{fit_least_squares, integrate, DataPoint, FitOptions, FitResult, QuadratureSpec};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt;

/// Fringe visibility implied by the pedestal `a` of the intensity profile
/// `a + cos^2(...)`: `V = 1 / (1 + 2a)`. Balanced beams (`a = 0`) give 1.
pub fn visibility_from_asymmetry(a: f64) -> f64 {
    assert!(a.is_finite() && a >= 0.0, "pedestal must be >= 0, got {a}");
    1.0 / (1.0 + 2.0 * a)
}

/// Which-way knowledge from the blocked-flux ratio `x = N_SW / N0` and the
/// captured fraction `eta`.
///
/// Errors with [`Error::DegenerateDenominator`] when `1 - (2 - eta) x` is
/// not safely positive — a wire that removes half the light or more
/// leaves the betting odds undefined.
pub fn which_way_from_ratio(eta: f64, blocked_ratio: f64) -> Result<f64> {
    let denominator = 1.0 - (2.0 - eta) * blocked_ratio;
    // Negated comparison on purpose: a NaN denominator must also error.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(denominator > 1e-12) {
        return Err(Error::DegenerateDenominator);
    }
    Ok((1.0 - 2.0 * blocked_ratio) / denominator)
}

/// Which-way knowledge for a wire at `wire_position` under the configured
/// beams.
pub fn which_way(config: &ExperimentConfig, wire_position: f64) -> Result<f64> {
    let eta = experiment::capture_fraction(config)?;
    let ratio = experiment::configured_strip_flux(config, wire_position)?
        / experiment::configured_window_flux(config)?;
    which_way_from_ratio(eta, ratio)
}

/// `(position, K)` at `n` evenly spaced wire positions across the window,
/// computing the captured fraction and normalising flux once.
fn which_way_profile(config: &ExperimentConfig, n: usize) -> Result<Vec<(f64, f64)>> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "which-way profile needs at least 2 positions, got {n}"
        )));
    }
    let eta = experiment::capture_fraction(config)?;
    let window_flux = experiment::configured_window_flux(config)?;
    let (lo, hi) = config.window();
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| {
            let position = lo + step * i as f64;
            let ratio = experiment::configured_strip_flux(config, position)? / window_flux;
            Ok((position, which_way_from_ratio(eta, ratio)?))
        })
        .collect()
}

/// Which-way knowledge averaged over `n` evenly spaced wire positions
/// across the scan window (endpoints included).
pub fn average_which_way(config: &ExperimentConfig, n: usize) -> Result<f64> {
    let profile = which_way_profile(config, n)?;
    Ok(profile.iter().map(|(_, k)| k).sum::<f64>() / profile.len() as f64)
}

/// One ensemble's complementarity bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    /// Which-way knowledge attributed to this ensemble.
    pub which_way: f64,
    /// Fringe visibility attributed to this ensemble.
    pub visibility: f64,
    /// `which_way^2 + visibility^2`; at most 1 for an honest ensemble.
    pub kv_sum: f64,
    pub description: String,
}

impl GroupSummary {
    fn new(which_way: f64, visibility: f64, description: &str) -> GroupSummary {
        GroupSummary {
            which_way,
            visibility,
            kv_sum: which_way * which_way + visibility * visibility,
            description: description.to_string(),
        }
    }
}

/// The bookkeeping conventions behind a report's numbers, spelled out so a
/// reader can reproduce them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    /// How the detector acceptance angle follows from the aperture.
    pub aperture_acceptance: String,
    /// The count model behind every fractional rate.
    pub count_model: String,
    /// What counts are normalised against.
    pub normalisation: String,
    /// Units of fitted lengths in reports and scan files.
    pub fit_length_unit: String,
    /// How the pooled and per-ensemble duality sums relate.
    pub ensemble_grouping: String,
}

impl Conventions {
    fn current(config: &ExperimentConfig) -> Conventions {
        let aperture_acceptance = match config.aperture_convention {
            ApertureConvention::FullExtent => {
                "full: acceptance half-angle sine = aperture diameter / detector arm"
            }
            ApertureConvention::HalfExtent => {
                "half: acceptance half-angle sine = aperture radius / detector arm"
            }
        };
        Conventions {
            aperture_acceptance: aperture_acceptance.to_string(),
            count_model: "f = 1 - (2 - eta) * (strip flux) / (window flux)".to_string(),
            normalisation: "counts are relative to the no-wire total over the scan window"
                .to_string(),
            fit_length_unit: "fitted centre and envelope radius are reported in mm".to_string(),
            ensemble_grouping: "pooled K and V mix the intercepted and transmitted \
                                ensembles; per-ensemble sums each respect K^2 + V^2 <= 1"
                .to_string(),
        }
    }
}

/// Rule-of-thumb momentum numbers for the reference rig, in units of
/// `hbar alpha / lambda`: the wire's momentum spread and the
/// fringe-to-wire size ratio it follows from.
pub const NOMINAL_WIRE_MOMENTUM_SPREAD: f64 = 6.4;
pub const NOMINAL_FRINGE_TO_WIRE: f64 = 12.8;

/// Momentum-resolution bookkeeping: can intercepting a photon reveal which
/// beam carried it?
///
/// All momenta are quoted in units of `hbar alpha / lambda` (the natural
/// transverse scale of the crossed beams).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumAudit {
    /// Transverse momentum split between the beams, `hbar k alpha` in the
    /// unit above — identically `2 pi`.
    pub beam_momentum_split: f64,
    /// Minimum momentum spread of a wire localised to its own thickness,
    /// `hbar / (2 dy)` in the same unit: `lambda / (2 dy alpha)`.
    pub wire_momentum_spread: f64,
    /// `beam_momentum_split / wire_momentum_spread`, i.e.
    /// `4 pi dy / l`; a which-beam record would need this to be large.
    pub resolution_margin: f64,
    /// Fringe spacing over wire thickness, `l / dy`.
    pub fringe_to_wire_ratio: f64,
    /// Round-number reference values for the reference geometry.
    pub nominal_wire_momentum_spread: f64,
    pub nominal_fringe_to_wire: f64,
    pub interpretation: String,
}

/// Compare the beams' transverse momentum split against the momentum
/// spread the wire must have merely by being as narrow as it is.
pub fn momentum_uncertainty_audit(config: &ExperimentConfig) -> MomentumAudit {
    let hbar = model::PLANCK / TAU;
    let unit = hbar * config.crossing_angle / config.wavelength;
    // Small-angle transverse split between the beams: hbar k alpha.
    let split = hbar * (TAU / config.wavelength) * config.crossing_angle / unit;
    let spread = hbar / (2.0 * config.wire_thickness) / unit;
    let margin = split / spread;
    let fringe_to_wire = model::fringe_spacing(config) / config.wire_thickness;
    let interpretation = if spread >= 0.5 * split {
        format!(
            "the wire's minimum momentum spread ({spread:.4}) is comparable to or larger \
             than the beams' momentum split ({split:.4}, both in hbar alpha / lambda), \
             so intercepting a photon cannot reveal which beam carried it"
        )
    } else {
        format!(
            "the wire's minimum momentum spread ({spread:.4}) is well below the beams' \
             momentum split ({split:.4}, both in hbar alpha / lambda), so an intercepted \
             photon's recoil could in principle tag its beam"
        )
    };
    MomentumAudit {
        beam_momentum_split: split,
        wire_momentum_spread: spread,
        resolution_margin: margin,
        fringe_to_wire_ratio: fringe_to_wire,
        nominal_wire_momentum_spread: NOMINAL_WIRE_MOMENTUM_SPREAD,
        nominal_fringe_to_wire: NOMINAL_FRINGE_TO_WIRE,
        interpretation,
    }
}

/// One point of the which-way profile, position in millimetres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhichWayPoint {
    pub position_mm: f64,
    pub which_way: f64,
}

/// The full complementarity audit for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplementarityReport {
    /// Captured fraction of wire-diffracted light, `eta`.
    pub capture_fraction: f64,
    /// Fringe visibility from the configured pedestal.
    pub visibility: f64,
    /// Which-way knowledge averaged over the scanned positions.
    pub average_which_way: f64,
    /// `average_which_way^2 + visibility^2` — the naive pooled sum, far
    /// above 1 because it mixes ensembles.
    pub pooled_kv_sum: f64,
    /// Photons the wire intercepts: fringe record, no passage record.
    pub at_wire: GroupSummary,
    /// Photons reaching the detector: passage record, no fringe record.
    pub past_wire: GroupSummary,
    pub which_way_profile: Vec<WhichWayPoint>,
    pub momentum: MomentumAudit,
    pub conventions: Conventions,
}

/// Run the complementarity audit, averaging the which-way knowledge over
/// `n_positions` wire placements across the window.
pub fn complementarity_audit(
    config: &ExperimentConfig,
    n_positions: usize,
) -> Result<ComplementarityReport> {
    let eta = experiment::capture_fraction(config)?;
    let profile = which_way_profile(config, n_positions)?;
    let k_average =
        profile.iter().map(|(_, k)| k).sum::<f64>() / profile.len() as f64;
    let visibility = visibility_from_asymmetry(config.amplitude_asymmetry);

    let at_wire = GroupSummary::new(
        0.0,
        visibility,
        "photons intercepted by the wire: the scanned dip is their fringe record; \
         absorption at the wire leaves no which-beam tag (see the momentum audit)",
    );
    let past_wire = GroupSummary::new(
        k_average,
        0.0,
        "photons reaching the detector: count ratios give near-certain passage \
         knowledge; their pooled detection keeps no fringe record",
    );

    Ok(ComplementarityReport {
        capture_fraction: eta,
        visibility,
        average_which_way: k_average,
        pooled_kv_sum: k_average * k_average + visibility * visibility,
        at_wire,
        past_wire,
        which_way_profile: profile
            .iter()
            .map(|&(position, which_way)| WhichWayPoint {
                position_mm: position * 1e3,
                which_way,
            })
            .collect(),
        momentum: momentum_uncertainty_audit(config),
        conventions: Conventions::current(config),
    })
}

/// Whether the fringe pattern is physically recorded or merely implicit in
/// the crossing fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternClass {
    /// No obstacle probes the crossing region: the fringes exist only as a
    /// correlation in the superposed fields, recorded by nothing.
    Virtual,
    /// Matter intercepts the pattern (the wire, a screen): the fringes
    /// have observable consequences.
    Physical,
}

impl fmt::Display for PatternClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternClass::Virtual => write!(f, "virtual"),
            PatternClass::Physical => write!(f, "physical"),
        }
    }
}

/// Classify the fringe pattern of the crossing region: virtual until some
/// obstacle makes it physical.
pub fn classify_pattern(_config: &ExperimentConfig, obstacle_present: bool) -> PatternClass {
    if obstacle_present {
        PatternClass::Physical
    } else {
        PatternClass::Virtual
    }
}

/// Fit the fringe model to a measured or simulated scan.
///
/// The model predicts each point as
/// `f = 1 - (2 - eta) * strip(y0, sigma, a) / window(y0, sigma, a)` with
/// the window following the trial centre. Free parameters are the pattern
/// centre, envelope radius and pedestal; the captured fraction and the
/// geometry stay fixed at their configured values.
///
/// Requirements: a both-beams scan (one-beam scans carry no fringe
/// information and are refused as [`Error::DegenerateFit`]) with at least
/// 10 points and some dip below 1.
pub fn fit_scan(config: &ExperimentConfig, series: &ScanSeries) -> Result<FitResult> {
    if series.mode == ScanMode::OneBeamBlocked {
        return Err(Error::DegenerateFit(
            "one-beam scans have no fringes; the fringe fit needs a both-beams scan".into(),
        ));
    }
    if series.points.len() < 10 {
        return Err(Error::InsufficientData {
            needed: 10,
            got: series.points.len(),
        });
    }
    if series.points.iter().all(|p| p.f >= 1.0) {
        return Err(Error::DegenerateFit(
            "the scan never dips below 1; the wire missed the beams".into(),
        ));
    }

    let eta = experiment::capture_fraction(config)?;
    let half = config.intersection_width / 2.0;
    let spec = QuadratureSpec::default();

    // The solver walks the data point-by-point at a fixed trial vector, so
    // caching the window flux for the last trial removes the dominant cost.
    let mut cache: Option<([f64; 3], f64)> = None;
    let predicted = move |theta: &[f64], wire: f64| -> f64 {
        let key = [theta[0], theta[1], theta[2]];
        let window_flux = match cache {
            Some((cached_key, value)) if cached_key == key => value,
            _ => {
                let value = integrate(
                    |y| model::intensity_with(config, y, theta[0], theta[1], theta[2]),
                    theta[0] - half,
                    theta[0] + half,
                    &spec,
                )
                .unwrap_or(f64::NAN);
                cache = Some((key, value));
                value
            }
        };
        let window = (theta[0] - half, theta[0] + half);
        let strip = match experiment::clipped_strip(window, wire, config.wire_thickness) {
            None => 0.0,
            Some((lo, hi)) => integrate(
                |y| model::intensity_with(config, y, theta[0], theta[1], theta[2]),
                lo,
                hi,
                &spec,
            )
            .unwrap_or(f64::NAN),
        };
        1.0 - (2.0 - eta) * strip / window_flux
    };

    let data: Vec<DataPoint> = series
        .points
        .iter()
        .map(|p| DataPoint {
            x: p.position,
            y: p.f,
            y_err: p.f_err,
        })
        .collect();

    let first = series.points.first().unwrap().position;
    let last = series.points.last().unwrap().position;
    let sigma_bounds = (
        config.intersection_width / 1000.0,
        2.0 * config.intersection_width,
    );

    // Start at the deepest point; size the envelope from the second moment
    // of the dip profile (the fringe modulation roughly averages out).
    let deepest = series
        .points
        .iter()
        .min_by(|a, b| a.f.partial_cmp(&b.f).unwrap())
        .unwrap();
    let weights: Vec<f64> = series.points.iter().map(|p| (1.0 - p.f).max(0.0)).collect();
    let weight_sum: f64 = weights.iter().sum();
    let sigma_init = if weight_sum > 0.0 {
        let mean = series
            .points
            .iter()
            .zip(&weights)
            .map(|(p, w)| w * p.position)
            .sum::<f64>()
            / weight_sum;
        let variance = series
            .points
            .iter()
            .zip(&weights)
            .map(|(p, w)| w * (p.position - mean).powi(2))
            .sum::<f64>()
            / weight_sum;
        variance.sqrt().clamp(sigma_bounds.0, sigma_bounds.1)
    } else {
        (last - first) / 6.0
    };
    let init = [deepest.position, sigma_init, 0.1];
    let bounds = [(first, last), sigma_bounds, (0.0, 10.0)];

    let solution = fit_least_squares(predicted, &data, &init, &bounds, &FitOptions::default())?;
    Ok(FitResult::from_generic(&solution))
}
