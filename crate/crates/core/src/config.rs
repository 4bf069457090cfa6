//! Experiment geometry and its on-disk `key = value` format.
//!
//! All fields are SI (metres, radians) regardless of the unit suffix used in
//! the file. A parsed configuration is always validated; library functions
//! downstream assume the invariants hold.

use crate::error::{Error, Result};
use crate::units;
use sha2::{Digest, Sha256};
use std::fmt;
use std::str::FromStr;

/// How the detector's angular acceptance is derived from its aperture.
///
/// `FullExtent` uses aperture-diameter / detector-arm as the sine of the
/// acceptance half-angle; `HalfExtent` uses aperture-radius / detector-arm.
/// Full extent reproduces the measured captured fraction of diffracted
/// light (about 0.106 for the reference geometry); half extent gives about
/// half that. The convention in force is echoed in every report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApertureConvention {
    FullExtent,
    HalfExtent,
}

impl fmt::Display for ApertureConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApertureConvention::FullExtent => write!(f, "full"),
            ApertureConvention::HalfExtent => write!(f, "half"),
        }
    }
}

/// Geometry and beam parameters for one wire-scan experiment.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExperimentConfig {
    /// Laser wavelength (m).
    pub wavelength: f64,
    /// Full angle between the two beams (rad).
    pub crossing_angle: f64,
    /// Wire diameter, i.e. the width of the blocked strip (m).
    pub wire_thickness: f64,
    /// Width of the region scanned by the wire, centred on
    /// `pattern_offset` (m).
    pub intersection_width: f64,
    /// Distance from the beam splitter to the wire plane (m).
    pub splitter_to_wire: f64,
    /// Distance from the wire plane to the detector aperture (m).
    pub wire_to_detector: f64,
    /// Detector aperture diameter (m).
    pub detector_aperture: f64,
    /// Fringe pedestal `a`: the beam-power imbalance term added to the
    /// squared-cosine fringe profile (dimensionless, >= 0).
    pub amplitude_asymmetry: f64,
    /// Transverse position of the fringe-pattern centre (m).
    pub pattern_offset: f64,
    /// 1/e^2-style Gaussian radius of the crossing region envelope (m).
    pub gaussian_radius: f64,
    /// Total photons attributed to the scan window; sets the count scale
    /// but cancels in every fractional quantity.
    pub photon_budget: f64,
    /// Angular-acceptance convention for the captured-diffraction fraction.
    pub aperture_convention: ApertureConvention,
}

/// Field names recognised by the config file, in canonical order.
const KEYS: [&str; 12] = [
    "wavelength",
    "crossing_angle",
    "wire_thickness",
    "intersection_width",
    "splitter_to_wire",
    "wire_to_detector",
    "detector_aperture",
    "amplitude_asymmetry",
    "pattern_offset",
    "gaussian_radius",
    "photon_budget",
    "aperture_convention",
];

impl ExperimentConfig {
    /// Check every invariant; an `Err` names the offending key.
    ///
    /// Invariants: all lengths strictly positive; the crossing angle lies in
    /// (0, 0.1) rad so the small-angle fringe model applies; the wire is
    /// thinner than half a fringe (so it probes individual fringes); the
    /// Gaussian radius is smaller than the scanned window; the pedestal is
    /// non-negative; the photon budget is positive.
    pub fn validate(&self) -> Result<()> {
        let lengths = [
            ("wavelength", self.wavelength),
            ("wire_thickness", self.wire_thickness),
            ("intersection_width", self.intersection_width),
            ("splitter_to_wire", self.splitter_to_wire),
            ("wire_to_detector", self.wire_to_detector),
            ("detector_aperture", self.detector_aperture),
            ("gaussian_radius", self.gaussian_radius),
        ];
        for (name, value) in lengths {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be a positive length, got {value}"
                )));
            }
        }
        if !self.pattern_offset.is_finite() {
            return Err(Error::InvalidConfig(
                "pattern_offset must be finite".into(),
            ));
        }
        if !self.crossing_angle.is_finite()
            || self.crossing_angle <= 0.0
            || self.crossing_angle >= 0.1
        {
            return Err(Error::InvalidConfig(format!(
                "crossing_angle must lie in (0, 0.1) rad, got {}",
                self.crossing_angle
            )));
        }
        if !self.amplitude_asymmetry.is_finite() || self.amplitude_asymmetry < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "amplitude_asymmetry must be >= 0, got {}",
                self.amplitude_asymmetry
            )));
        }
        if !self.photon_budget.is_finite() || self.photon_budget <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "photon_budget must be positive, got {}",
                self.photon_budget
            )));
        }
        let fringe = self.wavelength / self.crossing_angle;
        if self.wire_thickness >= fringe / 2.0 {
            return Err(Error::InvalidConfig(format!(
                "wire_thickness ({:.3e} m) must be below half the fringe \
                 spacing ({:.3e} m); a thicker wire cannot resolve fringes",
                self.wire_thickness,
                fringe / 2.0
            )));
        }
        if self.gaussian_radius >= self.intersection_width {
            return Err(Error::InvalidConfig(format!(
                "gaussian_radius ({:.3e} m) must be below intersection_width \
                 ({:.3e} m)",
                self.gaussian_radius, self.intersection_width
            )));
        }
        Ok(())
    }

    /// The scan window `[pattern_offset - W/2, pattern_offset + W/2]`, the
    /// interval over which photon counts are normalised.
    pub fn window(&self) -> (f64, f64) {
        let half = self.intersection_width / 2.0;
        (self.pattern_offset - half, self.pattern_offset + half)
    }

    /// Short stable fingerprint of every field, used to tag output files so
    /// a scan can be matched to the configuration that produced it.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for (name, value) in [
            ("wavelength", self.wavelength),
            ("crossing_angle", self.crossing_angle),
            ("wire_thickness", self.wire_thickness),
            ("intersection_width", self.intersection_width),
            ("splitter_to_wire", self.splitter_to_wire),
            ("wire_to_detector", self.wire_to_detector),
            ("detector_aperture", self.detector_aperture),
            ("amplitude_asymmetry", self.amplitude_asymmetry),
            ("pattern_offset", self.pattern_offset),
            ("gaussian_radius", self.gaussian_radius),
            ("photon_budget", self.photon_budget),
        ] {
            hasher.update(name.as_bytes());
            hasher.update(value.to_bits().to_le_bytes());
        }
        hasher.update(self.aperture_convention.to_string().as_bytes());
        let digest = hasher.finalize();
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    /// Parse the flat `key = value` format.
    ///
    /// One assignment per line; `#` starts a comment; blank lines are
    /// ignored. Every key except `aperture_convention` (default `full`) is
    /// required; unknown and duplicate keys are errors.
    fn from_str(text: &str) -> Result<Self> {
        let mut seen: Vec<(&str, String, usize)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            if !KEYS.contains(&key) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("unknown key `{key}`"),
                });
            }
            if seen.iter().any(|(k, _, _)| *k == key) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
            let canonical = KEYS.iter().find(|k| **k == key).unwrap();
            seen.push((canonical, value.to_string(), line_no));
        }

        let lookup = |key: &str| seen.iter().find(|(k, _, _)| *k == key);
        let length = |key: &str| -> Result<f64> {
            let (_, v, line) = lookup(key).ok_or_else(|| missing(key))?;
            units::parse_length(v).map_err(|e| at_line(*line, e))
        };
        let angle = |key: &str| -> Result<f64> {
            let (_, v, line) = lookup(key).ok_or_else(|| missing(key))?;
            units::parse_angle(v).map_err(|e| at_line(*line, e))
        };
        let number = |key: &str| -> Result<f64> {
            let (_, v, line) = lookup(key).ok_or_else(|| missing(key))?;
            units::parse_number(v).map_err(|e| at_line(*line, e))
        };
        let convention = match lookup("aperture_convention") {
            None => ApertureConvention::FullExtent,
            Some((_, v, line)) => match v.as_str() {
                "full" => ApertureConvention::FullExtent,
                "half" => ApertureConvention::HalfExtent,
                other => {
                    return Err(Error::Parse {
                        line: *line,
                        message: format!(
                            "aperture_convention must be `full` or `half`, got `{other}`"
                        ),
                    })
                }
            },
        };

        let config = ExperimentConfig {
            wavelength: length("wavelength")?,
            crossing_angle: angle("crossing_angle")?,
            wire_thickness: length("wire_thickness")?,
            intersection_width: length("intersection_width")?,
            splitter_to_wire: length("splitter_to_wire")?,
            wire_to_detector: length("wire_to_detector")?,
            detector_aperture: length("detector_aperture")?,
            amplitude_asymmetry: number("amplitude_asymmetry")?,
            pattern_offset: length("pattern_offset")?,
            gaussian_radius: length("gaussian_radius")?,
            photon_budget: number("photon_budget")?,
            aperture_convention: convention,
        };
        config.validate()?;
        Ok(config)
    }
}

fn missing(key: &str) -> Error {
    Error::InvalidConfig(format!("missing required key `{key}`"))
}

fn at_line(line: usize, err: Error) -> Error {
    Error::Parse {
        line,
        message: err.to_string(),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// A minimal valid config body used as an editing base.
    pub(crate) const BASE: &str = "\
wavelength = 632 nm
crossing_angle = 2.97 mrad
wire_thickness = 17 um
intersection_width = 1.0 mm
splitter_to_wire = 0.454 m
wire_to_detector = 2.521 m
detector_aperture = 5 mm
amplitude_asymmetry = 0.05
pattern_offset = 0.574 mm
gaussian_radius = 0.18 mm
photon_budget = 1000000
";

    #[test]
    fn parses_base_config_into_si_units() {
        let cfg: ExperimentConfig = BASE.parse().unwrap();
        assert_eq!(cfg.wavelength, 632e-9);
        assert_eq!(cfg.crossing_angle, 2.97e-3);
        assert_eq!(cfg.wire_thickness, 17e-6);
        assert_eq!(cfg.intersection_width, 1.0e-3);
        assert_eq!(cfg.pattern_offset, 0.574e-3);
        assert_eq!(cfg.photon_budget, 1e6);
        assert_eq!(cfg.aperture_convention, ApertureConvention::FullExtent);
    }

    #[test]
    fn window_is_centred_on_the_pattern() {
        let cfg: ExperimentConfig = BASE.parse().unwrap();
        let (lo, hi) = cfg.window();
        assert!((lo - 0.074e-3).abs() < 1e-12);
        assert!((hi - 1.074e-3).abs() < 1e-12);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let text = format!("{BASE}magnetic_field = 3 mm\n");
        match text.parse::<ExperimentConfig>() {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 12);
                assert!(message.contains("magnetic_field"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let dup = format!("{BASE}wavelength = 500 nm\n");
        assert!(matches!(
            dup.parse::<ExperimentConfig>(),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn rejects_missing_keys() {
        let text = BASE
            .lines()
            .filter(|l| !l.starts_with("gaussian_radius"))
            .collect::<Vec<_>>()
            .join("\n");
        match text.parse::<ExperimentConfig>() {
            Err(Error::InvalidConfig(msg)) => assert!(msg.contains("gaussian_radius")),
            other => panic!("expected missing-key error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_overlarge_crossing_angle() {
        let text = BASE.replace("2.97 mrad", "0.5 rad");
        match text.parse::<ExperimentConfig>() {
            Err(Error::InvalidConfig(msg)) => assert!(msg.contains("crossing_angle")),
            other => panic!("expected invalid-config error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_wire_at_half_fringe_width() {
        // fringe spacing is ~212.8 um here, so a 107 um wire is at the
        // half-fringe boundary and must be refused.
        let text = BASE.replace("17 um", "107 um");
        assert!(matches!(
            text.parse::<ExperimentConfig>(),
            Err(Error::InvalidConfig(_))
        ));
        let ok = BASE.replace("17 um", "105 um");
        assert!(ok.parse::<ExperimentConfig>().is_ok());
    }

    #[test]
    fn rejects_wide_gaussian_and_negative_pedestal() {
        let wide = BASE.replace("0.18 mm", "1.2 mm");
        assert!(wide.parse::<ExperimentConfig>().is_err());
        let neg = BASE.replace("0.05", "-0.01");
        assert!(neg.parse::<ExperimentConfig>().is_err());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = format!("# header\n\n{BASE}\n# trailing\naperture_convention = half\n");
        let cfg: ExperimentConfig = text.parse().unwrap();
        assert_eq!(cfg.aperture_convention, ApertureConvention::HalfExtent);
    }

    #[test]
    fn fingerprint_is_stable_and_sensitive() {
        let a: ExperimentConfig = BASE.parse().unwrap();
        let b: ExperimentConfig = BASE.parse().unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint().len(), 16);
        let c: ExperimentConfig = BASE.replace("0.05", "0.06").parse().unwrap();
        assert_ne!(a.fingerprint(), c.fingerprint());
    }
}
