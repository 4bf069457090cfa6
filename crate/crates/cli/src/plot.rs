//! Self-contained SVG rendering of a wire scan: measured count ratios with
//! error bars, overlaid with the noise-free model curve for the same
//! configuration.
//!
//! The model curve depends only on the config and scan mode — never on the
//! simulated counts — so re-plotting with a different seed moves the data
//! markers but leaves the curve byte-identical. Nothing here reads clocks or
//! RNGs; the same inputs always render the same bytes.

use std::fmt::Write as _;

use fringeprobe::{
    fractional_count, fractional_count_single_beam, ExperimentConfig, Result, ScanMode,
    ScanSeries,
};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 58.0;
/// Number of positions the model curve is sampled at.
const CURVE_SAMPLES: usize = 240;

/// Render a scan and its model curve as an 800x500 SVG document.
pub fn scan_svg(config: &ExperimentConfig, series: &ScanSeries) -> Result<String> {
    let (lo, hi) = config.window();
    let expected = |y: f64| match series.mode {
        ScanMode::BothBeams => fractional_count(config, y),
        ScanMode::OneBeamBlocked => fractional_count_single_beam(config, y),
    };
    let mut curve = Vec::with_capacity(CURVE_SAMPLES);
    for i in 0..CURVE_SAMPLES {
        let y = lo + (hi - lo) * i as f64 / (CURVE_SAMPLES - 1) as f64;
        curve.push((y, expected(y)?));
    }

    // Horizontal range: the window, stretched if the data extends past it.
    let x_lo = series.points.first().map_or(lo, |p| p.position.min(lo));
    let x_hi = series.points.last().map_or(hi, |p| p.position.max(hi));

    // Vertical range from the model curve alone (so it is seed-invariant),
    // padded; data outside the pad is clipped to the plot box.
    let f_lo = curve.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let f_hi = curve.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    let pad = 0.08 * (f_hi - f_lo) + 0.01;
    let y_lo = f_lo - pad;
    let y_hi = f_hi + pad;

    let to_px = |y: f64| MARGIN_LEFT + (y - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT);
    let to_py = |f: f64| {
        let frac = (f - y_lo) / (y_hi - y_lo);
        HEIGHT - MARGIN_BOTTOM - frac * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    };
    let clip_py = |f: f64| to_py(f.clamp(y_lo, y_hi));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"##
    );
    let _ = writeln!(svg, r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##);

    // Plot box.
    let _ = writeln!(
        svg,
        r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444444" stroke-width="1"/>"##,
        MARGIN_LEFT,
        MARGIN_TOP,
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    );

    // Axis ticks and labels.
    for i in 0..=4 {
        let y = x_lo + (x_hi - x_lo) * i as f64 / 4.0;
        let px = to_px(y);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#444444" stroke-width="1"/>"##,
            HEIGHT - MARGIN_BOTTOM,
            HEIGHT - MARGIN_BOTTOM + 5.0
        );
        let _ = writeln!(
            svg,
            r##"<text x="{px:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{:.3}</text>"##,
            HEIGHT - MARGIN_BOTTOM + 20.0,
            y * 1e3
        );
        let f = y_lo + (y_hi - y_lo) * i as f64 / 4.0;
        let py = to_py(f);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#444444" stroke-width="1"/>"##,
            MARGIN_LEFT - 5.0,
            MARGIN_LEFT
        );
        let _ = writeln!(
            svg,
            r##"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="end">{f:.3}</text>"##,
            MARGIN_LEFT - 9.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r##"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="middle">wire position (mm)</text>"##,
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        HEIGHT - 14.0
    );
    let _ = writeln!(
        svg,
        r##"<text x="18" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 18 {:.2})">fractional count rate</text>"##,
        (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0,
        (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0
    );
    let _ = writeln!(
        svg,
        r##"<text x="{:.2}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">wire scan, {}</text>"##,
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        series.mode
    );

    // Measured points: error bars first, then markers.
    for point in &series.points {
        let px = to_px(point.position);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#1f6fb2" stroke-width="1"/>"##,
            clip_py(point.f + point.f_err),
            clip_py(point.f - point.f_err)
        );
        let _ = writeln!(
            svg,
            r##"<circle cx="{px:.2}" cy="{:.2}" r="2" fill="#1f6fb2"/>"##,
            clip_py(point.f)
        );
    }

    // The model curve: exactly one polyline, drawn from the config alone.
    let mut points_attr = String::new();
    for (y, f) in &curve {
        let _ = write!(points_attr, "{:.2},{:.2} ", to_px(*y), to_py(*f));
    }
    let _ = writeln!(
        svg,
        r##"<polyline fill="none" stroke="#c0392b" stroke-width="1.5" points="{}"/>"##,
        points_attr.trim_end()
    );

    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fringeprobe::{simulate_scan, NoiseModel};

    fn config() -> ExperimentConfig {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/paper.config");
        std::fs::read_to_string(path).unwrap().parse().unwrap()
    }

    fn scan(seed: u64) -> ScanSeries {
        let cfg = config();
        let (lo, hi) = cfg.window();
        let positions: Vec<f64> =
            (0..40).map(|i| lo + (hi - lo) * i as f64 / 39.0).collect();
        simulate_scan(&cfg, &positions, 1e6, seed, ScanMode::BothBeams, NoiseModel::Poisson)
            .unwrap()
    }

    #[test]
    fn renders_exactly_one_model_polyline() {
        let svg = scan_svg(&config(), &scan(1)).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.starts_with("<svg "));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn model_curve_ignores_the_seed() {
        let cfg = config();
        let a = scan_svg(&cfg, &scan(1)).unwrap();
        let b = scan_svg(&cfg, &scan(2)).unwrap();
        let polyline = |svg: &str| {
            let start = svg.find("<polyline").unwrap();
            svg[start..svg[start..].find("/>").unwrap() + start].to_string()
        };
        assert_eq!(polyline(&a), polyline(&b));
        assert_ne!(a, b, "data markers must differ between seeds");
    }

    #[test]
    fn rendering_is_deterministic() {
        let cfg = config();
        assert_eq!(scan_svg(&cfg, &scan(9)).unwrap(), scan_svg(&cfg, &scan(9)).unwrap());
    }
}
