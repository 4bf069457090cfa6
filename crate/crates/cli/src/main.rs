//! `fringeprobe` — simulate and analyse two-beam wire-scan interference
//! experiments from the command line.
//!
//! Outputs are deterministic: the same config, seed, and flags always
//! produce byte-identical files (no timestamps, no hidden state).
//!
//! Exit codes: 0 success; 2 bad input (missing or invalid config, malformed
//! scan file, unusable flag values); 3 output I/O failure; 4 a numerical
//! routine failed to converge (partial results are still written when
//! available).

mod plot;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fringeprobe::{
    complementarity_audit, fit_scan, momentum_uncertainty_audit, simulate_scan,
    ComplementarityReport, Error, ExperimentConfig, FitResult, MomentumAudit, NoiseModel,
    ScanMode, ScanSeries,
};

const EXIT_INPUT: u8 = 2;
const EXIT_OUTPUT: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "fringeprobe",
    version,
    about = "Simulate and analyse two-beam wire-scan interference experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a wire scan; writes a CSV series and an SVG plot
    Simulate(SimulateArgs),
    /// Fit pattern centre, envelope radius, and pedestal to a saved scan
    Fit(FitArgs),
    /// Audit which-way knowledge against fringe visibility
    Analyze(AnalyzeArgs),
    /// Compare the beam momentum split with the wire's momentum spread
    Momentum(MomentumArgs),
    /// Full pipeline: simulate both modes, fit, audit, and plot
    Report(ReportArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Both beams cross at the wire plane (fringed scan)
    #[value(alias = "both")]
    BothBeams,
    /// One beam blocked upstream (envelope-only scan)
    #[value(alias = "single")]
    OneBeamBlocked,
}

impl From<ModeArg> for ScanMode {
    fn from(mode: ModeArg) -> ScanMode {
        match mode {
            ModeArg::BothBeams => ScanMode::BothBeams,
            ModeArg::OneBeamBlocked => ScanMode::OneBeamBlocked,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum NoiseArg {
    /// Poisson counting noise at the configured photon budget
    Poisson,
    /// No noise: each point is the exact expected ratio
    None,
}

impl From<NoiseArg> for NoiseModel {
    fn from(noise: NoiseArg) -> NoiseModel {
        match noise {
            NoiseArg::Poisson => NoiseModel::Poisson,
            NoiseArg::None => NoiseModel::NoiseFree,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    /// Human-readable summary
    Text,
    /// The same JSON document the file outputs use
    Json,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment description file (key = value lines)
    #[arg(long)]
    config: PathBuf,
    /// Directory outputs are written into (created if missing)
    #[arg(long)]
    out: PathBuf,
    /// Number of evenly spaced wire positions across the scan window
    #[arg(long, default_value_t = 400)]
    points: usize,
    /// Photon budget per scan point
    #[arg(long, default_value_t = 1e6)]
    photons: f64,
    /// Seed for the counting-noise generator
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Beam arrangement to simulate
    #[arg(long, value_enum, default_value_t = ModeArg::BothBeams)]
    mode: ModeArg,
    /// Counting-noise model
    #[arg(long, value_enum, default_value_t = NoiseArg::Poisson)]
    noise: NoiseArg,
}

#[derive(Args)]
struct FitArgs {
    /// Experiment description file (key = value lines)
    #[arg(long)]
    config: PathBuf,
    /// Scan CSV to fit (as written by `simulate` or `report`)
    #[arg(long)]
    scan: PathBuf,
    /// Directory fit.json is written into (created if missing)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Experiment description file (key = value lines)
    #[arg(long)]
    config: PathBuf,
    /// Optional directory for report.json and summary.txt
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of wire positions the which-way profile averages over
    #[arg(long, default_value_t = 100)]
    points: usize,
    /// What to print on stdout
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Args)]
struct MomentumArgs {
    /// Experiment description file (key = value lines)
    #[arg(long)]
    config: PathBuf,
    /// Optional directory for momentum.json
    #[arg(long)]
    out: Option<PathBuf>,
    /// What to print on stdout
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Args)]
struct ReportArgs {
    /// Experiment description file (key = value lines)
    #[arg(long)]
    config: PathBuf,
    /// Directory the full artifact set is written into (created if missing)
    #[arg(long)]
    out: PathBuf,
    /// Number of evenly spaced wire positions per simulated scan
    #[arg(long, default_value_t = 400)]
    points: usize,
    /// Photon budget per scan point
    #[arg(long, default_value_t = 1e6)]
    photons: f64,
    /// Seed for the counting-noise generator
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// A failed run: what to print on stderr and which code to exit with.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

/// Map a toolkit error onto the exit-code contract: bad input is 2,
/// numerical non-convergence is 4.
fn classify(err: Error) -> Failure {
    let code = if err.is_input_error() { EXIT_INPUT } else { EXIT_NUMERICAL };
    Failure { code, message: err.to_string() }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate(args) => run_simulate(args),
        Command::Fit(args) => run_fit(args),
        Command::Analyze(args) => run_analyze(args),
        Command::Momentum(args) => run_momentum(args),
        Command::Report(args) => run_report(args),
    }
}

fn load_config(path: &Path) -> Result<ExperimentConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|err| {
        Failure::input(format!("cannot read config {}: {err}", path.display()))
    })?;
    let config: ExperimentConfig = text.parse().map_err(classify)?;
    config.validate().map_err(classify)?;
    Ok(config)
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|err| Failure {
        code: EXIT_OUTPUT,
        message: format!("cannot create output directory {}: {err}", dir.display()),
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|err| Failure {
        code: EXIT_OUTPUT,
        message: format!("cannot write {}: {err}", path.display()),
    })?;
    println!("wrote {}", path.display());
    Ok(())
}

fn to_json(value: &impl serde::Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

/// Evenly spaced wire positions spanning the config's scan window.
fn scan_positions(config: &ExperimentConfig, n: usize) -> Result<Vec<f64>, Failure> {
    if n < 2 {
        return Err(Failure::input(format!("--points must be at least 2, got {n}")));
    }
    let (lo, hi) = config.window();
    Ok((0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect())
}

/// File stem for a scan of the given mode.
fn scan_stem(mode: ScanMode) -> &'static str {
    match mode {
        ScanMode::BothBeams => "scan_both",
        ScanMode::OneBeamBlocked => "scan_single",
    }
}

fn simulate_to_dir(
    config: &ExperimentConfig,
    out: &Path,
    positions: &[f64],
    photons: f64,
    seed: u64,
    mode: ScanMode,
    noise: NoiseModel,
) -> Result<ScanSeries, Failure> {
    let series =
        simulate_scan(config, positions, photons, seed, mode, noise).map_err(classify)?;
    let stem = scan_stem(mode);
    write_file(&out.join(format!("{stem}.csv")), &series.to_csv())?;
    let svg = plot::scan_svg(config, &series).map_err(classify)?;
    write_file(&out.join(format!("{stem}.svg")), &svg)?;
    Ok(series)
}

fn run_simulate(args: SimulateArgs) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    let positions = scan_positions(&config, args.points)?;
    ensure_dir(&args.out)?;
    simulate_to_dir(
        &config,
        &args.out,
        &positions,
        args.photons,
        args.seed,
        args.mode.into(),
        args.noise.into(),
    )?;
    Ok(())
}

fn run_fit(args: FitArgs) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    let text = std::fs::read_to_string(&args.scan).map_err(|err| {
        Failure::input(format!("cannot read scan {}: {err}", args.scan.display()))
    })?;
    let series = ScanSeries::from_csv(&text).map_err(classify)?;
    if !series.config_fingerprint.is_empty()
        && series.config_fingerprint != config.fingerprint()
    {
        eprintln!(
            "warning: scan was recorded with config {} but this config is {}",
            series.config_fingerprint,
            config.fingerprint()
        );
    }
    ensure_dir(&args.out)?;
    match fit_scan(&config, &series) {
        Ok(fit) => {
            write_file(&args.out.join("fit.json"), &to_json(&fit))?;
            print!("{}", fit_text(&fit));
            Ok(())
        }
        Err(Error::FitNonConvergence { partial }) => {
            write_file(&args.out.join("fit.json"), &to_json(partial.as_ref()))?;
            Err(Failure {
                code: EXIT_NUMERICAL,
                message: format!(
                    "fit did not converge after {} iterations; best-so-far \
                     parameters written with converged = false",
                    partial.iterations
                ),
            })
        }
        Err(err) => Err(classify(err)),
    }
}

fn run_analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    if args.points < 2 {
        return Err(Failure::input(format!(
            "--points must be at least 2, got {}",
            args.points
        )));
    }
    let report = complementarity_audit(&config, args.points).map_err(classify)?;
    match args.format {
        FormatArg::Json => print!("{}", to_json(&report)),
        FormatArg::Text => print!("{}", summary_text(&report, None)),
    }
    if let Some(out) = &args.out {
        ensure_dir(out)?;
        write_file(&out.join("report.json"), &to_json(&report))?;
        write_file(&out.join("summary.txt"), &summary_text(&report, None))?;
    }
    Ok(())
}

fn run_momentum(args: MomentumArgs) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    let audit = momentum_uncertainty_audit(&config);
    match args.format {
        FormatArg::Json => print!("{}", to_json(&audit)),
        FormatArg::Text => print!("{}", momentum_text(&audit)),
    }
    if let Some(out) = &args.out {
        ensure_dir(out)?;
        write_file(&out.join("momentum.json"), &to_json(&audit))?;
    }
    Ok(())
}

/// Everything `report` writes, in the order it writes them.
const REPORT_FILES: [&str; 8] = [
    "scan_both.csv",
    "scan_both.svg",
    "scan_single.csv",
    "scan_single.svg",
    "fit.json",
    "report.json",
    "momentum.json",
    "summary.txt",
];

#[derive(serde::Serialize)]
struct RunManifest {
    tool_version: &'static str,
    config_fingerprint: String,
    seed: u64,
    points: usize,
    photons_per_point: f64,
    files: Vec<&'static str>,
}

fn run_report(args: ReportArgs) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    let positions = scan_positions(&config, args.points)?;
    ensure_dir(&args.out)?;

    let both = simulate_to_dir(
        &config,
        &args.out,
        &positions,
        args.photons,
        args.seed,
        ScanMode::BothBeams,
        NoiseModel::Poisson,
    )?;
    simulate_to_dir(
        &config,
        &args.out,
        &positions,
        args.photons,
        args.seed,
        ScanMode::OneBeamBlocked,
        NoiseModel::Poisson,
    )?;

    // Fit the fringed scan; a non-converged fit still writes its best
    // parameters and downgrades the run's exit status at the end.
    let (fit, fit_failure) = match fit_scan(&config, &both) {
        Ok(fit) => (fit, None),
        Err(Error::FitNonConvergence { partial }) => {
            let message = format!(
                "fit did not converge after {} iterations; best-so-far \
                 parameters written with converged = false",
                partial.iterations
            );
            (*partial, Some(message))
        }
        Err(err) => return Err(classify(err)),
    };
    write_file(&args.out.join("fit.json"), &to_json(&fit))?;

    let report = complementarity_audit(&config, 100).map_err(classify)?;
    write_file(&args.out.join("report.json"), &to_json(&report))?;
    write_file(&args.out.join("momentum.json"), &to_json(&report.momentum))?;
    write_file(
        &args.out.join("summary.txt"),
        &summary_text(&report, Some(&fit)),
    )?;

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        config_fingerprint: config.fingerprint(),
        seed: args.seed,
        points: args.points,
        photons_per_point: args.photons,
        files: REPORT_FILES.to_vec(),
    };
    write_file(&args.out.join("manifest.json"), &to_json(&manifest))?;

    match fit_failure {
        None => Ok(()),
        Some(message) => Err(Failure { code: EXIT_NUMERICAL, message }),
    }
}

fn summary_text(report: &ComplementarityReport, fit: Option<&FitResult>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "two-beam wire-scan audit");
    let _ = writeln!(s, "========================");
    let _ = writeln!(s, "captured diffraction fraction : {:.6}", report.capture_fraction);
    let _ = writeln!(s, "fringe visibility             : {:.6}", report.visibility);
    let _ = writeln!(s, "mean which-way knowledge      : {:.6}", report.average_which_way);
    let _ = writeln!(s, "K^2 + V^2, photons at wire    : {:.6}", report.at_wire.kv_sum);
    let _ = writeln!(s, "K^2 + V^2, photons past wire  : {:.6}", report.past_wire.kv_sum);
    let _ = writeln!(
        s,
        "K^2 + V^2, ensembles pooled   : {:.6} (mixes the two ensembles; not \
         bounded by 1)",
        report.pooled_kv_sum
    );
    let _ = writeln!(s);
    s.push_str(&momentum_text(&report.momentum));
    if let Some(fit) = fit {
        let _ = writeln!(s);
        s.push_str(&fit_text(fit));
    }
    s
}

fn momentum_text(audit: &MomentumAudit) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "beam momentum split    : {:.6} (transverse, in h-bar x angle / wavelength units)",
        audit.beam_momentum_split
    );
    let _ = writeln!(
        s,
        "wire momentum spread   : {:.6} (same units; nominal {})",
        audit.wire_momentum_spread, audit.nominal_wire_momentum_spread
    );
    let _ = writeln!(
        s,
        "resolution margin      : {:.4} (split / spread)",
        audit.resolution_margin
    );
    let _ = writeln!(
        s,
        "fringe-to-wire ratio   : {:.6} (nominal {})",
        audit.fringe_to_wire_ratio, audit.nominal_fringe_to_wire
    );
    let _ = writeln!(s, "interpretation         : {}", audit.interpretation);
    s
}

fn fit_text(fit: &FitResult) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "fitted pattern centre  : {:.6} mm +/- {:.6}",
        fit.y0, fit.param_stderr[0]
    );
    let _ = writeln!(
        s,
        "fitted envelope radius : {:.6} mm +/- {:.6}",
        fit.sigma, fit.param_stderr[1]
    );
    let _ = writeln!(
        s,
        "fitted pedestal        : {:.6} +/- {:.6}",
        fit.a, fit.param_stderr[2]
    );
    let _ = writeln!(s, "fitted visibility      : {:.6}", fit.visibility);
    let _ = writeln!(
        s,
        "converged              : {} ({} iterations)",
        fit.converged, fit.iterations
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn input_errors_exit_2_and_numerical_errors_exit_4() {
        assert_eq!(classify(Error::InvalidConfig("x".into())).code, EXIT_INPUT);
        assert_eq!(
            classify(Error::Parse { line: 3, message: "x".into() }).code,
            EXIT_INPUT
        );
        assert_eq!(classify(Error::DegenerateFit("x".into())).code, EXIT_INPUT);
        assert_eq!(
            classify(Error::QuadratureNonConvergence { max_subdivisions: 1 }).code,
            EXIT_NUMERICAL
        );
        assert_eq!(classify(Error::SingularJacobian).code, EXIT_NUMERICAL);
        let partial = Box::new(FitResult {
            y0: 0.0,
            sigma: 0.0,
            a: 0.0,
            residual_norm: 0.0,
            param_stderr: [0.0; 3],
            visibility: 0.0,
            converged: false,
            iterations: 7,
        });
        assert_eq!(
            classify(Error::FitNonConvergence { partial }).code,
            EXIT_NUMERICAL
        );
    }

    #[test]
    fn missing_config_is_an_input_failure() {
        let failure = load_config(Path::new("/nonexistent/rig.config")).unwrap_err();
        assert_eq!(failure.code, EXIT_INPUT);
        assert!(failure.message.contains("cannot read config"));
    }

    #[test]
    fn scan_positions_span_the_window() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/paper.config");
        let config: ExperimentConfig =
            std::fs::read_to_string(path).unwrap().parse().unwrap();
        let positions = scan_positions(&config, 5).unwrap();
        let (lo, hi) = config.window();
        assert_eq!(positions.len(), 5);
        assert_eq!(positions[0], lo);
        assert_eq!(positions[4], hi);
        assert!(scan_positions(&config, 1).is_err());
    }

    #[test]
    fn summary_text_is_complete_and_stable() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/paper.config");
        let config: ExperimentConfig =
            std::fs::read_to_string(path).unwrap().parse().unwrap();
        let report = complementarity_audit(&config, 10).unwrap();
        let text = summary_text(&report, None);
        assert!(text.contains("captured diffraction fraction"));
        assert!(text.contains("K^2 + V^2, ensembles pooled"));
        assert!(text.contains("beam momentum split"));
        assert_eq!(text, summary_text(&report, None));
    }
}
