//! Shared helpers for the benchmark suite.

use fringeprobe::ExperimentConfig;

/// The bundled reference rig every benchmark runs against.
pub fn reference_config() -> ExperimentConfig {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/paper.config");
    std::fs::read_to_string(path)
        .expect("bundled config must exist")
        .parse()
        .expect("bundled config must parse")
}
