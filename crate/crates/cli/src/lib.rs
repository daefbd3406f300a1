//! Sweep runner behind the `dicke-cat` binary: configuration, presets, the
//! ground-state cache and the per-point pipeline (solve, herald, fit, Wigner).

pub mod cache;
pub mod config;
pub mod presets;
pub mod sweep;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::{ConfigError, Experiment, SweepConfig};

/// Environment variable overriding `output_dir`.
pub const ENV_OUTPUT_DIR: &str = "DICKE_CAT_OUTPUT_DIR";
/// Environment variable overriding `workers`.
pub const ENV_WORKERS: &str = "DICKE_CAT_WORKERS";
/// Environment variable overriding the cache directory.
pub const ENV_CACHE_DIR: &str = "DICKE_CAT_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".dicke-cat-cache";

/// Process exit statuses.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const PARTIAL: i32 = 2;
    pub const FAILURE: i32 = 3;
}

pub struct RunOptions {
    pub output_dir: PathBuf,
    pub workers: usize,
    pub cache_dir: Option<PathBuf>,
}

pub struct RunOutcome {
    pub report: sweep::SweepReport,
    pub outputs: Vec<PathBuf>,
    pub status: i32,
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Runs a validated configuration, writes the CSV tables, Wigner grids and
/// `manifest.json`, and maps the outcome to an exit status.
pub fn run(config: &SweepConfig, options: &RunOptions) -> std::io::Result<RunOutcome> {
    let start = Instant::now();
    let cache = options.cache_dir.as_deref().map(cache::Cache::open).transpose()?;
    let report = sweep::execute(config, options.workers, cache.as_ref())?;
    let mut outputs = sweep::write_outputs(config, &report, &options.output_dir)?;
    let manifest_path = options.output_dir.join("manifest.json");
    outputs.push(manifest_path.clone());
    let manifest = sweep::manifest(config, &report, options.workers, start.elapsed().as_secs_f64(), &outputs);
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    let status = if report.total_failure() {
        exit::FAILURE
    } else if report.failures().is_empty() {
        exit::SUCCESS
    } else {
        exit::PARTIAL
    };
    Ok(RunOutcome { report, outputs, status })
}

/// Reads and validates a configuration file, prefixing errors with its path.
pub fn load_config(path: &Path) -> Result<SweepConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    SweepConfig::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}
