use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dicke_cat_cli::cache::Cache;
use dicke_cat_cli::{exit, presets, RunOptions, SweepConfig};

#[derive(Parser)]
#[command(name = "dicke-cat", version, about = "Heralded spin-cat data from the Dicke ground state")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep from a config file or a shipped preset
    Run {
        /// Path to a TOML config
        #[arg(required_unless_present = "preset", conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Name of a shipped preset (see `presets`)
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, env = dicke_cat_cli::ENV_OUTPUT_DIR)]
        output_dir: Option<PathBuf>,
        #[arg(long, env = dicke_cat_cli::ENV_WORKERS)]
        workers: Option<usize>,
        #[arg(long, env = dicke_cat_cli::ENV_CACHE_DIR, default_value = dicke_cat_cli::DEFAULT_CACHE_DIR)]
        cache_dir: PathBuf,
        /// Solve every point afresh and leave the cache untouched
        #[arg(long)]
        no_cache: bool,
    },
    /// List presets, or print one
    Presets { name: Option<String> },
    /// Inspect or empty the ground-state cache
    Cache {
        #[command(subcommand)]
        action: CacheAction,
        #[arg(long, global = true, env = dicke_cat_cli::ENV_CACHE_DIR, default_value = dicke_cat_cli::DEFAULT_CACHE_DIR)]
        cache_dir: PathBuf,
    },
    /// Check a config file without running it
    Validate { config: PathBuf },
}

#[derive(Subcommand)]
enum CacheAction {
    List,
    Clear,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(dispatch(cli.command) as u8)
}

fn dispatch(command: Command) -> i32 {
    match command {
        Command::Run { config, preset, output_dir, workers, cache_dir, no_cache } => {
            let loaded = match (config, preset) {
                (Some(path), _) => dicke_cat_cli::load_config(&path),
                (None, Some(name)) => match presets::find(&name) {
                    Some(p) => SweepConfig::parse(p.text).map_err(|e| format!("preset {name}: {e}")),
                    None => Err(format!("unknown preset '{name}'")),
                },
                (None, None) => Err("no config given".into()),
            };
            let config = match loaded {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit::CONFIG;
                }
            };
            if workers == Some(0) {
                eprintln!("error: workers must be at least 1");
                return exit::CONFIG;
            }
            let options = RunOptions {
                output_dir: output_dir.unwrap_or_else(|| config.output_dir.clone()),
                workers: workers.or(config.workers).unwrap_or_else(dicke_cat_cli::default_workers),
                cache_dir: (!no_cache && !config.experiment.is_thermo()).then_some(cache_dir),
            };
            eprintln!(
                "{}: {} points on {} workers -> {}",
                config.experiment.name(),
                config.point_count(),
                options.workers,
                options.output_dir.display()
            );
            match dicke_cat_cli::run(&config, &options) {
                Ok(outcome) => {
                    let failures = outcome.report.failures();
                    for f in &failures {
                        match f.n {
                            Some(n) => eprintln!("failed: {} n={n}: {}", f.point, f.error),
                            None => eprintln!("failed: {}: {}", f.point, f.error),
                        }
                    }
                    eprintln!(
                        "{} rows, {} failures, {} files written",
                        outcome.report.rows().count(),
                        failures.len(),
                        outcome.outputs.len()
                    );
                    outcome.status
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    exit::FAILURE
                }
            }
        }
        Command::Presets { name: None } => {
            for p in presets::PRESETS {
                println!("{:<6} {}", p.name, p.summary);
            }
            exit::SUCCESS
        }
        Command::Presets { name: Some(name) } => match presets::find(&name) {
            Some(p) => {
                print!("{}", p.text);
                exit::SUCCESS
            }
            None => {
                eprintln!("error: unknown preset '{name}'");
                exit::CONFIG
            }
        },
        Command::Cache { action, cache_dir } => {
            let cache = match Cache::open(&cache_dir) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {}: {e}", cache_dir.display());
                    return exit::FAILURE;
                }
            };
            let result = match action {
                CacheAction::List => cache.entries().map(|entries| {
                    for e in &entries {
                        println!("{}  {} bytes", e.key, e.bytes);
                    }
                    eprintln!("{} entries in {}", entries.len(), cache.dir().display());
                }),
                CacheAction::Clear => cache.clear().map(|n| eprintln!("removed {n} entries from {}", cache.dir().display())),
            };
            match result {
                Ok(()) => exit::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    exit::FAILURE
                }
            }
        }
        Command::Validate { config } => match dicke_cat_cli::load_config(&config) {
            Ok(c) => {
                println!("{}: {} ({} points)", config.display(), c.experiment.name(), c.point_count());
                exit::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit::CONFIG
            }
        },
    }
}
