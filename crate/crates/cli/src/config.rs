//! Declarative sweep configuration (TOML).
//!
//! ```toml
//! experiment = "g-sweep"      # herald-scan | g-sweep | n-sweep | omega-sweep
//!                             # | thermo-sweep | wigner | convergence
//! atoms = [200]
//! g_over_gc = [0.5, 0.9, 1.0]
//! omega_ratio = [1.0]         # omega_atom / omega_cav, default [1.0]
//! photons = [1, 2, 3]
//! n_cutoff = 50
//! output_dir = "out/fig3"
//! workers = 4
//!
//! [solver]                    # optional, Lanczos settings
//! tol = 1e-13
//!
//! [wigner]                    # wigner runs only
//! theta_max = 1.0
//! points = 201
//! frame = "css"               # css | standard
//! ```
//!
//! `convergence` runs take `cutoffs = [30, 40, ...]` instead of `n_cutoff`;
//! `thermo-sweep` runs take no `atoms` and may add
//! `scaling_window = [1e-6, 1e-4]` to fit the critical exponent of `P(n)`.

use std::fmt;
use std::path::PathBuf;

use dicke_cat::dicke::DEFAULT_N_CUTOFF;
use dicke_cat::lanczos::LanczosSettings;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    HeraldScan,
    GSweep,
    #[serde(alias = "N-sweep")]
    NSweep,
    OmegaSweep,
    ThermoSweep,
    Wigner,
    Convergence,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::HeraldScan => "herald-scan",
            Experiment::GSweep => "g-sweep",
            Experiment::NSweep => "n-sweep",
            Experiment::OmegaSweep => "omega-sweep",
            Experiment::ThermoSweep => "thermo-sweep",
            Experiment::Wigner => "wigner",
            Experiment::Convergence => "convergence",
        }
    }

    pub fn is_thermo(self) -> bool {
        self == Experiment::ThermoSweep
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// theta = 0 at the collective ground state |J,-J>, as in the figures
    Css,
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerSpec {
    #[serde(default = "default_theta_max")]
    pub theta_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_frame")]
    pub frame: Frame,
}

impl Default for WignerSpec {
    fn default() -> Self {
        Self { theta_max: default_theta_max(), points: default_points(), frame: default_frame() }
    }
}

fn default_theta_max() -> f64 {
    1.0
}
fn default_points() -> usize {
    201
}
fn default_frame() -> Frame {
    Frame::Css
}
fn default_omega() -> Vec<f64> {
    vec![1.0]
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_scaling_points() -> usize {
    9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub atoms: Vec<usize>,
    #[serde(default)]
    pub g_over_gc: Vec<f64>,
    #[serde(default = "default_omega")]
    pub omega_ratio: Vec<f64>,
    #[serde(default)]
    pub photons: Vec<usize>,
    #[serde(default)]
    pub n_cutoff: Option<usize>,
    #[serde(default)]
    pub cutoffs: Vec<usize>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub solver: LanczosSettings,
    #[serde(default)]
    pub wigner: Option<WignerSpec>,
    #[serde(default)]
    pub scaling_window: Option<[f64; 2]>,
    #[serde(default = "default_scaling_points")]
    pub scaling_points: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of the first `key = ...` assignment, if any.
fn line_of_key(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let t = l.trim_start();
        t.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

impl SweepConfig {
    /// Parses and validates; errors carry the offending line where known.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let config: SweepConfig = toml::from_str(text).map_err(|e| ConfigError {
            line: e.span().map(|s| line_at(text, s.start)),
            message: e.message().trim().to_string(),
        })?;
        config.validate().map_err(|(key, message)| ConfigError { line: key.and_then(|k| line_of_key(text, k)), message })?;
        Ok(config)
    }

    pub fn n_cutoff(&self) -> usize {
        self.n_cutoff.unwrap_or(DEFAULT_N_CUTOFF)
    }

    /// Photon cutoffs solved at each point: `cutoffs` for convergence runs, else `[n_cutoff]`.
    pub fn solve_cutoffs(&self) -> Vec<usize> {
        if self.experiment == Experiment::Convergence { self.cutoffs.clone() } else { vec![self.n_cutoff()] }
    }

    pub fn wigner_spec(&self) -> Option<WignerSpec> {
        match self.experiment {
            Experiment::Wigner => Some(self.wigner.unwrap_or_default()),
            _ => None,
        }
    }

    /// Number of independent solver points.
    pub fn point_count(&self) -> usize {
        if self.experiment.is_thermo() {
            self.g_over_gc.len()
        } else {
            self.atoms.len() * self.g_over_gc.len() * self.omega_ratio.len() * self.solve_cutoffs().len()
        }
    }

    fn validate(&self) -> Result<(), (Option<&'static str>, String)> {
        let kind = self.experiment.name();
        let err = |key: &'static str, msg: String| Err((Some(key), msg));
        if self.g_over_gc.is_empty() {
            return err("g_over_gc", format!("{kind} needs a non-empty g_over_gc grid"));
        }
        if self.photons.is_empty() {
            return err("photons", format!("{kind} needs a non-empty photons grid"));
        }
        if self.omega_ratio.is_empty() {
            return err("omega_ratio", "omega_ratio grid is empty".into());
        }
        if let Some(g) = self.g_over_gc.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return err("g_over_gc", format!("coupling g/g_c = {g} must be finite and non-negative"));
        }
        if let Some(w) = self.omega_ratio.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return err("omega_ratio", format!("frequency ratio {w} must be positive"));
        }
        if self.workers == Some(0) {
            return err("workers", "workers must be at least 1".into());
        }
        if !(self.solver.tol > 0.0) || self.solver.max_iter == 0 || self.solver.krylov_dim < 2 {
            return err("tol", "solver needs tol > 0, max_iter >= 1 and krylov_dim >= 2".into());
        }
        if self.experiment.is_thermo() {
            if !self.atoms.is_empty() {
                return err("atoms", "thermo-sweep is the N -> infinity limit and takes no atoms grid".into());
            }
            if self.omega_ratio != [1.0] {
                return err("omega_ratio", "thermo-sweep covers the resonant case only".into());
            }
            if let Some(g) = self.g_over_gc.iter().find(|g| **g >= 1.0) {
                return err("g_over_gc", format!("thermo-sweep needs g/g_c < 1, got {g}"));
            }
            if let Some([lo, hi]) = self.scaling_window {
                if !(lo > 0.0 && hi > lo && hi < 0.1) {
                    return err("scaling_window", format!("scaling window [{lo}, {hi}] must satisfy 0 < lo < hi < 0.1"));
                }
                if self.scaling_points < 2 {
                    return err("scaling_points", "scaling fit needs at least 2 points".into());
                }
            }
        } else {
            if self.atoms.is_empty() {
                return err("atoms", format!("{kind} needs a non-empty atoms grid"));
            }
            if self.atoms.contains(&0) {
                return err("atoms", "atom numbers must be positive".into());
            }
            if self.scaling_window.is_some() {
                return err("scaling_window", "scaling_window applies to thermo-sweep only".into());
            }
        }
        if self.experiment == Experiment::Convergence {
            if self.n_cutoff.is_some() {
                return err("n_cutoff", "convergence runs take a cutoffs list, not n_cutoff".into());
            }
            if self.cutoffs.len() < 2 || self.cutoffs.windows(2).any(|w| w[1] <= w[0]) {
                return err("cutoffs", "cutoffs must list at least two strictly increasing values".into());
            }
        } else if !self.cutoffs.is_empty() {
            return err("cutoffs", format!("cutoffs is only used by convergence runs, not {kind}"));
        }
        if !self.experiment.is_thermo() {
            let smallest = self.solve_cutoffs().into_iter().min().unwrap_or(0);
            if smallest == 0 {
                return err("n_cutoff", "photon cutoff must be at least 1".into());
            }
            if let Some(n) = self.photons.iter().find(|n| **n > smallest) {
                return err("photons", format!("photon number {n} exceeds the cutoff {smallest}"));
            }
        }
        if self.wigner.is_some() && self.experiment != Experiment::Wigner {
            return err("theta_max", "a [wigner] table needs experiment = \"wigner\"".into());
        }
        if let Some(w) = self.wigner_spec() {
            if !(w.theta_max > 0.0 && w.theta_max <= std::f64::consts::PI) || w.points < 2 {
                return err("theta_max", "wigner patch needs 0 < theta_max <= pi and points >= 2".into());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_herald_scan() {
        let c = SweepConfig::parse("experiment = \"herald-scan\"\natoms = [30]\ng_over_gc = [1.0]\nphotons = [0, 1]\n").unwrap();
        assert_eq!(c.n_cutoff(), 50);
        assert_eq!(c.omega_ratio, vec![1.0]);
        assert_eq!(c.point_count(), 1);
        assert_eq!(c.solver, LanczosSettings::default());
    }

    #[test]
    fn empty_grid_reports_its_line() {
        let e = SweepConfig::parse("experiment = \"g-sweep\"\natoms = [30]\ng_over_gc = []\nphotons = [1]\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.message.contains("g_over_gc"));
    }

    #[test]
    fn syntax_errors_report_their_line() {
        let e = SweepConfig::parse("experiment = \"g-sweep\"\natoms = [30,\nphotons = 1 2\n").unwrap_err();
        assert!(e.line.is_some());
        let e = SweepConfig::parse("experiment = \"g-sweep\"\natomz = [30]\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = SweepConfig::parse("experiment = \"q-sweep\"\n").unwrap_err();
        assert_eq!(e.line, Some(1));
    }

    #[test]
    fn kind_specific_rules() {
        let thermo = "experiment = \"thermo-sweep\"\ng_over_gc = [0.5, 1.0]\nphotons = [1]\n";
        assert_eq!(SweepConfig::parse(thermo).unwrap_err().line, Some(2));
        let conv = "experiment = \"convergence\"\natoms = [10]\ng_over_gc = [1.0]\nphotons = [6]\ncutoffs = [50, 40]\n";
        assert_eq!(SweepConfig::parse(conv).unwrap_err().line, Some(5));
        let big_n = "experiment = \"herald-scan\"\natoms = [10]\ng_over_gc = [1.0]\nphotons = [9]\nn_cutoff = 8\n";
        assert_eq!(SweepConfig::parse(big_n).unwrap_err().line, Some(4));
        let alias = "experiment = \"N-sweep\"\natoms = [10, 20]\ng_over_gc = [1.0]\nphotons = [1]\n";
        assert_eq!(SweepConfig::parse(alias).unwrap().experiment, Experiment::NSweep);
    }
}
