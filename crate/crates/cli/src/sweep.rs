//! Sweep execution: grid points run on a worker pool, results are written in
//! grid order.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use dicke_cat::catfit::fit_cat;
use dicke_cat::dicke::DickeParams;
use dicke_cat::ground::{solve, GroundState};
use dicke_cat::herald::{herald, reduced_spin_density};
use dicke_cat::spin::{Parity, SpinDensityMatrix};
use dicke_cat::thermo;
use dicke_cat::wigner::{patch_axes, spin_wigner, spin_wigner_css_frame, WignerGrid};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::cache::Cache;
use crate::config::{Frame, SweepConfig};

pub const CSV_HEADER: &str = "N,g_over_gc,omega_ratio,n,P_n,theta_opt,l_opt,fidelity";

/// One output line of the sweep CSV. `atoms = None` is the thermodynamic limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub atoms: Option<usize>,
    pub g_over_gc: f64,
    pub omega_ratio: f64,
    pub n: usize,
    pub probability: f64,
    pub theta_opt: Option<f64>,
    pub l_opt: f64,
    pub fidelity: f64,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl Row {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.atoms.map_or_else(|| "inf".to_string(), |n| n.to_string()),
            num(self.g_over_gc),
            num(self.omega_ratio),
            self.n,
            num(self.probability),
            self.theta_opt.map_or_else(|| "nan".to_string(), num),
            num(self.l_opt),
            num(self.fidelity),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub atoms: Option<usize>,
    pub g_over_gc: f64,
    pub omega_ratio: f64,
    pub n_cutoff: Option<usize>,
}

impl Point {
    pub fn label(&self) -> String {
        match (self.atoms, self.n_cutoff) {
            (Some(a), Some(c)) => format!("N={a} g/gc={} ratio={} cutoff={c}", self.g_over_gc, self.omega_ratio),
            _ => format!("N=inf g/gc={}", self.g_over_gc),
        }
    }

    fn file_stem(&self) -> String {
        match self.atoms {
            Some(a) => format!("N{a}_g{}_w{}", self.g_over_gc, self.omega_ratio),
            None => format!("Ninf_g{}", self.g_over_gc),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub point: String,
    pub n: Option<usize>,
    pub error: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CacheUse {
    Hit,
    Miss,
    Off,
    None,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub point: Point,
    pub rows: Vec<Row>,
    pub failures: Vec<Failure>,
    pub seconds: f64,
    pub cache: CacheUse,
    /// Solver iterations spent at this point (zero on a cache hit).
    pub solver_iterations: usize,
    #[serde(skip)]
    pub wigner: Vec<(String, WignerGrid)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub points: Vec<PointReport>,
    pub scaling: Vec<(usize, Result<f64, String>)>,
}

impl SweepReport {
    pub fn rows(&self) -> impl Iterator<Item = &Row> {
        self.points.iter().flat_map(|p| &p.rows)
    }

    pub fn failures(&self) -> Vec<&Failure> {
        self.points.iter().flat_map(|p| &p.failures).collect()
    }

    pub fn solver_iterations(&self) -> usize {
        self.points.iter().map(|p| p.solver_iterations).sum()
    }

    /// True when no row at all was produced.
    pub fn total_failure(&self) -> bool {
        self.rows().next().is_none() && !self.failures().is_empty()
    }
}

/// Grid points in deterministic order: atoms, coupling, frequency ratio, cutoff.
pub fn points(config: &SweepConfig) -> Vec<Point> {
    if config.experiment.is_thermo() {
        return config
            .g_over_gc
            .iter()
            .map(|&g| Point { atoms: None, g_over_gc: g, omega_ratio: 1.0, n_cutoff: None })
            .collect();
    }
    let mut out = Vec::new();
    for &atoms in &config.atoms {
        for &g in &config.g_over_gc {
            for &w in &config.omega_ratio {
                for c in config.solve_cutoffs() {
                    out.push(Point { atoms: Some(atoms), g_over_gc: g, omega_ratio: w, n_cutoff: Some(c) });
                }
            }
        }
    }
    out
}

fn ground_for(config: &SweepConfig, params: DickeParams, cache: Option<&Cache>) -> Result<(GroundState, CacheUse, usize), String> {
    if let Some(cache) = cache {
        if let Some(g) = cache.lookup(&params, &config.solver) {
            return Ok((g, CacheUse::Hit, 0));
        }
    }
    let g = solve(params, Parity::Even, &config.solver).map_err(|e| e.to_string())?;
    let used = match cache {
        Some(c) => {
            if let Err(e) = c.store(&config.solver, &g) {
                eprintln!("warning: could not write cache entry: {e}");
            }
            CacheUse::Miss
        }
        None => CacheUse::Off,
    };
    let iterations = g.iterations;
    Ok((g, used, iterations))
}

fn wigner_of(config: &SweepConfig, rho: &SpinDensityMatrix) -> Result<WignerGrid, String> {
    let spec = config.wigner_spec().unwrap_or_default();
    let (thetas, phis) = patch_axes(spec.theta_max, spec.points);
    match spec.frame {
        Frame::Css => spin_wigner_css_frame(rho, &thetas, &phis),
        Frame::Standard => spin_wigner(rho, &thetas, &phis),
    }
    .map_err(|e| e.to_string())
}

fn run_ed_point(config: &SweepConfig, point: Point, cache: Option<&Cache>) -> PointReport {
    let start = Instant::now();
    let mut report = PointReport {
        point,
        rows: Vec::new(),
        failures: Vec::new(),
        seconds: 0.0,
        cache: CacheUse::None,
        solver_iterations: 0,
        wigner: Vec::new(),
    };
    let atoms = point.atoms.expect("finite-N point");
    let fail = |n: Option<usize>, error: String| Failure { point: point.label(), n, error };
    let solved = DickeParams::new(atoms, point.g_over_gc, point.omega_ratio, point.n_cutoff.expect("cutoff"))
        .map_err(|e| e.to_string())
        .and_then(|p| ground_for(config, p, cache));
    let ground = match solved {
        Ok((g, used, iters)) => {
            report.cache = used;
            report.solver_iterations = iters;
            g
        }
        Err(e) => {
            report.failures.push(fail(None, e));
            report.seconds = start.elapsed().as_secs_f64();
            return report;
        }
    };
    let wigner = config.wigner_spec().is_some();
    if wigner {
        match wigner_of(config, &reduced_spin_density(&ground)) {
            Ok(w) => report.wigner.push((format!("{}_rho", point.file_stem()), w)),
            Err(e) => report.failures.push(fail(None, format!("wigner of rho: {e}"))),
        }
    }
    for &n in &config.photons {
        let outcome = match herald(&ground, n) {
            Ok(o) => o,
            Err(e) => {
                report.failures.push(fail(Some(n), e.to_string()));
                continue;
            }
        };
        match fit_cat(&outcome.psi, Parity::of(n)) {
            Ok(fit) => report.rows.push(Row {
                atoms: Some(atoms),
                g_over_gc: point.g_over_gc,
                omega_ratio: point.omega_ratio,
                n,
                probability: outcome.probability,
                theta_opt: Some(fit.theta_opt),
                l_opt: fit.l_opt,
                fidelity: fit.fidelity,
            }),
            Err(e) => report.failures.push(fail(Some(n), e.to_string())),
        }
        if wigner {
            match wigner_of(config, &SpinDensityMatrix::pure(&outcome.psi)) {
                Ok(w) => report.wigner.push((format!("{}_n{n}", point.file_stem()), w)),
                Err(e) => report.failures.push(fail(Some(n), format!("wigner: {e}"))),
            }
        }
    }
    report.seconds = start.elapsed().as_secs_f64();
    report
}

fn run_thermo_point(config: &SweepConfig, point: Point) -> PointReport {
    let start = Instant::now();
    let mut report = PointReport {
        point,
        rows: Vec::new(),
        failures: Vec::new(),
        seconds: 0.0,
        cache: CacheUse::None,
        solver_iterations: 0,
        wigner: Vec::new(),
    };
    let fail = |n: Option<usize>, error: String| Failure { point: point.label(), n, error };
    let n_max = config.photons.iter().copied().max().unwrap_or(0);
    let expansion = thermo::gaussian_ground(1.0, point.g_over_gc).and_then(|gs| thermo::expand_photon_rows(&gs, n_max));
    match expansion {
        Ok(rows) => {
            for &n in &config.photons {
                let fitted = thermo::herald_boson(&rows, n).and_then(|(psi, p)| {
                    thermo::fit_boson_cat(&psi, Parity::of(n)).map(|fit| (p, fit))
                });
                match fitted {
                    Ok((p, fit)) => report.rows.push(Row {
                        atoms: None,
                        g_over_gc: point.g_over_gc,
                        omega_ratio: 1.0,
                        n,
                        probability: p,
                        theta_opt: None,
                        l_opt: thermo::lopt_limit(fit.beta_opt),
                        fidelity: fit.fidelity,
                    }),
                    Err(e) => report.failures.push(fail(Some(n), e.to_string())),
                }
            }
        }
        Err(e) => report.failures.push(fail(None, e.to_string())),
    }
    report.seconds = start.elapsed().as_secs_f64();
    report
}

fn log_window(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()).collect()
}

/// Runs every grid point on `workers` threads. Results come back in grid order.
pub fn execute(config: &SweepConfig, workers: usize, cache: Option<&Cache>) -> io::Result<SweepReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| io::Error::other(e.to_string()))?;
    let grid = points(config);
    let (points, scaling) = pool.install(|| {
        let points: Vec<PointReport> = grid
            .par_iter()
            .map(|&p| if config.experiment.is_thermo() { run_thermo_point(config, p) } else { run_ed_point(config, p, cache) })
            .collect();
        let scaling = match config.scaling_window {
            Some([lo, hi]) if config.experiment.is_thermo() => {
                let window = log_window(lo, hi, config.scaling_points);
                config
                    .photons
                    .par_iter()
                    .map(|&n| (n, thermo::critical_scaling(n, 1.0, &window).map_err(|e| e.to_string())))
                    .collect()
            }
            _ => Vec::new(),
        };
        (points, scaling)
    });
    Ok(SweepReport { points, scaling })
}

fn write_lines(path: &Path, header: &str, lines: impl IntoIterator<Item = String>) -> io::Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(out, "{header}")?;
    for l in lines {
        writeln!(out, "{l}")?;
    }
    out.flush()
}

/// Writes the sweep CSV, any Wigner grids and auxiliary tables; returns the file names.
pub fn write_outputs(config: &SweepConfig, report: &SweepReport, dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let kind = config.experiment.name();
    let main = dir.join(format!("{kind}.csv"));
    if config.experiment == crate::config::Experiment::Convergence {
        write_lines(
            &main,
            &format!("n_cutoff,{CSV_HEADER}"),
            report.points.iter().flat_map(|p| {
                let c = p.point.n_cutoff.unwrap_or(0);
                p.rows.iter().map(move |r| format!("{c},{}", r.csv()))
            }),
        )?;
        written.push(main);
        let deltas = dir.join("convergence-deltas.csv");
        write_lines(&deltas, "N,g_over_gc,omega_ratio,n,n_cutoff_from,n_cutoff_to,delta_P_n,delta_l_opt", convergence_deltas(report))?;
        written.push(deltas);
    } else {
        write_lines(&main, CSV_HEADER, report.rows().map(Row::csv))?;
        written.push(main);
    }
    for p in &report.points {
        for (stem, grid) in &p.wigner {
            let path = dir.join(format!("wigner_{stem}.csv"));
            grid.write_csv(BufWriter::new(fs::File::create(&path)?))?;
            written.push(path);
        }
    }
    if !report.scaling.is_empty() {
        let path = dir.join("critical-scaling.csv");
        let [lo, hi] = config.scaling_window.unwrap_or([f64::NAN; 2]);
        write_lines(
            &path,
            "n,window_lo,window_hi,points,exponent",
            report.scaling.iter().map(|(n, s)| {
                let e = s.as_ref().map_or_else(|_| "nan".to_string(), |v| num(*v));
                format!("{n},{},{},{},{e}", num(lo), num(hi), config.scaling_points)
            }),
        )?;
        written.push(path);
    }
    Ok(written)
}

/// Successive differences between cutoffs for the same (N, g, ratio, n).
fn convergence_deltas(report: &SweepReport) -> Vec<String> {
    let mut lines = Vec::new();
    for pair in report.points.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let same = a.point.atoms == b.point.atoms
            && a.point.g_over_gc == b.point.g_over_gc
            && a.point.omega_ratio == b.point.omega_ratio;
        if !same {
            continue;
        }
        for ra in &a.rows {
            if let Some(rb) = b.rows.iter().find(|r| r.n == ra.n) {
                let mut line = String::new();
                let _ = write!(
                    line,
                    "{},{},{},{},{},{},{},{}",
                    ra.atoms.unwrap_or(0),
                    num(ra.g_over_gc),
                    num(ra.omega_ratio),
                    ra.n,
                    a.point.n_cutoff.unwrap_or(0),
                    b.point.n_cutoff.unwrap_or(0),
                    num(rb.probability - ra.probability),
                    num(rb.l_opt - ra.l_opt),
                );
                lines.push(line);
            }
        }
    }
    lines
}

pub fn manifest(config: &SweepConfig, report: &SweepReport, workers: usize, elapsed: f64, outputs: &[PathBuf]) -> serde_json::Value {
    json!({
        "tool": "dicke-cat",
        "version": env!("CARGO_PKG_VERSION"),
        "core_version": dicke_cat::VERSION,
        "ground_state_format": dicke_cat::ground::GROUND_STATE_FORMAT,
        "experiment": config.experiment.name(),
        "config": config,
        "workers": workers,
        "elapsed_seconds": elapsed,
        "solver_iterations": report.solver_iterations(),
        "points": report.points.iter().map(|p| json!({
            "point": p.point,
            "seconds": p.seconds,
            "cache": p.cache,
            "solver_iterations": p.solver_iterations,
            "rows": p.rows.len(),
            "failures": p.failures.len(),
        })).collect::<Vec<_>>(),
        "scaling": report.scaling.iter().map(|(n, s)| match s {
            Ok(v) => json!({"n": n, "exponent": v}),
            Err(e) => json!({"n": n, "error": e}),
        }).collect::<Vec<_>>(),
        "failures": report.failures(),
        "outputs": outputs.iter().filter_map(|p| p.file_name()).map(|f| f.to_string_lossy().into_owned()).collect::<Vec<_>>(),
    })
}
