//! Thermodynamic limit of the resonant Dicke model in the normal phase.
//!
//! After the Holstein–Primakoff mapping the ground state is two squeezed vacua
//! mixed on a balanced beam splitter,
//! `|G> = U_mix (S_a(r_a)|0> ⊗ S_b(r_b)|0>)`, which disentangles to
//! `exp(-tanh(r_+)/2 (a†² + b†²) + tanh(r_-) a† b†)|0,0> / sqrt(cosh r_a cosh r_b)`
//! with `tanh r_± = (tanh r_a ± tanh r_b)/2`. Expanding the exponential gives
//! the Fock coefficients
//! `c_{n,l} = sqrt(n! l!) sum_m (-tanh r_+/2)^{(n+l)/2 - m} tanh(r_-)^m / (((n-m)/2)! ((l-m)/2)! m!)`
//! (sum over `m ≡ n ≡ l mod 2`), times the prefactor. Photon-number heralding
//! then selects row `n`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::math::{golden_section_max, LogFactorials};
use crate::spin::Parity;

/// Largest truncation weight accepted for a Fock expansion.
pub const FOCK_TAIL_TOL: f64 = 1e-10;
/// First cutoff tried by the adaptive expansions.
pub const FOCK_START_CUTOFF: usize = 40;
/// Hard ceiling for adaptive cutoffs.
pub const FOCK_MAX_CUTOFF: usize = 640;

/// Normal-mode and squeezing parameters of the Gaussian ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianGroundState {
    pub omega: f64,
    pub g_over_gc: f64,
    /// `Omega_∓ = omega sqrt(1 ∓ g/g_c)`.
    pub omega_minus: f64,
    pub omega_plus: f64,
    /// `r_a = ln(Omega_-/omega)/2 <= 0`.
    pub r_a: f64,
    /// `r_b = ln(Omega_+/omega)/2 >= 0`.
    pub r_b: f64,
    pub r_plus: f64,
    pub r_minus: f64,
    pub tanh_a: f64,
    pub tanh_b: f64,
    pub tanh_plus: f64,
    pub tanh_minus: f64,
}

impl GaussianGroundState {
    /// Parameters at coupling `g = g_over_gc * g_c`, `0 <= g_over_gc < 1`.
    pub fn new(omega: f64, g_over_gc: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(domain(format!("frequency must be positive, got {omega}")));
        }
        if !(0.0..1.0).contains(&g_over_gc) {
            return Err(domain(format!(
                "the Gaussian theory needs 0 <= g/g_c < 1 (normal phase), got {g_over_gc}"
            )));
        }
        let below = 1.0 - g_over_gc;
        let above = 1.0 + g_over_gc;
        // tanh(ln(y)/4) = (sqrt(y) - 1)/(sqrt(y) + 1), exact for y -> 0
        let tanh_quarter_log = |y: f64| {
            let s = y.sqrt();
            (s - 1.0) / (s + 1.0)
        };
        let tanh_a = tanh_quarter_log(below);
        let tanh_b = tanh_quarter_log(above);
        let tanh_plus = 0.5 * (tanh_a + tanh_b);
        let tanh_minus = 0.5 * (tanh_a - tanh_b);
        Ok(Self {
            omega,
            g_over_gc,
            omega_minus: omega * below.sqrt(),
            omega_plus: omega * above.sqrt(),
            r_a: 0.25 * below.ln(),
            r_b: 0.25 * above.ln(),
            r_plus: tanh_plus.atanh(),
            r_minus: tanh_minus.atanh(),
            tanh_a,
            tanh_b,
            tanh_plus,
            tanh_minus,
        })
    }

    /// `cosh r_a cosh r_b`.
    pub fn cosh_product(&self) -> f64 {
        // cosh(ln(y)/4) = (y^{1/4} + y^{-1/4})/2
        let c = |y: f64| {
            let q = y.powf(0.25);
            0.5 * (q + 1.0 / q)
        };
        c(1.0 - self.g_over_gc) * c(1.0 + self.g_over_gc)
    }

    /// `1 / sqrt(cosh r_a cosh r_b)`.
    pub fn prefactor(&self) -> f64 {
        1.0 / self.cosh_product().sqrt()
    }
}

/// Shorthand for [`GaussianGroundState::new`].
pub fn gaussian_ground(omega: f64, g_over_gc: f64) -> Result<GaussianGroundState> {
    GaussianGroundState::new(omega, g_over_gc)
}

/// Fock-space cutoffs (largest retained occupation) of the photon mode `a` and boson mode `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockCutoffs {
    pub photon: usize,
    pub boson: usize,
}

/// Truncated two-mode Fock expansion `c[(n, l)]` of the Gaussian ground state.
/// All coefficients are real.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeFockState {
    pub cutoffs: FockCutoffs,
    pub coefficients: DMatrix<f64>,
    /// Weight in the outermost two boson columns.
    pub column_tail: f64,
    /// Weight in the outermost two photon rows.
    pub row_tail: f64,
}

impl TwoModeFockState {
    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }

    pub fn row_weight(&self, n: usize) -> f64 {
        self.coefficients.row(n).iter().map(|c| c * c).sum()
    }
}

struct Series {
    lf: LogFactorials,
    half_plus: f64,
    minus: f64,
}

impl Series {
    fn new(gs: &GaussianGroundState, max: usize) -> Self {
        Self { lf: LogFactorials::new(max), half_plus: -gs.tanh_plus / 2.0, minus: gs.tanh_minus }
    }

    /// Coefficient of `|n, l>` without the `1/sqrt(cosh r_a cosh r_b)` prefactor.
    fn raw(&self, n: usize, l: usize) -> f64 {
        if (n + l) % 2 == 1 {
            return 0.0;
        }
        let lf = &self.lf;
        let base = 0.5 * (lf.ln_fact(n) + lf.ln_fact(l));
        let mut terms: Vec<(f64, f64)> = Vec::new();
        let mut m = n % 2;
        while m <= n.min(l) {
            let (p, q) = ((n - m) / 2, (l - m) / 2);
            if let (Some((s1, l1)), Some((s2, l2))) = (signed_log_pow(self.half_plus, p + q), signed_log_pow(self.minus, m)) {
                let log = base + l1 + l2 - lf.ln_fact(p) - lf.ln_fact(q) - lf.ln_fact(m);
                terms.push((s1 * s2, log));
            }
            m += 2;
        }
        let Some(top) = terms.iter().map(|t| t.1).reduce(f64::max) else {
            return 0.0;
        };
        let sum: f64 = terms.iter().map(|(s, l)| s * (l - top).exp()).sum();
        sum * top.exp()
    }
}

/// `x^e` as `(sign, ln|x^e|)`; `None` when the power is exactly zero.
fn signed_log_pow(x: f64, e: usize) -> Option<(f64, f64)> {
    if e == 0 {
        return Some((1.0, 0.0));
    }
    if x == 0.0 {
        return None;
    }
    let sign = if x < 0.0 && e % 2 == 1 { -1.0 } else { 1.0 };
    Some((sign, e as f64 * x.abs().ln()))
}

fn build_fock(gs: &GaussianGroundState, cutoffs: FockCutoffs) -> TwoModeFockState {
    let series = Series::new(gs, cutoffs.photon.max(cutoffs.boson));
    let pref = gs.prefactor();
    let coefficients =
        DMatrix::from_fn(cutoffs.photon + 1, cutoffs.boson + 1, |n, l| pref * series.raw(n, l));
    let edge = |len: usize| len.saturating_sub(2)..len;
    let column_tail = edge(cutoffs.boson + 1)
        .flat_map(|l| coefficients.column(l).iter().map(|c| c * c).collect::<Vec<_>>())
        .sum();
    let row_tail = edge(cutoffs.photon + 1)
        .flat_map(|n| coefficients.row(n).iter().map(|c| c * c).collect::<Vec<_>>())
        .sum();
    TwoModeFockState { cutoffs, coefficients, column_tail, row_tail }
}

/// Two-mode Fock expansion at fixed cutoffs; fails if the weight on the
/// outermost rows and columns reaches [`FOCK_TAIL_TOL`].
pub fn expand_ground_fock(gs: &GaussianGroundState, cutoffs: FockCutoffs) -> Result<TwoModeFockState> {
    let state = build_fock(gs, cutoffs);
    let tail = state.row_tail + state.column_tail;
    if tail >= FOCK_TAIL_TOL {
        return Err(Error::Resource(format!(
            "Fock truncation at {}x{} leaves weight {tail:.3e} on the boundary; use larger cutoffs",
            cutoffs.photon, cutoffs.boson
        )));
    }
    Ok(state)
}

/// [`expand_ground_fock`] with both cutoffs doubled from [`FOCK_START_CUTOFF`]
/// until the tail is small, up to [`FOCK_MAX_CUTOFF`].
pub fn expand_ground_fock_adaptive(gs: &GaussianGroundState) -> Result<TwoModeFockState> {
    let mut c = FOCK_START_CUTOFF;
    loop {
        match expand_ground_fock(gs, FockCutoffs { photon: c, boson: c }) {
            Ok(s) => return Ok(s),
            Err(Error::Resource(msg)) if c >= FOCK_MAX_CUTOFF => return Err(Error::Resource(msg)),
            Err(Error::Resource(_)) => c = (2 * c).min(FOCK_MAX_CUTOFF),
            Err(e) => return Err(e),
        }
    }
}

/// Photon rows `0..=max_photons` only, with the boson cutoff chosen adaptively
/// so that each retained row is converged. Near `g_c` the photon distribution is
/// heavy-tailed but the heralded rows are not, so this is the expansion used
/// for heralding.
pub fn expand_photon_rows(gs: &GaussianGroundState, max_photons: usize) -> Result<TwoModeFockState> {
    let mut boson = FOCK_START_CUTOFF.max(max_photons + 2);
    loop {
        let state = build_fock(gs, FockCutoffs { photon: max_photons, boson });
        let total = state.norm_sqr();
        if state.column_tail < FOCK_TAIL_TOL * total.max(f64::MIN_POSITIVE) || state.column_tail == 0.0 {
            return Ok(state);
        }
        if boson >= FOCK_MAX_CUTOFF {
            return Err(Error::Resource(format!(
                "boson cutoff {boson} leaves weight {:.3e} in the last columns",
                state.column_tail
            )));
        }
        boson = (2 * boson).min(FOCK_MAX_CUTOFF);
    }
}

/// Normalized real Fock amplitudes of a single bosonic mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BosonicState {
    amplitudes: Vec<f64>,
}

impl BosonicState {
    pub fn new(mut amplitudes: Vec<f64>) -> Result<Self> {
        let n = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Degenerate("bosonic state has zero norm".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    /// `<self|other>` over the common Fock range.
    pub fn inner(&self, other: &BosonicState) -> f64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a * b).sum()
    }

    /// Squared weight on occupations of the wrong parity.
    pub fn off_parity_weight(&self, parity: Parity) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(l, _)| !parity.contains(*l))
            .map(|(_, a)| a * a)
            .sum()
    }
}

/// Boson-mode state heralded by `n` photons and its probability.
pub fn herald_boson(state: &TwoModeFockState, n: usize) -> Result<(BosonicState, f64)> {
    if n > state.cutoffs.photon {
        return Err(domain(format!("photon number {n} exceeds the expansion cutoff {}", state.cutoffs.photon)));
    }
    let row: Vec<f64> = state.coefficients.row(n).iter().copied().collect();
    let p: f64 = row.iter().map(|c| c * c).sum();
    if p < crate::herald::DEGENERATE_NORM_SQR {
        return Err(Error::Degenerate(format!("detecting {n} photons has zero probability")));
    }
    Ok((BosonicState::new(row)?, p))
}

/// Heralded boson state and `P(n)` straight from the Gaussian parameters.
pub fn herald_thermo(gs: &GaussianGroundState, n: usize) -> Result<(BosonicState, f64)> {
    herald_boson(&expand_photon_rows(gs, n)?, n)
}

/// Normalized `b†^m S(r)|0>` from `S(r)|0> = exp(-tanh(r)/2 b†²)|0> / sqrt(cosh r)`:
/// the amplitude on `|2j + m>` is proportional to `(-tanh(r)/2)^j sqrt((2j+m)!) / j!`.
pub fn subtracted_squeezed(m: usize, r: f64, cutoff: usize) -> Result<BosonicState> {
    if cutoff < m + 2 {
        return Err(Error::Resource(format!("cutoff {cutoff} too small for {m} added bosons")));
    }
    let lf = LogFactorials::new(cutoff);
    let t = -r.tanh() / 2.0;
    let mut amps = vec![0.0; cutoff + 1];
    let mut j = 0;
    while 2 * j + m <= cutoff {
        amps[2 * j + m] = match signed_log_pow(t, j) {
            Some((s, l)) => s * (l + 0.5 * lf.ln_fact(2 * j + m) - lf.ln_fact(j)).exp(),
            None => 0.0,
        };
        j += 1;
    }
    let state = BosonicState::new(amps)?;
    let tail: f64 = state.amplitudes[cutoff - 1..].iter().map(|a| a * a).sum();
    if tail >= FOCK_TAIL_TOL {
        return Err(Error::Resource(format!(
            "cutoff {cutoff} leaves weight {tail:.3e} in the last Fock states"
        )));
    }
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BosonCatFitSettings {
    pub grid_points: usize,
    pub beta_max: f64,
    pub tol: f64,
}

impl Default for BosonCatFitSettings {
    fn default() -> Self {
        Self { grid_points: 400, beta_max: 6.0, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BosonCatFit {
    pub beta_opt: f64,
    pub fidelity: f64,
    pub parity: Parity,
    pub low_quality: bool,
}

/// Fock amplitudes of `(|beta> ± |-beta>)/sqrt(2(1 ± e^{-2 beta^2}))` up to `cutoff`.
pub fn boson_cat_amplitudes(beta: f64, parity: Parity, cutoff: usize) -> Vec<f64> {
    let lf = LogFactorials::new(cutoff);
    boson_cat_with(&lf, beta, parity, cutoff)
}

fn boson_cat_with(lf: &LogFactorials, beta: f64, parity: Parity, cutoff: usize) -> Vec<f64> {
    let b2 = beta * beta;
    let norm_sq = match parity {
        Parity::Even => 1.0 + (-2.0 * b2).exp(),
        Parity::Odd => -(-2.0 * b2).exp_m1(),
    };
    let log_pref = 0.5 * (2f64.ln() - norm_sq.ln()) - b2 / 2.0;
    (0..=cutoff)
        .map(|l| {
            if !parity.contains(l) {
                return 0.0;
            }
            match signed_log_pow(beta, l) {
                Some((s, lp)) => s * (log_pref + lp - 0.5 * lf.ln_fact(l)).exp(),
                None => 0.0,
            }
        })
        .collect()
}

/// Maximizes `|<cat(beta)|psi>|^2` over `beta` in `(0, beta_max]`.
pub fn fit_boson_cat(psi: &BosonicState, parity: Parity) -> Result<BosonCatFit> {
    fit_boson_cat_with(psi, parity, &BosonCatFitSettings::default())
}

pub fn fit_boson_cat_with(psi: &BosonicState, parity: Parity, settings: &BosonCatFitSettings) -> Result<BosonCatFit> {
    let leak = psi.off_parity_weight(parity);
    if leak > 1e-10 {
        return Err(domain(format!("state has weight {leak:.3e} outside the {parity} sector")));
    }
    let cutoff = psi.cutoff();
    let lf = LogFactorials::new(cutoff);
    let fidelity = |beta: f64| {
        let cat = boson_cat_with(&lf, beta, parity, cutoff);
        let o: f64 = cat.iter().zip(psi.amplitudes()).map(|(a, b)| a * b).sum();
        o * o
    };
    let step = settings.beta_max / settings.grid_points as f64;
    let (mut best_i, mut best) = (1, f64::NEG_INFINITY);
    for i in 1..=settings.grid_points {
        let f = fidelity(step * i as f64);
        if f > best {
            best = f;
            best_i = i;
        }
    }
    let lo = step * (best_i as f64 - 1.0).max(1e-6);
    let hi = (step * (best_i as f64 + 1.0)).min(settings.beta_max);
    let (b, f) = golden_section_max(fidelity, lo, hi, settings.tol);
    let (beta_opt, fid) = if f >= best { (b, f) } else { (step * best_i as f64, best) };
    Ok(BosonCatFit { beta_opt, fidelity: fid.min(1.0), parity, low_quality: best < 0.5 })
}

/// `lim_{N -> inf} l_opt = 2 beta_opt`.
pub fn lopt_limit(beta_opt: f64) -> f64 {
    2.0 * beta_opt
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn power_law_exponent(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(domain("abscissae and ordinates differ in length"));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(domain("power-law fit needs positive finite samples"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if lx.len() < 2 || sxx <= 1e-24 {
        return Err(domain("power-law fit needs at least two distinct abscissae"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Exponent of `P(n) ∝ (1 - g/g_c)^s` fitted over the given distances
/// `1 - g/g_c` from the critical point, all inside `(0, 0.1)`.
pub fn critical_scaling(n: usize, omega: f64, distances: &[f64]) -> Result<f64> {
    if let Some(d) = distances.iter().find(|d| !(**d > 0.0 && **d < 0.1)) {
        return Err(domain(format!("distance {d} from g_c outside (0, 0.1)")));
    }
    let probs = distances
        .iter()
        .map(|d| herald_thermo(&GaussianGroundState::new(omega, 1.0 - d)?, n).map(|(_, p)| p))
        .collect::<Result<Vec<_>>>()?;
    power_law_exponent(distances, &probs)
}
