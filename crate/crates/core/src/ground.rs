//! Ground state of the Dicke Hamiltonian in one parity sector.

use serde::{Deserialize, Serialize};

use crate::dicke::{DickeBasis, DickeParams, SparseHamiltonian, SymmetricOperator};
use crate::error::{Error, Result};
use crate::lanczos::{lowest_eigenpair, LanczosSettings};
use crate::spin::Parity;

/// Format tag written into serialized ground states.
pub const GROUND_STATE_FORMAT: &str = "dicke-ground-state/1";

/// Largest sector dimension accepted by [`dense_ground_state`].
pub const DEFAULT_DENSE_LIMIT: usize = 6000;

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    basis: DickeBasis,
    pub energy: f64,
    /// `||H psi - E psi||`.
    pub residual: f64,
    /// Matrix–vector products spent by the solver (0 for closed-form or dense solves).
    pub iterations: usize,
    amplitudes: Vec<f64>,
}

impl GroundState {
    pub fn basis(&self) -> &DickeBasis {
        &self.basis
    }

    pub fn params(&self) -> &DickeParams {
        self.basis.params()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// Amplitudes of the states with photon number `n`, by increasing `k`.
    pub fn photon_slice(&self, n: usize) -> &[f64] {
        &self.amplitudes[self.basis.photon_block(n)]
    }

    /// `|<a|b>|^2` between two ground states on the same basis.
    pub fn overlap_sqr(&self, other: &GroundState) -> Result<f64> {
        if self.basis != other.basis {
            return Err(Error::Domain("ground states live on different bases".into()));
        }
        let o: f64 = self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a * b).sum();
        Ok(o * o)
    }

    fn from_vector(basis: DickeBasis, energy: f64, residual: f64, iterations: usize, mut amplitudes: Vec<f64>) -> Self {
        // Fix the global sign: the largest-magnitude amplitude is positive.
        let (_, pivot) = amplitudes
            .iter()
            .fold((0.0, 0.0), |(m, p), &a| if a.abs() > m { (a.abs(), a) } else { (m, p) });
        if pivot < 0.0 {
            amplitudes.iter_mut().for_each(|a| *a = -*a);
        }
        Self { basis, energy, residual, iterations, amplitudes }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GroundStateArtifact {
            format: GROUND_STATE_FORMAT.to_string(),
            params: *self.params(),
            parity: self.basis.parity(),
            energy: self.energy,
            residual: self.residual,
            iterations: self.iterations,
            amplitudes: self.amplitudes.clone(),
        })
        .expect("ground state serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let art: GroundStateArtifact =
            serde_json::from_str(text).map_err(|e| Error::Domain(format!("malformed ground-state artifact: {e}")))?;
        if art.format != GROUND_STATE_FORMAT {
            return Err(Error::Domain(format!(
                "ground-state format '{}' does not match '{GROUND_STATE_FORMAT}'",
                art.format
            )));
        }
        let basis = DickeBasis::new(art.params, art.parity)?;
        if basis.dim() != art.amplitudes.len() {
            return Err(Error::Domain(format!(
                "artifact holds {} amplitudes for a basis of {}",
                art.amplitudes.len(),
                basis.dim()
            )));
        }
        Ok(Self {
            basis,
            energy: art.energy,
            residual: art.residual,
            iterations: art.iterations,
            amplitudes: art.amplitudes,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct GroundStateArtifact {
    format: String,
    params: DickeParams,
    parity: Parity,
    energy: f64,
    residual: f64,
    iterations: usize,
    amplitudes: Vec<f64>,
}

/// Lowest eigenpair of `h` by restarted Lanczos. A diagonal `h` (the decoupled
/// case `g = 0`) is solved exactly.
pub fn ground_state(h: &SparseHamiltonian, settings: &LanczosSettings) -> Result<GroundState> {
    let basis = h.basis().clone();
    let m = h.matrix();
    if m.is_diagonal() {
        let (imin, emin) = (0..m.dim())
            .map(|i| (i, m.get(i, i)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| Error::Domain("empty basis".into()))?;
        let mut v = vec![0.0; m.dim()];
        v[imin] = 1.0;
        return Ok(GroundState::from_vector(basis, emin, 0.0, 0, v));
    }
    let pair = lowest_eigenpair(h, settings)?;
    Ok(GroundState::from_vector(basis, pair.value, pair.residual, pair.iterations, pair.vector))
}

/// Builds the sector Hamiltonian for `params` and solves it with Lanczos.
pub fn solve(params: DickeParams, parity: Parity, settings: &LanczosSettings) -> Result<GroundState> {
    let h = SparseHamiltonian::new(DickeBasis::new(params, parity)?);
    ground_state(&h, settings)
}

/// Full dense eigendecomposition of the sector Hamiltonian; the lowest pair.
pub fn dense_ground_state(params: DickeParams, parity: Parity, dense_limit: usize) -> Result<GroundState> {
    let h = dense_hamiltonian(params, parity, dense_limit)?;
    let basis = h.basis().clone();
    let eig = h.matrix().to_dense().symmetric_eigen();
    let (imin, &emin) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Domain("empty basis".into()))?;
    let v: Vec<f64> = eig.eigenvectors.column(imin).iter().copied().collect();
    let mut hv = vec![0.0; v.len()];
    h.apply(&v, &mut hv);
    let residual = hv.iter().zip(&v).map(|(a, b)| (a - emin * b).powi(2)).sum::<f64>().sqrt();
    Ok(GroundState::from_vector(basis, emin, residual, 0, v))
}

/// Full dense spectrum of the sector Hamiltonian, ascending.
pub fn dense_spectrum(params: DickeParams, parity: Parity, dense_limit: usize) -> Result<Vec<f64>> {
    let h = dense_hamiltonian(params, parity, dense_limit)?;
    let mut ev: Vec<f64> = h.matrix().to_dense().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

fn dense_hamiltonian(params: DickeParams, parity: Parity, dense_limit: usize) -> Result<SparseHamiltonian> {
    let basis = DickeBasis::new(params, parity)?;
    if basis.dim() > dense_limit {
        return Err(Error::Resource(format!(
            "dense solve of a {}-state sector exceeds the limit of {dense_limit}",
            basis.dim()
        )));
    }
    Ok(SparseHamiltonian::new(basis))
}

/// Quantities re-evaluated at each photon cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<(usize, Vec<f64>)>,
}

impl ConvergenceTable {
    /// `|values(c_{i+1}) - values(c_i)|` for successive cutoffs, keyed by the larger cutoff.
    pub fn differences(&self) -> Vec<(usize, Vec<f64>)> {
        self.rows
            .windows(2)
            .map(|w| {
                let d = w[1].1.iter().zip(&w[0].1).map(|(a, b)| (a - b).abs()).collect();
                (w[1].0, d)
            })
            .collect()
    }
}

/// Re-solves the even-sector ground state at each cutoff and evaluates `quantities` on it.
pub fn convergence_check<F>(
    params: DickeParams,
    cutoffs: &[usize],
    settings: &LanczosSettings,
    mut quantities: F,
) -> Result<ConvergenceTable>
where
    F: FnMut(&GroundState) -> Result<Vec<f64>>,
{
    if cutoffs.is_empty() || cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("cutoffs must be a non-empty increasing list".into()));
    }
    let mut rows = Vec::with_capacity(cutoffs.len());
    for &c in cutoffs {
        let gs = solve(params.with_cutoff(c), Parity::Even, settings)?;
        rows.push((c, quantities(&gs)?));
    }
    Ok(ConvergenceTable { rows })
}
