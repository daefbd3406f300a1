//! The Dicke Hamiltonian
//! `H = w_cav a†a + w_atom (J_z + N/2) + (g/sqrt(N)) (a† + a)(J_+ + J_-)`
//! in a truncated product basis `|n> ⊗ |J,m>` restricted to one sector of the
//! conserved parity `(-1)^{n + m + J}`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::spin::{CollectiveSpin, Parity};

/// Default photon-number cutoff.
pub const DEFAULT_N_CUTOFF: usize = 50;

/// Default ceiling on the parity-sector dimension.
pub const DEFAULT_MAX_BASIS: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DickeParams {
    pub omega_cav: f64,
    pub omega_atom: f64,
    pub g: f64,
    pub atoms: usize,
    pub n_cutoff: usize,
}

impl DickeParams {
    /// `w_cav = 1`, `w_atom = ratio`, `g = g_over_gc * g_c`.
    pub fn new(atoms: usize, g_over_gc: f64, omega_ratio: f64, n_cutoff: usize) -> Result<Self> {
        let mut p = Self { omega_cav: 1.0, omega_atom: omega_ratio, g: 0.0, atoms, n_cutoff };
        p.g = g_over_gc * p.critical_coupling();
        p.validate()?;
        Ok(p)
    }

    /// Resonant case `w_cav = w_atom = 1`.
    pub fn resonant(atoms: usize, g_over_gc: f64, n_cutoff: usize) -> Result<Self> {
        Self::new(atoms, g_over_gc, 1.0, n_cutoff)
    }

    /// `g_c = sqrt(w_cav w_atom) / 2`.
    pub fn critical_coupling(&self) -> f64 {
        (self.omega_cav * self.omega_atom).sqrt() / 2.0
    }

    pub fn g_over_gc(&self) -> f64 {
        self.g / self.critical_coupling()
    }

    pub fn omega_ratio(&self) -> f64 {
        self.omega_atom / self.omega_cav
    }

    pub fn spin(&self) -> CollectiveSpin {
        CollectiveSpin::new(self.atoms).expect("validated atom count")
    }

    pub fn with_cutoff(mut self, n_cutoff: usize) -> Self {
        self.n_cutoff = n_cutoff;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_cav > 0.0 && self.omega_cav.is_finite()) {
            return Err(domain(format!("cavity frequency must be positive, got {}", self.omega_cav)));
        }
        if !(self.omega_atom > 0.0 && self.omega_atom.is_finite()) {
            return Err(domain(format!("atomic frequency must be positive, got {}", self.omega_atom)));
        }
        if !(self.g >= 0.0 && self.g.is_finite()) {
            return Err(domain(format!("coupling must be non-negative, got {}", self.g)));
        }
        if self.atoms == 0 {
            return Err(domain("atom count must be positive"));
        }
        if self.n_cutoff == 0 {
            return Err(domain("photon cutoff must be at least 1"));
        }
        Ok(())
    }
}

/// Enumeration of `(n, k = m + J)` with `n <= n_cutoff` and `n + k` of the
/// sector parity. States are ordered photon-major, so each photon number
/// occupies a contiguous block of indices.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeBasis {
    params: DickeParams,
    parity: Parity,
    /// `offsets[n]` is the index of the first state with photon number `n`;
    /// `offsets[n_cutoff + 1]` is the dimension.
    offsets: Vec<usize>,
}

impl DickeBasis {
    pub fn new(params: DickeParams, parity: Parity) -> Result<Self> {
        Self::with_limit(params, parity, DEFAULT_MAX_BASIS)
    }

    pub fn with_limit(params: DickeParams, parity: Parity, max_dim: usize) -> Result<Self> {
        params.validate()?;
        let mut offsets = Vec::with_capacity(params.n_cutoff + 2);
        let mut total = 0usize;
        for n in 0..=params.n_cutoff {
            offsets.push(total);
            total += Self::count_spin_states(params.atoms, Self::first_k(parity, n));
        }
        offsets.push(total);
        if total > max_dim {
            return Err(Error::Resource(format!(
                "parity sector has {total} states, above the limit of {max_dim}"
            )));
        }
        Ok(Self { params, parity, offsets })
    }

    fn first_k(parity: Parity, n: usize) -> usize {
        // n + k must have the sector parity
        if parity.contains(n) {
            0
        } else {
            1
        }
    }

    fn count_spin_states(atoms: usize, first: usize) -> usize {
        if first > atoms {
            0
        } else {
            (atoms - first) / 2 + 1
        }
    }

    pub fn params(&self) -> &DickeParams {
        &self.params
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn dim(&self) -> usize {
        self.offsets[self.params.n_cutoff + 1]
    }

    pub fn n_cutoff(&self) -> usize {
        self.params.n_cutoff
    }

    /// Index range of states with photon number `n`.
    pub fn photon_block(&self, n: usize) -> std::ops::Range<usize> {
        self.offsets[n]..self.offsets[n + 1]
    }

    /// Spin parity (of `k = m + J`) of the states carrying `n` photons.
    pub fn spin_parity(&self, n: usize) -> Parity {
        Parity::of(Self::first_k(self.parity, n))
    }

    pub fn index_of(&self, n: usize, k: usize) -> Option<usize> {
        if n > self.params.n_cutoff || k > self.params.atoms || (n + k) % 2 != self.sector_bit() {
            return None;
        }
        Some(self.offsets[n] + k / 2)
    }

    /// `(n, k)` of a linear index.
    pub fn state(&self, index: usize) -> (usize, usize) {
        let n = match self.offsets.binary_search(&index) {
            Ok(mut n) => {
                // skip empty blocks
                while self.offsets[n + 1] == index {
                    n += 1;
                }
                n
            }
            Err(n) => n - 1,
        };
        let k = Self::first_k(self.parity, n) + 2 * (index - self.offsets[n]);
        (n, k)
    }

    pub fn states(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..=self.params.n_cutoff).flat_map(move |n| {
            let first = Self::first_k(self.parity, n);
            (first..=self.params.atoms).step_by(2).map(move |k| (n, k))
        })
    }

    fn sector_bit(&self) -> usize {
        match self.parity {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// Symmetric operator with a matrix–vector product.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Real symmetric matrix in compressed-row form, columns sorted within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(p) => self.values[r.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| self.row(i).all(|(j, v)| j == i || v == 0.0))
    }

    /// `max |A_ij - A_ji|` over stored entries.
    pub fn asymmetry(&self) -> f64 {
        (0..self.dim)
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }
}

impl SymmetricOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let r = self.row_ptr[i]..self.row_ptr[i + 1];
            *yi = self.cols[r.clone()].iter().zip(&self.values[r]).map(|(&j, v)| v * x[j]).sum();
        }
    }
}

/// The Dicke Hamiltonian on one parity sector. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHamiltonian {
    basis: DickeBasis,
    matrix: CsrMatrix,
}

impl SparseHamiltonian {
    pub fn new(basis: DickeBasis) -> Self {
        let p = *basis.params();
        let spin = p.spin();
        let coupling = p.g / (p.atoms as f64).sqrt();
        let dim = basis.dim();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::with_capacity(5 * dim);
        let mut values = Vec::with_capacity(5 * dim);
        row_ptr.push(0);
        for (n, k) in basis.states() {
            let mut push = |n2: usize, k2: usize, v: f64| {
                if let Some(j) = basis.index_of(n2, k2) {
                    cols.push(j);
                    values.push(v);
                }
            };
            if coupling != 0.0 && n > 0 {
                let photon = (n as f64).sqrt();
                if k > 0 {
                    push(n - 1, k - 1, coupling * photon * spin.raising_element(k - 1));
                }
                if k < p.atoms {
                    push(n - 1, k + 1, coupling * photon * spin.raising_element(k));
                }
            }
            push(n, k, p.omega_cav * n as f64 + p.omega_atom * k as f64);
            if coupling != 0.0 && n < p.n_cutoff {
                let photon = ((n + 1) as f64).sqrt();
                if k > 0 {
                    push(n + 1, k - 1, coupling * photon * spin.raising_element(k - 1));
                }
                if k < p.atoms {
                    push(n + 1, k + 1, coupling * photon * spin.raising_element(k));
                }
            }
            row_ptr.push(cols.len());
        }
        Self { basis, matrix: CsrMatrix { dim, row_ptr, cols, values } }
    }

    pub fn basis(&self) -> &DickeBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }
}

impl SymmetricOperator for SparseHamiltonian {
    fn dim(&self) -> usize {
        self.matrix.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matrix.apply(x, y)
    }
}

/// Shorthand for [`DickeBasis::new`].
pub fn build_basis(params: DickeParams, parity: Parity) -> Result<DickeBasis> {
    DickeBasis::new(params, parity)
}

/// Shorthand for [`SparseHamiltonian::new`].
pub fn build_hamiltonian(basis: DickeBasis) -> SparseHamiltonian {
    SparseHamiltonian::new(basis)
}
