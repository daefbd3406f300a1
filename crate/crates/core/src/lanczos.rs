//! Explicitly restarted Lanczos for the lowest eigenpair of a real symmetric
//! operator, with full (two-pass) reorthogonalization inside each cycle.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dicke::SymmetricOperator;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LanczosSettings {
    /// Target for `||A x - lambda x|| / ||A||`, with `||A||` estimated from the Ritz values.
    pub tol: f64,
    /// Budget of matrix–vector products over all restart cycles.
    pub max_iter: usize,
    /// Krylov subspace size per restart cycle.
    pub krylov_dim: usize,
    /// Seed for the random start vector.
    pub seed: u64,
}

impl Default for LanczosSettings {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 5000, krylov_dim: 150, seed: 0x00d1_c4e5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    /// `||A x - lambda x||`.
    pub residual: f64,
    /// Estimate of `||A||` used to scale the tolerance.
    pub scale: f64,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Lowest eigenpair of `op`.
pub fn lowest_eigenpair<A: SymmetricOperator + ?Sized>(op: &A, settings: &LanczosSettings) -> Result<Eigenpair> {
    let dim = op.dim();
    if dim == 0 {
        return Err(Error::Domain("operator has dimension zero".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut start: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
    let n0 = norm(&start);
    start.iter_mut().for_each(|v| *v /= n0);

    let m = settings.krylov_dim.max(2).min(dim);
    let mut iterations = 0;
    let mut best_residual = f64::INFINITY;
    let mut w = vec![0.0; dim];
    loop {
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        basis.push(start.clone());
        let mut exhausted = false;
        for j in 0..m {
            op.apply(&basis[j], &mut w);
            iterations += 1;
            let a = dot(&basis[j], &w);
            alpha.push(a);
            axpy(-a, &basis[j], &mut w);
            if j > 0 {
                axpy(-beta[j - 1], &basis[j - 1], &mut w);
            }
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &w);
                    axpy(-c, v, &mut w);
                }
            }
            let b = norm(&w);
            let scale = alpha.iter().map(|a| a.abs()).fold(0.0, f64::max).max(1e-300);
            if j + 1 == m || b <= 1e-13 * scale {
                exhausted = b <= 1e-13 * scale;
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }

        let s = alpha.len();
        let t = DMatrix::from_fn(s, s, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let (imin, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty tridiagonal");
        let scale = eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
        let y = eig.eigenvectors.column(imin);
        let mut x = vec![0.0; dim];
        for (c, v) in y.iter().zip(&basis) {
            axpy(*c, v, &mut x);
        }
        let nx = norm(&x);
        x.iter_mut().for_each(|v| *v /= nx);

        op.apply(&x, &mut w);
        iterations += 1;
        let rq = dot(&x, &w);
        axpy(-rq, &x, &mut w);
        let residual = norm(&w);
        best_residual = best_residual.min(residual);
        if residual <= settings.tol * scale || (exhausted && residual <= 1e-12 * scale) {
            return Ok(Eigenpair { value: rq, vector: x, residual, scale, iterations });
        }
        if iterations >= settings.max_iter {
            return Err(Error::Convergence { iterations, best_residual });
        }
        start = x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Dense(DMatrix<f64>);

    impl SymmetricOperator for Dense {
        fn dim(&self) -> usize {
            self.0.nrows()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            let v = &self.0 * nalgebra::DVector::from_column_slice(x);
            y.copy_from_slice(v.as_slice());
        }
    }

    #[test]
    fn finds_lowest_eigenpair_of_random_symmetric_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 300;
        let a = DMatrix::from_fn(n, n, |_, _| rng.random::<f64>() - 0.5);
        let a = &a + a.transpose();
        let exact = a.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        let settings = LanczosSettings { krylov_dim: 60, ..Default::default() };
        let pair = lowest_eigenpair(&Dense(a), &settings).unwrap();
        assert!((pair.value - exact).abs() < 1e-9 * exact.abs());
        assert!(pair.residual <= 1e-10 * pair.scale);
    }

    #[test]
    fn tiny_operator_is_solved_exactly() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let pair = lowest_eigenpair(&Dense(a), &LanczosSettings::default()).unwrap();
        assert!((pair.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exhausted_budget_reports_best_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 400;
        let a = DMatrix::from_fn(n, n, |_, _| rng.random::<f64>());
        let a = &a + a.transpose();
        let settings = LanczosSettings { krylov_dim: 3, max_iter: 8, tol: 1e-14, ..Default::default() };
        match lowest_eigenpair(&Dense(a), &settings) {
            Err(Error::Convergence { iterations, best_residual }) => {
                assert!(iterations >= 8);
                assert!(best_residual.is_finite());
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }
}
