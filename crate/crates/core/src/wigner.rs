//! Spin Wigner function on the sphere,
//! `W(theta, phi) = sqrt((2J+1)/4pi) sum_{k,q} t_kq Y_kq(theta, phi)`,
//! with multipoles `t_kq = sum rho_{mm'} sqrt((2k+1)/(2J+1)) <J m'; k q | J m>`.
//!
//! Angles are standard polar coordinates about `+z`: `|J,+J>` sits at
//! `theta = 0` and `|J,-J>` at `theta = pi`. [`spin_wigner_css_frame`] measures
//! the polar angle from `-z` instead, matching the direction
//! `(sin t cos p, sin t sin p, -cos t)` of the coherent state `|t, p>`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64 as C64;

use crate::clebsch::cg_column;
use crate::error::{Error, Result};
use crate::math::gauss_legendre;
use crate::spin::SpinDensityMatrix;

/// Largest imaginary part tolerated before `W` is declared non-real.
const IMAG_TOL: f64 = 1e-10;

/// Values of a spin Wigner function on a tensor grid, row-major in `theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn get(&self, i_theta: usize, i_phi: usize) -> f64 {
        self.values[i_theta * self.phis.len() + i_phi]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// CSV: the header row holds the phi values after a corner label, each
    /// following row starts with its theta value. Floats carry 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "theta\\phi")?;
        for p in &self.phis {
            write!(out, ",{p:.16e}")?;
        }
        writeln!(out)?;
        for (i, t) in self.thetas.iter().enumerate() {
            write!(out, "{t:.16e}")?;
            for j in 0..self.phis.len() {
                write!(out, ",{:.16e}", self.get(i, j))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Multipole coefficients `t_kq`, stored as `t[k][q + k]`.
#[derive(Debug, Clone)]
pub struct Multipoles {
    two_j: usize,
    t: Vec<Vec<C64>>,
}

impl Multipoles {
    /// Uses `<J m'; k q | J M> = (-1)^{J-m'} sqrt((2J+1)/(2k+1)) <J m'; J -M | k -q>`,
    /// which turns each fixed-`q` family into a fixed-projection coupling column.
    pub fn new(rho: &SpinDensityMatrix) -> Self {
        let two_j = rho.spin().atoms();
        let tj = two_j as i64;
        let el = rho.elements();
        let mut t: Vec<Vec<C64>> = (0..=two_j).map(|k| vec![C64::new(0.0, 0.0); 2 * k + 1]).collect();
        for q in -tj..=tj {
            let kmin = q.unsigned_abs() as usize;
            // m' (as index k' = m' + J) runs over max(0, -q) ..= min(2J, 2J - q)
            let first = (-q).max(0) as usize;
            for (k, tk) in t.iter_mut().enumerate().skip(kmin) {
                let column = cg_column(tj, tj, 2 * k as i64, -2 * q);
                let mut acc = C64::new(0.0, 0.0);
                for (offset, c) in column.iter().enumerate() {
                    let kp = first + offset;
                    let row = (kp as i64 + q) as usize;
                    // (-1)^{J - m'} = (-1)^{2J - k'}
                    let sign = if (two_j - kp) % 2 == 0 { 1.0 } else { -1.0 };
                    acc += el[(row, kp)] * (sign * c);
                }
                tk[(q + k as i64) as usize] = acc;
            }
        }
        Self { two_j, t }
    }

    pub fn get(&self, k: usize, q: i64) -> C64 {
        self.t[k][(q + k as i64) as usize]
    }

    /// `W` at one point, returned as a complex number so callers can check realness.
    fn eval_row(&self, theta: f64, phis: &[f64], legendre: &mut Vec<f64>) -> Vec<C64> {
        let l = self.two_j;
        normalized_legendre(l, theta, legendre);
        let pref = ((l as f64 + 1.0) / (4.0 * PI)).sqrt();
        // b[q + L] = sum_k t_kq * Ybar_k^{q}(theta) without the e^{iq phi} factor.
        let li = l as i64;
        let mut b = vec![C64::new(0.0, 0.0); 2 * l + 1];
        for q in -li..=li {
            let aq = q.unsigned_abs() as usize;
            let cs = if q < 0 && aq % 2 == 1 { -1.0 } else { 1.0 };
            let mut acc = C64::new(0.0, 0.0);
            for k in aq..=l {
                acc += self.get(k, q) * legendre[tri(k, aq)];
            }
            b[(q + li) as usize] = acc * (cs * pref);
        }
        phis.iter()
            .map(|&phi| {
                b.iter()
                    .enumerate()
                    .map(|(i, bq)| bq * C64::from_polar(1.0, (i as i64 - li) as f64 * phi))
                    .sum()
            })
            .collect()
    }
}

#[inline]
fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Orthonormal associated Legendre functions with the Condon–Shortley phase,
/// `Y_lm = out[tri(l, m)] * e^{i m phi}` for `m >= 0`.
fn normalized_legendre(lmax: usize, theta: f64, out: &mut Vec<f64>) {
    out.clear();
    out.resize(tri(lmax, lmax) + 1, 0.0);
    let (s, x) = theta.sin_cos();
    let s = s.abs();
    out[0] = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=lmax {
        if m > 0 {
            let mf = m as f64;
            out[tri(m, m)] = -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s * out[tri(m - 1, m - 1)];
        }
        if m < lmax {
            out[tri(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * x * out[tri(m, m)];
        }
        let mf = m as f64;
        for l in m + 2..=lmax {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let lp = lf - 1.0;
            let b = ((lp * lp - mf * mf) / (4.0 * lp * lp - 1.0)).sqrt();
            out[tri(l, m)] = a * (x * out[tri(l - 1, m)] - b * out[tri(l - 2, m)]);
        }
    }
}

/// Spin Wigner function of `rho` on the grid `thetas x phis` (standard polar angles).
pub fn spin_wigner(rho: &SpinDensityMatrix, thetas: &[f64], phis: &[f64]) -> Result<WignerGrid> {
    let multipoles = Multipoles::new(rho);
    let mut legendre = Vec::new();
    let mut values = Vec::with_capacity(thetas.len() * phis.len());
    for &theta in thetas {
        for w in multipoles.eval_row(theta, phis, &mut legendre) {
            if !w.re.is_finite() || !w.im.is_finite() {
                return Err(Error::Internal(format!("non-finite Wigner value at theta = {theta}")));
            }
            if w.im.abs() > IMAG_TOL * w.re.abs().max(1.0) {
                return Err(Error::Internal(format!(
                    "Wigner function has imaginary part {:.3e} at theta = {theta}",
                    w.im
                )));
            }
            values.push(w.re);
        }
    }
    Ok(WignerGrid { thetas: thetas.to_vec(), phis: phis.to_vec(), values })
}

/// As [`spin_wigner`], with `theta` measured from `-z` (the `|J,-J>` pole).
pub fn spin_wigner_css_frame(rho: &SpinDensityMatrix, thetas: &[f64], phis: &[f64]) -> Result<WignerGrid> {
    let standard: Vec<f64> = thetas.iter().map(|t| PI - t).collect();
    let mut grid = spin_wigner(rho, &standard, phis)?;
    grid.thetas = thetas.to_vec();
    Ok(grid)
}

/// Equally spaced patch around the `|J,-J>` pole: `theta` in `[0, theta_max]`,
/// `phi` in `[0, 2 pi]`, `points` samples along each axis.
pub fn patch_axes(theta_max: f64, points: usize) -> (Vec<f64>, Vec<f64>) {
    let lin = |hi: f64| -> Vec<f64> {
        if points == 1 {
            return vec![0.0];
        }
        (0..points).map(|i| hi * i as f64 / (points - 1) as f64).collect()
    };
    (lin(theta_max), lin(2.0 * PI))
}

/// `int_0^pi dtheta int_0^{2pi} dphi sin(theta) W` by Gauss–Legendre in
/// `cos(theta)` and the trapezoid rule in `phi`. Exact once
/// `n_theta >= J + 1` and `n_phi > 2J`.
pub fn sphere_integral(rho: &SpinDensityMatrix, n_theta: usize, n_phi: usize) -> Result<f64> {
    let (x, w) = gauss_legendre(n_theta);
    let thetas: Vec<f64> = x.iter().map(|c| c.acos()).collect();
    let phis: Vec<f64> = (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect();
    let grid = spin_wigner(rho, &thetas, &phis)?;
    let dphi = 2.0 * PI / n_phi as f64;
    Ok((0..thetas.len())
        .map(|i| w[i] * dphi * (0..n_phi).map(|j| grid.get(i, j)).sum::<f64>())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{cat_state, coherent_spin_state, CollectiveSpin, Parity, SpinVector};

    fn spin(n: usize) -> CollectiveSpin {
        CollectiveSpin::new(n).unwrap()
    }

    #[test]
    fn low_order_harmonics() {
        let theta: f64 = 0.7;
        let mut p = Vec::new();
        normalized_legendre(2, theta, &mut p);
        let (s, c) = theta.sin_cos();
        assert!((p[tri(0, 0)] - 0.5 / PI.sqrt()).abs() < 1e-15);
        assert!((p[tri(1, 0)] - (3.0 / (4.0 * PI)).sqrt() * c).abs() < 1e-15);
        assert!((p[tri(1, 1)] + (3.0 / (8.0 * PI)).sqrt() * s).abs() < 1e-15);
        assert!((p[tri(2, 0)] - (5.0 / (16.0 * PI)).sqrt() * (3.0 * c * c - 1.0)).abs() < 1e-15);
        assert!((p[tri(2, 1)] + (15.0 / (8.0 * PI)).sqrt() * s * c).abs() < 1e-15);
        assert!((p[tri(2, 2)] - (15.0 / (32.0 * PI)).sqrt() * s * s).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_is_flat() {
        let rho = SpinDensityMatrix::maximally_mixed(spin(6));
        let (t, p) = patch_axes(PI, 9);
        let grid = spin_wigner(&rho, &t, &p).unwrap();
        for v in &grid.values {
            assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-10);
        }
    }

    #[test]
    fn lowest_dicke_state_peaks_at_south_pole() {
        let rho = SpinDensityMatrix::pure(&SpinVector::dicke(spin(4), 0).unwrap());
        let thetas: Vec<f64> = (0..=40).map(|i| PI * i as f64 / 40.0).collect();
        let phis: Vec<f64> = (0..16).map(|j| 2.0 * PI * j as f64 / 16.0).collect();
        let grid = spin_wigner(&rho, &thetas, &phis).unwrap();
        let (imax, _) = grid
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        assert_eq!(imax / phis.len(), thetas.len() - 1);
        for i in 0..thetas.len() {
            let row: Vec<f64> = (0..phis.len()).map(|j| grid.get(i, j)).collect();
            let spread = row.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                - row.iter().copied().fold(f64::INFINITY, f64::min);
            assert!(spread < 1e-10);
        }
    }

    #[test]
    fn coherent_state_wigner_is_normalized() {
        let rho = SpinDensityMatrix::pure(&coherent_spin_state(spin(9), 1.2, 0.4).unwrap());
        let total = sphere_integral(&rho, 12, 24).unwrap();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cat_fringe_sign_follows_parity() {
        let s = spin(30);
        for (parity, sign) in [(Parity::Even, 1.0), (Parity::Odd, -1.0)] {
            let rho = SpinDensityMatrix::pure(&cat_state(s, 0.5, parity).unwrap());
            let at_center = spin_wigner_css_frame(&rho, &[0.0], &[0.0]).unwrap().values[0];
            assert!(sign * at_center > 0.0, "{parity}: {at_center}");
        }
    }

    #[test]
    fn csv_layout() {
        let rho = SpinDensityMatrix::maximally_mixed(spin(2));
        let grid = spin_wigner(&rho, &[0.0, 1.0], &[0.0, 0.5, 1.0]).unwrap();
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0].split(',').count(), 4);
        assert!(lines[0].starts_with("theta\\phi,0.0000000000000000e0"));
        assert!(lines[2].starts_with("1.0000000000000000e0,"));
    }
}
