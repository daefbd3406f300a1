//! Collective spin `J = N/2`: coherent spin states, spin cat states and the
//! density matrices built from them.
//!
//! Amplitudes are stored by the excitation index `k = m + J`, so index 0 is
//! `|J,-J>` and index `N` is `|J,+J>`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::math::LogFactorials;

/// Angle tolerance used when checking `[0, pi]`-type domains.
const ANGLE_SLACK: f64 = 1e-12;

/// A collective spin of `atoms` two-level systems in the symmetric sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CollectiveSpin {
    atoms: usize,
}

impl CollectiveSpin {
    pub fn new(atoms: usize) -> Result<Self> {
        if atoms == 0 {
            return Err(domain("atom count must be positive"));
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    /// Total spin `J = N/2`.
    pub fn j(&self) -> f64 {
        self.atoms as f64 / 2.0
    }

    /// Hilbert-space dimension `N + 1`.
    pub fn dim(&self) -> usize {
        self.atoms + 1
    }

    /// Magnetic quantum number `m` of excitation index `k`.
    pub fn m_of(&self, k: usize) -> f64 {
        k as f64 - self.j()
    }

    /// `<k+1| J_+ |k> = sqrt((k+1)(N-k))`.
    pub fn raising_element(&self, k: usize) -> f64 {
        debug_assert!(k < self.atoms);
        (((k + 1) * (self.atoms - k)) as f64).sqrt()
    }

    pub fn j_plus(&self) -> DMatrix<C64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for k in 0..self.atoms {
            m[(k + 1, k)] = C64::new(self.raising_element(k), 0.0);
        }
        m
    }

    pub fn jx(&self) -> DMatrix<C64> {
        let p = self.j_plus();
        (&p + p.adjoint()) * C64::new(0.5, 0.0)
    }

    pub fn jy(&self) -> DMatrix<C64> {
        let p = self.j_plus();
        (&p - p.adjoint()) * C64::new(0.0, -0.5)
    }

    pub fn jz(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim(), self.dim(), |r, c| {
            if r == c {
                C64::new(self.m_of(r), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }
}

/// Parity of a spin cat state, equivalently of `m + J` on its support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(index: usize) -> Self {
        if index % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn contains(self, index: usize) -> bool {
        Parity::of(index) == self
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// `+1` for even, `-1` for odd.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Parity::Even => f.write_str("even"),
            Parity::Odd => f.write_str("odd"),
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => Err(domain(format!("unknown parity '{other}'"))),
        }
    }
}

/// Pure state of a collective spin, indexed by `k = m + J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinVector {
    spin: CollectiveSpin,
    amplitudes: Vec<C64>,
}

impl SpinVector {
    pub fn from_amplitudes(spin: CollectiveSpin, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != spin.dim() {
            return Err(domain(format!(
                "expected {} amplitudes for N = {}, got {}",
                spin.dim(),
                spin.atoms(),
                amplitudes.len()
            )));
        }
        Ok(Self { spin, amplitudes })
    }

    pub fn from_real(spin: CollectiveSpin, amplitudes: &[f64]) -> Result<Self> {
        Self::from_amplitudes(spin, amplitudes.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// The Dicke state `|J, m>` with `m = k - J`.
    pub fn dicke(spin: CollectiveSpin, k: usize) -> Result<Self> {
        if k > spin.atoms() {
            return Err(domain(format!("excitation index {k} exceeds N = {}", spin.atoms())));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); spin.dim()];
        amplitudes[k] = C64::new(1.0, 0.0);
        Ok(Self { spin, amplitudes })
    }

    pub fn spin(&self) -> CollectiveSpin {
        self.spin
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescales to unit norm; fails on a zero vector.
    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Degenerate("cannot normalize a zero spin vector".into()));
        }
        let inv = 1.0 / n;
        self.amplitudes.iter_mut().for_each(|a| *a *= inv);
        Ok(self)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &SpinVector) -> Result<C64> {
        if self.spin != other.spin {
            return Err(domain(format!(
                "spin dimension mismatch: N = {} vs N = {}",
                self.spin.atoms(),
                other.spin.atoms()
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Squared weight on indices whose parity differs from `parity`.
    pub fn off_parity_weight(&self, parity: Parity) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(k, _)| !parity.contains(*k))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

/// `|theta, phi> = R(theta, phi)|J,-J>` with
/// `R = exp(-i theta sin(phi) J_x + i theta cos(phi) J_y)`.
///
/// At `phi = 0` every amplitude is real and non-negative:
/// `sqrt(C(N,k)) cos^{N-k}(theta/2) sin^k(theta/2)`. A non-zero `phi` multiplies
/// amplitude `k` by `exp(-i phi k)`.
pub fn coherent_spin_state(spin: CollectiveSpin, theta: f64, phi: f64) -> Result<SpinVector> {
    if !(-ANGLE_SLACK..=std::f64::consts::PI + ANGLE_SLACK).contains(&theta) {
        return Err(domain(format!("polar angle {theta} outside [0, pi]")));
    }
    let theta = theta.clamp(0.0, std::f64::consts::PI);
    let lf = LogFactorials::new(spin.atoms());
    let magnitudes = css_magnitudes(&lf, spin.atoms(), theta);
    let amplitudes = magnitudes
        .into_iter()
        .enumerate()
        .map(|(k, a)| C64::from_polar(a, -phi * k as f64))
        .collect();
    Ok(SpinVector { spin, amplitudes })
}

/// Real amplitudes of `|theta, 0>` for `theta` in `[0, pi]`, in log space.
pub(crate) fn css_magnitudes(lf: &LogFactorials, atoms: usize, theta: f64) -> Vec<f64> {
    let (s, c) = (theta / 2.0).sin_cos();
    let (ln_s, ln_c) = (s.ln(), c.ln());
    (0..=atoms)
        .map(|k| {
            let up = if k == 0 { 0.0 } else { k as f64 * ln_s };
            let down = if k == atoms { 0.0 } else { (atoms - k) as f64 * ln_c };
            (0.5 * lf.ln_binomial(atoms, k) + up + down).exp()
        })
        .collect()
}

/// Spin cat state `(|+theta,0> ± |-theta,0>)` normalized by `sqrt(2(1 ± cos^{2J} theta))`.
///
/// Since `|-theta,0>` carries amplitudes `(-1)^k` times those of `|+theta,0>`,
/// the even (odd) cat is the even-`k` (odd-`k`) part of `|+theta,0>`, which is
/// how it is evaluated here; this stays accurate as `theta -> 0`.
pub fn cat_state(spin: CollectiveSpin, theta: f64, parity: Parity) -> Result<SpinVector> {
    if !(-ANGLE_SLACK..=FRAC_PI_2 + ANGLE_SLACK).contains(&theta) {
        return Err(domain(format!("cat angle {theta} outside (0, pi/2]")));
    }
    let lf = LogFactorials::new(spin.atoms());
    let amps = cat_amplitudes(&lf, spin.atoms(), theta.clamp(0.0, FRAC_PI_2), parity)?;
    SpinVector::from_real(spin, &amps)
}

pub(crate) fn cat_amplitudes(lf: &LogFactorials, atoms: usize, theta: f64, parity: Parity) -> Result<Vec<f64>> {
    let mut amps = css_magnitudes(lf, atoms, theta);
    for (k, a) in amps.iter_mut().enumerate() {
        if !parity.contains(k) {
            *a = 0.0;
        }
    }
    let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::Degenerate(format!(
            "{parity} cat state at theta = {theta} has zero norm"
        )));
    }
    amps.iter_mut().for_each(|a| *a /= norm);
    Ok(amps)
}

/// `<theta1,0|theta2,0> = cos^{2J}((theta1 - theta2)/2)`.
pub fn css_overlap(spin: CollectiveSpin, theta1: f64, theta2: f64) -> C64 {
    C64::new(((theta1 - theta2) / 2.0).cos().powi(spin.atoms() as i32), 0.0)
}

/// `|<a|b>|^2`.
pub fn fidelity(a: &SpinVector, b: &SpinVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Density matrix `rho_{kk'}` on the `N + 1` dimensional spin space.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinDensityMatrix {
    spin: CollectiveSpin,
    elements: DMatrix<C64>,
}

impl SpinDensityMatrix {
    /// Wraps `elements` after checking Hermiticity, unit trace and positivity.
    pub fn new(spin: CollectiveSpin, elements: DMatrix<C64>) -> Result<Self> {
        let rho = Self { spin, elements };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn new_unchecked(spin: CollectiveSpin, elements: DMatrix<C64>) -> Self {
        Self { spin, elements }
    }

    pub fn pure(psi: &SpinVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        Self { spin: psi.spin(), elements: &v * v.adjoint() }
    }

    pub fn maximally_mixed(spin: CollectiveSpin) -> Self {
        let d = spin.dim();
        Self {
            spin,
            elements: DMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0),
        }
    }

    pub fn spin(&self) -> CollectiveSpin {
        self.spin
    }

    pub fn elements(&self) -> &DMatrix<C64> {
        &self.elements
    }

    pub fn trace(&self) -> C64 {
        self.elements.trace()
    }

    /// `Tr(rho A)`.
    pub fn expect(&self, op: &DMatrix<C64>) -> C64 {
        (&self.elements * op).trace()
    }

    /// `<A^2> - <A>^2` for a Hermitian `A`.
    pub fn variance(&self, op: &DMatrix<C64>) -> f64 {
        let mean = self.expect(op).re;
        self.expect(&(op * op)).re - mean * mean
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.spin.dim();
        if self.elements.nrows() != d || self.elements.ncols() != d {
            return Err(domain(format!(
                "density matrix is {}x{}, expected {d}x{d}",
                self.elements.nrows(),
                self.elements.ncols()
            )));
        }
        let herm = (&self.elements - self.elements.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > 1e-12 {
            return Err(domain(format!("density matrix not Hermitian (deviation {herm:.3e})")));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(domain(format!("density matrix trace {tr} differs from 1")));
        }
        let hermitian = (&self.elements + self.elements.adjoint()) * C64::new(0.5, 0.0);
        let lowest = hermitian.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if lowest < -1e-10 {
            return Err(domain(format!("density matrix has negative eigenvalue {lowest:.3e}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spin(n: usize) -> CollectiveSpin {
        CollectiveSpin::new(n).unwrap()
    }

    fn assert_close(a: &[C64], b: &[C64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).norm() < tol, "{x} vs {y}");
        }
    }

    #[test]
    fn trivial_rotations() {
        let s = spin(2);
        let up = coherent_spin_state(s, 0.0, 0.0).unwrap();
        assert_close(up.amplitudes(), &[1.0.into(), 0.0.into(), 0.0.into()], 1e-15);
        let flipped = coherent_spin_state(s, std::f64::consts::PI, 0.0).unwrap();
        assert_close(flipped.amplitudes(), &[0.0.into(), 0.0.into(), 1.0.into()], 1e-15);
    }

    #[test]
    fn coherent_state_matches_matrix_exponential() {
        // Dense oracle: exp(-i theta sin(phi) Jx + i theta cos(phi) Jy) |J,-J>.
        for &(n, theta, phi) in &[(4usize, 0.3f64, 0.7f64), (7, 1.1, -0.4), (10, 2.5, 0.0), (3, 0.9, 2.0)] {
            let s = spin(n);
            let gen = s.jx() * C64::new(0.0, -theta * phi.sin()) + s.jy() * C64::new(0.0, theta * phi.cos());
            let rot = gen.exp();
            let expected: Vec<C64> = rot.column(0).iter().copied().collect();
            let got = coherent_spin_state(s, theta, phi).unwrap();
            assert_close(got.amplitudes(), &expected, 1e-12);
        }
    }

    #[test]
    fn coherent_state_rejects_out_of_range_angle() {
        assert!(matches!(coherent_spin_state(spin(3), -0.1, 0.0), Err(Error::Domain(_))));
        assert!(matches!(coherent_spin_state(spin(3), 3.2, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn coherent_state_stays_finite_for_large_spin() {
        let psi = coherent_spin_state(spin(400), 1.3, 0.2).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn even_cat_at_right_angle() {
        let cat = cat_state(spin(2), FRAC_PI_2, Parity::Even).unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert_close(cat.amplitudes(), &[r.into(), 0.0.into(), r.into()], 1e-15);
    }

    #[test]
    fn cat_matches_sum_of_coherent_states() {
        let s = spin(10);
        let theta = 0.5;
        let plus = coherent_spin_state(s, theta, 0.0).unwrap();
        // |-theta,0> via the dense rotation with the negative angle.
        let minus_rot = (s.jy() * C64::new(0.0, -theta)).exp();
        for parity in [Parity::Even, Parity::Odd] {
            let sum: Vec<C64> = plus
                .amplitudes()
                .iter()
                .zip(minus_rot.column(0).iter())
                .map(|(a, b)| a + parity.sign() * b)
                .collect();
            let expected = SpinVector::from_amplitudes(s, sum).unwrap().normalized().unwrap();
            let cat = cat_state(s, theta, parity).unwrap();
            assert_close(cat.amplitudes(), expected.amplitudes(), 1e-12);
            // normalization law
            let norm2 = 2.0 * (1.0 + parity.sign() * theta.cos().powi(10));
            let raw: f64 = plus
                .amplitudes()
                .iter()
                .zip(minus_rot.column(0).iter())
                .map(|(a, b)| (a + parity.sign() * b).norm_sqr())
                .sum();
            assert!((raw - norm2).abs() < 1e-12);
        }
    }

    #[test]
    fn odd_cat_is_normalized_and_degenerate_at_zero() {
        let cat = cat_state(spin(30), 0.2, Parity::Odd).unwrap();
        assert!((cat.norm() - 1.0).abs() < 1e-12);
        assert_eq!(cat.off_parity_weight(Parity::Odd), 0.0);
        assert!(matches!(cat_state(spin(30), 0.0, Parity::Odd), Err(Error::Degenerate(_))));
        let even0 = cat_state(spin(30), 0.0, Parity::Even).unwrap();
        assert!((even0.amplitudes()[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn overlap_special_values() {
        let s = spin(2);
        assert!((css_overlap(s, 0.4, 0.4).re - 1.0).abs() < 1e-15);
        assert!(css_overlap(s, 0.0, std::f64::consts::PI).norm() < 1e-15);
        let s6 = spin(6);
        let a = coherent_spin_state(s6, 0.4, 0.0).unwrap();
        let b = coherent_spin_state(s6, 0.1, 0.0).unwrap();
        let direct = a.inner(&b).unwrap();
        assert!((direct - css_overlap(s6, 0.4, 0.1)).norm() < 1e-14);
        assert!((direct.re - 0.15f64.cos().powi(6)).abs() < 1e-14);
    }

    #[test]
    fn fidelity_values() {
        let s = spin(8);
        let down = SpinVector::dicke(s, 0).unwrap();
        let up = SpinVector::dicke(s, 8).unwrap();
        assert_eq!(fidelity(&down, &down).unwrap(), 1.0);
        assert_eq!(fidelity(&down, &up).unwrap(), 0.0);
        let theta = 0.7;
        let cat = cat_state(s, theta, Parity::Even).unwrap();
        let css = coherent_spin_state(s, theta, 0.0).unwrap();
        // <cat|css> = (1 + cos^{2J} theta) / sqrt(2(1 + cos^{2J} theta))
        let c = theta.cos().powi(8);
        let expected = (1.0 + c) / 2.0;
        assert!((fidelity(&cat, &css).unwrap() - expected).abs() < 1e-12);
        let other = SpinVector::dicke(spin(3), 0).unwrap();
        assert!(matches!(fidelity(&down, &other), Err(Error::Domain(_))));
    }

    #[test]
    fn density_matrix_validation() {
        let s = spin(4);
        assert!(SpinDensityMatrix::maximally_mixed(s).validate().is_ok());
        let psi = coherent_spin_state(s, 0.8, 0.3).unwrap();
        assert!(SpinDensityMatrix::pure(&psi).validate().is_ok());
        let mut bad = DMatrix::<C64>::zeros(5, 5);
        bad[(0, 0)] = C64::new(2.0, 0.0);
        bad[(1, 1)] = C64::new(-1.0, 0.0);
        assert!(SpinDensityMatrix::new(s, bad).is_err());
    }

    #[test]
    fn coherent_state_variances() {
        // A coherent state pointing along -z has Var(Jx) = Var(Jy) = J/2.
        let s = spin(12);
        let rho = SpinDensityMatrix::pure(&SpinVector::dicke(s, 0).unwrap());
        assert!((rho.variance(&s.jx()) - 3.0).abs() < 1e-12);
        assert!((rho.variance(&s.jy()) - 3.0).abs() < 1e-12);
    }
}
