//! Fits of spin states to ideal spin cat states `|cat(theta)>`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::math::{maximize_on_grid, LogFactorials};
use crate::spin::{css_magnitudes, Parity, SpinVector};

/// Largest off-parity weight a state may carry and still be fitted.
const PARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatFitSettings {
    /// Coarse grid size over `(0, pi/2]`.
    pub grid_points: usize,
    /// Bracket width at which golden-section refinement stops.
    pub tol: f64,
}

impl Default for CatFitSettings {
    fn default() -> Self {
        Self { grid_points: 400, tol: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatFit {
    pub theta_opt: f64,
    pub fidelity: f64,
    /// `sqrt(N) * theta_opt`.
    pub l_opt: f64,
    pub parity: Parity,
    /// Set when no grid angle reached fidelity 0.5.
    pub low_quality: bool,
}

/// Fidelity `F(theta) = |<cat(theta)|psi>|^2` and its derivative for a fixed state.
struct CatOverlap<'a> {
    psi: &'a [C64],
    parity: Parity,
    atoms: usize,
    lf: LogFactorials,
}

impl<'a> CatOverlap<'a> {
    fn new(psi: &'a SpinVector, parity: Parity) -> Result<Self> {
        let leak = psi.off_parity_weight(parity);
        if leak > PARITY_TOL * psi.norm_sqr().max(1.0) {
            return Err(domain(format!("state has weight {leak:.3e} outside the {parity} sector")));
        }
        let atoms = psi.spin().atoms();
        Ok(Self { psi: psi.amplitudes(), parity, atoms, lf: LogFactorials::new(atoms) })
    }

    fn lowest_index(&self) -> usize {
        match self.parity {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    fn fidelity(&self, theta: f64) -> f64 {
        if theta == 0.0 {
            // limit theta -> 0: the lowest Dicke state of this parity
            return self.psi.get(self.lowest_index()).map_or(0.0, |a| a.norm_sqr());
        }
        let a = css_magnitudes(&self.lf, self.atoms, theta);
        let mut u = C64::new(0.0, 0.0);
        let mut nrm = 0.0;
        for k in (self.lowest_index()..=self.atoms).step_by(2) {
            u += self.psi[k] * a[k];
            nrm += a[k] * a[k];
        }
        if nrm == 0.0 {
            return 0.0;
        }
        (u.norm_sqr() / nrm).min(1.0)
    }

    /// `dF/dtheta` from `da_k/dtheta = a_k (k/2 cot(theta/2) - (N-k)/2 tan(theta/2))`.
    fn derivative(&self, theta: f64) -> f64 {
        let a = css_magnitudes(&self.lf, self.atoms, theta);
        let (cot, tan) = (1.0 / (theta / 2.0).tan(), (theta / 2.0).tan());
        let mut u = C64::new(0.0, 0.0);
        let mut du = C64::new(0.0, 0.0);
        let (mut nrm, mut dnrm) = (0.0, 0.0);
        for k in (self.lowest_index()..=self.atoms).step_by(2) {
            let da = a[k] * (k as f64 / 2.0 * cot - (self.atoms - k) as f64 / 2.0 * tan);
            u += self.psi[k] * a[k];
            du += self.psi[k] * da;
            nrm += a[k] * a[k];
            dnrm += 2.0 * a[k] * da;
        }
        (2.0 * (u.conj() * du).re * nrm - u.norm_sqr() * dnrm) / (nrm * nrm)
    }
}

/// Maximizes `F(theta)` over `(0, pi/2]`: coarse grid, golden-section
/// refinement, then bisection on the analytic `dF/dtheta` around the result.
pub fn fit_cat(psi: &SpinVector, parity: Parity) -> Result<CatFit> {
    fit_cat_with(psi, parity, &CatFitSettings::default())
}

pub fn fit_cat_with(psi: &SpinVector, parity: Parity, settings: &CatFitSettings) -> Result<CatFit> {
    if settings.grid_points == 0 {
        return Err(domain("cat fit needs at least one grid point"));
    }
    let model = CatOverlap::new(psi, parity)?;
    let best = maximize_on_grid(|t| model.fidelity(t), FRAC_PI_2, settings.grid_points, settings.tol);
    let step = FRAC_PI_2 / settings.grid_points as f64;
    let (theta, fidelity) = polish(&model, best.argmax, best.max, step);
    if !fidelity.is_finite() {
        return Err(Error::Internal("cat fidelity is not finite".into()));
    }
    Ok(CatFit {
        theta_opt: theta,
        fidelity,
        l_opt: (psi.spin().atoms() as f64).sqrt() * theta,
        parity,
        low_quality: best.grid_max < 0.5,
    })
}

fn polish(model: &CatOverlap<'_>, theta: f64, value: f64, max_half_width: f64) -> (f64, f64) {
    let mut h = 1e-7;
    while h <= max_half_width {
        let (lo, hi) = (theta - h, (theta + h).min(FRAC_PI_2));
        if lo <= 0.0 {
            break;
        }
        let (dlo, dhi) = (model.derivative(lo), model.derivative(hi));
        if dlo > 0.0 && dhi < 0.0 {
            let (mut lo, mut hi) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if model.derivative(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t = 0.5 * (lo + hi);
            let f = model.fidelity(t);
            // F is flat to rounding near its peak; the derivative root is the sharper estimate.
            return if f >= value - 1e-13 { (t, f.max(value)) } else { (theta, value) };
        }
        h *= 4.0;
    }
    (theta, value)
}

/// `F(theta)` at each requested angle in `[0, pi/2]`; `theta = 0` uses the limiting cat.
pub fn fidelity_curve(psi: &SpinVector, parity: Parity, thetas: &[f64]) -> Result<Vec<f64>> {
    let model = CatOverlap::new(psi, parity)?;
    thetas
        .iter()
        .map(|&t| {
            if !(0.0..=FRAC_PI_2 + 1e-12).contains(&t) {
                Err(domain(format!("cat angle {t} outside [0, pi/2]")))
            } else {
                Ok(model.fidelity(t.min(FRAC_PI_2)))
            }
        })
        .collect()
}
