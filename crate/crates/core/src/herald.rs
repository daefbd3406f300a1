//! Photon-number projection of the joint ground state.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::ground::GroundState;
use crate::spin::{SpinDensityMatrix, SpinVector};

/// Slices with squared norm below this are treated as impossible outcomes.
pub const DEGENERATE_NORM_SQR: f64 = 1e-300;

/// Spin state heralded by detecting `n` photons, with the detection probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeraldOutcome {
    pub n: usize,
    pub probability: f64,
    #[serde(rename = "amplitudes", with = "spin_amplitudes")]
    pub psi: SpinVector,
}

mod spin_amplitudes {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(psi: &SpinVector, s: S) -> std::result::Result<S::Ok, S::Error> {
        psi.amplitudes().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<SpinVector, D::Error> {
        let amps = Vec::<C64>::deserialize(d)?;
        if amps.is_empty() {
            return Err(serde::de::Error::custom("empty amplitude list"));
        }
        let spin = crate::spin::CollectiveSpin::new(amps.len() - 1).map_err(serde::de::Error::custom)?;
        SpinVector::from_amplitudes(spin, amps).map_err(serde::de::Error::custom)
    }
}

/// `psi_n = <n|G> / ||<n|G>||` and `P(n) = ||<n|G>||^2`.
pub fn herald(ground: &GroundState, n: usize) -> Result<HeraldOutcome> {
    let basis = ground.basis();
    if n > basis.n_cutoff() {
        return Err(domain(format!("photon number {n} exceeds the cutoff {}", basis.n_cutoff())));
    }
    let spin = ground.params().spin();
    let slice = ground.photon_slice(n);
    let probability: f64 = slice.iter().map(|a| a * a).sum();
    if probability < DEGENERATE_NORM_SQR {
        return Err(Error::Degenerate(format!("detecting {n} photons has zero probability")));
    }
    let first = basis.spin_parity(n) as usize;
    let inv = 1.0 / probability.sqrt();
    let mut amps = vec![C64::new(0.0, 0.0); spin.dim()];
    for (i, a) in slice.iter().enumerate() {
        amps[first + 2 * i] = C64::new(a * inv, 0.0);
    }
    Ok(HeraldOutcome { n, probability, psi: SpinVector::from_amplitudes(spin, amps)? })
}

/// `P(n)` for `n = 0..=n_cutoff`.
pub fn photon_distribution(ground: &GroundState) -> Vec<f64> {
    (0..=ground.basis().n_cutoff())
        .map(|n| ground.photon_slice(n).iter().map(|a| a * a).sum())
        .collect()
}

/// `rho = Tr_photon |G><G|`.
pub fn reduced_spin_density(ground: &GroundState) -> SpinDensityMatrix {
    let spin = ground.params().spin();
    let d = spin.dim();
    let mut rho = DMatrix::<f64>::zeros(d, d);
    let basis = ground.basis();
    for n in 0..=basis.n_cutoff() {
        let first = basis.spin_parity(n) as usize;
        let slice = ground.photon_slice(n);
        for (i, a) in slice.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in slice.iter().enumerate() {
                rho[(first + 2 * i, first + 2 * j)] += a * b;
            }
        }
    }
    SpinDensityMatrix::new_unchecked(spin, rho.map(|x| C64::new(x, 0.0)))
}
