//! Heralded collective spin cat states from the ground state of the Dicke model.
//!
//! * [`spin`], [`clebsch`], [`wigner`]: collective-spin algebra, coherent and cat
//!   states, Clebsch–Gordan coefficients and the spin Wigner function.
//! * [`dicke`], [`lanczos`], [`ground`]: the parity-resolved Dicke Hamiltonian
//!   and its ground state by sparse Lanczos, with a dense oracle.
//! * [`herald`]: photon-number projection of the ground state.
//! * [`catfit`]: fidelity fits to ideal spin cat states.
//! * [`thermo`]: the Holstein–Primakoff (`N -> inf`) Gaussian ground state,
//!   its two-mode Fock expansion and bosonic cat fits.

pub mod catfit;
pub mod clebsch;
pub mod dicke;
pub mod error;
pub mod ground;
pub mod herald;
pub mod lanczos;
pub mod math;
pub mod spin;
pub mod thermo;
pub mod wigner;

pub use error::{Error, Result};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
