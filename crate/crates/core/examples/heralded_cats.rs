//! Herald spin cats from a 200-atom Dicke ground state at the critical point and
//! compare with the infinite-N Gaussian limit.

use dicke_cat::catfit::fit_cat;
use dicke_cat::dicke::DickeParams;
use dicke_cat::ground::solve;
use dicke_cat::herald::herald;
use dicke_cat::lanczos::LanczosSettings;
use dicke_cat::spin::Parity;
use dicke_cat::thermo::{expand_photon_rows, fit_boson_cat, gaussian_ground, herald_boson};

fn main() -> dicke_cat::Result<()> {
    let atoms = 200;
    let gs = solve(DickeParams::resonant(atoms, 1.0, 50)?, Parity::Even, &LanczosSettings::default())?;
    let limit = gaussian_ground(1.0, 1.0 - 1e-12)?;
    let rows = expand_photon_rows(&limit, 6)?;
    println!("n      P(n)     l_opt  fidelity  |  P(n) N=inf  2*beta");
    for n in 1..=6 {
        let h = herald(&gs, n)?;
        let fit = fit_cat(&h.psi, Parity::of(n))?;
        let (boson, p) = herald_boson(&rows, n)?;
        let bfit = fit_boson_cat(&boson, Parity::of(n))?;
        println!(
            "{n}  {:.5}  {:8.4}  {:8.5}  |  {:.5}  {:8.4}",
            h.probability,
            fit.l_opt,
            fit.fidelity,
            p,
            2.0 * bfit.beta_opt
        );
    }
    Ok(())
}
