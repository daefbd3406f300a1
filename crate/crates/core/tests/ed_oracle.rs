//! Exact-diagonalization checks against dense constructions.

use dicke_cat::dicke::*;
use dicke_cat::ground::*;
use dicke_cat::herald::reduced_spin_density;
use dicke_cat::lanczos::LanczosSettings;
use dicke_cat::spin::{CollectiveSpin, Parity};
use dicke_cat::Error;
use nalgebra::DMatrix;

/// H on the full photon ⊗ spin space from Kronecker products, photon index major.
fn kronecker_hamiltonian(p: &DickeParams) -> DMatrix<f64> {
    let np = p.n_cutoff + 1;
    let spin = p.spin();
    let ns = spin.dim();
    let a = DMatrix::from_fn(np, np, |i, j| if j == i + 1 { (j as f64).sqrt() } else { 0.0 });
    let num = a.transpose() * &a;
    let x = &a + a.transpose();
    let jp = spin.j_plus().map(|c| c.re);
    let jx2 = &jp + jp.transpose();
    let jz_shift = DMatrix::from_fn(ns, ns, |i, j| if i == j { i as f64 } else { 0.0 });
    num.kronecker(&DMatrix::identity(ns, ns)) * p.omega_cav
        + DMatrix::identity(np, np).kronecker(&jz_shift) * p.omega_atom
        + x.kronecker(&jx2) * (p.g / (p.atoms as f64).sqrt())
}

#[test]
fn hamiltonian_matches_kronecker_construction() {
    let p = DickeParams { omega_cav: 1.0, omega_atom: 1.0, g: 0.3, atoms: 2, n_cutoff: 4 };
    let full = kronecker_hamiltonian(&p);
    for parity in [Parity::Even, Parity::Odd] {
        let h = build_hamiltonian(build_basis(p, parity).unwrap());
        let basis = h.basis();
        let ns = p.atoms + 1;
        for i in 0..basis.dim() {
            for j in 0..basis.dim() {
                let ((ni, ki), (nj, kj)) = (basis.state(i), basis.state(j));
                let expect = full[(ni * ns + ki, nj * ns + kj)];
                assert!((h.matrix().get(i, j) - expect).abs() < 1e-14);
            }
        }
        // nothing couples out of the sector
        for i in 0..basis.dim() {
            let (ni, ki) = basis.state(i);
            for (col, v) in full.row(ni * ns + ki).iter().enumerate() {
                if *v != 0.0 {
                    assert!(basis.index_of(col / ns, col % ns).is_some());
                }
            }
        }
    }
}

#[test]
fn rabi_limit_ground_energy() {
    let p = DickeParams { omega_cav: 1.0, omega_atom: 0.8, g: 0.6, atoms: 1, n_cutoff: 40 };
    let full = kronecker_hamiltonian(&p);
    let e_full = full.symmetric_eigenvalues().min();
    let e = solve(p, Parity::Even, &LanczosSettings::default()).unwrap().energy;
    assert!((e - e_full).abs() < 1e-9, "{e} vs {e_full}");
}

#[test]
fn lanczos_agrees_with_dense_for_small_systems() {
    let settings = LanczosSettings::default();
    for atoms in 1..=10 {
        for &x in &[0.0, 0.5, 1.0] {
            for cutoff in [8, 20] {
                let p = DickeParams::resonant(atoms, x, cutoff).unwrap();
                let a = solve(p, Parity::Even, &settings).unwrap();
                let b = dense_ground_state(p, Parity::Even, DEFAULT_DENSE_LIMIT).unwrap();
                let o = a.overlap_sqr(&b).unwrap();
                assert!(o >= 1.0 - 1e-10, "N={atoms} g={x} cutoff={cutoff}: {o}");
                assert!((a.energy - b.energy).abs() < 1e-10 * (1.0 + b.energy.abs()));
            }
        }
    }
}

#[test]
fn eight_atoms_at_critical_coupling() {
    let p = DickeParams::resonant(8, 1.0, 20).unwrap();
    let basis = build_basis(p, Parity::Even).unwrap();
    assert!(basis.dim() == 94 || basis.dim() == 95, "{}", basis.dim());
    let a = solve(p, Parity::Even, &LanczosSettings::default()).unwrap();
    let b = dense_ground_state(p, Parity::Even, DEFAULT_DENSE_LIMIT).unwrap();
    assert!(a.overlap_sqr(&b).unwrap() >= 1.0 - 1e-10);
}

#[test]
fn dense_limit_is_a_resource_error() {
    let p = DickeParams::resonant(30, 1.0, 50).unwrap();
    assert!(matches!(dense_ground_state(p, Parity::Even, 100), Err(Error::Resource(_))));
}

#[test]
fn spectrum_is_real_and_sorted() {
    let p = DickeParams::resonant(4, 0.7, 10).unwrap();
    let s = dense_spectrum(p, Parity::Even, DEFAULT_DENSE_LIMIT).unwrap();
    assert!(s.windows(2).all(|w| w[0] <= w[1]));
    let g = dense_ground_state(p, Parity::Even, DEFAULT_DENSE_LIMIT).unwrap();
    assert_eq!(s[0], g.energy);
}

#[test]
fn energy_does_not_increase_with_cutoff() {
    let settings = LanczosSettings { tol: 1e-12, ..Default::default() };
    let mut last = f64::INFINITY;
    for cutoff in [4, 8, 12, 16, 24, 32, 48] {
        let e = solve(DickeParams::resonant(20, 1.0, cutoff).unwrap(), Parity::Even, &settings).unwrap().energy;
        assert!(e <= last + 1e-11, "cutoff {cutoff}: {e} > {last}");
        last = e;
    }
}

#[test]
fn even_sector_holds_the_ground_state() {
    for &x in &[0.3, 0.9, 1.0] {
        let p = DickeParams::resonant(6, x, 20).unwrap();
        let even = dense_spectrum(p, Parity::Even, DEFAULT_DENSE_LIMIT).unwrap()[0];
        let odd = dense_spectrum(p, Parity::Odd, DEFAULT_DENSE_LIMIT).unwrap()[0];
        assert!(even < odd);
    }
}

#[test]
fn precursor_squeezing_at_critical_coupling() {
    let g = solve(DickeParams::resonant(30, 1.0, 50).unwrap(), Parity::Even, &LanczosSettings::default()).unwrap();
    let rho = reduced_spin_density(&g);
    let spin = CollectiveSpin::new(30).unwrap();
    let vx = rho.variance(&spin.jx());
    let vy = rho.variance(&spin.jy());
    assert!(vx > 30.0 / 4.0, "Var Jx = {vx}");
    assert!(vy < 30.0 / 4.0, "Var Jy = {vy}");
}

#[test]
fn two_hundred_atoms_energy_matches_dense() {
    let p = DickeParams::resonant(200, 1.0, 50).unwrap();
    let settings = LanczosSettings { tol: 1e-12, ..Default::default() };
    let e = solve(p, Parity::Even, &settings).unwrap().energy;
    let dense = dense_spectrum(p, Parity::Even, DEFAULT_DENSE_LIMIT).unwrap()[0];
    assert!((e - dense).abs() <= 1e-9 * dense.abs().max(1.0), "{e} vs {dense}");
}

#[test]
fn decoupled_probabilities_are_cutoff_independent() {
    let p = DickeParams::resonant(10, 0.0, 10).unwrap();
    let table = convergence_check(p, &[6, 10, 20], &LanczosSettings::default(), |g| {
        Ok(dicke_cat::herald::photon_distribution(g)[..6].to_vec())
    })
    .unwrap();
    for (_, d) in table.differences() {
        assert!(d.iter().all(|x| *x == 0.0));
    }
}
