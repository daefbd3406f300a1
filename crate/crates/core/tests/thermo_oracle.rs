//! Thermodynamic-limit expansions checked against truncated-matrix operators.

use dicke_cat::spin::Parity;
use dicke_cat::thermo::*;
use nalgebra::{DMatrix, DVector};

fn lowering(dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |i, j| if j == i + 1 { (j as f64).sqrt() } else { 0.0 })
}

/// `exp(r/2 (b² - b†²))|0>` from a dense exponential on a large truncated space.
fn squeezed_vacuum(r: f64, dim: usize) -> DVector<f64> {
    let b = lowering(dim);
    let b2 = &b * &b;
    let gen = (&b2 - b2.transpose()) * (r / 2.0);
    gen.exp().column(0).into_owned()
}

/// `U_mix = exp(pi/4 (a†b - a b†))` applied block by block in total occupation.
fn mix(psi: &DMatrix<f64>, total_max: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(psi.nrows(), psi.ncols());
    for total in 0..=total_max {
        let d = total + 1;
        // basis |n, total - n>
        let mut g = DMatrix::<f64>::zeros(d, d);
        for n in 0..d {
            let l = total - n;
            if l > 0 {
                // a†b |n,l> = sqrt((n+1) l) |n+1, l-1>
                g[(n + 1, n)] += ((n + 1) as f64 * l as f64).sqrt();
            }
            if n > 0 {
                // a b† |n,l> = sqrt(n (l+1)) |n-1, l+1>
                g[(n - 1, n)] -= (n as f64 * (l + 1) as f64).sqrt();
            }
        }
        let u = (g * std::f64::consts::FRAC_PI_4).exp();
        let v = DVector::from_fn(d, |n, _| psi[(n, total - n)]);
        let w = u * v;
        for n in 0..d {
            out[(n, total - n)] = w[n];
        }
    }
    out
}

#[test]
fn fock_expansion_matches_dense_operators() {
    let gs = gaussian_ground(1.0, 0.5).unwrap();
    let cut = 60;
    let fock = expand_ground_fock(&gs, FockCutoffs { photon: cut, boson: cut }).unwrap();

    let total_max = 2 * cut;
    let sa = squeezed_vacuum(gs.r_a, total_max + 80);
    let sb = squeezed_vacuum(gs.r_b, total_max + 80);
    let product = DMatrix::from_fn(total_max + 1, total_max + 1, |n, l| {
        if n + l <= total_max { sa[n] * sb[l] } else { 0.0 }
    });
    let dense = mix(&product, total_max);

    let mut worst: f64 = 0.0;
    for n in 0..=cut {
        for l in 0..=cut {
            worst = worst.max((fock.coefficients[(n, l)] - dense[(n, l)]).abs());
        }
    }
    assert!(worst < 1e-9, "max deviation {worst:e}");
    // a'-mode entanglement sign: the a†b† term must carry tanh r_-, not -tanh r_-
    assert!(fock.coefficients[(1, 1)] * gs.tanh_minus > 0.0);
}

#[test]
fn heralded_states_have_fixed_parity() {
    let gs = gaussian_ground(1.0, 0.95).unwrap();
    let rows = expand_photon_rows(&gs, 7).unwrap();
    for n in 0..=7 {
        let (psi, _) = herald_boson(&rows, n).unwrap();
        assert_eq!(psi.off_parity_weight(Parity::of(n)), 0.0, "n={n}");
    }
}

#[test]
fn single_photon_herald_is_subtracted_squeezed_vacuum() {
    for &x in &[0.3, 0.9, 1.0 - 1e-6] {
        let gs = gaussian_ground(1.0, x).unwrap();
        let rows = expand_photon_rows(&gs, 1).unwrap();
        let (psi, _) = herald_boson(&rows, 1).unwrap();
        // b S(r)|0> is proportional to b† S(r)|0>
        let target = subtracted_squeezed(1, gs.r_plus, psi.cutoff()).unwrap();
        let o = psi.inner(&target);
        assert!(o * o >= 1.0 - 1e-10, "g/gc={x}: {}", o * o);
    }
}

#[test]
fn two_photon_herald_matches_combination() {
    let gs = gaussian_ground(1.0, 0.97).unwrap();
    let rows = expand_photon_rows(&gs, 2).unwrap();
    let (psi, _) = herald_boson(&rows, 2).unwrap();
    let dim = psi.cutoff() + 1;
    let b = lowering(dim + 2);
    let sq = subtracted_squeezed(0, gs.r_plus, dim + 1).unwrap();
    let s = DVector::from_column_slice(sq.amplitudes());
    let b2s = &b * &b * &s;
    let coeff = gs.tanh_minus.powi(2) / gs.tanh_plus;
    let combo: Vec<f64> = (0..dim).map(|l| coeff * b2s[l] - gs.tanh_a * gs.tanh_b * s[l]).collect();
    let target = BosonicState::new(combo).unwrap();
    let sign = psi.inner(&target).signum();
    let worst = psi
        .amplitudes()
        .iter()
        .zip(target.amplitudes())
        .map(|(a, b)| (a - sign * b).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-9, "{worst:e}");
}

#[test]
fn subtraction_relation_for_one_boson() {
    let r = 0.2;
    let cutoff = 60;
    let s = squeezed_vacuum(r, 200);
    let b = lowering(200);
    let bs = &b * &s;
    let direct = BosonicState::new(bs.iter().take(cutoff + 1).copied().collect()).unwrap();
    let series = subtracted_squeezed(1, r, cutoff).unwrap();
    // b S|0> = -tanh(r) b† S|0>, so the normalized states differ by a sign
    let o = direct.inner(&series);
    assert!((o.abs() - 1.0).abs() < 1e-12);
    assert!(o < 0.0);
}

#[test]
fn two_added_bosons_match_dense_operator() {
    let r = 0.3;
    let cutoff = 60;
    let s = squeezed_vacuum(r, 200);
    let bd = lowering(200).transpose();
    let v = &bd * &bd * &s;
    let direct = BosonicState::new(v.iter().take(cutoff + 1).copied().collect()).unwrap();
    let series = subtracted_squeezed(2, r, cutoff).unwrap();
    for (a, b) in direct.amplitudes().iter().zip(series.amplitudes()) {
        assert!((a - b).abs() < 1e-12);
    }
}

/// `P(n)` from the photon-number generating function of the reduced Gaussian
/// state of mode `a`: `sum_n P(n) z^n = 2 / sqrt(((1-z) vx + 1 + z)((1-z) vp + 1 + z))`
/// with `vx`, `vp` the quadrature variances in vacuum units.
fn generating_function_probs(g_over_gc: f64, n_max: usize) -> Vec<f64> {
    let (sm, sp) = ((1.0 - g_over_gc).sqrt(), (1.0 + g_over_gc).sqrt());
    let vx = 0.5 * (1.0 / sm + 1.0 / sp);
    let vp = 0.5 * (sm + sp);
    // (1 + v) + (1 - v) z, expanded as (1+v)^(-1/2) sum_k binom(-1/2, k) q^k z^k
    let series = |v: f64| {
        let q = (1.0 - v) / (1.0 + v);
        let mut out = vec![(1.0 + v).powf(-0.5)];
        for k in 1..=n_max {
            let prev = out[k - 1];
            out.push(prev * q * (-0.5 - (k as f64 - 1.0)) / k as f64);
        }
        out
    };
    let (x, p) = (series(vx), series(vp));
    (0..=n_max).map(|n| 2.0 * (0..=n).map(|k| x[k] * p[n - k]).sum::<f64>()).collect()
}

#[test]
fn photon_probabilities_match_generating_function() {
    for &x in &[0.0, 0.5, 0.9, 1.0 - 1e-4, 1.0 - 1e-9] {
        let gs = gaussian_ground(1.0, x).unwrap();
        let rows = expand_photon_rows(&gs, 6).unwrap();
        let oracle = generating_function_probs(x, 6);
        for n in 0..=6 {
            let p = rows.row_weight(n);
            // the boson truncation drops up to FOCK_TAIL_TOL of relative weight
            assert!((p - oracle[n]).abs() <= 1e-9 * oracle[n].abs(), "x={x} n={n}: {p} vs {}", oracle[n]);
        }
    }
}

fn log_window(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()).collect()
}

#[test]
fn critical_scaling_matches_oracle_regression() {
    let window = log_window(1e-6, 1e-4, 9);
    for n in 1..=6 {
        let probs: Vec<f64> = window.iter().map(|d| generating_function_probs(1.0 - d, n)[n]).collect();
        let oracle = power_law_exponent(&window, &probs).unwrap();
        let s = critical_scaling(n, 1.0, &window).unwrap();
        assert!((s - oracle).abs() < 1e-8, "n={n}: {s} vs {oracle}");
    }
}

#[test]
fn critical_scaling_tends_to_quarter() {
    for n in 1..=6 {
        let mut prev = f64::NEG_INFINITY;
        for lo in [-6.0, -8.0, -10.0] {
            let s = critical_scaling(n, 1.0, &log_window(10f64.powf(lo), 10f64.powf(lo + 2.0), 9)).unwrap();
            assert!(s > prev && s < 0.25, "n={n} window 1e{lo}: {s}");
            prev = s;
        }
        assert!((prev - 0.25).abs() < 0.005, "n={n}: {prev}");
    }
    let s1 = critical_scaling(1, 1.0, &log_window(1e-6, 1e-4, 9)).unwrap();
    assert!((s1 - 0.25).abs() < 0.02);
}

#[test]
fn thermo_fidelities_near_critical() {
    for (d, floor) in [(1e-1, 0.987), (1e-3, 0.987), (1e-5, 0.987), (1e-12, 0.9865)] {
        let gs = gaussian_ground(1.0, 1.0 - d).unwrap();
        let rows = expand_photon_rows(&gs, 6).unwrap();
        let mut last = 0.0;
        for n in 1..=6 {
            let (psi, _) = herald_boson(&rows, n).unwrap();
            let fit = fit_boson_cat(&psi, Parity::of(n)).unwrap();
            assert!(fit.fidelity >= floor, "d={d} n={n}: {}", fit.fidelity);
            assert!(fit.beta_opt > last);
            last = fit.beta_opt;
        }
    }
}
