//! Clebsch–Gordan coefficients in the Condon–Shortley convention.
//!
//! Quantum numbers are passed as `f64` half-integers and handled internally as
//! doubled integers. Coefficients are generated a whole `m1` column at a time:
//! for fixed `(j1, j2, J, M)` the vector `<j1 m1; j2 M-m1 | J M>` over `m1` is the
//! eigenvector of the tridiagonal matrix of `J^2` in the fixed-`M` subspace with
//! eigenvalue `J(J+1)`. It is obtained from the three-term recursion run inward
//! from both ends, matched at the first interior maximum, normalized to unit
//! length and signed so that the entry at the largest `m1` is positive. No
//! factorials appear, so the column is accurate for `2J` in the hundreds where
//! the alternating Racah sum cancels catastrophically.

use crate::error::{domain, Result};

/// Twice a half-integer quantum number.
pub(crate) fn doubled(x: f64, what: &str) -> Result<i64> {
    let t = 2.0 * x;
    let r = t.round();
    if !x.is_finite() || (t - r).abs() > 1e-9 {
        return Err(domain(format!("{what} = {x} is not a half-integer")));
    }
    Ok(r as i64)
}

/// `<j1 m1; j2 m2 | J M>`.
///
/// Ill-formed quantum numbers (`j < 0`, `|m| > j`, `j - m` not an integer) are a
/// domain error. Selection-rule violations (`M != m1 + m2`, triangle failure)
/// give `0`.
pub fn clebsch_gordan(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> Result<f64> {
    let (tj1, tm1) = (doubled(j1, "j1")?, doubled(m1, "m1")?);
    let (tj2, tm2) = (doubled(j2, "j2")?, doubled(m2, "m2")?);
    let (tj, tm) = (doubled(j, "J")?, doubled(m, "M")?);
    for (tj_, tm_, name) in [(tj1, tm1, "1"), (tj2, tm2, "2"), (tj, tm, "")] {
        if tj_ < 0 || tm_.abs() > tj_ || (tj_ - tm_) % 2 != 0 {
            return Err(domain(format!("invalid pair j{name} = {}, m{name} = {}", tj_ as f64 / 2.0, tm_ as f64 / 2.0)));
        }
    }
    if tm != tm1 + tm2 || !triangle(tj1, tj2, tj) {
        return Ok(0.0);
    }
    let column = cg_column(tj1, tj2, tj, tm);
    let lo = (-tj1).max(tm - tj2);
    Ok(column[((tm1 - lo) / 2) as usize])
}

pub(crate) fn triangle(tj1: i64, tj2: i64, tj: i64) -> bool {
    tj >= (tj1 - tj2).abs() && tj <= tj1 + tj2 && (tj1 + tj2 + tj) % 2 == 0
}

/// Column `<j1 m1; j2 M-m1 | J M>` for `m1` running upward over
/// `[max(-j1, M-j2), min(j1, M+j2)]`. Arguments are doubled quantum numbers and
/// must satisfy the triangle rule and `|M| <= J`.
pub(crate) fn cg_column(tj1: i64, tj2: i64, tj: i64, tm: i64) -> Vec<f64> {
    debug_assert!(triangle(tj1, tj2, tj) && tm.abs() <= tj);
    let lo = (-tj1).max(tm - tj2);
    let hi = tj1.min(tm + tj2);
    let n = ((hi - lo) / 2 + 1) as usize;
    if n == 1 {
        return vec![1.0];
    }
    let (j1, j2, jt, mt) = (tj1 as f64 / 2.0, tj2 as f64 / 2.0, tj as f64 / 2.0, tm as f64 / 2.0);
    let m1_at = |i: usize| (lo as f64) / 2.0 + i as f64;
    let diag = |i: usize| {
        let m1 = m1_at(i);
        j1 * (j1 + 1.0) + j2 * (j2 + 1.0) + 2.0 * m1 * (mt - m1) - jt * (jt + 1.0)
    };
    // <m1+1, m2-1| J^2 |m1, m2>
    let off = |i: usize| {
        let m1 = m1_at(i);
        let m2 = mt - m1;
        ((j1 - m1) * (j1 + m1 + 1.0) * (j2 + m2) * (j2 - m2 + 1.0)).sqrt()
    };

    let mut x = vec![0.0; n];
    x[0] = 1.0;
    x[1] = -diag(0) / off(0);
    let mut p = n - 1;
    for i in 1..n - 1 {
        if x[i].abs() < x[i - 1].abs() {
            p = i - 1;
            break;
        }
        x[i + 1] = -(diag(i) * x[i] + off(i - 1) * x[i - 1]) / off(i);
        if x[i + 1].abs() > 1e150 {
            let s = 1e-150;
            x[..=i + 1].iter_mut().for_each(|v| *v *= s);
        }
    }
    if p == n - 1 && x[n - 1].abs() < x[n - 2].abs() {
        p = n - 2;
    }

    if p < n - 1 {
        let mut y = vec![0.0; n];
        y[n - 1] = 1.0;
        y[n - 2] = -diag(n - 1) / off(n - 2);
        let mut i = n - 2;
        while i > p {
            y[i - 1] = -(diag(i) * y[i] + off(i) * y[i + 1]) / off(i - 1);
            if y[i - 1].abs() > 1e150 {
                y[i - 1..].iter_mut().for_each(|v| *v *= 1e-150);
            }
            i -= 1;
        }
        let scale = x[p] / y[p];
        for k in p + 1..n {
            x[k] = y[k] * scale;
        }
    }

    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let sign = if x[n - 1] < 0.0 { -1.0 } else { 1.0 };
    x.iter_mut().for_each(|v| *v *= sign / norm);
    x
}
