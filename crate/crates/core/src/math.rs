//! Small numerical helpers shared across modules.

/// Table of `ln(k!)` for `k = 0..=max`, built by direct summation of logarithms.
#[derive(Debug, Clone)]
pub struct LogFactorials {
    table: Vec<f64>,
}

impl LogFactorials {
    pub fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for k in 1..=max {
            acc += (k as f64).ln();
            table.push(acc);
        }
        Self { table }
    }

    #[inline]
    pub fn ln_fact(&self, k: usize) -> f64 {
        self.table[k]
    }

    /// `ln C(n, k)`.
    #[inline]
    pub fn ln_binomial(&self, n: usize, k: usize) -> f64 {
        debug_assert!(k <= n);
        self.table[n] - self.table[k] - self.table[n - k]
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Golden-section search for the maximum of a unimodal function on `[lo, hi]`.
/// Returns `(argmax, max)` once the bracket is narrower than `tol`.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Grid-then-golden-section maximization of `f` on `(0, upper]`.
///
/// The coarse grid has `points` equally spaced abscissae `upper * i / points`,
/// `i = 1..=points`. The best grid point is refined inside the bracket formed by
/// its neighbours; the refined value is only accepted if it does not fall below
/// the best grid value.
pub(crate) fn maximize_on_grid<F: FnMut(f64) -> f64>(
    mut f: F,
    upper: f64,
    points: usize,
    tol: f64,
) -> GridMax {
    let step = upper / points as f64;
    let mut best_i = 1;
    let mut best_f = f64::NEG_INFINITY;
    for i in 1..=points {
        let v = f(step * i as f64);
        if v > best_f {
            best_f = v;
            best_i = i;
        }
    }
    let grid_best = best_f;
    let lo = step * (best_i as f64 - 1.0);
    let hi = (step * (best_i as f64 + 1.0)).min(upper);
    // Keep the bracket strictly inside the domain; f may be undefined at 0.
    let lo = if best_i == 1 { step * 1e-6 } else { lo };
    let (x, v) = golden_section_max(&mut f, lo, hi, tol);
    let (x, v) = if v >= best_f { (x, v) } else { (step * best_i as f64, best_f) };
    GridMax { argmax: x, max: v, grid_max: grid_best }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct GridMax {
    pub argmax: f64,
    pub max: f64,
    pub grid_max: f64,
}
