//! Adaptive composite Gauss-Legendre quadrature.
//!
//! A fixed-order panel is compared against its bisection into two panels;
//! intervals are split until the two estimates agree within the requested
//! absolute tolerance. Intended for smooth integrands on compact supports.
//! Features much narrower than the interval must sit on a panel boundary
//! (callers split at known peaks and kinks), or bisection can agree on a
//! wrong value before any node has seen them.

use std::sync::OnceLock;

const GL_ORDER: usize = 20;
const MAX_DEPTH: u32 = 40;

/// Gauss-Legendre nodes and weights on [-1, 1], computed once by Newton
/// iteration on the Legendre polynomial.
fn nodes_and_weights() -> &'static (Vec<f64>, Vec<f64>) {
    static TABLE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = GL_ORDER;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

/// Legendre polynomial P_n and its derivative at `x`, by the three-term
/// recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Single Gauss-Legendre panel over [lo, hi].
pub fn gauss_legendre_panel<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> f64 {
    let (nodes, weights) = nodes_and_weights();
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut acc = 0.0;
    for (&x, &w) in nodes.iter().zip(weights.iter()) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Integrate `f` over [lo, hi] to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> f64 {
    if lo >= hi {
        return 0.0;
    }
    let whole = gauss_legendre_panel(f, lo, hi);
    refine(f, lo, hi, whole, tol, 0)
}

fn refine<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let mid = 0.5 * (lo + hi);
    let left = gauss_legendre_panel(f, lo, mid);
    let right = gauss_legendre_panel(f, mid, hi);
    let split = left + right;
    if (split - whole).abs() <= tol || depth >= MAX_DEPTH {
        return split;
    }
    refine(f, lo, mid, left, 0.5 * tol, depth + 1) + refine(f, mid, hi, right, 0.5 * tol, depth + 1)
}
