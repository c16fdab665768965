//! Gauss–Legendre rule on `[0, 1]`, used for the Taylor coefficients of
//! `g(w) = (e^w - 1)/w = ∫₀¹ e^{wt} dt`.

use std::sync::OnceLock;

use num_complex::Complex64;

const NODES: usize = 64;
/// Largest `|w| * h` allowed on a single panel of width `h`.
const PANEL_REACH: f64 = 4.0;

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(NODES))
}

/// Nodes and weights on `[0, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((1.0 - x) / 2.0, w / 2.0));
    }
    out
}

/// Moments `I_j(w) = ∫₀¹ t^j e^{wt} dt` for `j < len`.
pub fn exp_moments(w: Complex64, len: usize) -> Vec<Complex64> {
    let panels = 1 + (w.norm() / PANEL_REACH).floor() as usize;
    let h = 1.0 / panels as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for p in 0..panels {
        let a = p as f64 * h;
        for &(x, wt) in rule() {
            let t = a + h * x;
            let mut term = (w * t).exp() * (wt * h);
            for slot in out.iter_mut() {
                *slot += term;
                term *= t;
            }
        }
    }
    out
}
