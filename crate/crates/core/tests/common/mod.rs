#![allow(dead_code)]
//! Oracles shared by the integration tests. They deliberately avoid the
//! library's quadrature and log-space helpers.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
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
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite 20-point Gauss–Legendre on `[a, b]` with `panels` panels.
pub fn gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let c = a + h * (p as f64 + 0.5);
        for &(x, w) in &rule {
            acc += w * f(c + 0.5 * h * x);
        }
    }
    0.5 * h * acc
}

/// Gamma function by Euler's reflection-free product with upward shift
/// and Stirling series.
pub fn gamma(x: f64) -> f64 {
    let mut shift = 1.0;
    let mut y = x;
    while y < 20.0 {
        shift *= y;
        y += 1.0;
    }
    let ln = (y - 0.5) * y.ln() - y + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * y) - 1.0 / (360.0 * y.powi(3))
        + 1.0 / (1260.0 * y.powi(5))
        - 1.0 / (1680.0 * y.powi(7));
    ln.exp() / shift
}

pub fn omega(j: u32) -> f64 {
    2.0 * PI.powf(j as f64 / 2.0) / gamma(j as f64 / 2.0)
}

/// `int_0^inf cosh^a sinh^b` by brute force on `[0, 60]`.
pub fn cosh_sinh_integral(a: f64, b: f64) -> f64 {
    gl(|s: f64| s.cosh().powf(a) * s.sinh().powf(b), 0.0, 60.0, 600)
}

/// Catalan's constant from its series `sum (-1)^n / (2n+1)^2`, with
/// pairwise-averaged partial sums.
pub fn catalan() -> f64 {
    // alternating series summed smallest-first, then averaged with the previous partial sum
    let n = 2_000_000u64;
    let term = |i: u64| {
        let t = 1.0 / ((2 * i + 1) as f64).powi(2);
        if i % 2 == 0 { t } else { -t }
    };
    let s: f64 = (0..n).rev().map(term).sum();
    s - 0.5 * term(n - 1)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Prints the one-line verdict for an acceptance criterion and returns it.
pub fn verdict(n: u32, ok: bool, detail: &str) -> bool {
    println!("criterion {n}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    ok
}

pub const LIMIT_GRID: [(u32, u32); 5] = [(4, 3), (5, 4), (6, 5), (7, 5), (9, 7)];
