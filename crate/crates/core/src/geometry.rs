//! Radial kernels of the first chaos, slice volumes, the constants
//! `C(d,k,m)` and the finite-radius variance integrals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::special::{
    arcosh_exp, integrate, ln_cosh_sinh, ln_gamma, ln_omega, ln_sinh, log_cosh, omega, CompositeRule,
    QuadSpec,
};

/// A kernel value together with the point it was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelEval {
    pub s: f64,
    pub r: f64,
    pub value: f64,
}

impl KernelEval {
    /// Evaluates `g_r(s)` through the slice volume.
    pub fn g_r(s: f64, r: f64, k: u32) -> Result<Self> {
        check_k(k, 2, "KernelEval::g_r")?;
        Ok(KernelEval {
            s,
            r,
            value: g_r(s, r, k),
        })
    }
}

fn check_k(k: u32, min: u32, func: &'static str) -> Result<()> {
    if k < min {
        return Err(Error::domain(func, format!("requires k >= {min}, got {k}")));
    }
    Ok(())
}

/// `e^{-n a} int_0^a sinh^n(u) du`.
///
/// For `a >= 1` the reduction formula
/// `S_n = sinh^{n-1}(a) cosh(a)/n - (n-1)/n S_{n-2}` is run on the scaled
/// quantities; below that the cancellation between the two terms is severe
/// and a fixed Kronrod rule on `[0, a]` is used instead.
pub fn sinh_power_integral_scaled(n: u32, a: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    if a < 1.0 {
        let rule = CompositeRule::uniform(0.0, a, 1 + n as usize / 24);
        let nf = n as f64;
        return rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&u, &w)| w * if n == 0 { 1.0 } else { (nf * (ln_sinh(u) - a)).exp() })
            .sum();
    }
    let q = (-2.0 * a).exp();
    let sh = 0.5 * (1.0 - q);
    let ch = 0.5 * (1.0 + q);
    let mut e = if n % 2 == 0 { a } else { 0.5 * (1.0 - (-a).exp()).powi(2) };
    let mut j = if n % 2 == 0 { 2 } else { 3 };
    while j <= n {
        let jf = j as f64;
        e = sh.powi(j as i32 - 1) * ch / jf - (jf - 1.0) / jf * e * q;
        j += 2;
    }
    e
}

/// `ln int_0^a sinh^n(u) du`.
pub fn ln_sinh_power_integral(n: u32, a: f64) -> f64 {
    sinh_power_integral_scaled(n, a).ln() + n as f64 * a
}

/// `ln omega_k + ln int_0^a sinh^{k-1}` with `a = arcosh(cosh r / cosh s)`;
/// `-inf` once `s >= r`.
pub(crate) fn ln_slice_volume(s: f64, r: f64, k: u32) -> f64 {
    if s >= r {
        return f64::NEG_INFINITY;
    }
    let a = arcosh_exp(log_cosh(r) - log_cosh(s));
    ln_omega(k) + ln_sinh_power_integral(k - 1, a)
}

/// k-volume of the intersection of a k-flat at distance `s` from the
/// origin with the ball of radius `r`.
pub fn slice_volume(s: f64, r: f64, k: u32) -> f64 {
    assert!(k >= 1, "slice_volume needs k >= 1");
    ln_slice_volume(s, r, k).exp()
}

/// `omega_k / ((k-1) 2^{k-1})`.
pub fn g_prefactor(k: u32) -> f64 {
    assert!(k >= 2, "g needs k >= 2");
    (ln_omega(k) - ((k - 1) as f64).ln() - (k - 1) as f64 * std::f64::consts::LN_2).exp()
}

/// Limiting kernel `g(s) = omega_k/((k-1)2^{k-1}) cosh^{-(k-1)}(s)`.
pub fn g(s: f64, k: u32) -> f64 {
    g_prefactor(k) * (-((k - 1) as f64) * log_cosh(s)).exp()
}

/// `g_r(s) = e^{-(k-1)r} slice_volume(s, r)`, never forming `e^{(k-1)r}`.
pub fn g_r(s: f64, r: f64, k: u32) -> f64 {
    (ln_slice_volume(s, r, k) - (k - 1) as f64 * r).exp()
}

/// `g_r(s)` by adaptive quadrature of `sinh^{k-1}` up to
/// `arcosh(cosh r / cosh s)`.
pub fn g_r_arcosh(s: f64, r: f64, k: u32) -> Result<f64> {
    g_r_arcosh_with(s, r, k, &QuadSpec::default())
}

pub fn g_r_arcosh_with(s: f64, r: f64, k: u32, spec: &QuadSpec) -> Result<f64> {
    check_k(k, 2, "g_r_arcosh")?;
    if s >= r {
        return Ok(0.0);
    }
    let a = arcosh_exp(log_cosh(r) - log_cosh(s));
    let km1 = (k - 1) as f64;
    let v = integrate(|u: f64| (km1 * (ln_sinh(u) - r)).exp(), 0.0, a, spec)?.value;
    Ok(omega(k)? * v)
}

/// `g_r(s)` through the representation
/// `omega_k e^{-(k-1)r} cosh^{-(k-1)}(s) int_s^r (sinh^2 u - sinh^2 s)^{(k-2)/2} sinh u du`.
pub fn g_r_closed(s: f64, r: f64, k: u32) -> Result<f64> {
    g_r_closed_with(s, r, k, &QuadSpec::default())
}

pub fn g_r_closed_with(s: f64, r: f64, k: u32, spec: &QuadSpec) -> Result<f64> {
    check_k(k, 2, "g_r_closed")?;
    if s >= r {
        return Ok(0.0);
    }
    let km1 = (k - 1) as f64;
    let lead = -km1 * (r + log_cosh(s));
    if k == 2 {
        // cosh r - cosh s = 2 sinh((r+s)/2) sinh((r-s)/2)
        let diff = std::f64::consts::LN_2 + ln_sinh(0.5 * (r + s)) + ln_sinh(0.5 * (r - s));
        return Ok(omega(k)? * (lead + diff).exp());
    }
    // sinh^2 u - sinh^2 s = sinh(u-s) sinh(u+s); substituting u = s + v^2
    // smooths the vanishing factor at the lower end.
    let half = 0.5 * (k as f64 - 2.0);
    let v = integrate(
        |v: f64| {
            let w = v * v;
            let l = half * (ln_sinh(w) + ln_sinh(2.0 * s + w)) + ln_sinh(s + w) + lead;
            2.0 * v * l.exp()
        },
        0.0,
        (r - s).sqrt(),
        spec,
    )?
    .value;
    Ok(omega(k)? * v)
}

/// Right-hand side of the bound on `g(s) - g_r(s)`:
/// `omega_k/(k-1) e^{-(k-1)r} + 1{s<=r} omega_k (k-1) e^{-(k-1)r-(k-3)s} int_s^r e^{(k-3)u} du`.
pub fn g_gap_bound(s: f64, r: f64, k: u32) -> f64 {
    assert!(k >= 3, "the gap bound is stated for k >= 3");
    let wk = ln_omega(k).exp();
    let km1 = (k - 1) as f64;
    let mut b = wk / km1 * (-km1 * r).exp();
    if s <= r {
        let c = k as f64 - 3.0;
        let inner = if c == 0.0 {
            r - s
        } else {
            // e^{-c s} int_s^r e^{c u} du
            ((c * (r - s)).exp() - 1.0) / c
        };
        b += wk * km1 * (-km1 * r).exp() * inner;
    }
    b
}

/// Constant of the tail bound
/// `int_{s0}^inf (g_r^2 + g^2) dmu <= 2 omega_k^2/((k-1)^2 (2k-d-1)) e^{-(2k-d-1) s0}`.
pub fn tail_bound(s0: f64, p: &ModelParams) -> Result<f64> {
    p.require_supercritical()?;
    let (d, k) = (p.d as f64, p.k as f64);
    let wk = omega(p.k)?;
    let e = 2.0 * k - d - 1.0;
    Ok(2.0 * wk * wk / ((k - 1.0) * (k - 1.0) * e) * (-e * s0).exp())
}

/// `C(d,k,m) = 1/(m-1)! (omega_{d+1}/omega_{k+1})^{m-1} omega_{d-m(d-k)+1}/omega_{k+1}`.
pub fn c_const(p: &ModelParams) -> Result<f64> {
    let p = ModelParams::with_order(p.d, p.k, p.m)?;
    let m = p.order();
    let (d, k) = (p.d, p.k);
    let mf = m as f64;
    let l = -ln_gamma(mf) + (mf - 1.0) * (ln_omega(d + 1) - ln_omega(k + 1))
        + ln_omega(d - m * (d - k) + 1)
        - ln_omega(k + 1);
    Ok(l.exp())
}

/// Integrates `exp(ln_f(s) + ln_mu(s) - ln_scale)` over `[0, r]` with the
/// radial intensity folded in, returning `omega_{d-k} * integral`.
fn radial_integral<F: Fn(f64) -> f64>(
    r: f64,
    p: &ModelParams,
    ln_scale: f64,
    spec: &QuadSpec,
    ln_f: F,
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain("radial_integral", format!("r = {r} is not positive")));
    }
    let (k, b) = (p.k as f64, (p.d - p.k - 1) as f64);
    let lw = ln_omega(p.codim()) - ln_scale;
    let v = integrate(
        |s: f64| {
            let l = ln_f(s);
            if l == f64::NEG_INFINITY {
                0.0
            } else {
                (l + ln_cosh_sinh(s, k, b) + lw).exp()
            }
        },
        0.0,
        r,
        spec,
    )?;
    Ok(v.value)
}

/// `A11(r) = omega_{d-k} int_0^r slice_volume(s, r)^2 cosh^k sinh^{d-k-1} ds`,
/// the variance of the first chaos component `F1_r`.
pub fn a11(r: f64, p: &ModelParams) -> Result<f64> {
    a11_scaled(r, p, 0.0)
}

/// `e^{-ln_scale} A11(r)`, evaluated without overflow.
pub fn a11_scaled(r: f64, p: &ModelParams, ln_scale: f64) -> Result<f64> {
    a11_scaled_with(r, p, ln_scale, &QuadSpec::default())
}

pub fn a11_scaled_with(r: f64, p: &ModelParams, ln_scale: f64, spec: &QuadSpec) -> Result<f64> {
    radial_integral(r, p, ln_scale, spec, |s| 2.0 * ln_slice_volume(s, r, p.k))
}

/// `omega_1 omega_d omega_{d+1} / (4 omega_{k+1}^2)`.
pub fn a22_constant(p: &ModelParams) -> Result<f64> {
    require_half(p)?;
    Ok((ln_omega(1) + ln_omega(p.d) + ln_omega(p.d + 1) - 4f64.ln() - 2.0 * ln_omega(p.k + 1)).exp())
}

fn require_half(p: &ModelParams) -> Result<()> {
    if p.d != 2 * p.k {
        return Err(Error::Admissibility {
            d: p.d,
            k: p.k,
            m: p.order(),
            condition: "d = 2k",
        });
    }
    Ok(())
}

/// `A22(r) = c2 int_0^r sinh^{d-1}(s) ds` for `d = 2k`.
pub fn a22(r: f64, p: &ModelParams) -> Result<f64> {
    a22_scaled(r, p, 0.0)
}

/// `e^{-ln_scale} A22(r)`.
pub fn a22_scaled(r: f64, p: &ModelParams, ln_scale: f64) -> Result<f64> {
    let c = a22_constant(p)?;
    if !(r > 0.0) {
        return Err(Error::domain("a22", format!("r = {r} is not positive")));
    }
    let n = p.d - 1;
    Ok(c * (sinh_power_integral_scaled(n, r).ln() + n as f64 * r - ln_scale).exp())
}

/// Mean of `F1_r`: `omega_{d-k} int_0^r slice_volume(s, r) cosh^k sinh^{d-k-1} ds`.
pub fn mean_f1(r: f64, p: &ModelParams) -> Result<f64> {
    mean_f1_scaled(r, p, 0.0)
}

pub fn mean_f1_scaled(r: f64, p: &ModelParams, ln_scale: f64) -> Result<f64> {
    radial_integral(r, p, ln_scale, &QuadSpec::default(), |s| {
        ln_slice_volume(s, r, p.k)
    })
}
