use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::special::{
    hyp_moment, integrate, ln_cosh_sinh, ln_gamma, ln_hyp_moment, ln_omega, log_cosh, omega,
    quad_semi_infinite_complex, QuadSpec,
};

use std::f64::consts::PI;

/// `h(s) = cosh^{-(k-1)}(s)`, the jump size contributed by a flat at distance `s`.
pub fn h(s: f64, k: u32) -> f64 {
    (-((k as f64) - 1.0) * log_cosh(s)).exp()
}

/// `cosh^k(s) sinh^{d-k-1}(s)`; the factor `omega_{d-k}` is left to callers.
pub fn mu_density(s: f64, p: &ModelParams) -> f64 {
    ln_cosh_sinh(s, p.k as f64, (p.d - p.k - 1) as f64).exp()
}

/// `sigma^2 = omega_{d-k} I(2-k, d-k-1)`, the variance of `Z`.
pub fn sigma2(p: &ModelParams) -> Result<f64> {
    p.require_supercritical()?;
    Ok(omega(p.codim())? * hyp_moment(2.0 - p.k as f64, (p.d - p.k - 1) as f64)?)
}

/// `n`-th cumulant of the unstandardised `Z`: `omega_{d-k} int h^n dmu`.
pub fn cumulant_raw(n: u32, p: &ModelParams) -> Result<f64> {
    p.require_supercritical()?;
    check_order(n)?;
    let (d, k) = (p.d as f64, p.k as f64);
    let a = k - n as f64 * (k - 1.0);
    Ok((ln_omega(p.codim()) + ln_hyp_moment(a, d - k - 1.0)?).exp())
}

fn check_order(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::domain("cumulant", format!("order n = {n} is below 2")));
    }
    Ok(())
}

fn ln_cumulant_std(n: u32, d: f64, k: f64) -> f64 {
    let nf = n as f64;
    (1.0 - nf / 2.0) * (d - k) / 2.0 * PI.ln()
        + nf / 2.0 * (ln_gamma((k - 1.0) / 2.0) - ln_gamma((2.0 * k - d - 1.0) / 2.0))
        + ln_gamma((nf * (k - 1.0) + 1.0 - d) / 2.0)
        - ln_gamma((nf * (k - 1.0) + 1.0 - k) / 2.0)
}

/// `n`-th cumulant of the standardised `Z* = Z / sigma` in closed Gamma form.
pub fn cumulant_std(n: u32, p: &ModelParams) -> Result<f64> {
    p.require_supercritical()?;
    check_order(n)?;
    if n == 2 {
        return Ok(1.0);
    }
    Ok(ln_cumulant_std(n, p.d as f64, p.k as f64).exp())
}

/// `(i t)^n / n! * cum_n` as a complex number, from its logarithmic magnitude.
fn series_term(t: f64, n: u32, ln_cum: f64) -> Complex64 {
    let mag = (n as f64 * t.abs().ln() - ln_gamma(n as f64 + 1.0) + ln_cum).exp();
    let sign = if t < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    let v = sign * mag;
    match n % 4 {
        0 => Complex64::new(v, 0.0),
        1 => Complex64::new(0.0, v),
        2 => Complex64::new(-v, 0.0),
        _ => Complex64::new(0.0, -v),
    }
}

/// Partial sum `sum_{n=2}^{N} (it)^n/n! cum_n(Z*)` of the exponent of the
/// characteristic function of `Z*`.
pub fn cf_exponent_series(t: f64, p: &ModelParams, order: u32) -> Result<Complex64> {
    p.require_supercritical()?;
    check_order(order)?;
    let mut acc = Complex64::new(0.0, 0.0);
    if t == 0.0 {
        return Ok(acc);
    }
    let (d, k) = (p.d as f64, p.k as f64);
    for n in 2..=order {
        let lc = if n == 2 { 0.0 } else { ln_cumulant_std(n, d, k) };
        acc += series_term(t, n, lc);
    }
    Ok(acc)
}

/// Like [`cf_exponent_series`] but sums until three consecutive terms fall
/// below `1e-16` in magnitude (or `max_order` is reached). Returns the sum and
/// the last order used.
pub fn cf_exponent_series_adaptive(t: f64, p: &ModelParams, max_order: u32) -> Result<(Complex64, u32)> {
    p.require_supercritical()?;
    check_order(max_order)?;
    let mut acc = Complex64::new(0.0, 0.0);
    if t == 0.0 {
        return Ok((acc, 2));
    }
    let (d, k) = (p.d as f64, p.k as f64);
    let mut small = 0;
    for n in 2..=max_order {
        let lc = if n == 2 { 0.0 } else { ln_cumulant_std(n, d, k) };
        let term = series_term(t, n, lc);
        acc += term;
        if term.norm() < 1e-16 {
            small += 1;
            if small == 3 {
                return Ok((acc, n));
            }
        } else {
            small = 0;
        }
    }
    Ok((acc, max_order))
}

/// `q(x) = e^{ix} - 1 - ix`.
pub fn q(x: f64) -> Complex64 {
    qn(x) * (x * x)
}

/// `q(x) / x^2`, equal to `-1/2` at the origin.
pub(crate) fn qn(x: f64) -> Complex64 {
    let ax = x.abs();
    if ax < 1.0 {
        // sum_{n>=2} i^n x^{n-2} / n!
        let (mut re, mut im) = (0.0, 0.0);
        let mut term = 0.5;
        let mut n = 2u32;
        while n < 40 {
            match n % 4 {
                0 => re += term,
                1 => im += term,
                2 => re -= term,
                _ => im -= term,
            }
            n += 1;
            term *= x / n as f64;
            if term.abs() < 1e-18 * 0.5 {
                break;
            }
        }
        Complex64::new(re, im)
    } else {
        let sh = (0.5 * x).sin();
        Complex64::new(-2.0 * sh * sh, x.sin() - x) / (x * x)
    }
}

/// `omega_{d-k} int_0^inf q(c h(s)) mu(ds)` for a multiplier `c`.
fn exponent_quadrature(c: f64, p: &ModelParams, spec: &QuadSpec) -> Result<Complex64> {
    if c == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (k, b) = (p.k as f64, (p.d - p.k - 1) as f64);
    let lw = ln_omega(p.codim()) + 2.0 * c.abs().ln();
    quad_semi_infinite_complex(
        |s: f64| {
            let lh = -(k - 1.0) * log_cosh(s);
            let y = c * lh.exp();
            // q(y) mu = qn(y) * c^2 h^2 mu
            qn(y) * (lw + 2.0 * lh + ln_cosh_sinh(s, k, b)).exp()
        },
        0.0,
        spec,
    )
}

/// Exponent of the characteristic function of `Z*` by direct quadrature:
/// `omega_{d-k} int q(t h(s)/sigma) mu(ds)`.
pub fn cf_exponent_quadrature(t: f64, p: &ModelParams) -> Result<Complex64> {
    cf_exponent_quadrature_with(t, p, &QuadSpec::default())
}

pub fn cf_exponent_quadrature_with(t: f64, p: &ModelParams, spec: &QuadSpec) -> Result<Complex64> {
    let s = sigma2(p)?.sqrt();
    exponent_quadrature(t / s, p, spec)
}

/// Exponent of the characteristic function of the unstandardised `Z`.
pub fn cf_exponent_raw(t: f64, p: &ModelParams, spec: &QuadSpec) -> Result<Complex64> {
    p.require_supercritical()?;
    exponent_quadrature(t, p, spec)
}

/// Characteristic function of `Y = g(0)/h(0) * Z`, i.e. of
/// `exp(omega_{d-k} int q(t g(s)) mu(ds))`, by quadrature.
pub fn cf_y(t: f64, p: &ModelParams) -> Result<Complex64> {
    p.require_supercritical()?;
    let c = crate::geometry::g_prefactor(p.k);
    Ok(exponent_quadrature(t * c, p, &QuadSpec::default())?.exp())
}

/// `phi_r(t) = exp(omega_{d-k} int_0^r q(t g_r(s)) mu(ds))`, the
/// characteristic function of `Y_r`.
pub fn cf_yr(t: f64, r: f64, p: &ModelParams) -> Result<Complex64> {
    cf_yr_with(t, r, p, &QuadSpec::default())
}

pub fn cf_yr_with(t: f64, r: f64, p: &ModelParams, spec: &QuadSpec) -> Result<Complex64> {
    p.require_supercritical()?;
    if !(r > 0.0) {
        return Err(Error::domain("cf_yr", format!("r = {r} is not positive")));
    }
    if t == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let (k, b) = (p.k as f64, (p.d - p.k - 1) as f64);
    let lw = ln_omega(p.codim()) + 2.0 * t.abs().ln();
    let e = integrate(
        |s: f64| {
            let lg = crate::geometry::ln_slice_volume(s, r, p.k) - (k - 1.0) * r;
            if lg == f64::NEG_INFINITY {
                return Complex64::new(0.0, 0.0);
            }
            qn(t * lg.exp()) * (lw + 2.0 * lg + ln_cosh_sinh(s, k, b)).exp()
        },
        0.0,
        r,
        spec,
    )?
    .value;
    Ok(e.exp())
}
