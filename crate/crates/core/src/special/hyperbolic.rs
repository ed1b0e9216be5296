use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::special::gamma::ln_gamma;

/// `ln cosh(s)`, finite for all finite `s`.
pub fn log_cosh(s: f64) -> f64 {
    let a = s.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// `ln sinh(s)` without range checks: `-inf` at zero, NaN below.
pub(crate) fn ln_sinh(s: f64) -> f64 {
    if s < 0.0 {
        return f64::NAN;
    }
    if s == 0.0 {
        return f64::NEG_INFINITY;
    }
    s + (-(-2.0 * s).exp_m1()).ln() - LN_2
}

/// `ln sinh(s)` for `s > 0`.
pub fn log_sinh(s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::domain("log_sinh", format!("s = {s} is not positive")));
    }
    Ok(ln_sinh(s))
}

/// `ln(cosh^a(s) sinh^b(s))`, with `sinh^0(0) = 1`.
pub(crate) fn ln_cosh_sinh(s: f64, a: f64, b: f64) -> f64 {
    let c = if a == 0.0 { 0.0 } else { a * log_cosh(s) };
    if b == 0.0 {
        c
    } else {
        c + b * ln_sinh(s)
    }
}

/// `arcosh(1 + x)` for `x >= 0`, accurate as `x -> 0`.
pub(crate) fn arcosh_1p(x: f64) -> f64 {
    if x > 1e8 {
        // (1+x) + sqrt((1+x)^2 - 1) overflows long before arcosh does
        return (1.0 + x).ln() + (1.0 + (1.0 - 1.0 / ((1.0 + x) * (1.0 + x))).sqrt()).ln();
    }
    (x + (x * (x + 2.0)).sqrt()).ln_1p()
}

/// `arcosh(y)` for `y >= 1`; factors `y^2 - 1 = (y-1)(y+1)` so that values
/// near one keep full precision.
pub fn arcosh_stable(y: f64) -> Result<f64> {
    if !(y >= 1.0) {
        return Err(Error::domain("arcosh_stable", format!("y = {y} is below 1")));
    }
    Ok(arcosh_1p(y - 1.0))
}

/// `arcosh(e^l)` for `l >= 0`, evaluated without forming `e^l`.
pub(crate) fn arcosh_exp(l: f64) -> f64 {
    if l <= 0.0 {
        return 0.0;
    }
    if l < 0.5 {
        arcosh_1p(l.exp_m1())
    } else {
        l + (1.0 + (-(-2.0 * l).exp_m1()).sqrt()).ln()
    }
}

/// `I(a, b) = int_0^inf cosh^a(s) sinh^b(s) ds` in closed form,
/// `(1/2) Gamma(-(a+b)/2) Gamma((b+1)/2) / Gamma((1-a)/2)`.
pub fn hyp_moment(a: f64, b: f64) -> Result<f64> {
    Ok(ln_hyp_moment(a, b)?.exp())
}

/// Logarithm of [`hyp_moment`].
pub fn ln_hyp_moment(a: f64, b: f64) -> Result<f64> {
    if !(-a > b && b > -1.0) {
        return Err(Error::domain(
            "hyp_moment",
            format!("requires -a > b > -1, got a = {a}, b = {b}"),
        ));
    }
    Ok(ln_gamma(-(a + b) / 2.0) + ln_gamma((b + 1.0) / 2.0) - ln_gamma((1.0 - a) / 2.0) - LN_2)
}
