use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::special::{integrate, ln_cosh_sinh, ln_omega, QuadSpec};

/// Cumulative intensity `Lambda(s) = omega_{d-k} int_0^s cosh^k sinh^{d-k-1}`
/// of the radial process, cached on a uniform grid of cells on `[0, bound]`.
#[derive(Debug, Clone)]
pub struct RadialIntensity {
    params: ModelParams,
    bound: f64,
    step: f64,
    cum: Vec<f64>,
}

const CELLS: usize = 2048;

/// 21-point Kronrod rule on a single cell; the integrand is smooth there.
fn cell_integral(p: &ModelParams, a: f64, b: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    integrate(
        |s| rate(p, s),
        a,
        b,
        &QuadSpec {
            abs_tol: 1e-300,
            rel_tol: 1e-14,
            max_subdivisions: 64,
        },
    )
    .map(|o| o.value)
    .unwrap_or_else(|e| match e {
        Error::Convergence { estimate, .. } => estimate,
        _ => f64::NAN,
    })
}

/// Intensity `omega_{d-k} cosh^k(s) sinh^{d-k-1}(s)`.
pub fn rate(p: &ModelParams, s: f64) -> f64 {
    (ln_omega(p.codim()) + ln_cosh_sinh(s, p.k as f64, (p.d - p.k - 1) as f64)).exp()
}

impl RadialIntensity {
    pub fn new(bound: f64, p: &ModelParams) -> Result<Self> {
        if !(bound >= 0.0) || !bound.is_finite() {
            return Err(Error::domain("RadialIntensity", format!("bound = {bound} is invalid")));
        }
        let step = bound / CELLS as f64;
        let mut cum = Vec::with_capacity(CELLS + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for i in 0..CELLS {
            if step > 0.0 {
                acc += cell_integral(p, i as f64 * step, (i + 1) as f64 * step);
            }
            cum.push(acc);
        }
        Ok(RadialIntensity {
            params: *p,
            bound,
            step,
            cum,
        })
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// `Lambda(bound)`.
    pub fn total(&self) -> f64 {
        self.cum[CELLS]
    }

    /// `Lambda(s)` for `0 <= s <= bound`.
    pub fn at(&self, s: f64) -> f64 {
        if s <= 0.0 || self.step == 0.0 {
            return 0.0;
        }
        if s >= self.bound {
            return self.total();
        }
        let i = ((s / self.step) as usize).min(CELLS - 1);
        let a = i as f64 * self.step;
        self.cum[i] + cell_integral(&self.params, a, s)
    }

    /// Solves `Lambda(s) = target` by safeguarded Newton iteration, to
    /// `1e-12` relative accuracy in `s`.
    pub fn inverse(&self, target: f64) -> f64 {
        if target <= 0.0 || self.step == 0.0 {
            return 0.0;
        }
        if target >= self.total() {
            return self.bound;
        }
        let i = self.cum.partition_point(|&c| c <= target).clamp(1, CELLS) - 1;
        let (mut lo, mut hi) = (i as f64 * self.step, (i + 1) as f64 * self.step);
        let (a, base) = (lo, self.cum[i]);
        let mut s = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = base + cell_integral(&self.params, a, s) - target;
            if f > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let d = rate(&self.params, s);
            let mut next = s - f / d;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - s).abs() <= 1e-13 * s.max(1e-300) || hi - lo <= 1e-13 * hi {
                return next;
            }
            s = next;
        }
        s
    }
}

/// `Lambda(s)` by adaptive quadrature.
pub fn cumulative_intensity(s: f64, p: &ModelParams) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::domain("cumulative_intensity", format!("s = {s} is negative")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    Ok(integrate(|u| rate(p, u), 0.0, s, &QuadSpec::default())?.value)
}

/// Inverse of [`cumulative_intensity`]: the `s` with `Lambda(s) = target`,
/// by bisection to `1e-12`.
pub fn inverse_cumulative_intensity(target: f64, p: &ModelParams) -> Result<f64> {
    if !(target >= 0.0) {
        return Err(Error::domain("inverse_cumulative_intensity", "target must be nonnegative"));
    }
    let mut hi = 1.0;
    while cumulative_intensity(hi, p)? < target {
        hi *= 2.0;
        if hi > 1e4 {
            return Err(Error::domain("inverse_cumulative_intensity", "target too large"));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if cumulative_intensity(mid, p)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
