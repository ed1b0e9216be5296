use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cf::{cumulant_std, qn};
use super::density::DensityTable;
use crate::error::{Error, Result};
use crate::geometry::{g_prefactor, ln_slice_volume};
use crate::params::ModelParams;
use crate::special::{integrate, ln_cosh_sinh, ln_omega, log_cosh, quad_semi_infinite, CompositeRule, QuadSpec};

use std::f64::consts::PI;

/// Density of the Lévy measure of `Z` on `(0, 1)`:
/// `omega_{d-k}/(k-1) y^{-(d+k-2)/(k-1)} (1 - y^{2/(k-1)})^{(d-k)/2 - 1}`.
pub fn levy_density(y: f64, p: &ModelParams) -> Result<f64> {
    p.require_supercritical()?;
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::domain("levy_density", format!("y = {y} is outside (0, 1)")));
    }
    let (d, k) = (p.d as f64, p.k as f64);
    let ly = y.ln();
    let e2 = (d - k) / 2.0 - 1.0;
    let tail = if e2 == 0.0 {
        0.0
    } else {
        e2 * (-(2.0 / (k - 1.0) * ly).exp_m1()).ln()
    };
    Ok((ln_omega(p.codim()) - (k - 1.0).ln() - (d + k - 2.0) / (k - 1.0) * ly + tail).exp())
}

/// Jump sizes `y_i` and log-weights `ln(omega w_i y_i^2 mu_i)` of a
/// discretised Lévy measure, plus the variance of the neglected small jumps.
/// The characteristic exponent is `t^2 sum qn(t y_i) e^{lw_i} - t^2 v / 2`.
#[derive(Debug, Clone)]
pub(crate) struct JumpGrid {
    y: Vec<f64>,
    lw: Vec<f64>,
    tail_var: f64,
}

const PANEL: f64 = 0.25;

impl JumpGrid {
    pub(crate) fn exponent(&self, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (&y, &lw) in self.y.iter().zip(&self.lw) {
            acc += qn(t * y) * lw.exp();
        }
        (acc - 0.5 * self.tail_var) * (t * t)
    }

    /// Jumps `g(s)` of `Y`, on `[0, 40]` with the remainder treated as Gaussian.
    pub(crate) fn for_y(p: &ModelParams) -> Result<Self> {
        p.require_supercritical()?;
        let cut = 40.0;
        let (k, b) = (p.k as f64, (p.d - p.k - 1) as f64);
        let lc = g_prefactor(p.k).ln();
        let lom = ln_omega(p.codim());
        let lg = |s: f64| lc - (k - 1.0) * log_cosh(s);
        let rule = CompositeRule::uniform(0.0, cut, (cut / PANEL) as usize);
        let mut grid = JumpGrid {
            y: Vec::with_capacity(rule.len()),
            lw: Vec::with_capacity(rule.len()),
            tail_var: 0.0,
        };
        for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
            grid.y.push(lg(s).exp());
            grid.lw.push(w.ln() + lom + 2.0 * lg(s) + ln_cosh_sinh(s, k, b));
        }
        grid.tail_var = quad_semi_infinite(
            |s| (lom + 2.0 * lg(s) + ln_cosh_sinh(s, k, b)).exp(),
            cut,
            &QuadSpec::default(),
        )?;
        Ok(grid)
    }

    /// Jumps `g_r(s)` of `Y_r` on `[0, r]`, panels refined geometrically
    /// towards `s = r` where `g_r` has a branch point.
    pub(crate) fn for_yr(r: f64, p: &ModelParams) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::domain("JumpGrid::for_yr", format!("r = {r} is not positive")));
        }
        let (k, b) = (p.k as f64, (p.d - p.k - 1) as f64);
        let lom = ln_omega(p.codim());
        let n = ((r / PANEL).ceil() as usize).max(1);
        let h = r / n as f64;
        let mut breaks: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        for j in 1..=30 {
            breaks.push(r - h * 0.5f64.powi(j));
        }
        breaks.push(r);
        let rule = CompositeRule::on_breaks(&breaks);
        let mut grid = JumpGrid {
            y: Vec::with_capacity(rule.len()),
            lw: Vec::with_capacity(rule.len()),
            tail_var: 0.0,
        };
        for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
            let lg = ln_slice_volume(s, r, p.k) - (k - 1.0) * r;
            if lg == f64::NEG_INFINITY {
                continue;
            }
            grid.y.push(lg.exp());
            grid.lw.push(w.ln() + lom + 2.0 * lg + ln_cosh_sinh(s, k, b));
        }
        Ok(grid)
    }
}

/// The two terms of the Esseen smoothing inequality:
/// `(1/pi) int_{-T}^{T} |phi_r - phi|/|t| dt` and `24 M/(pi T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EsseenBound {
    pub integral: f64,
    pub smoothing: f64,
    pub total: f64,
}

/// Upper bound on the Kolmogorov distance between `Y_r` and `Y`. `table`
/// must describe the law of `Y` (see [`super::y_density`]); its maximum is
/// the density bound `M`.
pub fn esseen_dk_bound(r: f64, p: &ModelParams, t_max: f64, table: &DensityTable) -> Result<f64> {
    Ok(esseen_parts(r, p, t_max, table)?.total)
}

pub fn esseen_parts(r: f64, p: &ModelParams, t_max: f64, table: &DensityTable) -> Result<EsseenBound> {
    p.require_supercritical()?;
    if !(t_max > 0.0) {
        return Err(Error::domain("esseen_dk_bound", format!("T = {t_max} is not positive")));
    }
    let gy = JumpGrid::for_y(p)?;
    let gr = JumpGrid::for_yr(r, p)?;
    // |phi_r - phi| is even in t; the integrand extends continuously by 0 at t = 0.
    let spec = QuadSpec::new(1e-12, 1e-9, 4000)?;
    let half = integrate(
        |t: f64| {
            if t == 0.0 {
                return 0.0;
            }
            (gr.exponent(t).exp() - gy.exponent(t).exp()).norm() / t
        },
        0.0,
        t_max,
        &spec,
    )?
    .value;
    let integral = 2.0 * half / PI;
    let smoothing = 24.0 * table.max_density / (PI * t_max);
    Ok(EsseenBound {
        integral,
        smoothing,
        total: integral + smoothing,
    })
}

/// One row of a cumulant scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CumulantRow {
    pub d: u32,
    pub k: u32,
    pub n: u32,
    pub value: f64,
}

/// `cum_n(Z*)` along a list of pairs, sorted by `d` then `k`.
pub fn cumulant_scan(n: u32, pairs: &[ModelParams]) -> Result<Vec<CumulantRow>> {
    let mut rows = pairs
        .iter()
        .map(|p| {
            Ok(CumulantRow {
                d: p.d,
                k: p.k,
                n,
                value: cumulant_std(n, p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.d, r.k));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limitlaw::{cf_y, cf_yr};

    #[test]
    fn levy_density_flat_exponent_case() {
        let p = ModelParams::new(7, 5).unwrap();
        let w2 = 2.0 * PI;
        for y in [0.1, 0.5, 0.9] {
            let want = w2 / 4.0 * f64::powf(y, -2.5);
            assert!((levy_density(y, &p).unwrap() - want).abs() < 1e-13 * want);
        }
        assert!(levy_density(1.0, &p).is_err());
        assert!(levy_density(0.0, &p).is_err());
    }

    #[test]
    fn grids_match_adaptive_quadrature() {
        let p = ModelParams::new(5, 4).unwrap();
        let gy = JumpGrid::for_y(&p).unwrap();
        let gr = JumpGrid::for_yr(4.0, &p).unwrap();
        for t in [0.3, 1.0, 4.0, 9.0] {
            let a = gy.exponent(t).exp();
            let b = cf_y(t, &p).unwrap();
            assert!((a - b).norm() < 1e-10, "Y at {t}: {a} {b}");
            let a = gr.exponent(t).exp();
            let b = cf_yr(t, 4.0, &p).unwrap();
            assert!((a - b).norm() < 1e-9, "Y_r at {t}: {a} {b}");
        }
    }

    #[test]
    fn scan_sorts_and_handles_empty() {
        assert!(cumulant_scan(3, &[]).unwrap().is_empty());
        let pairs = [ModelParams::new(6, 5).unwrap(), ModelParams::new(4, 3).unwrap()];
        let rows = cumulant_scan(3, &pairs).unwrap();
        assert_eq!((rows[0].d, rows[1].d), (4, 6));
        assert!((rows[0].value - 0.5 / PI.sqrt()).abs() < 1e-14);
        assert!(cumulant_scan(3, &[ModelParams::new(5, 3).unwrap()]).is_err());
    }
}
