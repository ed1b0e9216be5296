//! Convergence-rate exponents: `beta_{d,k}`, the intersection rate `w`,
//! the min-max problem behind `beta`, and variance orders of chaos terms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Position of `4k` relative to `3d + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WRegime {
    #[serde(rename = "4k<3d+1")]
    Below,
    #[serde(rename = "4k=3d+1")]
    Equal,
    #[serde(rename = "4k>3d+1")]
    Above,
}

impl WRegime {
    pub fn of(d: u32, k: u32) -> WRegime {
        match (4 * k).cmp(&(3 * d + 1)) {
            std::cmp::Ordering::Less => WRegime::Below,
            std::cmp::Ordering::Equal => WRegime::Equal,
            std::cmp::Ordering::Greater => WRegime::Above,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateProfile {
    pub d: u32,
    pub k: u32,
    pub beta: f64,
    pub w_regime: WRegime,
    pub alpha_star: f64,
    pub beta_star: f64,
    /// The `k = 3` bound carries an extra factor `r`.
    pub k3_log_factor: bool,
}

fn supercritical(d: u32, k: u32) -> Result<()> {
    ModelParams::limit(d, k).map(|_| ())
}

/// `beta_{d,k} = 2(2k-d-1)/(k+d+4)`.
pub fn beta(d: u32, k: u32) -> Result<f64> {
    supercritical(d, k)?;
    Ok(2.0 * (2.0 * k as f64 - d as f64 - 1.0) / (k + d + 4) as f64)
}

pub fn alpha_star(d: u32, k: u32) -> Result<f64> {
    supercritical(d, k)?;
    Ok(6.0 / (k + d + 4) as f64)
}

pub fn rate_profile(d: u32, k: u32) -> Result<RateProfile> {
    let b = beta(d, k)?;
    Ok(RateProfile {
        d,
        k,
        beta: b,
        w_regime: WRegime::of(d, k),
        alpha_star: alpha_star(d, k)?,
        beta_star: b,
        k3_log_factor: k == 3,
    })
}

/// Rate function for intersection processes:
/// `e^{-(2k-d-1)r/3}`, `r^{1/3} e^{-(2k-d-1)r/3}` or `e^{-2(d-k)r/3}`
/// according to `4k` versus `3d+1`.
pub fn w(d: u32, k: u32, r: f64) -> Result<f64> {
    supercritical(d, k)?;
    if !(r > 0.0) {
        return Err(Error::domain("w", format!("r = {r} is not positive")));
    }
    let e = (2 * k - d - 1) as f64;
    Ok(match WRegime::of(d, k) {
        WRegime::Below => (-e * r / 3.0).exp(),
        WRegime::Equal => r.cbrt() * (-e * r / 3.0).exp(),
        WRegime::Above => (-2.0 * (d - k) as f64 * r / 3.0).exp(),
    })
}

/// Solution of `min_{alpha, beta >= 0} max_i L_i(alpha, beta)` over
/// `L_1 = beta + (d-1) alpha - (k-1)`, `L_2 = beta + (d-k+2) alpha - 2`,
/// `L_3 = 2 beta - (2k-d-1) alpha`, `L_4 = -beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinMaxSolution {
    pub alpha_star: f64,
    pub beta_star: f64,
    pub optimum: f64,
    pub numeric_alpha: f64,
    pub numeric_beta: f64,
    pub numeric_optimum: f64,
}

/// Coefficients `(c_alpha, c_beta, c_0)` of the four linear forms.
fn forms(d: u32, k: u32) -> [[f64; 3]; 4] {
    let (d, k) = (d as f64, k as f64);
    [
        [d - 1.0, 1.0, -(k - 1.0)],
        [d - k + 2.0, 1.0, -2.0],
        [-(2.0 * k - d - 1.0), 2.0, 0.0],
        [0.0, -1.0, 0.0],
    ]
}

/// `max_i L_i(alpha, beta)`.
pub fn minmax_objective(d: u32, k: u32, alpha: f64, b: f64) -> f64 {
    forms(d, k)
        .iter()
        .map(|f| f[0] * alpha + f[1] * b + f[2])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Vertex enumeration: the minimiser of a maximum of affine functions on
/// the quadrant lies where two defining lines meet, each line being either
/// `L_i = L_j` or a boundary `alpha = 0`, `beta = 0`.
fn minmax_numeric(d: u32, k: u32) -> (f64, f64, f64) {
    let f = forms(d, k);
    // lines a x + b y = c
    let mut lines: Vec<[f64; 3]> = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
    for i in 0..4 {
        for j in i + 1..4 {
            let l = [f[i][0] - f[j][0], f[i][1] - f[j][1], f[j][2] - f[i][2]];
            if l[0] != 0.0 || l[1] != 0.0 {
                lines.push(l);
            }
        }
    }
    let mut best = (f64::NAN, f64::NAN, f64::INFINITY);
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a, b) = (lines[i], lines[j]);
            let det = a[0] * b[1] - a[1] * b[0];
            if det.abs() < 1e-14 {
                continue;
            }
            let x = (a[2] * b[1] - a[1] * b[2]) / det;
            let y = (a[0] * b[2] - a[2] * b[0]) / det;
            if x < -1e-12 || y < -1e-12 {
                continue;
            }
            let (x, y) = (x.max(0.0), y.max(0.0));
            let v = minmax_objective(d, k, x, y);
            if v < best.2 - 1e-13 {
                best = (x, y, v);
            }
        }
    }
    best
}

/// Analytic optimum `alpha* = 6/(k+d+4)`, `beta* = 2(2k-d-1)/(k+d+4)`, value
/// `-beta*`, checked against vertex enumeration.
pub fn minmax_solve(d: u32, k: u32) -> Result<MinMaxSolution> {
    let a = alpha_star(d, k)?;
    let b = beta(d, k)?;
    let (na, nb, nv) = minmax_numeric(d, k);
    let sol = MinMaxSolution {
        alpha_star: a,
        beta_star: b,
        optimum: -b,
        numeric_alpha: na,
        numeric_beta: nb,
        numeric_optimum: nv,
    };
    let tol = 1e-9;
    if (nv + b).abs() > tol || (na - a).abs() > tol || (nb - b).abs() > tol {
        return Err(Error::Consistency(format!(
            "min-max for (d={d}, k={k}): analytic ({a}, {b}, {}) vs numeric ({na}, {nb}, {nv})",
            -b
        )));
    }
    Ok(sol)
}

/// Growth of a variance: `e^{rate r}`, times `r` when `log_factor` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthOrder {
    pub rate: f64,
    pub log_factor: bool,
}

/// Order of the `i`-th chaos variance `A^{(m)}_{r,i}` for `r >= 1`, by the
/// sign of `2i(d-k) - (d-1)`.
pub fn chaos_variance_order(d: u32, k: u32, i: u32) -> Result<GrowthOrder> {
    if i < 1 || k >= d {
        return Err(Error::domain("chaos_variance_order", "requires i >= 1 and k <= d-1"));
    }
    let lhs = 2 * i as i64 * (d - k) as i64;
    let rhs = d as i64 - 1;
    Ok(match lhs.cmp(&rhs) {
        std::cmp::Ordering::Greater => GrowthOrder {
            rate: (d - 1) as f64,
            log_factor: false,
        },
        std::cmp::Ordering::Equal => GrowthOrder {
            rate: (d - 1) as f64,
            log_factor: true,
        },
        std::cmp::Ordering::Less => GrowthOrder {
            rate: 2.0 * (d as f64 - i as f64 * (d - k) as f64 - 1.0),
            log_factor: false,
        },
    })
}

/// Order of the second moment of the remainder `W_r`; its cube root is `w`.
pub fn w_variance_order(d: u32, k: u32) -> Result<GrowthOrder> {
    supercritical(d, k)?;
    let e = (2 * k - d - 1) as f64;
    Ok(match WRegime::of(d, k) {
        WRegime::Below => GrowthOrder {
            rate: -e,
            log_factor: false,
        },
        WRegime::Equal => GrowthOrder {
            rate: -e,
            log_factor: true,
        },
        WRegime::Above => GrowthOrder {
            rate: -2.0 * (d - k) as f64,
            log_factor: false,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub r: f64,
    pub bound: f64,
}

/// Shape of the Kolmogorov-distance bound with its constant set to one:
/// `max(r,1) e^{-beta r}` for `(4,3)`, `e^{-2r/3}` for `d >= 12, k = d-1`,
/// `e^{-beta r}` otherwise.
pub fn rate_curve(p: &ModelParams, rs: &[f64]) -> Result<Vec<RatePoint>> {
    let p = ModelParams::with_order(p.d, p.k, p.m)?;
    let b = beta(p.d, p.k)?;
    rs.iter()
        .map(|&r| {
            if !(r >= 0.0) {
                return Err(Error::domain("rate_curve", format!("r = {r} is negative")));
            }
            let bound = if (p.d, p.k) == (4, 3) {
                r.max(1.0) * (-b * r).exp()
            } else if p.d >= 12 && p.k == p.d - 1 {
                (-2.0 * r / 3.0).exp()
            } else {
                (-b * r).exp()
            };
            Ok(RatePoint { r, bound })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_values() {
        assert!((beta(4, 3).unwrap() - 2.0 / 11.0).abs() < 1e-15);
        assert!((beta(12, 11).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(beta(9, 6).unwrap() < beta(9, 7).unwrap());
        assert!(beta(9, 7).unwrap() < beta(9, 8).unwrap());
        assert!(beta(4, 2).is_err());
    }

    #[test]
    fn w_branches() {
        let r: f64 = 2.5;
        assert!((w(4, 3, r).unwrap() - (-r / 3.0).exp()).abs() < 1e-15);
        assert!((w(5, 4, r).unwrap() - r.cbrt() * (-2.0 * r / 3.0).exp()).abs() < 1e-15);
        assert!((w(12, 11, r).unwrap() - (-2.0 * r / 3.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn minmax_examples() {
        let s = minmax_solve(4, 3).unwrap();
        assert!((s.alpha_star - 6.0 / 11.0).abs() < 1e-15);
        let s = minmax_solve(9, 7).unwrap();
        assert!((s.alpha_star - 0.3).abs() < 1e-15 && (s.beta_star - 0.4).abs() < 1e-15);
        let f = forms(9, 7);
        let vals: Vec<f64> = f[1..]
            .iter()
            .map(|f| f[0] * s.alpha_star + f[1] * s.beta_star + f[2])
            .collect();
        assert!(vals.iter().all(|v| (v + 0.4).abs() < 1e-12));
    }

    #[test]
    fn chaos_orders() {
        let o = chaos_variance_order(5, 4, 1).unwrap();
        assert_eq!((o.rate, o.log_factor), (6.0, false));
        let o = chaos_variance_order(5, 4, 2).unwrap();
        assert_eq!((o.rate, o.log_factor), (4.0, true));
        let o = chaos_variance_order(2, 1, 1).unwrap();
        assert_eq!((o.rate, o.log_factor), (1.0, false));
        let o = w_variance_order(5, 4).unwrap();
        assert_eq!((o.rate, o.log_factor), (-2.0, true));
    }

    #[test]
    fn curve_examples() {
        let p = ModelParams::new(4, 3).unwrap();
        let c = rate_curve(&p, &[11.0]).unwrap();
        assert!((c[0].bound - 11.0 * (-2.0f64).exp()).abs() < 1e-12);
        let p = ModelParams::new(13, 12).unwrap();
        assert!((rate_curve(&p, &[3.0]).unwrap()[0].bound - (-2.0f64).exp()).abs() < 1e-15);
        let p = ModelParams::with_order(9, 7, Some(2)).unwrap();
        assert!((rate_curve(&p, &[1e-12]).unwrap()[0].bound - 1.0).abs() < 1e-11);
    }
}
