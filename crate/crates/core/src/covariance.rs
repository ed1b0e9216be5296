//! Asymptotic covariance matrices of the vector of intersection functionals:
//! the full-rank `2 x 2` matrix for `d = 2k`, rank-one matrices for
//! `2k >= d + 1`, the integral `J`, and the Catalan-constant check.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{a11_scaled, c_const, g_prefactor};
use crate::limitlaw::sigma2;
use crate::params::{ModelParams, Regime};
use crate::special::{arcosh_exp, integrate, ln_omega, ln_sinh, quad_semi_infinite, QuadSpec};

use std::f64::consts::PI;

/// Catalan's constant.
pub const CATALAN: f64 = 0.915_965_594_177_219_015;

/// Normalisation under which the matrix is the limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scaling {
    #[serde(rename = "e^{r(d-1)}")]
    ExpDm1,
    #[serde(rename = "r e^{r(d-1)}")]
    RExpDm1,
    #[serde(rename = "e^{2r(k-1)}")]
    Exp2Km1,
}

/// Symmetric covariance matrix with rank diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovMatrix {
    /// Row-major entries.
    pub entries: Vec<Vec<f64>>,
    pub scaling: Scaling,
    pub rank: usize,
    pub min_eigenvalue: f64,
}

pub type CovMatrix2 = CovMatrix;

/// Relative eigenvalue threshold (against the trace) for the numerical rank.
const RANK_TOL: f64 = 1e-10;

impl CovMatrix {
    pub fn new(entries: Vec<Vec<f64>>, scaling: Scaling) -> Result<Self> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|r| r.len() != n) {
            return Err(Error::domain("CovMatrix", "entries must form a square matrix"));
        }
        let m = DMatrix::from_fn(n, n, |i, j| entries[i][j]);
        if (0..n).any(|i| (0..i).any(|j| (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * m[(i, j)].abs().max(1.0))) {
            return Err(Error::domain("CovMatrix", "matrix is not symmetric"));
        }
        let eig = SymmetricEigen::new(m).eigenvalues;
        let trace: f64 = (0..n).map(|i| entries[i][i]).sum();
        let rank = eig.iter().filter(|&&e| e > RANK_TOL * trace.abs()).count();
        let min_eigenvalue = eig.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(CovMatrix {
            entries,
            scaling,
            rank,
            min_eigenvalue,
        })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn trace(&self) -> f64 {
        (0..self.size()).map(|i| self.entries[i][i]).sum()
    }

    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue >= -1e-12 * self.trace().abs()
    }

    pub fn determinant(&self) -> f64 {
        let n = self.size();
        DMatrix::from_fn(n, n, |i, j| self.entries[i][j]).determinant()
    }
}

fn require_half(d: u32, k: u32) -> Result<()> {
    if k < 1 || d != 2 * k {
        return Err(Error::Admissibility {
            d,
            k,
            m: 2,
            condition: "d = 2k",
        });
    }
    Ok(())
}

/// `J = int_1^inf x^{-d} (int_1^x (y^2-1)^{(k-2)/2} dy)^2 dx` for `d = 2k`,
/// by nested quadrature. With `y = cosh u` the inner integral is
/// `int_0^{arcosh x} sinh^{k-1}(u) du`, and `x = e^t` maps the outer range to
/// `[0, inf)` with integrand `e^{-(d-1)t} inner(e^t)^2`.
pub fn j_integral(d: u32, k: u32) -> Result<f64> {
    require_half(d, k)?;
    let inner_spec = QuadSpec::new(1e-300, 1e-13, 2000)?;
    let km1 = (k - 1) as f64;
    let dm1 = (d - 1) as f64;
    let mut failure = None;
    let v = quad_semi_infinite(
        |t: f64| {
            // the integrand is O(t^2 e^{-t}); beyond this it is below any tolerance
            if t > 800.0 {
                return 0.0;
            }
            let a = arcosh_exp(t);
            if a == 0.0 {
                return 0.0;
            }
            // scale by e^{-(k-1)a} inside, restore outside
            let inner = if k == 1 {
                Ok(a)
            } else {
                integrate(|u: f64| (km1 * (ln_sinh(u) - a)).exp(), 0.0, a, &inner_spec)
                    .map(|o| o.value)
            };
            match inner {
                Ok(v) => (2.0 * v.ln() + 2.0 * km1 * a - dm1 * t).exp(),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        &QuadSpec::new(1e-14, 1e-12, 4000)?,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// `J` for even `k`, where the inner integral
/// `int_1^x (y^2-1)^j dy`, `j = (k-2)/2`, is a polynomial `P(x)` and
/// `int_1^inf x^{m-d} dx = 1/(d-1-m)` for each power of `P^2`.
pub fn j_integral_even(d: u32, k: u32) -> Result<f64> {
    require_half(d, k)?;
    if k % 2 != 0 {
        return Err(Error::domain("j_integral_even", format!("k = {k} is odd")));
    }
    let j = (k - 2) / 2;
    // P(x) = sum_i binom(j,i) (-1)^{j-i} (x^{2i+1} - 1)/(2i+1)
    let deg = (2 * j + 1) as usize;
    let mut p = vec![0.0; deg + 1];
    let mut binom = 1.0;
    for i in 0..=j {
        if i > 0 {
            binom = binom * (j - i + 1) as f64 / i as f64;
        }
        let c = binom * if (j - i) % 2 == 0 { 1.0 } else { -1.0 } / (2 * i + 1) as f64;
        p[(2 * i + 1) as usize] += c;
        p[0] -= c;
    }
    let mut sq = vec![0.0; 2 * deg + 1];
    for (a, pa) in p.iter().enumerate() {
        for (b, pb) in p.iter().enumerate() {
            sq[a + b] += pa * pb;
        }
    }
    Ok(sq
        .iter()
        .enumerate()
        .map(|(m, c)| c / (d as f64 - 1.0 - m as f64))
        .sum())
}

/// Limit covariance of `(F^{(1)}, F^{(2)})` for `d = 2k`, normalised by `e^{r(d-1)}`.
pub fn sigma_matrix_full(k: u32) -> Result<CovMatrix> {
    let d = 2 * k;
    require_half(d, k)?;
    let j = j_integral(d, k)?;
    let base = (3.0 * ln_omega(k) - (d - 1) as f64 * std::f64::consts::LN_2).exp() * j;
    let c = (ln_omega(1) + ln_omega(d + 1) - 2.0 * ln_omega(k + 1)).exp();
    let extra = (ln_omega(1) + ln_omega(d) + ln_omega(d + 1)
        - ((d - 1) as f64).ln()
        - d as f64 * std::f64::consts::LN_2
        - 2.0 * ln_omega(k + 1))
    .exp();
    CovMatrix::new(
        vec![vec![base, base * c], vec![base * c, base * c * c + extra]],
        Scaling::ExpDm1,
    )
}

/// Rank-one limit covariance with the scalar `lambda` and, in the critical
/// case, an error band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOneCov {
    pub matrix: CovMatrix,
    pub lambda: f64,
    /// `|lambda(r_probe) - lambda(r_probe + 2)|` when `lambda` is a numerical probe.
    pub lambda_band: Option<f64>,
    pub note: Option<String>,
}

/// `lambda C(d,k,a) C(d,k,b)` for `a, b = 1..m`. For `2k > d+1`,
/// `lambda = Var(Y) = g(0)^2 sigma^2`; for `2k = d+1` it is estimated as
/// `A11(r)/(r e^{r(d-1)})` at `r = r_probe`, a slowly converging quantity.
pub fn sigma_matrix_rank_one(p: &ModelParams, r_probe: f64) -> Result<RankOneCov> {
    let m = p.order();
    let (lambda, band, note, scaling) = match p.regime() {
        Regime::Subcritical => {
            return Err(Error::Regime {
                d: p.d,
                k: p.k,
                condition: "2k >= d+1",
            })
        }
        Regime::Supercritical => {
            let c = g_prefactor(p.k);
            (c * c * sigma2(p)?, None, None, Scaling::Exp2Km1)
        }
        Regime::Critical => {
            if !(r_probe > 0.0) {
                return Err(Error::domain("sigma_matrix_rank_one", "r_probe must be positive"));
            }
            let probe = |r: f64| -> Result<f64> {
                let p1 = ModelParams::new(p.d, p.k)?;
                Ok(a11_scaled(r, &p1, (p.d - 1) as f64 * r)? / r)
            };
            let l0 = probe(r_probe)?;
            let l1 = probe(r_probe + 2.0)?;
            (
                l0,
                Some((l0 - l1).abs()),
                Some(format!(
                    "lambda estimated as A11(r)/(r e^(r(d-1))) at r = {r_probe}; convergence in r is slow"
                )),
                Scaling::RExpDm1,
            )
        }
    };
    let cs: Vec<f64> = (1..=m)
        .map(|a| c_const(&ModelParams::with_order(p.d, p.k, Some(a))?))
        .collect::<Result<_>>()?;
    let entries = (0..m as usize)
        .map(|a| (0..m as usize).map(|b| lambda * cs[a] * cs[b]).collect())
        .collect();
    Ok(RankOneCov {
        matrix: CovMatrix::new(entries, scaling)?,
        lambda,
        lambda_band: band,
        note,
    })
}

/// Comparison of the computed `d = 2, k = 1` matrix against
/// `[[4a, 8a/pi], [8a/pi, 16a/pi^2 + 1]]` with `a = 4G`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalanReport {
    #[serde(rename = "G")]
    pub catalan: f64,
    pub a: f64,
    pub computed: Vec<Vec<f64>>,
    pub expected: Vec<Vec<f64>>,
    pub max_rel_error: f64,
    /// `Sigma_22 - Sigma_12^2 / Sigma_11`, which equals one.
    pub schur_complement: f64,
}

pub fn catalan_check() -> Result<CatalanReport> {
    let m = sigma_matrix_full(1)?;
    let a = 4.0 * CATALAN;
    let expected = vec![
        vec![4.0 * a, 8.0 * a / PI],
        vec![8.0 * a / PI, 16.0 * a / (PI * PI) + 1.0],
    ];
    let mut err: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            err = err.max((m.entries[i][j] - expected[i][j]).abs() / expected[i][j].abs());
        }
    }
    let e = &m.entries;
    Ok(CatalanReport {
        catalan: CATALAN,
        a,
        schur_complement: e[1][1] - e[0][1] * e[0][1] / e[0][0],
        computed: m.entries,
        expected,
        max_rel_error: err,
    })
}
