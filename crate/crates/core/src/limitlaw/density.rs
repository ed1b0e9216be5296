use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cf::{cf_exponent_series, sigma2};
use crate::error::{Error, Result};
use crate::params::ModelParams;

use std::f64::consts::PI;

/// Quadrature rule for the truncated inversion integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InversionRule {
    /// Nodes `t_j = (-1 + 2j/M) T`, `j = 0..M-1`.
    #[default]
    LeftPoint,
    /// Both endpoints included with half weight; cancels the imaginary
    /// residue left by the unpaired node at `-T`.
    Trapezoid,
}

/// Truncation `T`, node count `M` and series order `N` of the inversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InversionSpec {
    #[serde(rename = "T")]
    pub truncation: f64,
    #[serde(rename = "M")]
    pub grid_points: usize,
    #[serde(rename = "N")]
    pub series_order: u32,
    pub rule: InversionRule,
}

impl Default for InversionSpec {
    fn default() -> Self {
        InversionSpec {
            truncation: 10.0,
            grid_points: 200,
            series_order: 26,
            rule: InversionRule::LeftPoint,
        }
    }
}

impl InversionSpec {
    pub fn new(truncation: f64, grid_points: usize, series_order: u32) -> Result<Self> {
        let s = InversionSpec {
            truncation,
            grid_points,
            series_order,
            rule: InversionRule::LeftPoint,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_rule(mut self, rule: InversionRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.truncation > 0.0) || self.grid_points < 2 || self.series_order < 2 {
            return Err(Error::domain(
                "InversionSpec",
                "requires T > 0, M >= 2 and N >= 2",
            ));
        }
        Ok(())
    }

    /// Frequencies and weights of the discretised inversion integral,
    /// weights already including the `1/(2 pi)` factor.
    fn nodes(&self) -> Vec<(f64, f64)> {
        let m = self.grid_points;
        let t = self.truncation;
        let dt = 2.0 * t / m as f64;
        let w = dt / (2.0 * PI);
        match self.rule {
            InversionRule::LeftPoint => (0..m)
                .map(|j| ((-1.0 + 2.0 * j as f64 / m as f64) * t, w))
                .collect(),
            InversionRule::Trapezoid => (0..=m)
                .map(|j| {
                    let wj = if j == 0 || j == m { 0.5 * w } else { w };
                    ((-1.0 + 2.0 * j as f64 / m as f64) * t, wj)
                })
                .collect(),
        }
    }
}

/// Characteristic function of `Z*`: `exp` of the order-`N` exponent series.
pub fn cf_std(t: f64, p: &ModelParams, spec: &InversionSpec) -> Result<Complex64> {
    spec.validate()?;
    Ok(cf_exponent_series(t, p, spec.series_order)?.exp())
}

/// Scale `v = omega_k/((k-1)2^{k-1}) sigma` with `Y = v Z*`.
pub fn y_scale(p: &ModelParams) -> Result<f64> {
    Ok(crate::geometry::g_prefactor(p.k) * sigma2(p)?.sqrt())
}

/// `lo, lo + step, ...` up to and including `hi` (within rounding).
pub fn uniform_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

/// Density, distribution function and inversion diagnostics on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityTable {
    pub xs: Vec<f64>,
    pub f: Vec<f64>,
    pub cdf: Vec<f64>,
    pub max_density: f64,
    /// Largest `|Im|` of the inversion sum over the grid.
    pub max_imag_residue: f64,
}

/// Threshold above which the imaginary residue is flagged.
pub const IMAG_RESIDUE_TOL: f64 = 1e-6;

impl DensityTable {
    /// Builds the table from density values; the distribution function is
    /// the cumulative trapezoid sum starting at zero.
    pub fn from_density(xs: Vec<f64>, f: Vec<f64>, max_imag_residue: f64) -> Self {
        let mut cdf = Vec::with_capacity(xs.len());
        let mut acc = 0.0;
        for i in 0..xs.len() {
            if i > 0 {
                acc += 0.5 * (f[i] + f[i - 1]) * (xs[i] - xs[i - 1]);
            }
            cdf.push(acc);
        }
        let max_density = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        DensityTable {
            xs,
            f,
            cdf,
            max_density,
            max_imag_residue,
        }
    }

    pub fn residue_within_tolerance(&self) -> bool {
        self.max_imag_residue <= IMAG_RESIDUE_TOL
    }

    /// Linear interpolation of the distribution function, clamped to `[0, 1]`
    /// and constant outside the grid.
    pub fn cdf_at(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if n == 0 {
            return f64::NAN;
        }
        let v = if x <= self.xs[0] {
            self.cdf[0]
        } else if x >= self.xs[n - 1] {
            self.cdf[n - 1]
        } else {
            let i = self.xs.partition_point(|&v| v <= x);
            let (x0, x1) = (self.xs[i - 1], self.xs[i]);
            let w = (x - x0) / (x1 - x0);
            self.cdf[i - 1] * (1.0 - w) + self.cdf[i] * w
        };
        v.clamp(0.0, 1.0)
    }

    fn trapezoid<F: Fn(f64) -> f64>(&self, phi: F) -> f64 {
        self.xs
            .windows(2)
            .zip(self.f.windows(2))
            .map(|(x, f)| 0.5 * (x[1] - x[0]) * (phi(x[0]) * f[0] + phi(x[1]) * f[1]))
            .sum()
    }

    pub fn integral(&self) -> f64 {
        self.trapezoid(|_| 1.0)
    }

    pub fn mean(&self) -> f64 {
        self.trapezoid(|x| x)
    }

    pub fn second_moment(&self) -> f64 {
        self.trapezoid(|x| x * x)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.trapezoid(|x| (x - m) * (x - m))
    }

    /// Table of `v X` given this table for `X`: `f_v(x) = f(x/v)/v`.
    pub fn rescaled(&self, v: f64) -> DensityTable {
        DensityTable {
            xs: self.xs.iter().map(|x| x * v).collect(),
            f: self.f.iter().map(|f| f / v).collect(),
            cdf: self.cdf.clone(),
            max_density: self.max_density / v,
            max_imag_residue: self.max_imag_residue / v,
        }
    }
}

/// Density of `Z*` on `xs` by discretised Fourier inversion
/// `f(x) ~ (T/(pi M)) sum_j e^{-i t_j x} psi(t_j)`.
pub fn density(p: &ModelParams, spec: &InversionSpec, xs: &[f64]) -> Result<DensityTable> {
    p.require_supercritical()?;
    spec.validate()?;
    if xs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("density", "grid must be strictly increasing"));
    }
    let nodes: Vec<(f64, Complex64)> = spec
        .nodes()
        .into_iter()
        .map(|(t, w)| Ok((t, cf_std(t, p, spec)? * w)))
        .collect::<Result<_>>()?;
    let vals: Vec<Complex64> = xs
        .par_iter()
        .map(|&x| {
            nodes
                .iter()
                .map(|&(t, c)| Complex64::from_polar(1.0, -t * x) * c)
                .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
        })
        .collect();
    let resid = vals.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    let f = vals.iter().map(|v| v.re).collect();
    Ok(DensityTable::from_density(xs.to_vec(), f, resid))
}

/// Density table of `Y = v Z*` on the image of `xs` under `x -> v x`.
pub fn y_density(p: &ModelParams, spec: &InversionSpec, xs: &[f64]) -> Result<DensityTable> {
    Ok(density(p, spec, xs)?.rescaled(y_scale(p)?))
}
