use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Summary statistics with standard errors estimated from the batch itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub n: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub stderr_mean: f64,
    /// From the fourth central moment: `sqrt((m4 - (n-3)/(n-1) s^4) / n)`.
    pub stderr_variance: f64,
}

impl SampleStats {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n < 4 {
            return Err(Error::domain("SampleStats", "need at least four values"));
        }
        let nf = n as f64;
        let mean = values.iter().sum::<f64>() / nf;
        let (mut m2, mut m4) = (0.0, 0.0);
        for v in values {
            let d = v - mean;
            let d2 = d * d;
            m2 += d2;
            m4 += d2 * d2;
        }
        let variance = m2 / (nf - 1.0);
        let m4 = m4 / nf;
        let var_of_var = ((m4 - (nf - 3.0) / (nf - 1.0) * variance * variance) / nf).max(0.0);
        Ok(SampleStats {
            n,
            mean,
            variance,
            stderr_mean: (variance / nf).sqrt(),
            stderr_variance: var_of_var.sqrt(),
        })
    }
}

/// Sample skewness with a batch-means standard error over `batches`
/// contiguous blocks.
pub fn skewness_with_stderr(values: &[f64], batches: usize) -> Result<(f64, f64)> {
    if batches < 2 || values.len() < 4 * batches {
        return Err(Error::domain("skewness_with_stderr", "too few values for the batch count"));
    }
    let skew = skewness(values);
    let len = values.len() / batches;
    let parts: Vec<f64> = (0..batches)
        .map(|b| skewness(&values[b * len..(b + 1) * len]))
        .collect();
    let m = parts.iter().sum::<f64>() / batches as f64;
    let v = parts.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (batches as f64 - 1.0);
    Ok((skew, (v / batches as f64).sqrt()))
}

fn skewness(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3) = (0.0, 0.0);
    for v in values {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    (m3 / n) / (m2 / n).powf(1.5)
}

/// Kolmogorov–Smirnov distance `sup |F_n - F|` between the empirical
/// distribution of `values` and `cdf`, checking both one-sided gaps.
pub fn ks_distance<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::domain("ks_distance", "no values"));
    }
    let owned;
    let sorted = if values.windows(2).all(|w| w[0] <= w[1]) {
        values
    } else {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        owned = v;
        &owned
    };
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Asymptotic p-value of a one-sample KS distance `d` with `n` points.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lam = (sn + 0.12 + 0.11 / sn) * d;
    if lam < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = 2.0 * (-2.0 * jf * jf * lam * lam).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}
