//! The model triple `(d, k, m)` and its regime classification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position of `2k` relative to `d + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `2k < d + 1`: Gaussian fluctuations, variance of order `e^{r(d-1)}`.
    Subcritical,
    /// `2k = d + 1`: Gaussian fluctuations, variance of order `r e^{r(d-1)}`.
    Critical,
    /// `2k > d + 1`: infinitely divisible non-Gaussian limit.
    Supercritical,
}

impl Regime {
    pub fn of(d: u32, k: u32) -> Regime {
        match (2 * k).cmp(&(d + 1)) {
            std::cmp::Ordering::Less => Regime::Subcritical,
            std::cmp::Ordering::Equal => Regime::Critical,
            std::cmp::Ordering::Greater => Regime::Supercritical,
        }
    }
}

/// Dimension `d` of hyperbolic space, flat dimension `k`, and optional
/// intersection order `m` (treated as 1 when absent).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelParams {
    pub d: u32,
    pub k: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
}

impl ModelParams {
    /// Validates `1 <= k <= d-1`.
    pub fn new(d: u32, k: u32) -> Result<Self> {
        Self::with_order(d, k, None)
    }

    /// Validates `1 <= k <= d-1`, and `m >= 1`, `d - m(d-k) >= 0` when `m` is given.
    pub fn with_order(d: u32, k: u32, m: Option<u32>) -> Result<Self> {
        let mm = m.unwrap_or(1);
        if k < 1 || k + 1 > d {
            return Err(Error::Admissibility {
                d,
                k,
                m: mm,
                condition: "1 <= k <= d-1",
            });
        }
        if mm < 1 {
            return Err(Error::Admissibility {
                d,
                k,
                m: mm,
                condition: "m >= 1",
            });
        }
        if u64::from(mm) * u64::from(d - k) > u64::from(d) {
            return Err(Error::Admissibility {
                d,
                k,
                m: mm,
                condition: "d - m(d-k) >= 0",
            });
        }
        Ok(ModelParams { d, k, m })
    }

    /// Shorthand for a limit-law pair; checks `2k > d+1` as well.
    pub fn limit(d: u32, k: u32) -> Result<Self> {
        let p = Self::new(d, k)?;
        p.require_supercritical()?;
        Ok(p)
    }

    pub fn order(&self) -> u32 {
        self.m.unwrap_or(1)
    }

    pub fn regime(&self) -> Regime {
        Regime::of(self.d, self.k)
    }

    /// Codimension `d - k`.
    pub fn codim(&self) -> u32 {
        self.d - self.k
    }

    pub fn require_supercritical(&self) -> Result<()> {
        if self.regime() == Regime::Supercritical {
            Ok(())
        } else {
            Err(Error::Regime {
                d: self.d,
                k: self.k,
                condition: "2k > d+1",
            })
        }
    }

    /// All `(d, k)` with `d <= d_max` and `2k > d + 1`, ordered by `d` then `k`.
    pub fn supercritical_pairs(d_max: u32) -> Vec<ModelParams> {
        (2..=d_max)
            .flat_map(|d| (1..d).map(move |k| (d, k)))
            .filter(|&(d, k)| 2 * k > d + 1)
            .map(|(d, k)| ModelParams { d, k, m: None })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_trichotomy() {
        assert_eq!(Regime::of(4, 2), Regime::Subcritical);
        assert_eq!(Regime::of(5, 3), Regime::Critical);
        assert_eq!(Regime::of(4, 3), Regime::Supercritical);
    }

    #[test]
    fn admissibility() {
        assert!(ModelParams::new(4, 0).is_err());
        assert!(ModelParams::new(4, 4).is_err());
        assert!(ModelParams::with_order(4, 2, Some(2)).is_ok());
        assert!(ModelParams::with_order(4, 2, Some(3)).is_err());
        assert!(ModelParams::with_order(4, 3, Some(4)).is_ok());
        assert!(ModelParams::with_order(4, 3, Some(5)).is_err());
        let err = ModelParams::limit(4, 2).unwrap_err();
        assert!(err.to_string().contains("2k > d+1"));
    }

    #[test]
    fn smallest_supercritical_pairs() {
        let pairs: Vec<_> = ModelParams::supercritical_pairs(6)
            .into_iter()
            .map(|p| (p.d, p.k))
            .collect();
        assert_eq!(pairs, vec![(4, 3), (5, 4), (6, 4), (6, 5)]);
    }
}
