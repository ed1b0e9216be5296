use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// The (d, k, m) triple violates a structural condition such as
    /// `1 <= k <= d-1` or `d - m(d-k) >= 0`.
    #[error("inadmissible parameters (d={d}, k={k}, m={m}): requires {condition}")]
    Admissibility {
        d: u32,
        k: u32,
        m: u32,
        condition: &'static str,
    },

    /// The operation is only defined in a particular regime of `2k` versus `d+1`.
    #[error("wrong regime for (d={d}, k={k}): requires {condition}")]
    Regime {
        d: u32,
        k: u32,
        condition: &'static str,
    },

    /// Adaptive quadrature ran out of subdivisions.
    #[error("quadrature did not converge: estimate {estimate:e} with error {error:e} after {subdivisions} subdivisions")]
    Convergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    /// Two independent evaluation routes disagreed.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    /// True for failures of a numerical method (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Convergence { .. } | Error::Consistency(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
