//! Special functions, hyperbolic primitives and quadrature shared by the
//! other modules.

mod gamma;
mod hyperbolic;
mod quad;

pub use gamma::{ln_gamma, ln_omega, log_gamma, omega};
pub use hyperbolic::{arcosh_stable, hyp_moment, ln_hyp_moment, log_cosh, log_sinh};
pub(crate) use hyperbolic::{arcosh_exp, ln_cosh_sinh, ln_sinh};
pub use quad::{
    integrate, quad_finite, quad_finite_complex, quad_semi_infinite, quad_semi_infinite_complex,
    CompositeRule, QuadOutcome, QuadSpec, QuadValue,
};
