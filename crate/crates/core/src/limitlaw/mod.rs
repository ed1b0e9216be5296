//! The limit law `Z_{d,k}`: characteristic function, cumulants, density by
//! Fourier inversion, Lévy density, and the finite-radius characteristic
//! function of `Y_r` with the Esseen bound on the Kolmogorov distance.
//!
//! Everything without a `_raw` suffix refers to the standardised `Z* = Z/sigma`.

mod cf;
mod density;
mod levy;

pub use cf::{
    cf_exponent_quadrature, cf_exponent_quadrature_with, cf_exponent_raw, cf_exponent_series,
    cf_exponent_series_adaptive, cf_y, cf_yr, cf_yr_with, cumulant_raw, cumulant_std, h,
    mu_density, q, sigma2,
};
pub use density::{
    cf_std, density, uniform_grid, y_density, y_scale, DensityTable, InversionRule, InversionSpec,
    IMAG_RESIDUE_TOL,
};
pub use levy::{cumulant_scan, esseen_dk_bound, esseen_parts, levy_density, CumulantRow, EsseenBound};
