//! Monte Carlo for the radial Poisson process of flat distances, the
//! first-chaos functional `F1_r`, its normalisation `Y_r`, and the limit
//! variable `Z`; empirical Kolmogorov–Smirnov distances.

mod intensity;
mod sampler;
mod stats;

pub use intensity::{cumulative_intensity, inverse_cumulative_intensity, rate, RadialIntensity};
pub use sampler::{
    sample_f1, sample_f1_with, sample_radial_process, sample_yr, sample_yr_with, sample_z,
    sample_z_with, RadialProcess, SampleBatch, SampleKind, SamplerOptions, CHUNK,
};
pub use stats::{ks_distance, ks_p_value, skewness_with_stderr, SampleStats};

impl SampleBatch {
    pub fn stats(&self) -> crate::Result<SampleStats> {
        SampleStats::from_values(&self.values)
    }
}
