use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::intensity::RadialIntensity;
use crate::error::{Error, Result};
use crate::geometry::ln_slice_volume;
use crate::params::ModelParams;
use crate::special::{integrate, ln_cosh_sinh, ln_omega, log_cosh, QuadSpec};

/// Samples per RNG stream. Chunk `c` always uses stream `c` of the master
/// seed, so the output does not depend on how chunks are scheduled.
pub const CHUNK: usize = 256;

/// Knots of the tabulated quantile function of the radial distances.
const KNOTS: usize = 1 << 16;

/// Cap on the expected point count for explicit point-process draws.
const MAX_EXPLICIT_POINTS: f64 = 1e7;

/// Tuning of the compound-Poisson samplers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerOptions {
    /// Expected number of flats simulated explicitly per draw. Flats
    /// beyond the radius where `Lambda` reaches this budget contribute
    /// only tiny jumps; their sum is replaced by a Gaussian with the same
    /// mean and variance.
    pub point_budget: f64,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        SamplerOptions { point_budget: 1e4 }
    }
}

/// What a batch contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    /// Total volume `F1_r` of the flats inside the ball of radius `r`.
    F1,
    /// `Y_r = (F1_r - E F1_r) e^{-(k-1) r}`.
    Yr,
    /// The limit variable `Z`, truncated at `T`.
    Z,
}

/// A reproducible batch of draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub params: ModelParams,
    pub kind: SampleKind,
    /// Radius `r` for `F1`/`Y_r`, truncation `T` for `Z`.
    pub r_or_t: f64,
    pub seed: u64,
    pub options: SamplerOptions,
    pub values: Vec<f64>,
}

/// Inverse-transform table for distances on `[0, s_c]`, together with
/// the jump sizes `f(s)` at the knots.
#[derive(Debug, Clone)]
struct QuantileTable {
    lambda: f64,
    s: Vec<f64>,
    f: Vec<f64>,
    inv_codim: f64,
}

impl QuantileTable {
    fn build<F: Fn(f64) -> f64 + Sync>(
        intensity: &RadialIntensity,
        lambda: f64,
        codim: u32,
        jump: F,
    ) -> Self {
        let s: Vec<f64> = (0..=KNOTS)
            .into_par_iter()
            .map(|j| intensity.inverse(lambda * j as f64 / KNOTS as f64))
            .collect();
        let f = s.iter().map(|&x| jump(x)).collect();
        QuantileTable {
            lambda,
            s,
            f,
            inv_codim: 1.0 / codim as f64,
        }
    }

    /// Cell index and the interpolation weight of its right knot. In the
    /// first cell `Lambda(s) ~ c s^{d-k}`, so the weight follows that power.
    fn locate(&self, u: f64) -> (usize, f64) {
        let x = u * KNOTS as f64;
        let i = (x as usize).min(KNOTS - 1);
        let w = x - i as f64;
        if i == 0 {
            (0, w.powf(self.inv_codim))
        } else {
            (i, w)
        }
    }

    fn distance(&self, u: f64) -> f64 {
        let (i, w) = self.locate(u);
        self.s[i] + w * (self.s[i + 1] - self.s[i])
    }

    fn jump(&self, u: f64) -> f64 {
        let (i, w) = self.locate(u);
        self.f[i] + w * (self.f[i + 1] - self.f[i])
    }
}

/// `sum_{s in process, s <= s_c} f(s) + offset + sd * N(0,1)`.
#[derive(Debug, Clone)]
struct CompoundSampler {
    table: Option<QuantileTable>,
    offset: f64,
    remainder_sd: f64,
}

impl CompoundSampler {
    /// `ln_f` is the log of the jump size at distance `s`. The explicit
    /// part covers `[0, s_c]`; the remainder `(s_c, bound]` is Gaussian.
    fn new<F: Fn(f64) -> f64 + Sync>(
        p: &ModelParams,
        bound: f64,
        centred: bool,
        opts: &SamplerOptions,
        ln_f: F,
    ) -> Result<Self> {
        if !(opts.point_budget > 0.0) {
            return Err(Error::domain("sampler", "point budget must be positive"));
        }
        let intensity = RadialIntensity::new(bound, p)?;
        let (s_c, lambda) = if intensity.total() <= opts.point_budget {
            (bound, intensity.total())
        } else {
            let s = intensity.inverse(opts.point_budget);
            (s, intensity.at(s))
        };
        let spec = QuadSpec::default();
        let (k, b) = (p.k as f64, (p.d - p.k - 1) as f64);
        let lom = ln_omega(p.codim());
        let moment = |lo: f64, hi: f64, power: f64| -> Result<f64> {
            if hi <= lo {
                return Ok(0.0);
            }
            Ok(integrate(
                |s: f64| {
                    let l = ln_f(s);
                    if l == f64::NEG_INFINITY {
                        0.0
                    } else {
                        (power * l + lom + ln_cosh_sinh(s, k, b)).exp()
                    }
                },
                lo,
                hi,
                &spec,
            )?
            .value)
        };
        let rem_var = moment(s_c, bound, 2.0)?;
        let offset = if centred {
            -moment(0.0, s_c, 1.0)?
        } else {
            moment(s_c, bound, 1.0)?
        };
        let table = (lambda > 0.0).then(|| {
            QuantileTable::build(&intensity, lambda, p.codim(), |s| {
                let l = ln_f(s);
                if l == f64::NEG_INFINITY {
                    0.0
                } else {
                    l.exp()
                }
            })
        });
        Ok(CompoundSampler {
            table,
            offset,
            remainder_sd: rem_var.sqrt(),
        })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        let mut acc = 0.0;
        if let Some(t) = &self.table {
            let n: f64 = Poisson::new(t.lambda).expect("positive mean").sample(rng);
            for _ in 0..n as u64 {
                acc += t.jump(rng.random::<f64>());
            }
        }
        let z: f64 = StandardNormal.sample(rng);
        acc + self.offset + self.remainder_sd * z
    }
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Runs `draw` for `n` samples in chunks of [`CHUNK`], each chunk on its own
/// stream, and concatenates the chunks in order.
fn run_chunks<T: Send, F: Fn(&mut ChaCha8Rng) -> T + Sync>(n: usize, seed: u64, draw: F) -> Vec<T> {
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let len = CHUNK.min(n - c * CHUNK);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    parts.into_iter().flatten().collect()
}

fn check_radius(r: f64, n: usize) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain("sampler", format!("radius {r} is not positive")));
    }
    if n == 0 {
        return Err(Error::domain("sampler", "sample count must be at least 1"));
    }
    Ok(())
}

/// Draws of `F1_r = sum_i slice_volume(s_i, r)` over the radial process.
pub fn sample_f1(r: f64, p: &ModelParams, seed: u64, n: usize) -> Result<SampleBatch> {
    sample_f1_with(r, p, seed, n, &SamplerOptions::default())
}

pub fn sample_f1_with(
    r: f64,
    p: &ModelParams,
    seed: u64,
    n: usize,
    opts: &SamplerOptions,
) -> Result<SampleBatch> {
    check_radius(r, n)?;
    let k = p.k;
    let sampler = CompoundSampler::new(p, r, false, opts, |s| ln_slice_volume(s, r, k))?;
    Ok(SampleBatch {
        params: *p,
        kind: SampleKind::F1,
        r_or_t: r,
        seed,
        options: *opts,
        values: run_chunks(n, seed, |rng| sampler.draw(rng)),
    })
}

/// Draws of `Y_r`. The jumps are `g_r(s) = e^{-(k-1)r} slice_volume(s, r)`
/// and the centring is applied before summation, so no quantity of size
/// `e^{(k-1) r}` is ever formed.
pub fn sample_yr(r: f64, p: &ModelParams, seed: u64, n: usize) -> Result<SampleBatch> {
    sample_yr_with(r, p, seed, n, &SamplerOptions::default())
}

pub fn sample_yr_with(
    r: f64,
    p: &ModelParams,
    seed: u64,
    n: usize,
    opts: &SamplerOptions,
) -> Result<SampleBatch> {
    check_radius(r, n)?;
    let k = p.k;
    let shift = (k as f64 - 1.0) * r;
    let sampler = CompoundSampler::new(p, r, true, opts, |s| ln_slice_volume(s, r, k) - shift)?;
    Ok(SampleBatch {
        params: *p,
        kind: SampleKind::Yr,
        r_or_t: r,
        seed,
        options: *opts,
        values: run_chunks(n, seed, |rng| sampler.draw(rng)),
    })
}

/// Draws of `Z` truncated at `T`:
/// `sum_{s <= T} cosh^{-(k-1)}(s) - omega_{d-k} sinh^{d-k}(T)/(d-k)`.
pub fn sample_z(t_trunc: f64, p: &ModelParams, seed: u64, n: usize) -> Result<SampleBatch> {
    sample_z_with(t_trunc, p, seed, n, &SamplerOptions::default())
}

pub fn sample_z_with(
    t_trunc: f64,
    p: &ModelParams,
    seed: u64,
    n: usize,
    opts: &SamplerOptions,
) -> Result<SampleBatch> {
    p.require_supercritical()?;
    check_radius(t_trunc, n)?;
    let km1 = p.k as f64 - 1.0;
    let sampler = CompoundSampler::new(p, t_trunc, true, opts, |s| -km1 * log_cosh(s))?;
    Ok(SampleBatch {
        params: *p,
        kind: SampleKind::Z,
        r_or_t: t_trunc,
        seed,
        options: *opts,
        values: run_chunks(n, seed, |rng| sampler.draw(rng)),
    })
}

/// The radial process on `[0, bound]` with a prebuilt inverse-transform table.
#[derive(Debug, Clone)]
pub struct RadialProcess {
    intensity: RadialIntensity,
    table: Option<QuantileTable>,
}

impl RadialProcess {
    pub fn new(bound: f64, p: &ModelParams) -> Result<Self> {
        let intensity = RadialIntensity::new(bound, p)?;
        let lambda = intensity.total();
        if lambda > MAX_EXPLICIT_POINTS {
            return Err(Error::domain(
                "RadialProcess",
                format!("expected point count {lambda:e} is too large to simulate explicitly"),
            ));
        }
        let table =
            (lambda > 0.0).then(|| QuantileTable::build(&intensity, lambda, p.codim(), |_| 0.0));
        Ok(RadialProcess { intensity, table })
    }

    pub fn intensity(&self) -> &RadialIntensity {
        &self.intensity
    }

    /// One realisation, sorted.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let Some(t) = &self.table else {
            return Vec::new();
        };
        let n: f64 = Poisson::new(t.lambda).expect("positive mean").sample(rng);
        let mut v: Vec<f64> = (0..n as u64).map(|_| t.distance(rng.random::<f64>())).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// `batches` independent realisations, reproducible from `seed`.
    pub fn sample_many(&self, seed: u64, batches: usize) -> Vec<Vec<f64>> {
        run_chunks(batches, seed, |rng| self.sample(rng))
    }
}

/// Sorted distances of one realisation of the radial process on `[0, bound]`.
pub fn sample_radial_process(bound: f64, p: &ModelParams, seed: u64) -> Result<Vec<f64>> {
    let proc = RadialProcess::new(bound, p)?;
    Ok(proc.sample(&mut chunk_rng(seed, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_chunk_independent() {
        let p = ModelParams::new(5, 4).unwrap();
        let a = sample_z(6.0, &p, 3, 600).unwrap();
        let b = sample_z(6.0, &p, 3, 600).unwrap();
        assert_eq!(a.values, b.values);
        let c = sample_z(6.0, &p, 4, 600).unwrap();
        assert_ne!(a.values, c.values);
        // a prefix of a longer run is the shorter run
        let d = sample_z(6.0, &p, 3, 300).unwrap();
        assert_eq!(&a.values[..300], &d.values[..]);
    }

    #[test]
    fn tiny_radius_gives_zero() {
        let p = ModelParams::new(5, 4).unwrap();
        let b = sample_f1(1e-9, &p, 1, 100).unwrap();
        assert!(b.values.iter().all(|v| v.abs() < 1e-12));
        assert!(sample_radial_process(1e-12, &p, 0).unwrap().is_empty());
    }

    #[test]
    fn invalid_arguments() {
        let p = ModelParams::new(5, 4).unwrap();
        assert!(sample_f1(0.0, &p, 1, 10).is_err());
        assert!(sample_f1(1.0, &p, 1, 0).is_err());
        assert!(sample_z(12.0, &ModelParams::new(5, 3).unwrap(), 1, 10).is_err());
        assert!(RadialProcess::new(20.0, &p).is_err());
    }
}
