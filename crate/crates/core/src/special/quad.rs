//! Adaptive Gauss–Kronrod quadrature (21-point Kronrod extension of the
//! 10-point Gauss rule) on finite and semi-infinite intervals.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_634_767,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and subdivision limit for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_subdivisions: 4000,
        }
    }
}

impl QuadSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = QuadSpec {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_subdivisions < 1 {
            return Err(Error::domain(
                "QuadSpec",
                "requires abs_tol > 0, rel_tol > 0 and max_subdivisions >= 1",
            ));
        }
        Ok(())
    }
}

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

struct Segment<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Segment<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<V> Eq for Segment<V> {}
impl<V> PartialOrd for Segment<V> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Segment<V> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> Segment<V> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = V::zero();
    let mut res_abs = fc.magnitude() * WGK[10];
    let mut fv1 = [V::zero(); 10];
    let mut fv2 = [V::zero(); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k = res_k + (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            res_g = res_g + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).magnitude();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }

    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut error = ((res_k - res_g) * half).magnitude();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (1.0f64).min((200.0 * error / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, error }
}

/// Result of an adaptive integration together with its error estimate.
#[derive(Debug, Clone, Copy)]
pub struct QuadOutcome<V> {
    pub value: V,
    pub error: f64,
    pub subdivisions: usize,
}

/// Adaptive bisection driven by a max-heap on segment error.
pub fn integrate<V: QuadValue, F: FnMut(f64) -> V>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadSpec,
) -> Result<QuadOutcome<V>> {
    spec.validate()?;
    if a == b {
        return Ok(QuadOutcome {
            value: V::zero(),
            error: 0.0,
            subdivisions: 0,
        });
    }
    let first = gk21(&mut f, a, b);
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    // segments too narrow to split any further
    let mut frozen: Vec<Segment<V>> = Vec::new();
    let mut frozen_err = 0.0;
    let mut subdivisions = 1;

    loop {
        // never ask for less than the rule's own roundoff level
        let tol = spec
            .abs_tol
            .max(spec.rel_tol.max(100.0 * f64::EPSILON) * total.magnitude());
        if total_err <= tol || !total_err.is_finite() {
            break;
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Convergence {
                estimate: total.magnitude(),
                error: total_err,
                subdivisions,
            });
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        let mid = 0.5 * (worst.a + worst.b);
        let width = (worst.b - worst.a).abs();
        if width <= 1e3 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE)
            || mid == worst.a
            || mid == worst.b
        {
            frozen_err += worst.error;
            frozen.push(worst);
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let left = gk21(&mut f, worst.a, mid);
        let right = gk21(&mut f, mid, worst.b);
        subdivisions += 1;
        heap.push(left);
        heap.push(right);
        // re-sum rather than update incrementally so cancellation does not drift
        let (mut v, mut e) = (V::zero(), frozen_err);
        for s in heap.iter().chain(frozen.iter()) {
            v = v + s.value;
            e += s.error;
        }
        total = v;
        total_err = e;
    }

    if !total.magnitude().is_finite() {
        return Err(Error::Convergence {
            estimate: total.magnitude(),
            error: f64::INFINITY,
            subdivisions,
        });
    }
    let tol = spec.abs_tol.max(spec.rel_tol * total.magnitude());
    if total_err > tol && frozen_err > 0.0 && frozen_err > 0.5 * total_err {
        // Roundoff floor: accept when the remaining error is at the level of
        // the integrand's own magnitude times machine precision.
        let floor = 1e3 * f64::EPSILON * total.magnitude().max(spec.abs_tol);
        if total_err > floor.max(tol) {
            return Err(Error::Convergence {
                estimate: total.magnitude(),
                error: total_err,
                subdivisions,
            });
        }
    }
    Ok(QuadOutcome {
        value: total,
        error: total_err,
        subdivisions,
    })
}

/// `int_lo^hi f(x) dx`.
pub fn quad_finite<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadSpec) -> Result<f64> {
    Ok(integrate(f, lo, hi, spec)?.value)
}

/// Complex-valued counterpart of [`quad_finite`].
pub fn quad_finite_complex<F: FnMut(f64) -> Complex64>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &QuadSpec,
) -> Result<Complex64> {
    Ok(integrate(f, lo, hi, spec)?.value)
}

/// Maps `[0, 1)` onto `[lo, inf)` by `x = lo + t / (1 - t)`; the Jacobian is
/// `1 / (1 - t)^2`. An exponentially decaying integrand becomes one whose
/// derivatives all vanish at `t = 1`.
fn semi_infinite<V: QuadValue, F: FnMut(f64) -> V>(
    mut f: F,
    lo: f64,
    spec: &QuadSpec,
) -> Result<QuadOutcome<V>> {
    integrate(
        move |t: f64| {
            let u = 1.0 - t;
            if u <= 0.0 {
                return V::zero();
            }
            let x = lo + t / u;
            let v = f(x);
            if v.magnitude() == 0.0 {
                v
            } else {
                v * (1.0 / (u * u))
            }
        },
        0.0,
        1.0,
        spec,
    )
}

/// `int_lo^inf f(x) dx` for exponentially decaying `f`.
pub fn quad_semi_infinite<F: FnMut(f64) -> f64>(f: F, lo: f64, spec: &QuadSpec) -> Result<f64> {
    Ok(semi_infinite(f, lo, spec)?.value)
}

/// Complex-valued counterpart of [`quad_semi_infinite`].
pub fn quad_semi_infinite_complex<F: FnMut(f64) -> Complex64>(
    f: F,
    lo: f64,
    spec: &QuadSpec,
) -> Result<Complex64> {
    Ok(semi_infinite(f, lo, spec)?.value)
}

/// A fixed composite Kronrod rule: nodes and weights for repeated
/// integration of many integrands against the same measure.
#[derive(Debug, Clone, Default)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    /// Panels between consecutive breakpoints.
    pub fn on_breaks(breaks: &[f64]) -> Self {
        let mut rule = CompositeRule::default();
        for w in breaks.windows(2) {
            rule.push_panel(w[0], w[1]);
        }
        rule
    }

    /// `panels` equal panels on `[a, b]`.
    pub fn uniform(a: f64, b: f64, panels: usize) -> Self {
        let breaks: Vec<f64> = (0..=panels)
            .map(|i| a + (b - a) * (i as f64) / (panels as f64))
            .collect();
        Self::on_breaks(&breaks)
    }

    fn push_panel(&mut self, a: f64, b: f64) {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for j in 0..10 {
            self.nodes.push(center - half * XGK[j]);
            self.weights.push(half * WGK[j]);
        }
        self.nodes.push(center);
        self.weights.push(half * WGK[10]);
        for j in (0..10).rev() {
            self.nodes.push(center + half * XGK[j]);
            self.weights.push(half * WGK[j]);
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simple_integrals() {
        let spec = QuadSpec::default();
        assert!((quad_finite(|x| x, 0.0, 1.0, &spec).unwrap() - 0.5).abs() < 1e-15);
        let e = quad_semi_infinite(|s| (-s).exp(), 0.0, &spec).unwrap();
        assert!((e - 1.0).abs() < 1e-13);
        let c = quad_semi_infinite(|s| s.cosh().powi(-3), 0.0, &spec).unwrap();
        assert!((c - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_and_empty_intervals() {
        let spec = QuadSpec::default();
        assert_eq!(quad_finite(|x| x, 2.0, 2.0, &spec).unwrap(), 0.0);
        let r = quad_finite(|x| x * x, 1.0, 0.0, &spec).unwrap();
        assert!((r + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn endpoint_singularity() {
        let spec = QuadSpec::default();
        let v = quad_finite(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &spec).unwrap();
        assert!((v - 2.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn complex_integrand() {
        let spec = QuadSpec::default();
        let v = quad_finite_complex(|x| Complex64::new(0.0, x).exp(), 0.0, PI, &spec).unwrap();
        assert!((v - Complex64::new(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn exhausted_subdivisions_reports_estimate() {
        let spec = QuadSpec::new(1e-15, 1e-15, 3).unwrap();
        let err = quad_finite(|x: f64| (1.0 / x).sin(), 1e-4, 1.0, &spec).unwrap_err();
        match err {
            Error::Convergence {
                error,
                subdivisions,
                ..
            } => {
                assert!(error > 0.0);
                assert_eq!(subdivisions, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_spec() {
        assert!(QuadSpec::new(0.0, 1e-10, 10).is_err());
        assert!(QuadSpec::new(1e-10, 1e-10, 0).is_err());
    }

    #[test]
    fn composite_rule_integrates_polynomials() {
        let rule = CompositeRule::uniform(0.0, 3.0, 4);
        let v: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * x.powi(7))
            .sum();
        assert!((v - 3f64.powi(8) / 8.0).abs() < 1e-10);
    }
}
