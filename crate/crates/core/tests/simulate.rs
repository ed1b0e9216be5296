mod common;

use common::*;
use hyperflat::geometry::a11_scaled;
use hyperflat::limitlaw::{cf_std, sigma2, InversionSpec};
use hyperflat::simulate::*;
use hyperflat::ModelParams;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_chacha::ChaCha8Rng;

#[test]
fn intensity_closed_form_and_inverse() {
    let p = ModelParams::new(2, 1).unwrap();
    assert_eq!(cumulative_intensity(0.0, &p).unwrap(), 0.0);
    for s in [0.5f64, 2.0, 5.0] {
        assert!(rel(cumulative_intensity(s, &p).unwrap(), 2.0 * s.sinh()) < 1e-13);
        let l = cumulative_intensity(s, &p).unwrap();
        assert!((inverse_cumulative_intensity(l, &p).unwrap() - s).abs() < 1e-10);
    }
    let p = ModelParams::new(7, 5).unwrap();
    let mut prev = 0.0;
    for i in 1..30 {
        let v = cumulative_intensity(0.2 * i as f64, &p).unwrap();
        assert!(v > prev);
        prev = v;
    }
}

#[test]
fn radial_counts_and_distances() {
    let p = ModelParams::new(5, 4).unwrap();
    let bound = 2.0;
    let proc = RadialProcess::new(bound, &p).unwrap();
    let lambda = cumulative_intensity(bound, &p).unwrap();
    assert!(rel(proc.intensity().total(), lambda) < 1e-12);
    let runs = proc.sample_many(11, 10_000);
    let counts: Vec<f64> = runs.iter().map(|r| r.len() as f64).collect();
    let st = SampleStats::from_values(&counts).unwrap();
    assert!((st.mean - lambda).abs() <= 3.0 * st.stderr_mean, "{} vs {lambda}", st.mean);

    let pooled: Vec<f64> = runs.iter().flatten().copied().take(100_000).collect();
    assert_eq!(pooled.len(), 100_000);
    let d = ks_distance(&pooled, |s| proc.intensity().at(s) / lambda).unwrap();
    assert!(ks_p_value(d, pooled.len()) > 0.01, "KS {d}");
    assert!(runs.iter().all(|r| r.windows(2).all(|w| w[0] <= w[1])));
}

#[test]
fn disjoint_intervals_are_independent_poisson() {
    let p = ModelParams::new(4, 3).unwrap();
    let (a, b) = (1.0, 2.0);
    let proc = RadialProcess::new(b, &p).unwrap();
    let la = cumulative_intensity(a, &p).unwrap();
    let lb = cumulative_intensity(b, &p).unwrap() - la;
    let runs = proc.sample_many(5, 10_000);
    let n1: Vec<f64> = runs.iter().map(|r| r.iter().filter(|&&s| s <= a).count() as f64).collect();
    let n2: Vec<f64> = runs.iter().map(|r| r.iter().filter(|&&s| s > a).count() as f64).collect();
    for (n, l) in [(&n1, la), (&n2, lb)] {
        let st = SampleStats::from_values(n).unwrap();
        assert!((st.mean - l).abs() <= 3.0 * st.stderr_mean);
        assert!((st.variance - l).abs() <= 3.0 * st.stderr_variance);
    }
    // chi-square test of independence on a 3x3 table split at the medians
    let cut = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        (s[s.len() / 3], s[2 * s.len() / 3])
    };
    let (c1, c2) = (cut(&n1), cut(&n2));
    let bin = |x: f64, c: (f64, f64)| if x < c.0 { 0 } else if x < c.1 { 1 } else { 2 };
    let mut table = [[0.0f64; 3]; 3];
    for (x, y) in n1.iter().zip(&n2) {
        table[bin(*x, c1)][bin(*y, c2)] += 1.0;
    }
    let n = n1.len() as f64;
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..3).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let mut chi = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let e = rows[i] * cols[j] / n;
            chi += (table[i][j] - e).powi(2) / e;
        }
    }
    // 99th percentile of chi-square with 4 degrees of freedom
    assert!(chi < 13.277, "chi-square {chi}");
}

#[test]
fn z_empirical_cf_matches_inversion_cf() {
    let p = ModelParams::limit(5, 4).unwrap();
    let n = 100_000;
    let s = sigma2(&p).unwrap().sqrt();
    let z = sample_z(12.0, &p, 2, n).unwrap();
    let st = z.stats().unwrap();
    assert!(st.mean.abs() <= 3.0 * st.stderr_mean);
    assert!((st.variance - s * s).abs() <= 3.0 * st.stderr_variance);
    for t in [0.5, 1.0, 2.0, 4.0] {
        let emp = z
            .values
            .iter()
            .map(|x| Complex64::from_polar(1.0, t * x / s))
            .sum::<Complex64>()
            / n as f64;
        let want = cf_std(t, &p, &InversionSpec::default()).unwrap();
        assert!((emp - want).norm() <= 4.0 / (n as f64).sqrt(), "t={t}: {emp} {want}");
    }
}

#[test]
fn yr_centred_with_limit_variance() {
    let p = ModelParams::limit(5, 4).unwrap();
    let r = 10.0;
    let b = sample_yr(r, &p, 9, 20_000).unwrap();
    let st = b.stats().unwrap();
    let v = a11_scaled(r, &p, 2.0 * r * 3.0).unwrap();
    assert!(st.mean.abs() <= 3.0 * st.stderr_mean);
    assert!((st.variance - v).abs() <= 3.0 * st.stderr_variance, "{} {v}", st.variance);
}

#[test]
fn ks_of_exact_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let v: Vec<f64> = (0..100_000)
        .map(|_| {
            let u: f64 = rng.random();
            (u / (1.0 - u)).ln()
        })
        .collect();
    let cdf = |x: f64| 1.0 / (1.0 + (-x).exp());
    let d = ks_distance(&v, cdf).unwrap();
    assert!(d < 0.01, "{d}");
    // standard normal draws shifted by one, against a logistic fit of the normal CDF
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let shifted: Vec<f64> = (0..10_000).map(|_| rng.sample::<f64, _>(StandardNormal) + 1.0).collect();
    let normal_like = |x: f64| 1.0 / (1.0 + (-1.702 * x).exp());
    assert!(ks_distance(&shifted, normal_like).unwrap() > 0.3);
    assert!((ks_distance(&[0.0], cdf).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn tiny_radius_is_empty() {
    let p = ModelParams::new(5, 4).unwrap();
    assert!(sample_radial_process(1e-9, &p, 3).unwrap().is_empty());
    let b = sample_f1(1e-6, &p, 3, 100).unwrap();
    assert!(b.values.iter().all(|&v| v.abs() < 1e-12), "{:?}", &b.values[..4]);
}

#[test]
fn batches_do_not_depend_on_thread_count() {
    let p = ModelParams::limit(4, 3).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sample_yr(5.0, &p, 42, 2000).unwrap().values)
    };
    assert_eq!(run(1), run(3));
}
