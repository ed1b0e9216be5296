mod common;

use common::*;
use hyperflat::limitlaw::*;
use hyperflat::special::{quad_finite, QuadSpec};
use hyperflat::ModelParams;
use num_complex::Complex64;

fn lp(d: u32, k: u32) -> ModelParams {
    ModelParams::limit(d, k).unwrap()
}

#[test]
fn regime_errors_name_the_condition() {
    let p = ModelParams::new(4, 2).unwrap();
    let e = cumulant_std(3, &p).unwrap_err();
    assert!(e.to_string().contains("2k > d+1"));
    assert!(sigma2(&p).is_err());
    assert!(cf_exponent_series(1.0, &p, 26).is_err());
}

#[test]
fn sigma2_matches_oracle_quadrature() {
    for (d, k) in LIMIT_GRID {
        let want = omega(d - k) * cosh_sinh_integral(2.0 - k as f64, (d - k - 1) as f64);
        assert!(rel(sigma2(&lp(d, k)).unwrap(), want) < 1e-10);
    }
}

#[test]
fn cumulant_examples() {
    let p = lp(4, 3);
    let pi = std::f64::consts::PI;
    assert!((cumulant_std(3, &p).unwrap() - 1.0 / (2.0 * pi.sqrt())).abs() < 1e-14);
    assert!((cumulant_std(4, &p).unwrap() - 3.0 / (8.0 * pi)).abs() < 1e-14);
    for (d, k) in LIMIT_GRID {
        let p = lp(d, k);
        let s = sigma2(&p).unwrap().sqrt();
        for n in 2..=10 {
            let a = cumulant_std(n, &p).unwrap();
            let b = cumulant_raw(n, &p).unwrap() / s.powi(n as i32);
            assert!((a - b).abs() < 1e-10 * a.max(1.0));
        }
    }
}

#[test]
fn series_examples() {
    let p = lp(5, 4);
    let s = cf_exponent_series(3.0, &p, 26).unwrap();
    let q = cf_exponent_quadrature(3.0, &p).unwrap();
    assert!((s - q).norm() <= 1e-8);
    let p = lp(4, 3);
    let s = cf_exponent_series(2.0, &p, 26).unwrap();
    let q = cf_exponent_quadrature(2.0, &p).unwrap();
    assert!((s - q).norm() <= 1e-8);
    let direct = cf_std(5.0, &p, &InversionSpec::default()).unwrap();
    assert!((direct - cf_exponent_quadrature(5.0, &p).unwrap().exp()).norm() <= 1e-6);
}

#[test]
fn quadrature_exponent_properties() {
    for (d, k) in LIMIT_GRID {
        let p = lp(d, k);
        assert_eq!(cf_exponent_quadrature(0.0, &p).unwrap(), Complex64::new(0.0, 0.0));
        for t in [-7.0, -1.0, 0.5, 4.0, 12.0] {
            let a = cf_exponent_quadrature(t, &p).unwrap();
            let b = cf_exponent_quadrature(-t, &p).unwrap();
            assert!(a.re <= 0.0);
            assert!((a - b.conj()).norm() < 1e-12);
        }
    }
}

#[test]
fn cf_std_conjugate_symmetry() {
    let spec = InversionSpec::default();
    for (d, k) in LIMIT_GRID {
        let p = lp(d, k);
        for i in 0..40 {
            let t = 0.25 * i as f64;
            let a = cf_std(t, &p, &spec).unwrap();
            let b = cf_std(-t, &p, &spec).unwrap();
            assert!((a - b.conj()).norm() <= 1e-12);
        }
    }
}

/// `int_0^1 f(y) rho(y) dy` with substitutions that remove the endpoint
/// singularities: `y = v^4` near zero and `y = 1 - w^2` near one.
fn levy_integral<F: Fn(f64) -> f64>(f: F, p: &ModelParams) -> f64 {
    let rho = |y: f64| levy_density(y, p).unwrap();
    let lo = gl(|v: f64| 4.0 * v.powi(3) * f(v.powi(4)) * rho(v.powi(4)), 0.0, 0.5f64.powf(0.25), 400);
    let hi = gl(|w: f64| 2.0 * w * f(1.0 - w * w) * rho(1.0 - w * w), 0.0, 0.5f64.sqrt(), 400);
    lo + hi
}

#[test]
fn levy_pushforward() {
    // sin(y) ~ y near zero is not integrable against rho; 1 - cos(y) is.
    let tests: [(&str, fn(f64) -> f64); 4] = [
        ("y^2", |y| y * y),
        ("y^3", |y| y * y * y),
        ("y^4", |y| y.powi(4)),
        ("1-cos", |y| 2.0 * (0.5 * y).sin().powi(2)),
    ];
    for (d, k) in LIMIT_GRID {
        let p = lp(d, k);
        let (df, kf) = (d as f64, k as f64);
        for (name, f) in tests {
            let left = levy_integral(f, &p);
            let right = omega(d - k)
                * gl(
                    |s: f64| f(s.cosh().powf(1.0 - kf)) * s.cosh().powf(kf) * s.sinh().powf(df - kf - 1.0),
                    0.0,
                    60.0,
                    1200,
                );
            assert!(rel(left, right) < 1e-8, "({d},{k}) {name}: {left} {right}");
        }
        let var = levy_integral(|y| y * y, &p);
        assert!(rel(var, sigma2(&p).unwrap()) < 1e-8);
        let c3 = cumulant_std(3, &p).unwrap() * sigma2(&p).unwrap().powf(1.5);
        assert!(rel(levy_integral(|y| y * y * y, &p), c3) < 1e-8);
    }
}

#[test]
fn cf_decay_lower_bound() {
    let spec = QuadSpec::default();
    for (d, k) in LIMIT_GRID {
        let p = lp(d, k);
        for t in [2.0f64, 5.0, 10.0, 20.0] {
            let lhs = -cf_exponent_raw(t, &p, &spec).unwrap().re;
            let rhs = t * t / 4.0
                * quad_finite(|y| y * y * levy_density(y, &p).unwrap(), 0.0, 1.0 / t, &spec).unwrap();
            assert!(lhs >= rhs, "({d},{k}) t={t}: {lhs} < {rhs}");
        }
    }
}

#[test]
fn density_example_five_four() {
    let p = lp(5, 4);
    let t = density(&p, &InversionSpec::default(), &uniform_grid(-6.0, 6.0, 0.01)).unwrap();
    assert!((t.integral() - 1.0).abs() < 1e-3);
    assert!(t.mean().abs() < 5e-3);
    assert!((t.second_moment() - 1.0).abs() < 2e-2);
    assert!(t.residue_within_tolerance());
    assert!(t.cdf.windows(2).all(|w| w[1] >= w[0] - 1e-9));
    assert!((t.cdf.last().unwrap() - 1.0).abs() < 1e-3);
    assert_eq!(t.max_density, t.f.iter().copied().fold(f64::MIN, f64::max));
}

#[test]
fn trapezoid_rule_cancels_imaginary_residue() {
    // With k = d-1 and large d, |psi(T)| is large enough that the unpaired
    // left-point node at -T leaves an imaginary residue above 1e-6.
    let p = lp(12, 11);
    let xs = uniform_grid(-6.0, 6.0, 0.01);
    let left = density(&p, &InversionSpec::default(), &xs).unwrap();
    let trap = density(&p, &InversionSpec::default().with_rule(InversionRule::Trapezoid), &xs).unwrap();
    assert!(left.max_imag_residue > 1e-6);
    assert!(trap.max_imag_residue < 1e-12);
    let t = 10.0;
    let bound = t / (std::f64::consts::PI * 200.0)
        * cf_std(t, &p, &InversionSpec::default()).unwrap().norm();
    assert!(left.max_imag_residue <= bound * (1.0 + 1e-9));
}

#[test]
fn finite_radius_cf() {
    let p = lp(5, 4);
    assert_eq!(cf_yr(0.0, 4.0, &p).unwrap(), Complex64::new(1.0, 0.0));
    for t in [-5.0, 0.5, 2.0, 9.0] {
        assert!(cf_yr(t, 5.0, &p).unwrap().norm() <= 1.0);
    }
    let a = cf_yr(2.0, 12.0, &p).unwrap();
    let b = cf_y(2.0, &p).unwrap();
    assert!((a - b).norm() <= 1e-4);
}

#[test]
fn esseen_bound_shrinks_with_radius() {
    let p = lp(5, 4);
    let y = y_density(&p, &InversionSpec::default(), &uniform_grid(-8.0, 14.0, 0.01)).unwrap();
    let b4 = esseen_parts(4.0, &p, 10.0, &y).unwrap();
    let b8 = esseen_parts(8.0, &p, 10.0, &y).unwrap();
    assert!(b4.total >= 0.0 && b8.total >= 0.0);
    assert!(b8.total < b4.total);
    assert!(b8.integral < b4.integral);
}

#[test]
fn scan_along_k_equals_d_minus_one() {
    let pairs: Vec<_> = (5..=15).map(|d| lp(d, d - 1)).collect();
    let rows = cumulant_scan(3, &pairs).unwrap();
    assert!(rows.windows(2).all(|w| w[1].value > w[0].value));
    let one = cumulant_scan(3, &[lp(4, 3)]).unwrap();
    assert!((one[0].value - 0.5 / std::f64::consts::PI.sqrt()).abs() < 1e-14);
}
