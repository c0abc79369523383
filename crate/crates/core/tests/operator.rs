use std::f64::consts::PI;

use anisolab::operator::{r_bound_estimate, DiagOperator, InterpParams, Sector};
use anisolab::random::{random_vector, seeded};
use anisolab::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn positivity_is_uniform_in_truncation() {
    let sector = Sector::dyadic(0.0, -10, 20, 2, 1).unwrap();
    for m in [1, 2, 4, 8, 16] {
        let op = DiagOperator::dyadic(m, 1.0, 2.0).unwrap();
        assert!(op.positivity_constant(&sector).unwrap() <= 1.0 + 1e-9, "M = {m}");
    }
}

#[test]
fn positivity_grows_under_refinement() {
    let op = DiagOperator::new(&[0.5, 3.0, 7.0], 2.0).unwrap();
    let phi = 0.75 * PI;
    let mut last = 0.0;
    for level in 0..4u32 {
        let sector = Sector::dyadic(phi, -6, 6, 1 << level, (1 << (level + 1)) + 1).unwrap();
        let m = op.positivity_constant(&sector).unwrap();
        assert!(m >= last * (1.0 - 1e-15), "level {level}: {m} < {last}");
        last = m;
    }
}

#[test]
fn canonical_norm_is_euclidean_at_half() {
    // with θ = 1/2 and σ = q = 2 the integral splits per component into
    // |v_m|² ∫ d_m dy / (d_m + y)² = |v_m|², whatever d_m is
    let op = DiagOperator::dyadic(8, 1.0, 2.0).unwrap();
    let ip = InterpParams::new(0.5, 2.0).unwrap();
    let mut rng = seeded(11);
    for _ in 0..100 {
        let v = random_vector(8, &mut rng);
        let n = op.interpolation_norm(&v, &ip).unwrap();
        assert!((n / op.norm(&v) - 1.0).abs() < 2e-3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn resolvent_identity(seed in any::<u64>(), xr in 0.0f64..50.0, xi in -50.0f64..50.0, yr in 0.0f64..50.0, yi in -50.0f64..50.0) {
        let op = DiagOperator::dyadic(6, 1.0, 2.0).unwrap();
        let (x, y) = (c(xr, xi), c(yr, yi));
        let v = random_vector(6, &mut seeded(seed));
        let lhs: Vec<Complex64> = op.resolvent_apply(x, &v).unwrap().iter()
            .zip(op.resolvent_apply(y, &v).unwrap())
            .map(|(a, b)| a - b)
            .collect();
        let rhs = op.resolvent_apply(x, &op.resolvent_apply(y, &v).unwrap()).unwrap();
        for (l, r) in lhs.iter().zip(&rhs) {
            prop_assert!((l - r * (y - x)).norm() <= 1e-12);
        }
    }

    #[test]
    fn fractional_exponent_law(seed in any::<u64>(), theta in -2.0f64..2.0) {
        let op = DiagOperator::dyadic(8, 1.0, 2.0).unwrap();
        let v = random_vector(8, &mut seeded(seed));
        let split = op.fractional_apply(1.0 - theta, &op.fractional_apply(theta, &v).unwrap()).unwrap();
        let whole = op.apply(&v).unwrap();
        for (a, b) in split.iter().zip(&whole) {
            prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0));
        }
    }

    #[test]
    fn interpolation_norm_is_homogeneous(seed in any::<u64>(), cr in -10.0f64..10.0, ci in -10.0f64..10.0, theta in 0.05f64..0.95) {
        let op = DiagOperator::dyadic(5, 1.0, 3.0).unwrap();
        let ip = InterpParams::new(theta, 2.0).unwrap();
        let v = random_vector(5, &mut seeded(seed));
        let s = c(cr, ci);
        let scaled: Vec<Complex64> = v.iter().map(|x| x * s).collect();
        let a = op.interpolation_norm(&scaled, &ip).unwrap();
        let b = s.norm() * op.interpolation_norm(&v, &ip).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn canonical_norm_ignores_scale(d in 1e-3f64..1e3, theta in 0.2f64..0.8) {
        // y = d s turns the integral for diag(d) into the one for diag(1)
        // wide y range so truncation does not mask the invariance
        let ip = InterpParams::with_y_grid(theta, 2.0, 1e-14, 1e14, 800).unwrap();
        let v = [c(1.0, 0.0)];
        let a = DiagOperator::scalar(d).unwrap().interpolation_norm(&v, &ip).unwrap();
        let b = DiagOperator::scalar(1.0).unwrap().interpolation_norm(&v, &ip).unwrap();
        prop_assert!((a / b - 1.0).abs() < 2e-2);
    }

    #[test]
    fn singleton_r_bound_is_norm_ratio(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let op = DiagOperator::new(&[1.5, 0.25, 9.0], 2.0).unwrap();
        let v = random_vector(3, &mut rng);
        let r = r_bound_estimate(std::slice::from_ref(&op), std::slice::from_ref(&v), 0, 0).unwrap();
        let exact = op.norm(&op.apply(&v).unwrap()) / op.norm(&v);
        prop_assert!((r - exact).abs() <= 1e-12 * exact);
    }
}
