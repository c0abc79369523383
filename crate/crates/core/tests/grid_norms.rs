use std::f64::consts::PI;

use anisolab::grid_norms::{
    ap_constant_estimate, mixed_norm, AxisWeight, Cube, Field, Grid, MixedExponents, Weight,
};
use anisolab::random::{band_limited_field, seeded};
use anisolab::{Complex64, Error};
use proptest::prelude::*;

#[test]
fn grid_construction() {
    let g = Grid::make(1, &[16], &[2.0 * PI]).unwrap();
    for (j, x) in g.nodes(0).into_iter().enumerate() {
        assert!((x - j as f64 * PI / 8.0).abs() < 1e-15);
    }
    let g = Grid::make(2, &[8, 16], &[2.0 * PI, 4.0 * PI]).unwrap();
    assert_eq!(g.len(), 128);
    assert!((g.spacing(1) - PI / 4.0).abs() < 1e-15);
    assert!(matches!(
        Grid::make(1, &[5], &[1.0]),
        Err(Error::InvalidDimension(_))
    ));
    assert!(matches!(
        Grid::make(1, &[2], &[1.0]),
        Err(Error::InvalidDimension(_))
    ));
    assert!(matches!(
        Grid::make(1, &[8], &[0.0]),
        Err(Error::InvalidDimension(_))
    ));
}

#[test]
fn cosine_has_two_half_coefficients() {
    let g = Grid::cube(1, 16).unwrap();
    let s = Field::from_real_fn(&g, 1, |x, _| x[0].cos()).forward().unwrap();
    for lin in 0..16 {
        let expected = if g.mode(0, lin).abs() == 1 { 0.5 } else { 0.0 };
        assert!((s.value(lin, 0) - Complex64::new(expected, 0.0)).norm() < 1e-15);
    }
    let zero = Field::zeros(&g, 2).forward().unwrap();
    assert_eq!(zero.max_abs(), 0.0);
}

#[test]
fn transforms_check_side() {
    let g = Grid::cube(1, 8).unwrap();
    let u = Field::zeros(&g, 1);
    assert!(matches!(u.inverse(), Err(Error::SideMismatch { .. })));
    assert!(matches!(
        u.forward().unwrap().forward(),
        Err(Error::SideMismatch { .. })
    ));
}

#[test]
fn derivative_examples() {
    let g = Grid::cube(1, 16).unwrap();
    let u = Field::from_real_fn(&g, 1, |x, _| x[0].cos());
    assert_eq!(u.spectral_derivative(&[0]).unwrap(), u);
    let exact = Field::from_real_fn(&g, 1, |x, _| -x[0].cos());
    assert!(u.spectral_derivative(&[2]).unwrap().max_abs_diff(&exact) < 1e-12);

    let g = Grid::cube(2, 16).unwrap();
    let u = Field::from_real_fn(&g, 1, |x, _| (2.0 * x[0]).sin() * x[1].cos());
    let exact = Field::from_real_fn(&g, 1, |x, _| -2.0 * (2.0 * x[0]).cos() * x[1].sin());
    assert!(u.spectral_derivative(&[1, 1]).unwrap().max_abs_diff(&exact) < 1e-12);
}

#[test]
fn mixed_norm_anchors() {
    let g = Grid::cube(2, 16).unwrap();
    let one = Field::from_real_fn(&g, 1, |_, _| 1.0);
    let p2 = MixedExponents::uniform(2, 2.0).unwrap();
    assert!((mixed_norm(&one, &p2, &Weight::Unit, 2.0).unwrap() - 2.0 * PI).abs() < 1e-12);

    let g = Grid::cube(1, 16).unwrap();
    let c = Field::from_real_fn(&g, 1, |x, _| x[0].cos());
    let p2 = MixedExponents::uniform(1, 2.0).unwrap();
    assert!((mixed_norm(&c, &p2, &Weight::Unit, 2.0).unwrap() - PI.sqrt()).abs() < 1e-12);

    // |cos| is not smooth, so the rectangle rule needs a fine grid
    let g = Grid::cube(1, 4096).unwrap();
    let c = Field::from_real_fn(&g, 1, |x, _| x[0].cos());
    let p1 = MixedExponents::uniform(1, 1.0).unwrap();
    assert!((mixed_norm(&c, &p1, &Weight::Unit, 2.0).unwrap() - 4.0).abs() < 1e-5);
}

#[test]
fn weight_must_be_positive() {
    let g = Grid::cube(1, 8).unwrap();
    let u = Field::from_real_fn(&g, 1, |_, _| 1.0);
    let p = MixedExponents::uniform(1, 2.0).unwrap();
    let bad = Weight::Product(vec![AxisWeight::Table(vec![-1.0; 8])]);
    assert!(matches!(
        mixed_norm(&u, &p, &bad, 2.0),
        Err(Error::NonPositiveWeight(_))
    ));
}

#[test]
fn ap_anchors() {
    let unit = ap_constant_estimate(
        &Weight::Unit,
        2.5,
        &[
            Cube::interval(0.0, 1.0).unwrap(),
            Cube::interval(-3.0, 0.5).unwrap(),
        ],
    )
    .unwrap();
    assert!((unit.constant - 1.0).abs() < 1e-12);

    let sqrt = Weight::Product(vec![AxisWeight::AbsPower(0.5)]);
    let est = ap_constant_estimate(&sqrt, 2.0, &[Cube::interval(0.0, 1.0).unwrap()]).unwrap();
    assert!((est.constant - 4.0 / 3.0).abs() < 1e-8);

    // |x|^3 with p = 2: the dual average of |x|^{-3} diverges on every [0, 2^-j]
    let cubic = Weight::Product(vec![AxisWeight::AbsPower(3.0)]);
    let cubes: Vec<Cube> = (0..=10)
        .map(|j| Cube::interval(0.0, (-(j as f64)).exp2()).unwrap())
        .collect();
    let est = ap_constant_estimate(&cubic, 2.0, &cubes).unwrap();
    assert!(est.divergent);
    assert!(est.constant.is_infinite());
}

#[test]
fn ap_estimate_grows_with_cube_family() {
    let w = Weight::Product(vec![AxisWeight::PeriodicPower {
        alpha: 0.7,
        period: 2.0 * PI,
    }]);
    let cubes: Vec<Cube> = (0..8)
        .map(|j| Cube::interval(-0.3 * j as f64, 0.5 + 0.2 * j as f64).unwrap())
        .collect();
    let mut last = 0.0;
    for k in 1..=cubes.len() {
        let c = ap_constant_estimate(&w, 2.0, &cubes[..k]).unwrap().constant;
        assert!(c >= last);
        last = c;
    }
}

fn random_grid(n: usize, seed: u64) -> Grid {
    let sizes: Vec<usize> = (0..n).map(|k| 8 << ((seed as usize + k) % 3)).collect();
    let periods: Vec<f64> = (0..n).map(|k| 1.0 + k as f64 + (seed % 7) as f64).collect();
    Grid::new(&sizes, &periods).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn round_trip_is_identity(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3) {
        let g = random_grid(n, seed);
        let u = band_limited_field(&g, m, &mut seeded(seed));
        let back = u.forward().unwrap().inverse().unwrap();
        prop_assert_eq!(back.side(), u.side());
        prop_assert!(back.max_abs_diff(&u) <= 1e-12 * u.max_abs().max(1.0));
    }

    #[test]
    fn derivatives_commute(seed in any::<u64>(), a in 0u32..3, b in 0u32..3, c in 0u32..3, d in 0u32..3) {
        let g = Grid::make(2, &[16, 16], &[2.0 * PI, 3.0]).unwrap();
        let u = band_limited_field(&g, 1, &mut seeded(seed));
        let stepwise = u.spectral_derivative(&[a, b]).unwrap().spectral_derivative(&[c, d]).unwrap();
        let direct = u.spectral_derivative(&[a + c, b + d]).unwrap();
        let scale = direct.max_abs().max(1.0);
        prop_assert!(stepwise.max_abs_diff(&direct) <= 1e-10 * scale);
    }

    #[test]
    fn norm_is_homogeneous(seed in any::<u64>(), c in -50.0f64..50.0, p in 1.0f64..6.0, q in 1.0f64..4.0) {
        let g = Grid::cube(2, 8).unwrap();
        let u = band_limited_field(&g, 3, &mut seeded(seed));
        let exps = MixedExponents::new(&[p, 2.0]).unwrap();
        let w = Weight::power(&[0.5, 0.3], g.periods()).unwrap();
        let base = mixed_norm(&u, &exps, &w, q).unwrap();
        let scaled = mixed_norm(&(&u * c), &exps, &w, q).unwrap();
        prop_assert!((scaled - c.abs() * base).abs() <= 1e-12 * (c.abs() * base).max(1e-300));
    }
}
