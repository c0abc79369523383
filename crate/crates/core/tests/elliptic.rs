use std::f64::consts::PI;

use anisolab::elliptic::{
    coercivity_report, residual, resolvent_sweep, solve_perturbed, solve_principal, Coefficient,
    EllipticProblem, LowerTerm, PerturbedOptions,
};
use anisolab::random::{band_limited_batch, band_limited_field, seeded};
use anisolab::{Complex64, DiagOperator, Error, Field, Grid, NormSpec, Side};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn line(n: usize) -> Grid {
    Grid::new(&[n], &[2.0 * PI]).unwrap()
}

fn model(lambda: f64) -> EllipticProblem {
    EllipticProblem::principal(DiagOperator::scalar(1.0).unwrap(), &[1.0], c(lambda, 0.0), &[1]).unwrap()
}

#[test]
fn single_mode_solutions() {
    let g = line(16);
    let p = model(0.0);
    for (k, den) in [(1.0, 2.0), (2.0, 5.0)] {
        let f = Field::from_real_fn(&g, 1, |x, _| (k * x[0]).cos());
        let u = solve_principal(&f, &p).unwrap();
        let exact = Field::from_real_fn(&g, 1, |x, _| (k * x[0]).cos() / den);
        assert!(u.max_abs_diff(&exact) < 1e-14);
    }
}

#[test]
fn anisotropic_residual() {
    let g = Grid::new(&[16, 16], &[2.0 * PI, 2.0 * PI]).unwrap();
    let op = DiagOperator::new(&[2.0, 4.0], 2.0).unwrap();
    let p = EllipticProblem::principal(op, &[1.0, 3.0], c(0.0, 1.0), &[1, 2]).unwrap();
    let f = band_limited_field(&g, 2, &mut seeded(3));
    let u = solve_principal(&f, &p).unwrap();
    assert!(residual(&u, &f, &p).unwrap() <= 1e-10 * f.max_abs());
}

#[test]
fn random_problems_have_small_residual() {
    let g = Grid::new(&[16, 8], &[2.0 * PI, 3.0]).unwrap();
    let mut rng = seeded(21);
    for (j, f) in band_limited_batch(&g, 3, 100, &mut rng).into_iter().enumerate() {
        let lambda = c((j % 7) as f64 * 0.5 + 0.1, (j % 5) as f64 - 2.0);
        let t = [10f64.powi(j as i32 % 3 - 1), 0.5];
        let op = DiagOperator::new(&[0.5, 1.0 + j as f64, 30.0], 2.0).unwrap();
        let p = EllipticProblem::principal(op, &t, lambda, &[1, 2]).unwrap();
        let u = solve_principal(&f, &p).unwrap();
        assert!(residual(&u, &f, &p).unwrap() <= 1e-10 * f.max_abs(), "draw {j}");
    }
}

#[test]
fn cosine_coercivity_anchor() {
    let g = line(32);
    let p = model(1.0);
    let f = Field::from_real_fn(&g, 1, |x, _| x[0].cos());
    let u = solve_principal(&f, &p).unwrap();
    let r = coercivity_report(&u, &f, &p, &NormSpec::l2(1)).unwrap();
    let third = PI.sqrt() / 3.0;
    assert_eq!(r.terms.len(), 3);
    for term in &r.terms {
        assert!((term.value - third).abs() < 1e-12, "order {}", term.order);
    }
    assert!((r.a_norm - third).abs() < 1e-12);
    assert!((r.constant - 4.0 / 3.0).abs() < 1e-12);
}

#[test]
fn zero_datum_is_rejected() {
    let g = line(16);
    let f = Field::zeros(&g, 1);
    let u = Field::zeros(&g, 1);
    assert!(matches!(
        coercivity_report(&u, &f, &model(1.0), &NormSpec::l2(1)),
        Err(Error::ZeroField)
    ));
}

#[test]
fn wrong_solution_is_rejected() {
    let g = line(16);
    let f = Field::from_real_fn(&g, 1, |x, _| x[0].cos());
    assert!(matches!(
        coercivity_report(&f, &f, &model(1.0), &NormSpec::l2(1)),
        Err(Error::ResidualTooLarge { .. })
    ));
}

#[test]
fn coercivity_constant_respects_young_cap() {
    let g = Grid::new(&[16, 16], &[2.0 * PI, 2.0 * PI]).unwrap();
    let l = [1, 2];
    // n + Σ (2 l_k + 1) + 1
    let cap = 2.0 + 3.0 + 5.0 + 1.0;
    let fs = band_limited_batch(&g, 2, 4, &mut seeded(5));
    let op = DiagOperator::new(&[1.0, 8.0], 2.0).unwrap();
    for lambda in [1.0, 10.0, 1e2, 1e3] {
        for t in [1e-2, 1.0, 1e2] {
            let p = EllipticProblem::principal(op.clone(), &[t, t], c(lambda, 0.0), &l).unwrap();
            for f in &fs {
                let u = solve_principal(f, &p).unwrap();
                let r = coercivity_report(&u, f, &p, &NormSpec::l2(2)).unwrap();
                assert!(r.constant <= cap, "λ = {lambda}, t = {t}: {}", r.constant);
            }
        }
    }
}

#[test]
fn sweep_of_one_matches_report() {
    let g = line(32);
    let p = model(1.0);
    let f = band_limited_field(&g, 1, &mut seeded(8));
    let s = resolvent_sweep(&p, &[c(1.0, 0.0)], std::slice::from_ref(&f), &NormSpec::l2(1)).unwrap();
    let u = solve_principal(&f, &p).unwrap();
    let r = coercivity_report(&u, &f, &p, &NormSpec::l2(1)).unwrap();
    assert_eq!(s.rows[0].outcome, Ok(r.constant));
}

#[test]
fn sweep_surfaces_singular_rows() {
    let g = line(16);
    let f = Field::from_real_fn(&g, 1, |x, _| x[0].cos());
    // λ = −(d + ξ²) at ξ = 1
    let lambdas = [c(1.0, 0.0), c(-2.0, 0.0), c(4.0, 0.0)];
    let s = resolvent_sweep(&model(1.0), &lambdas, &[f], &NormSpec::l2(1)).unwrap();
    assert!(matches!(s.rows[1].outcome, Err(Error::SingularResolvent { .. })));
    assert!(s.rows[0].outcome.is_ok() && s.rows[2].outcome.is_ok());
    assert!(s.max.is_some());
}

#[test]
fn perturbed_without_lower_terms_is_principal() {
    let g = line(16);
    let f = band_limited_field(&g, 1, &mut seeded(2));
    let p = model(1.0);
    let s = solve_perturbed(&f, &p, &PerturbedOptions::default()).unwrap();
    assert_eq!(s.iterations, 1);
    assert_eq!(s.u, solve_principal(&f, &p).unwrap());
}

#[test]
fn perturbed_constant_coefficient_matches_modes() {
    let g = line(32);
    let p = model(1.0)
        .with_lower_term(LowerTerm::new(&[1], 0.0, Coefficient::Constant(c(0.1, 0.0))))
        .unwrap();
    let f = band_limited_field(&g, 1, &mut seeded(4));
    let s = solve_perturbed(&f, &p, &PerturbedOptions::default()).unwrap();
    let mut exact = f.forward().unwrap();
    exact
        .scale_spectrum(|xi, _| c(2.0 + xi[0] * xi[0], 0.1 * xi[0]).inv())
        .unwrap();
    let exact = exact.inverse().unwrap();
    assert!(s.u.max_abs_diff(&exact) <= 1e-9);
}

#[test]
fn perturbed_trace_is_geometric() {
    let g = line(32);
    let p = model(1.0)
        .with_lower_term(LowerTerm::new(&[1], 0.0, Coefficient::Constant(c(0.4, 0.0))))
        .unwrap();
    let f = band_limited_field(&g, 1, &mut seeded(6));
    let s = solve_perturbed(&f, &p, &PerturbedOptions::default()).unwrap();
    assert!(s.rho < 1.0 && s.gaps.len() > 2);
    for w in s.gaps.windows(2) {
        assert!(w[1] <= (s.rho + 0.05) * w[0], "{w:?}, ρ = {}", s.rho);
    }
}

#[test]
fn strong_lower_term_is_not_contractive() {
    let g = line(16);
    let p = model(1.0)
        .with_lower_term(LowerTerm::new(&[1], 0.0, Coefficient::Constant(c(5.0, 0.0))))
        .unwrap();
    let f = band_limited_field(&g, 1, &mut seeded(1));
    match solve_perturbed(&f, &p, &PerturbedOptions::default()) {
        Err(Error::NotContractive {
            rho,
            suggested_lambda,
        }) => {
            assert!(rho >= 1.0);
            let lam = suggested_lambda.expect("doubling search finds a λ");
            assert!(lam > 1.0 && lam.log2().fract() == 0.0);
        }
        other => panic!("expected NotContractive, got {other:?}"),
    }
}

// D^k on the N-point periodic line as an explicit trigonometric sum,
// dropping the Nyquist mode for odd k.
fn diff_matrix(n: usize, order: u32) -> DMatrix<Complex64> {
    let h = 2.0 * PI / n as f64;
    let half = n as i64 / 2;
    DMatrix::from_fn(n, n, |j, k| {
        let mut s = c(0.0, 0.0);
        for m in -half + 1..=half {
            if m == half && order % 2 == 1 {
                continue;
            }
            let xi = m as f64;
            let sym = c(0.0, xi).powu(order);
            s += sym * c(0.0, xi * (j as f64 - k as f64) * h).exp();
        }
        s / n as f64
    })
}

#[test]
fn perturbed_variable_coefficient_matches_dense_solve() {
    let n = 16;
    let g = line(n);
    let d = [1.0, 3.0, 10.0];
    let theta = 0.25;
    let lambda = 5.0;
    let a: Vec<Complex64> = g.nodes(0).iter().map(|x| c(0.1 * x.cos(), 0.0)).collect();
    let p = EllipticProblem::principal(DiagOperator::new(&d, 2.0).unwrap(), &[1.0], c(lambda, 0.0), &[1])
        .unwrap()
        .with_lower_term(LowerTerm::new(&[1], theta, Coefficient::Samples(a.clone())))
        .unwrap();
    let f = band_limited_field(&g, d.len(), &mut seeded(9));
    let s = solve_perturbed(&f, &p, &PerturbedOptions::default()).unwrap();

    let d1 = diff_matrix(n, 1);
    let d2 = diff_matrix(n, 2);
    let coeff = DMatrix::from_diagonal(&DVector::from_vec(a));
    for (m, &dm) in d.iter().enumerate() {
        let shift = DMatrix::identity(n, n) * c(dm + lambda, 0.0);
        let mat = -&d2 + shift + &coeff * &d1 * c(dm.powf(theta), 0.0);
        let rhs = DVector::from_column_slice(f.component(m));
        let exact = mat.lu().solve(&rhs).expect("nonsingular");
        let err =
            s.u.component(m)
                .iter()
                .zip(exact.iter())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
        assert!(err <= 1e-8, "component {m}: {err}");
    }
}

proptest! {
    #[test]
    fn principal_solve_is_linear(
        seed in 0u64..1000,
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        lambda_im in -5.0f64..5.0,
    ) {
        let g = Grid::new(&[16, 8], &[2.0 * PI, 1.0]).unwrap();
        let p = EllipticProblem::principal(
            DiagOperator::new(&[1.0, 5.0], 2.0).unwrap(),
            &[0.5, 2.0],
            c(1.0, lambda_im),
            &[1, 1],
        ).unwrap();
        let mut rng = seeded(seed);
        let f = band_limited_field(&g, 2, &mut rng);
        let h = band_limited_field(&g, 2, &mut rng);
        let combo = &(&f * a) + &(&h * b);
        let lhs = solve_principal(&combo, &p).unwrap();
        let rhs = &(&solve_principal(&f, &p).unwrap() * a) + &(&solve_principal(&h, &p).unwrap() * b);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-11);
    }
}

#[test]
fn spectral_input_is_rejected() {
    let g = line(16);
    let f = Field::from_real_fn(&g, 1, |x, _| x[0].sin()).forward().unwrap();
    assert_eq!(f.side(), Side::Spectral);
    assert!(solve_principal(&f, &model(1.0)).is_err());
}
