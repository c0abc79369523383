//! Anisotropic elliptic problems
//! `Σ (-1)^{l_k} t_k D_k^{2l_k} u + (A + λ) u + Σ_α A_α D^α u = f`
//! on the periodic grid.
//!
//! The principal part is inverted mode by mode. Lower-order terms
//! `A_α = a_α(x) A^{θ}` are handled by fixed-point iteration around the
//! principal inverse.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{check_len, Error, Result};
use crate::grid_norms::{Field, NormSpec, Side};
use crate::operator::DiagOperator;
use crate::random;

#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Constant(Complex64),
    /// Samples of `a(x)` at the grid nodes.
    Samples(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerTerm {
    pub alpha: Vec<u32>,
    pub theta_power: f64,
    pub coeff: Coefficient,
}

impl LowerTerm {
    pub fn new(alpha: &[u32], theta_power: f64, coeff: Coefficient) -> Self {
        Self {
            alpha: alpha.to_vec(),
            theta_power,
            coeff,
        }
    }
}

/// `|α : 2l| = Σ α_k / (2 l_k)`.
pub fn order_ratio(alpha: &[u32], l: &[u32]) -> f64 {
    alpha
        .iter()
        .zip(l)
        .map(|(&a, &lk)| a as f64 / (2.0 * lk as f64))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticProblem {
    op: DiagOperator,
    t: Vec<f64>,
    lambda: Complex64,
    l: Vec<u32>,
    lower_terms: Vec<LowerTerm>,
    mu: f64,
}

impl EllipticProblem {
    /// Problem without lower-order terms.
    pub fn principal(op: DiagOperator, t: &[f64], lambda: Complex64, l: &[u32]) -> Result<Self> {
        check_len(t.len(), l.len())?;
        if t.is_empty() {
            return Err(Error::InvalidDimension("need at least one axis".into()));
        }
        if t.iter().any(|tk| !(*tk > 0.0 && tk.is_finite())) {
            return Err(Error::ParameterOutOfRange("t_k must be positive".into()));
        }
        if l.contains(&0) {
            return Err(Error::ParameterOutOfRange("l_k must be positive".into()));
        }
        Ok(Self {
            op,
            t: t.to_vec(),
            lambda,
            l: l.to_vec(),
            lower_terms: Vec::new(),
            mu: 0.0,
        })
    }

    /// Sets the `μ` used to bound the power of `A` in lower-order terms.
    pub fn with_mu(mut self, mu: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&mu) {
            return Err(Error::ParameterOutOfRange(format!("mu = {mu} outside [0, 1)")));
        }
        self.mu = mu;
        for term in &self.lower_terms {
            self.check_term(term)?;
        }
        Ok(self)
    }

    pub fn with_lower_term(mut self, term: LowerTerm) -> Result<Self> {
        self.check_term(&term)?;
        self.lower_terms.push(term);
        Ok(self)
    }

    fn check_term(&self, term: &LowerTerm) -> Result<()> {
        check_len(self.dim(), term.alpha.len())?;
        let r = order_ratio(&term.alpha, &self.l);
        if r >= 1.0 {
            return Err(Error::ParameterOutOfRange(format!(
                "lower term of relative order {r} is not subordinate"
            )));
        }
        let cap = 1.0 - r - self.mu;
        if !(term.theta_power >= 0.0 && term.theta_power <= cap + 1e-12) {
            return Err(Error::ParameterOutOfRange(format!(
                "theta_power = {} outside [0, {cap}]",
                term.theta_power
            )));
        }
        Ok(())
    }

    pub fn with_lambda(&self, lambda: Complex64) -> Self {
        let mut out = self.clone();
        out.lambda = lambda;
        out
    }

    pub fn with_t(&self, t: &[f64]) -> Result<Self> {
        let mut out = Self::principal(self.op.clone(), t, self.lambda, &self.l)?.with_mu(self.mu)?;
        for term in &self.lower_terms {
            out = out.with_lower_term(term.clone())?;
        }
        Ok(out)
    }

    pub fn op(&self) -> &DiagOperator {
        &self.op
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn l(&self) -> &[u32] {
        &self.l
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lower_terms(&self) -> &[LowerTerm] {
        &self.lower_terms
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }

    /// `Σ t_k ξ_k^{2 l_k}`.
    pub fn principal_part(&self, xi: &[f64]) -> f64 {
        crate::symbols::principal_part(xi, &self.t, &self.l)
    }

    fn check_field(&self, f: &Field) -> Result<()> {
        f.expect_side(Side::Physical)?;
        check_len(self.dim(), f.grid().dim())?;
        check_len(self.op.len(), f.components())
    }

    fn t_alpha(&self, alpha: &[u32]) -> f64 {
        alpha
            .iter()
            .zip(&self.t)
            .zip(&self.l)
            .map(|((&a, tk), &lk)| tk.powf(a as f64 / (2.0 * lk as f64)))
            .product()
    }
}

/// `(Õ₀ + λ)⁻¹ f`: divides every mode of component `m` by
/// `λ + d_m + Σ t_k ξ_k^{2l_k}`. Lower-order terms are ignored.
pub fn solve_principal(f: &Field, prob: &EllipticProblem) -> Result<Field> {
    prob.check_field(f)?;
    let mut spec = f.forward()?;
    let d = prob.op.diag();
    spec.try_scale_spectrum(|xi, m| {
        let s = prob.lambda + prob.principal_part(xi);
        let den = s + d[m];
        if den.norm() <= f64::EPSILON * (d[m] + s.norm()) {
            Err(Error::SingularResolvent {
                component: m,
                re: s.re,
                im: s.im,
            })
        } else {
            Ok(den.inv())
        }
    })?;
    spec.inverse()
}

/// `Σ (-1)^{l_k} t_k D_k^{2l_k} u + (A + λ) u`, with each derivative taken
/// separately by spectral differentiation.
pub fn apply_principal(u: &Field, prob: &EllipticProblem) -> Result<Field> {
    prob.check_field(u)?;
    let mut out = prob.op.apply_field(u)? + &(u * prob.lambda);
    for k in 0..prob.dim() {
        let mut alpha = vec![0; prob.dim()];
        alpha[k] = 2 * prob.l[k];
        let sign = if prob.l[k].is_multiple_of(2) { 1.0 } else { -1.0 };
        out = &out + &(&u.spectral_derivative(&alpha)? * (sign * prob.t[k]));
    }
    Ok(out)
}

/// `Õ₁ u = Σ_α T_α a_α(x) A^{θ_α} D^α u` with `T_α = ∏ t_k^{α_k/2l_k}`.
pub fn apply_lower(u: &Field, prob: &EllipticProblem) -> Result<Field> {
    prob.check_field(u)?;
    let mut out = Field::zeros(u.grid(), u.components());
    for term in &prob.lower_terms {
        let du = u.spectral_derivative(&term.alpha)?;
        let scaled = prob.op.fractional_apply_field(term.theta_power, &du)?;
        let t_alpha = prob.t_alpha(&term.alpha);
        let contrib = match &term.coeff {
            Coefficient::Constant(c) => &scaled * (c * t_alpha),
            Coefficient::Samples(a) => &scaled.multiply_pointwise(a)? * t_alpha,
        };
        out = out + &contrib;
    }
    Ok(out)
}

/// Full operator `Õ₀ u + λ u + Õ₁ u`.
pub fn apply_operator(u: &Field, prob: &EllipticProblem) -> Result<Field> {
    Ok(apply_principal(u, prob)? + &apply_lower(u, prob)?)
}

/// `max_x ‖(L u − f)(x)‖` in the componentwise max modulus.
pub fn residual(u: &Field, f: &Field, prob: &EllipticProblem) -> Result<f64> {
    Ok(apply_operator(u, prob)?.max_abs_diff(f))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoerciveTerm {
    pub axis: usize,
    pub order: u32,
    /// `t_k^{i/2l_k} |λ|^{1-i/2l_k} ‖D_k^i u‖`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoercivityReport {
    pub terms: Vec<CoerciveTerm>,
    pub a_norm: f64,
    pub f_norm: f64,
    pub constant: f64,
}

impl CoercivityReport {
    pub fn lhs(&self) -> f64 {
        self.terms.iter().map(|t| t.value).sum::<f64>() + self.a_norm
    }
}

/// Terms of the coercive estimate for `u` solving `prob` with datum `f`,
/// all measured in the space described by `norm`.
pub fn coercivity_report(
    u: &Field,
    f: &Field,
    prob: &EllipticProblem,
    norm: &NormSpec,
) -> Result<CoercivityReport> {
    check_residual(u, f, prob)?;
    coercivity_with(u, f, prob, norm, |v, k, i| {
        let mut alpha = vec![0; prob.dim()];
        alpha[k] = i;
        v.spectral_derivative(&alpha)
    })
}

// Accepts u when ‖Lu − f‖_∞ ≤ 1e-8 (‖f‖_∞ + s_max ‖u‖_∞), s_max being the
// largest symbol modulus on the grid: round-off in u is amplified by s_max.
fn check_residual(u: &Field, f: &Field, prob: &EllipticProblem) -> Result<()> {
    let grid = u.grid();
    let s_max = (0..grid.len())
        .map(|lin| prob.principal_part(&grid.frequency(lin)))
        .fold(0.0, f64::max)
        + prob.lambda.norm()
        + prob.op.diag().iter().copied().fold(0.0, f64::max);
    let bound = 1e-8 * (f.max_abs() + s_max * u.max_abs());
    let r = residual(u, f, prob)?;
    if r > bound {
        return Err(Error::ResidualTooLarge { residual: r, bound });
    }
    Ok(())
}

pub(crate) fn coercivity_with<D>(
    u: &Field,
    f: &Field,
    prob: &EllipticProblem,
    norm: &NormSpec,
    derivative: D,
) -> Result<CoercivityReport>
where
    D: Fn(&Field, usize, u32) -> Result<Field>,
{
    let f_norm = norm.norm(f)?;
    if f_norm == 0.0 {
        return Err(Error::ZeroField);
    }
    let lam = prob.lambda.norm();
    let mut terms = Vec::new();
    for k in 0..prob.dim() {
        let two_l = 2 * prob.l[k];
        for i in 0..=two_l {
            let r = i as f64 / two_l as f64;
            let du = if i == 0 { u.clone() } else { derivative(u, k, i)? };
            let scale = prob.t[k].powf(r) * lam.powf(1.0 - r);
            terms.push(CoerciveTerm {
                axis: k,
                order: i,
                value: scale * norm.norm(&du)?,
            });
        }
    }
    let a_norm = norm.norm(&prob.op.apply_field(u)?)?;
    let mut report = CoercivityReport {
        terms,
        a_norm,
        f_norm,
        constant: 0.0,
    };
    report.constant = report.lhs() / f_norm;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedOptions {
    pub tol: f64,
    pub maxit: usize,
    pub probes: usize,
    pub seed: u64,
}

impl Default for PerturbedOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            maxit: 200,
            probes: 8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedSolution {
    pub u: Field,
    /// Estimated `‖Õ₁ (Õ₀ + λ)⁻¹‖`.
    pub rho: f64,
    /// `‖u_{j+1} − u_j‖` for every step taken.
    pub gaps: Vec<f64>,
    pub iterations: usize,
}

/// Solves the perturbed problem by `u_{j+1} = (Õ₀+λ)⁻¹ (f − Õ₁ u_j)`,
/// starting from `u_0 = (Õ₀+λ)⁻¹ f`, after checking that the estimated
/// contraction factor is below one. Gaps and the stopping rule
/// `gap ≤ tol ‖f‖` use the unweighted `L_2(ℓ_2)` norm.
pub fn solve_perturbed(
    f: &Field,
    prob: &EllipticProblem,
    opts: &PerturbedOptions,
) -> Result<PerturbedSolution> {
    prob.check_field(f)?;
    let u0 = solve_principal(f, prob)?;
    if prob.lower_terms.is_empty() {
        return Ok(PerturbedSolution {
            u: u0,
            rho: 0.0,
            gaps: Vec::new(),
            iterations: 1,
        });
    }
    let l2 = NormSpec::l2(prob.dim());
    let mut rng = random::seeded(opts.seed);
    let mut probes = random::band_limited_batch(f.grid(), f.components(), opts.probes, &mut rng);
    probes.push(f.clone());
    let rho = contraction_factor(prob, &probes)?;
    if rho >= 1.0 {
        return Err(Error::NotContractive {
            rho,
            suggested_lambda: suggest_lambda(prob, &probes),
        });
    }
    let f_norm = l2.norm(f)?;
    let mut u = u0;
    let mut gaps = Vec::new();
    for it in 1..=opts.maxit {
        let next = solve_principal(&(f - &apply_lower(&u, prob)?), prob)?;
        let gap = l2.norm(&(&next - &u))?;
        gaps.push(gap);
        u = next;
        if gap <= opts.tol * f_norm {
            return Ok(PerturbedSolution {
                u,
                rho,
                gaps,
                iterations: it + 1,
            });
        }
    }
    Err(Error::MaxIterations {
        iterations: opts.maxit,
        gap: gaps.last().copied().unwrap_or(f64::NAN),
    })
}

const POWER_STEPS: usize = 4;

/// Largest ratio `‖K g‖ / ‖g‖` for `K = Õ₁ (Õ₀+λ)⁻¹` over the probes and a
/// few power-iteration refinements of each.
pub fn contraction_factor(prob: &EllipticProblem, probes: &[Field]) -> Result<f64> {
    let l2 = NormSpec::l2(prob.dim());
    let ratios = probes
        .par_iter()
        .map(|g| {
            let mut g = g.clone();
            let mut best: f64 = 0.0;
            for _ in 0..POWER_STEPS {
                let g_norm = l2.norm(&g)?;
                if g_norm == 0.0 {
                    break;
                }
                let kg = apply_lower(&solve_principal(&g, prob)?, prob)?;
                best = best.max(l2.norm(&kg)? / g_norm);
                g = &kg * (1.0 / g_norm);
            }
            Ok(best)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// Smallest `λ = 2^k`, `k = 0..=20`, with contraction factor below 0.9.
fn suggest_lambda(prob: &EllipticProblem, probes: &[Field]) -> Option<f64> {
    (0..=20).map(|k| (k as f64).exp2()).find(|&lam| {
        contraction_factor(&prob.with_lambda(Complex64::new(lam, 0.0)), probes)
            .map(|rho| rho < 0.9)
            .unwrap_or(false)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda: Complex64,
    /// Largest empirical constant over the probe data, or the error hit.
    pub outcome: std::result::Result<f64, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolventSweep {
    pub rows: Vec<SweepRow>,
    /// Max over the successful rows; `None` if every row failed.
    pub max: Option<f64>,
    pub min: Option<f64>,
}

/// Empirical coercive constants of the principal problem for every `λ`.
/// Singular rows are recorded, not propagated.
pub fn resolvent_sweep(
    template: &EllipticProblem,
    lambdas: &[Complex64],
    probes: &[Field],
    norm: &NormSpec,
) -> Result<ResolventSweep> {
    if probes.is_empty() {
        return Err(Error::ParameterOutOfRange("empty probe set".into()));
    }
    let rows: Vec<SweepRow> = lambdas
        .par_iter()
        .map(|&lambda| {
            let prob = template.with_lambda(lambda);
            let outcome = probes.iter().try_fold(0.0f64, |acc, f| {
                let u = solve_principal(f, &prob)?;
                Ok(acc.max(coercivity_report(&u, f, &prob, norm)?.constant))
            });
            SweepRow { lambda, outcome }
        })
        .collect();
    let ok: Vec<f64> = rows.iter().filter_map(|r| r.outcome.clone().ok()).collect();
    let max = ok.iter().copied().reduce(f64::max);
    let min = ok.iter().copied().reduce(f64::min);
    Ok(ResolventSweep { rows, max, min })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_norms::Grid;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn model(lambda: f64) -> EllipticProblem {
        EllipticProblem::principal(DiagOperator::scalar(1.0).unwrap(), &[1.0], re(lambda), &[1]).unwrap()
    }

    #[test]
    fn single_mode_solutions() {
        let g = Grid::cube(1, 16).unwrap();
        let prob = model(0.0);
        let f = Field::from_real_fn(&g, 1, |x, _| x[0].cos());
        let u = solve_principal(&f, &prob).unwrap();
        let exact = Field::from_real_fn(&g, 1, |x, _| x[0].cos() / 2.0);
        assert!(u.max_abs_diff(&exact) < 1e-14);

        let f = Field::from_real_fn(&g, 1, |x, _| (2.0 * x[0]).cos());
        let u = solve_principal(&f, &prob).unwrap();
        let exact = Field::from_real_fn(&g, 1, |x, _| (2.0 * x[0]).cos() / 5.0);
        assert!(u.max_abs_diff(&exact) < 1e-14);
    }

    #[test]
    fn coercivity_anchor() {
        let g = Grid::cube(1, 32).unwrap();
        let prob = model(1.0);
        let f = Field::from_real_fn(&g, 1, |x, _| x[0].cos());
        let u = solve_principal(&f, &prob).unwrap();
        let rep = coercivity_report(&u, &f, &prob, &NormSpec::l2(1)).unwrap();
        let third = std::f64::consts::PI.sqrt() / 3.0;
        assert_eq!(rep.terms.len(), 3);
        for t in &rep.terms {
            assert!((t.value - third).abs() < 1e-12);
        }
        assert!((rep.a_norm - third).abs() < 1e-12);
        assert!((rep.constant - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_datum_is_rejected() {
        let g = Grid::cube(1, 16).unwrap();
        let prob = model(1.0);
        let f = Field::zeros(&g, 1);
        assert_eq!(
            coercivity_report(&f, &f, &prob, &NormSpec::l2(1)),
            Err(Error::ZeroField)
        );
    }

    #[test]
    fn wrong_solution_is_rejected() {
        let g = Grid::cube(1, 16).unwrap();
        let prob = model(1.0);
        let f = Field::from_real_fn(&g, 1, |x, _| x[0].cos());
        assert!(matches!(
            coercivity_report(&f, &f, &prob, &NormSpec::l2(1)),
            Err(Error::ResidualTooLarge { .. })
        ));
    }

    #[test]
    fn subordination_is_enforced() {
        let prob = model(1.0);
        let too_high = LowerTerm::new(&[2], 0.0, Coefficient::Constant(re(1.0)));
        assert!(prob.clone().with_lower_term(too_high).is_err());
        let too_strong = LowerTerm::new(&[1], 0.75, Coefficient::Constant(re(1.0)));
        assert!(prob.clone().with_lower_term(too_strong).is_err());
        let fine = LowerTerm::new(&[1], 0.5, Coefficient::Constant(re(1.0)));
        assert!(prob.with_lower_term(fine).is_ok());
    }

    #[test]
    fn empty_lower_terms_take_one_iteration() {
        let g = Grid::cube(1, 16).unwrap();
        let prob = model(1.0);
        let f = Field::from_real_fn(&g, 1, |x, _| x[0].sin());
        let sol = solve_perturbed(&f, &prob, &PerturbedOptions::default()).unwrap();
        assert_eq!(sol.iterations, 1);
        assert_eq!(sol.u, solve_principal(&f, &prob).unwrap());
    }

    #[test]
    fn strong_perturbation_suggests_lambda() {
        let g = Grid::cube(1, 16).unwrap();
        let prob = model(1.0)
            .with_lower_term(LowerTerm::new(&[0], 0.0, Coefficient::Constant(re(4.0))))
            .unwrap();
        let f = Field::from_real_fn(&g, 1, |x, _| x[0].cos());
        match solve_perturbed(&f, &prob, &PerturbedOptions::default()) {
            // |4 / (2 + λ)| < 0.9 first holds at λ = 4
            Err(Error::NotContractive {
                rho,
                suggested_lambda,
            }) => {
                assert!(rho >= 1.0);
                assert_eq!(suggested_lambda, Some(4.0));
            }
            other => panic!("expected NotContractive, got {other:?}"),
        }
    }

    #[test]
    fn sweep_records_singular_rows() {
        let g = Grid::cube(1, 16).unwrap();
        let f = Field::from_real_fn(&g, 1, |x, _| x[0].cos());
        // λ = -2 annihilates the mode ξ = 1 of d = 1, t = 1
        let sweep = resolvent_sweep(&model(1.0), &[re(1.0), re(-2.0)], &[f], &NormSpec::l2(1)).unwrap();
        assert!(sweep.rows[0].outcome.is_ok());
        assert_eq!(
            sweep.rows[1].outcome.as_ref().unwrap_err().kind(),
            "SingularResolvent"
        );
        assert!((sweep.max.unwrap() - 4.0 / 3.0).abs() < 1e-12);
    }
}
