//! The Cauchy problem
//! `∂_t u + Σ (-1)^{l_k} ε_k ∂_k^{2l_k} u + A u = f`, `u(0) = 0`,
//! solved mode by mode with an exponential integrator that is exact for
//! data piecewise linear in time.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::degenerate::{self, DegWeight, Direction, SubstitutionMap};
use crate::error::{check_len, Error, Result};
use crate::grid_norms::{Field, Grid, NormSpec, Side};
use crate::operator::DiagOperator;
use crate::symbols::principal_part;

#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicProblem {
    op: DiagOperator,
    eps: Vec<f64>,
    l: Vec<u32>,
    t_final: f64,
    steps: usize,
    p0: f64,
}

impl ParabolicProblem {
    pub const DEFAULT_STEPS: usize = 64;
    pub const DEFAULT_T_FINAL: f64 = 1.0;

    pub fn new(op: DiagOperator, eps: &[f64], l: &[u32], t_final: f64, steps: usize) -> Result<Self> {
        check_len(eps.len(), l.len())?;
        if eps.is_empty() {
            return Err(Error::InvalidDimension("need at least one axis".into()));
        }
        if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(Error::ParameterOutOfRange("eps_k must be positive".into()));
        }
        if l.contains(&0) {
            return Err(Error::ParameterOutOfRange("l_k must be positive".into()));
        }
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!(
                "T = {t_final} must be positive"
            )));
        }
        if steps < 8 {
            return Err(Error::ParameterOutOfRange(format!("N_t = {steps} below 8")));
        }
        Ok(Self {
            op,
            eps: eps.to_vec(),
            l: l.to_vec(),
            t_final,
            steps,
            p0: 2.0,
        })
    }

    /// Default time grid: 64 steps on `[0, 1]`.
    pub fn with_defaults(op: DiagOperator, eps: &[f64], l: &[u32]) -> Result<Self> {
        Self::new(op, eps, l, Self::DEFAULT_T_FINAL, Self::DEFAULT_STEPS)
    }

    pub fn with_p0(mut self, p0: f64) -> Result<Self> {
        if !(p0 >= 1.0 && p0.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!("p0 = {p0} not in [1, inf)")));
        }
        self.p0 = p0;
        Ok(self)
    }

    pub fn with_eps(&self, eps: &[f64]) -> Result<Self> {
        Self::new(self.op.clone(), eps, &self.l, self.t_final, self.steps)?.with_p0(self.p0)
    }

    pub fn op(&self) -> &DiagOperator {
        &self.op
    }

    pub fn eps(&self) -> &[f64] {
        &self.eps
    }

    pub fn l(&self) -> &[u32] {
        &self.l
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|j| j as f64 * self.dt()).collect()
    }

    pub fn dim(&self) -> usize {
        self.eps.len()
    }

    /// Decay rate `ω = d_m + Σ ε_k ξ_k^{2l_k}`.
    pub fn rate(&self, xi: &[f64], m: usize) -> f64 {
        self.op.diag()[m] + principal_part(xi, &self.eps, &self.l)
    }
}

/// Physical-side fields at the time nodes `t_0 = 0, …, t_{N_t} = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    times: Vec<f64>,
    slices: Vec<Field>,
}

impl SpaceTimeField {
    pub fn new(times: Vec<f64>, slices: Vec<Field>) -> Result<Self> {
        check_len(times.len(), slices.len())?;
        if slices.is_empty() {
            return Err(Error::InvalidDimension("no time slices".into()));
        }
        let first = &slices[0];
        for s in &slices {
            s.expect_side(Side::Physical)?;
            check_len(first.components(), s.components())?;
            if s.grid() != first.grid() {
                return Err(Error::InvalidDimension("time slices on different grids".into()));
            }
        }
        Ok(Self { times, slices })
    }

    pub fn zeros(grid: &Grid, components: usize, times: &[f64]) -> Self {
        Self {
            times: times.to_vec(),
            slices: vec![Field::zeros(grid, components); times.len()],
        }
    }

    /// Samples `f(t, x, m)` at every node.
    pub fn from_fn<F>(grid: &Grid, components: usize, times: &[f64], f: F) -> Self
    where
        F: Fn(f64, &[f64], usize) -> f64,
    {
        let slices = times
            .iter()
            .map(|&t| Field::from_real_fn(grid, components, |x, m| f(t, x, m)))
            .collect();
        Self {
            times: times.to_vec(),
            slices,
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn slices(&self) -> &[Field] {
        &self.slices
    }

    pub fn slice(&self, j: usize) -> &Field {
        &self.slices[j]
    }

    pub fn slice_mut(&mut self, j: usize) -> &mut Field {
        &mut self.slices[j]
    }

    pub fn grid(&self) -> &Grid {
        self.slices[0].grid()
    }

    pub fn components(&self) -> usize {
        self.slices[0].components()
    }

    pub fn max_abs_diff(&self, other: &SpaceTimeField) -> f64 {
        self.slices
            .iter()
            .zip(&other.slices)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.slices.iter().map(Field::max_abs).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            times: self.times.clone(),
            slices: self.slices.iter().map(|s| s * c).collect(),
        }
    }

    fn map_slices<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&Field) -> Result<Field> + Sync + Send,
    {
        let slices = self.slices.par_iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            times: self.times.clone(),
            slices,
        })
    }
}

// φ₁(z) = (1 − e^{−z})/z and φ₂(z) = (z − 1 + e^{−z})/z², by series near 0
fn phi(z: f64) -> (f64, f64) {
    if z < 0.1 {
        // Σ (−z)^k/(k+1)! and Σ (−z)^k/(k+2)!
        let (mut p1, mut p2) = (0.0, 0.0);
        let mut power = 1.0;
        let mut fact = 1.0; // (k+1)!
        for k in 0..12 {
            p1 += power / fact;
            p2 += power / (fact * (k + 2) as f64);
            power *= -z;
            fact *= (k + 2) as f64;
        }
        (p1, p2)
    } else {
        let e = (-z).exp();
        ((1.0 - e) / z, (z - 1.0 + e) / (z * z))
    }
}

fn check_data(f: &SpaceTimeField, prob: &ParabolicProblem) -> Result<()> {
    check_len(prob.dim(), f.grid().dim())?;
    check_len(prob.op.len(), f.components())?;
    check_len(prob.steps + 1, f.times.len())?;
    let expected = prob.times();
    if f.times
        .iter()
        .zip(&expected)
        .any(|(a, b)| (a - b).abs() > 1e-12 * prob.t_final)
    {
        return Err(Error::InvalidDimension(
            "data not on the problem's time grid".into(),
        ));
    }
    Ok(())
}

/// `u(t_{j+1}) = e^{−ωΔ} û(t_j) + Δ[(φ₁ − φ₂) f̂_j + φ₂ f̂_{j+1}]` per mode
/// and component, `z = ωΔ`.
pub fn solve_cauchy(f: &SpaceTimeField, prob: &ParabolicProblem) -> Result<SpaceTimeField> {
    check_data(f, prob)?;
    let grid = f.grid().clone();
    let npts = grid.len();
    let spectra = f
        .slices
        .par_iter()
        .map(Field::forward)
        .collect::<Result<Vec<_>>>()?;
    let dt = prob.dt();
    let nt = prob.steps;
    let histories: Vec<Vec<Complex64>> = (0..prob.op.len() * npts)
        .into_par_iter()
        .map(|idx| {
            let (m, lin) = (idx / npts, idx % npts);
            let z = prob.rate(&grid.frequency(lin), m) * dt;
            let (p1, p2) = phi(z);
            let e = (-z).exp();
            let mut u = Complex64::new(0.0, 0.0);
            let mut hist = Vec::with_capacity(nt + 1);
            hist.push(u);
            for j in 0..nt {
                let (fj, fj1) = (spectra[j].value(lin, m), spectra[j + 1].value(lin, m));
                u = u * e + (fj * (p1 - p2) + fj1 * p2) * dt;
                hist.push(u);
            }
            hist
        })
        .collect();
    let slices = (0..=nt)
        .into_par_iter()
        .map(|j| {
            let values = histories.iter().map(|h| h[j]).collect();
            Field::from_values(&grid, prob.op.len(), values, Side::Spectral)?.inverse()
        })
        .collect::<Result<Vec<_>>>()?;
    SpaceTimeField::new(f.times.clone(), slices)
}

/// `∂_t u = f − O_ε u − A u`, evaluated spectrally at every node.
pub fn time_derivative(
    u: &SpaceTimeField,
    f: &SpaceTimeField,
    prob: &ParabolicProblem,
) -> Result<SpaceTimeField> {
    check_data(u, prob)?;
    check_data(f, prob)?;
    let slices = u
        .slices
        .par_iter()
        .zip(&f.slices)
        .map(|(us, fs)| {
            let mut lu = us.forward()?;
            lu.scale_spectrum(|xi, m| Complex64::new(prob.rate(xi, m), 0.0))?;
            Ok(fs - &lu.inverse()?)
        })
        .collect::<Result<Vec<_>>>()?;
    SpaceTimeField::new(u.times.clone(), slices)
}

/// `(∫_0^T ‖u(t)‖_X^{p₀} dt)^{1/p₀}`: composite Simpson in time when the
/// number of intervals is even, trapezoid otherwise.
pub fn spacetime_norm(u: &SpaceTimeField, p0: f64, norm: &NormSpec) -> Result<f64> {
    if !(p0 >= 1.0 && p0.is_finite()) {
        return Err(Error::ParameterOutOfRange(format!("p0 = {p0} not in [1, inf)")));
    }
    let vals = u
        .slices
        .par_iter()
        .map(|s| Ok(norm.norm(s)?.powf(p0)))
        .collect::<Result<Vec<f64>>>()?;
    if vals.len() < 2 {
        return Err(Error::DegenerateGrid("need at least two time nodes".into()));
    }
    let intervals = vals.len() - 1;
    let h = (u.times[intervals] - u.times[0]) / intervals as f64;
    let integral = if intervals % 2 == 0 {
        let inner: f64 = vals[1..intervals]
            .iter()
            .enumerate()
            .map(|(i, v)| if i % 2 == 0 { 4.0 * v } else { 2.0 * v })
            .sum();
        h / 3.0 * (vals[0] + inner + vals[intervals])
    } else {
        h * (0.5 * vals[0] + vals[1..intervals].iter().sum::<f64>() + 0.5 * vals[intervals])
    };
    Ok(integral.max(0.0).powf(1.0 / p0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicCoercivityReport {
    pub dt_norm: f64,
    /// `ε_k ‖D_k^{2l_k} u‖` per axis.
    pub eps_terms: Vec<f64>,
    pub a_norm: f64,
    pub f_norm: f64,
    pub constant: f64,
}

impl ParabolicCoercivityReport {
    pub fn lhs(&self) -> f64 {
        self.dt_norm + self.eps_terms.iter().sum::<f64>() + self.a_norm
    }
}

/// `‖∂_t u‖ + Σ ε_k ‖D_k^{2l_k} u‖ + ‖Au‖` against `‖f‖`, all in
/// `L_{p₀}(0, T; X)`. Requires `u = solve_cauchy(f)`.
pub fn parabolic_coercivity_report(
    u: &SpaceTimeField,
    f: &SpaceTimeField,
    prob: &ParabolicProblem,
    norm: &NormSpec,
) -> Result<ParabolicCoercivityReport> {
    let reference = solve_cauchy(f, prob)?;
    let residual = reference.max_abs_diff(u);
    let bound = 1e-10 * (1.0 + reference.max_abs());
    if residual > bound {
        return Err(Error::ResidualTooLarge { residual, bound });
    }
    report_terms(
        u,
        f,
        prob,
        norm,
        |v, k| {
            let mut alpha = vec![0; prob.dim()];
            alpha[k] = 2 * prob.l[k];
            v.spectral_derivative(&alpha)
        },
        &time_derivative(u, f, prob)?,
    )
}

fn report_terms<D>(
    u: &SpaceTimeField,
    f: &SpaceTimeField,
    prob: &ParabolicProblem,
    norm: &NormSpec,
    derivative: D,
    dt_u: &SpaceTimeField,
) -> Result<ParabolicCoercivityReport>
where
    D: Fn(&Field, usize) -> Result<Field> + Sync + Send,
{
    let p0 = prob.p0;
    let f_norm = spacetime_norm(f, p0, norm)?;
    let dt_norm = spacetime_norm(dt_u, p0, norm)?;
    let mut eps_terms = Vec::with_capacity(prob.dim());
    for k in 0..prob.dim() {
        let d = u.map_slices(|s| derivative(s, k))?;
        eps_terms.push(prob.eps[k] * spacetime_norm(&d, p0, norm)?);
    }
    let a_norm = spacetime_norm(&u.map_slices(|s| prob.op.apply_field(s))?, p0, norm)?;
    let mut report = ParabolicCoercivityReport {
        dt_norm,
        eps_terms,
        a_norm,
        f_norm,
        constant: 0.0,
    };
    report.constant = if f_norm > 0.0 { report.lhs() / f_norm } else { 0.0 };
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSolution {
    pub u: SpaceTimeField,
    /// `∂_t u` at the nodes, in the original coordinates.
    pub dt_u: SpaceTimeField,
    /// Present when degenerate weights were given.
    pub map: Option<SubstitutionMap>,
}

/// The system `∂_t u_m + Σ (-1)^{l_k} ε_k D_k^{[2l_k]} u_m + d_m u_m = f_m`
/// with constant couplings `d_m`. With `weights`, the degenerate
/// derivatives are straightened by the substitution `τ_k = ∫ γ_k⁻¹`.
pub fn infinite_system_solve(
    f: &SpaceTimeField,
    d: &[f64],
    eps: &[f64],
    l: &[u32],
    weights: Option<&[DegWeight]>,
) -> Result<SystemSolution> {
    let times = f.times();
    let steps = times.len().saturating_sub(1);
    let t_final = times.last().copied().unwrap_or(0.0);
    let prob = ParabolicProblem::new(DiagOperator::new(d, 2.0)?, eps, l, t_final, steps)?;
    match weights {
        None => {
            let u = solve_cauchy(f, &prob)?;
            let dt_u = time_derivative(&u, f, &prob)?;
            Ok(SystemSolution { u, dt_u, map: None })
        }
        Some(w) => {
            let map = degenerate::substitution(w, f.grid())?;
            let f_tau = f.map_slices(|s| degenerate::transform_field(s, &map, Direction::ToTau))?;
            let u_tau = solve_cauchy(&f_tau, &prob)?;
            let dt_tau = time_derivative(&u_tau, &f_tau, &prob)?;
            let back =
                |v: &SpaceTimeField| v.map_slices(|s| degenerate::transform_field(s, &map, Direction::ToX));
            Ok(SystemSolution {
                u: back(&u_tau)?,
                dt_u: back(&dt_tau)?,
                map: Some(map),
            })
        }
    }
}

/// `max ‖∂_t u + Σ (-1)^{l_k} ε_k D_k^{[2l_k]} u + d u − f‖` over all nodes,
/// with `D^{[i]}` evaluated directly in x.
pub fn system_residual(
    sol: &SystemSolution,
    f: &SpaceTimeField,
    d: &[f64],
    eps: &[f64],
    l: &[u32],
    weights: &[DegWeight],
) -> Result<f64> {
    check_len(eps.len(), weights.len())?;
    let op = DiagOperator::new(d, 2.0)?;
    let mut worst: f64 = 0.0;
    for j in 0..f.times.len() {
        let u = sol.u.slice(j);
        let mut lhs = sol.dt_u.slice(j) + &op.apply_field(u)?;
        for (k, w) in weights.iter().enumerate() {
            let sign = if l[k].is_multiple_of(2) { 1.0 } else { -1.0 };
            lhs = lhs + &(&degenerate::degenerate_derivative(u, w, k, 2 * l[k])? * (sign * eps[k]));
        }
        worst = worst.max(lhs.max_abs_diff(f.slice(j)));
    }
    Ok(worst)
}
