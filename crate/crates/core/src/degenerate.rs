//! Degenerate derivatives `D_k^{[i]} = (γ_k(x_k) ∂_k)^i` and the change of
//! variables `τ_k = ∫_0^{x_k} γ_k⁻¹` that turns them into plain derivatives.
//!
//! Only strictly positive periodic `γ_k` are supported, so every axis maps
//! onto a periodic `τ`-axis of period `T_k = ∫_0^{L_k} γ_k⁻¹`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::elliptic::{self, CoercivityReport, EllipticProblem};
use crate::error::{check_len, Error, Result};
use crate::grid_norms::{fft, AxisWeight, Field, Grid, NormSpec, Weight};

/// One-axis degeneracy `γ_k`, periodic with the period of its axis.
#[derive(Debug, Clone, PartialEq)]
pub enum DegWeight {
    Constant(f64),
    /// `γ(x) = 1 / (1 + a cos(2πx/L))`, `|a| < 1`.
    Cosine(f64),
    /// Values at the axis nodes, interpolated trigonometrically in between.
    Table(Vec<f64>),
}

impl DegWeight {
    /// Values at `points` on an axis of `n` nodes and period `period`.
    pub fn values_at(&self, n: usize, period: f64, points: &[f64]) -> Result<Vec<f64>> {
        let vals: Vec<f64> = match self {
            DegWeight::Constant(c) => vec![*c; points.len()],
            DegWeight::Cosine(a) => {
                if !(a.abs() < 1.0) {
                    return Err(Error::NonPositiveWeight(format!("cosine amplitude {a}")));
                }
                points
                    .iter()
                    .map(|x| 1.0 / (1.0 + a * (2.0 * PI * x / period).cos()))
                    .collect()
            }
            DegWeight::Table(table) => {
                check_len(n, table.len())?;
                if table.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                    return Err(Error::NonPositiveWeight("table entry not positive".into()));
                }
                let line: Vec<Complex64> = table.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                fft::interpolate_line(&line, period, points)
                    .into_iter()
                    .map(|v| v.re)
                    .collect()
            }
        };
        if vals.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::NonPositiveWeight(format!("{self:?} is not positive")));
        }
        Ok(vals)
    }

    /// Values at the nodes of `grid` along `axis`.
    pub fn on_axis(&self, grid: &Grid, axis: usize) -> Result<Vec<f64>> {
        self.values_at(grid.sizes()[axis], grid.periods()[axis], &grid.nodes(axis))
    }
}

/// `x ↦ τ(x) = ∫_0^x γ⁻¹` on one axis.
///
/// `γ⁻¹` is represented by its trigonometric interpolant on a fine grid,
/// so `τ` is a linear term plus an exact trigonometric antiderivative.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisMap {
    period: f64,
    new_period: f64,
    mean: f64,
    /// `(wavenumber, coefficient)` of the non-constant modes of `γ⁻¹`.
    modes: Vec<(f64, Complex64)>,
    /// `τ` at the source nodes.
    table: Vec<f64>,
}

impl AxisMap {
    pub fn new(gamma: &DegWeight, n: usize, period: f64) -> Result<Self> {
        let fine = (4 * n).max(256);
        let fine_grid = Grid::new(&[fine], &[period])?;
        let gamma_fine = gamma.values_at(n, period, &fine_grid.nodes(0))?;
        let recip = Field::from_fn(&fine_grid, 1, |x, _| {
            let j = (x[0] / fine_grid.spacing(0)).round() as usize;
            Complex64::new(1.0 / gamma_fine[j], 0.0)
        });
        let spec = recip.forward()?;
        let mean = spec.value(0, 0).re;
        let mut modes = Vec::new();
        for j in 1..fine {
            let c = spec.value(j, 0);
            if c.norm() < 1e-17 * mean.abs() {
                continue;
            }
            let k = fine_grid.wavenumber(0, j);
            if fine_grid.is_nyquist(0, j) {
                // Nyquist mode enters as a cosine, c cos(kx) = c/2 e^{ikx} + c/2 e^{-ikx}
                modes.push((k, c * 0.5));
                modes.push((-k, c * 0.5));
            } else {
                modes.push((k, c));
            }
        }
        let mut map = Self {
            period,
            new_period: mean * period,
            mean,
            modes,
            table: Vec::new(),
        };
        map.table = (0..n).map(|j| map.tau(j as f64 * period / n as f64)).collect();
        if map.table.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::NonPositiveWeight("substitution is not monotone".into()));
        }
        Ok(map)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// `T = ∫_0^L γ⁻¹`.
    pub fn new_period(&self) -> f64 {
        self.new_period
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn tau(&self, x: f64) -> f64 {
        let osc: f64 = self
            .modes
            .iter()
            .map(|&(k, c)| (c * (Complex64::new(0.0, k * x).exp() - 1.0) / Complex64::new(0.0, k)).re)
            .sum();
        self.mean * x + osc
    }

    /// `τ'(x) = γ(x)⁻¹`.
    pub fn tau_prime(&self, x: f64) -> f64 {
        let osc: f64 = self
            .modes
            .iter()
            .map(|&(k, c)| (c * Complex64::new(0.0, k * x).exp()).re)
            .sum();
        self.mean + osc
    }

    /// `x(τ)`, by safeguarded Newton on the bracket fixed by
    /// `τ(x + L) = τ(x) + T`.
    pub fn inverse(&self, tau: f64) -> f64 {
        let shift = (tau / self.new_period).floor();
        let target = tau - shift * self.new_period;
        let (mut lo, mut hi) = (0.0, self.period);
        let mut x = target / self.mean;
        for _ in 0..100 {
            let r = self.tau(x) - target;
            if r.abs() <= 1e-15 * self.new_period {
                break;
            }
            if r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let step = x - r / self.tau_prime(x);
            x = if step > lo && step < hi {
                step
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= 1e-15 * self.period {
                break;
            }
        }
        x + shift * self.period
    }
}

/// Per-axis substitution maps.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstitutionMap {
    axes: Vec<AxisMap>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    ToTau,
    ToX,
}

/// Builds `τ_k = ∫_0^{x_k} γ_k⁻¹` for every axis of `grid`.
pub fn substitution(weights: &[DegWeight], grid: &Grid) -> Result<SubstitutionMap> {
    check_len(grid.dim(), weights.len())?;
    let axes = weights
        .iter()
        .enumerate()
        .map(|(k, w)| AxisMap::new(w, grid.sizes()[k], grid.periods()[k]))
        .collect::<Result<Vec<_>>>()?;
    Ok(SubstitutionMap { axes })
}

impl SubstitutionMap {
    pub fn axis(&self, k: usize) -> &AxisMap {
        &self.axes[k]
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn x_periods(&self) -> Vec<f64> {
        self.axes.iter().map(|a| a.period).collect()
    }

    pub fn tau_periods(&self) -> Vec<f64> {
        self.axes.iter().map(|a| a.new_period).collect()
    }

    /// The uniform grid in `τ` with the node counts of `grid`.
    pub fn tau_grid(&self, grid: &Grid) -> Result<Grid> {
        grid.with_periods(&self.tau_periods())
    }

    /// `γ̃(τ) = γ(x(τ))` on the `τ`-grid, the density of `dx` in `τ`.
    pub fn tau_weight(&self, grid: &Grid) -> Result<Weight> {
        let tau_grid = self.tau_grid(grid)?;
        let axes = self
            .axes
            .iter()
            .enumerate()
            .map(|(k, map)| {
                AxisWeight::Table(
                    tau_grid
                        .nodes(k)
                        .into_iter()
                        .map(|t| 1.0 / map.tau_prime(map.inverse(t)))
                        .collect(),
                )
            })
            .collect();
        Ok(Weight::Product(axes))
    }
}

/// Resamples `u` into the other coordinate system, one axis at a time,
/// by trigonometric interpolation of `u` composed with the map.
pub fn transform_field(u: &Field, map: &SubstitutionMap, direction: Direction) -> Result<Field> {
    check_len(u.grid().dim(), map.dim())?;
    let mut out = u.clone();
    for (k, axis) in map.axes.iter().enumerate() {
        let n = u.grid().sizes()[k];
        let (target_period, points): (f64, Vec<f64>) = match direction {
            Direction::ToTau => {
                let h = axis.new_period / n as f64;
                (
                    axis.new_period,
                    (0..n).map(|j| axis.inverse(j as f64 * h)).collect(),
                )
            }
            Direction::ToX => (axis.period, axis.table.clone()),
        };
        let target = out.grid().with_period(k, target_period)?;
        out = out.resample_axis(k, &points, &target)?;
    }
    Ok(out)
}

/// `(γ_k ∂_k)^i u`, alternating spectral differentiation and pointwise
/// multiplication by `γ_k`.
pub fn degenerate_derivative(u: &Field, gamma: &DegWeight, axis: usize, order: u32) -> Result<Field> {
    let grid = u.grid();
    if axis >= grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: axis + 1,
        });
    }
    let g_axis = gamma.on_axis(grid, axis)?;
    let g: Vec<Complex64> = (0..grid.len())
        .map(|lin| Complex64::new(g_axis[grid.index_along(lin, axis)], 0.0))
        .collect();
    let mut alpha = vec![0; grid.dim()];
    alpha[axis] = 1;
    let mut v = u.clone();
    for _ in 0..order {
        v = v.spectral_derivative(&alpha)?.multiply_pointwise(&g)?;
    }
    Ok(v)
}

/// `Σ (-1)^{l_k} t_k D_k^{[2l_k]} u + (A + λ) u`.
pub fn apply_degenerate(u: &Field, prob: &EllipticProblem, weights: &[DegWeight]) -> Result<Field> {
    check_len(prob.dim(), weights.len())?;
    let mut out = prob.op().apply_field(u)? + &(u * prob.lambda());
    for (k, w) in weights.iter().enumerate() {
        let lk = prob.l()[k];
        let sign = if lk.is_multiple_of(2) { 1.0 } else { -1.0 };
        out = out + &(&degenerate_derivative(u, w, k, 2 * lk)? * (sign * prob.t()[k]));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegenerateSolution {
    pub u: Field,
    pub map: SubstitutionMap,
    /// Datum and solution in `τ` coordinates.
    pub f_tau: Field,
    pub u_tau: Field,
}

/// Solves the degenerate problem by moving to `τ` coordinates, solving the
/// regular principal problem there and moving back.
pub fn solve_degenerate(
    f: &Field,
    prob: &EllipticProblem,
    weights: &[DegWeight],
) -> Result<DegenerateSolution> {
    let map = substitution(weights, f.grid())?;
    let f_tau = transform_field(f, &map, Direction::ToTau)?;
    let u_tau = elliptic::solve_principal(&f_tau, prob)?;
    let u = transform_field(&u_tau, &map, Direction::ToX)?;
    Ok(DegenerateSolution { u, map, f_tau, u_tau })
}

/// `max_x ‖(L_γ u − f)(x)‖` for the degenerate operator.
pub fn degenerate_residual(
    u: &Field,
    f: &Field,
    prob: &EllipticProblem,
    weights: &[DegWeight],
) -> Result<f64> {
    Ok(apply_degenerate(u, prob, weights)?.max_abs_diff(f))
}

/// Coercive terms with degenerate derivatives `D_k^{[i]}`, measured in x.
pub fn degenerate_coercivity_report(
    u: &Field,
    f: &Field,
    prob: &EllipticProblem,
    weights: &[DegWeight],
    norm: &NormSpec,
) -> Result<CoercivityReport> {
    check_len(prob.dim(), weights.len())?;
    elliptic::coercivity_with(u, f, prob, norm, |v, k, i| {
        degenerate_derivative(v, &weights[k], k, i)
    })
}
