use std::f64::consts::PI;

use super::Grid;
use crate::error::{check_len, Error, Result};

/// One factor of a product weight `γ(x) = ∏ γ_k(x_k)`.
#[derive(Debug, Clone, PartialEq)]
pub enum AxisWeight {
    Unit,
    /// Periodic analog of `|x|^α`: `(L/2π)^α |2 sin(πx/L)|^α`.
    PeriodicPower {
        alpha: f64,
        period: f64,
    },
    /// The literal power `|x|^α`, for cube estimates inside one cell.
    AbsPower(f64),
    /// `1 / (1 + a cos(2πx/L))`, `|a| < 1`.
    Cosine {
        amplitude: f64,
        period: f64,
    },
    /// Values at the nodes of the axis it is attached to.
    Table(Vec<f64>),
}

impl AxisWeight {
    /// Pointwise value; `None` for tabulated weights.
    pub fn eval(&self, x: f64) -> Option<f64> {
        match *self {
            AxisWeight::Unit => Some(1.0),
            AxisWeight::PeriodicPower { alpha, period } => {
                let s = (2.0 * (PI * x / period).sin()).abs();
                Some((period / (2.0 * PI)).powf(alpha) * s.powf(alpha))
            }
            AxisWeight::AbsPower(alpha) => Some(x.abs().powf(alpha)),
            AxisWeight::Cosine { amplitude, period } => {
                Some(1.0 / (1.0 + amplitude * (2.0 * PI * x / period).cos()))
            }
            AxisWeight::Table(_) => None,
        }
    }

    /// Power exponent for the weights that are singular somewhere.
    pub fn power_exponent(&self) -> Option<f64> {
        match *self {
            AxisWeight::PeriodicPower { alpha, .. } | AxisWeight::AbsPower(alpha) => Some(alpha),
            _ => None,
        }
    }

    /// Points in `[a, b]` where a power weight vanishes or blows up.
    pub fn singular_points(&self, a: f64, b: f64) -> Vec<f64> {
        match *self {
            AxisWeight::AbsPower(alpha) if alpha != 0.0 && a <= 0.0 && 0.0 <= b => vec![0.0],
            AxisWeight::PeriodicPower { alpha, period } if alpha != 0.0 => {
                let first = (a / period).ceil() as i64;
                let last = (b / period).floor() as i64;
                (first..=last).map(|k| k as f64 * period).collect()
            }
            _ => Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            AxisWeight::Cosine { amplitude, period } => {
                if amplitude.abs() >= 1.0 || !amplitude.is_finite() {
                    return Err(Error::NonPositiveWeight(format!(
                        "cosine amplitude {amplitude} must satisfy |a| < 1"
                    )));
                }
                if *period <= 0.0 {
                    return Err(Error::InvalidDimension("weight period must be positive".into()));
                }
            }
            AxisWeight::PeriodicPower { period, .. } if *period <= 0.0 => {
                return Err(Error::InvalidDimension("weight period must be positive".into()));
            }
            AxisWeight::Table(values) if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) => {
                return Err(Error::NonPositiveWeight("table entries must be positive".into()));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Weight attached to the innermost measure of a mixed norm.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Weight {
    #[default]
    Unit,
    Product(Vec<AxisWeight>),
}

impl Weight {
    /// Periodized power weights `|x_k|^{α_k}`, one per axis.
    pub fn power(alphas: &[f64], periods: &[f64]) -> Result<Self> {
        check_len(alphas.len(), periods.len())?;
        Ok(Weight::Product(
            alphas
                .iter()
                .zip(periods)
                .map(|(&alpha, &period)| AxisWeight::PeriodicPower { alpha, period })
                .collect(),
        ))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Weight::Unit => "unit",
            Weight::Product(axes)
                if axes
                    .iter()
                    .all(|a| matches!(a, AxisWeight::PeriodicPower { .. } | AxisWeight::Unit)) =>
            {
                "power-per-axis"
            }
            Weight::Product(_) => "product-form",
        }
    }

    pub fn axes(&self, n: usize) -> Vec<AxisWeight> {
        match self {
            Weight::Unit => vec![AxisWeight::Unit; n],
            Weight::Product(axes) => axes.clone(),
        }
    }

    /// Whether the power exponents lie in the `A_p` range `(-1, p_k - 1)`.
    pub fn satisfies_power_range(&self, p: &[f64]) -> bool {
        match self {
            Weight::Unit => true,
            Weight::Product(axes) => axes.iter().zip(p).all(|(a, &pk)| match a.power_exponent() {
                Some(alpha) => alpha > -1.0 && alpha < pk - 1.0,
                None => true,
            }),
        }
    }

    /// Weight value at every lattice point, in point order.
    pub fn values_on(&self, grid: &Grid) -> Result<Vec<f64>> {
        let npts = grid.len();
        let axes = match self {
            Weight::Unit => return Ok(vec![1.0; npts]),
            Weight::Product(axes) => axes,
        };
        check_len(grid.dim(), axes.len())?;
        let mut per_axis = Vec::with_capacity(axes.len());
        for (k, axis) in axes.iter().enumerate() {
            axis.validate()?;
            let vals = match axis {
                AxisWeight::Table(values) => {
                    check_len(grid.sizes()[k], values.len())?;
                    values.clone()
                }
                other => grid
                    .nodes(k)
                    .into_iter()
                    .map(|x| other.eval(x).unwrap_or(f64::NAN))
                    .collect(),
            };
            if vals.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                return Err(Error::NonPositiveWeight(format!(
                    "axis {k} weight is negative or singular on a grid node"
                )));
            }
            per_axis.push(vals);
        }
        let out: Vec<f64> = (0..npts)
            .map(|lin| {
                per_axis
                    .iter()
                    .enumerate()
                    .map(|(k, vals)| vals[grid.index_along(lin, k)])
                    .product()
            })
            .collect();
        if out.iter().all(|&v| v == 0.0) {
            return Err(Error::NonPositiveWeight("weight vanishes on every node".into()));
        }
        Ok(out)
    }
}
