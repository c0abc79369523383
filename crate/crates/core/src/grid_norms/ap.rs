use quadrature::double_exponential;

use super::{AxisWeight, Weight};
use crate::error::{check_len, Error, Result};

/// Axis-aligned box `∏ [lower_k, upper_k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cube {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Cube {
    pub fn new(lower: &[f64], upper: &[f64]) -> Result<Self> {
        check_len(lower.len(), upper.len())?;
        if lower.iter().zip(upper).any(|(a, b)| !(b > a)) {
            return Err(Error::ParameterOutOfRange(
                "cube sides must have positive length".into(),
            ));
        }
        Ok(Self {
            lower: lower.to_vec(),
            upper: upper.to_vec(),
        })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(&[a], &[b])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApEstimate {
    /// Max over the cube family; `+∞` when some cube diverges.
    pub constant: f64,
    pub per_cube: Vec<f64>,
    /// Set when an average is infinite on some cube (exponent outside
    /// `(-1, p - 1)` with the singular point inside the cube).
    pub divergent: bool,
}

/// Sample estimate of the `A_p` constant
/// `sup_Q (avg_Q γ)(avg_Q γ^{-1/(p-1)})^{p-1}` over `cubes`.
///
/// Product weights factor over axes, so each average is a product of 1-D
/// double-exponential quadratures split at the weight's singular points.
pub fn ap_constant_estimate(weight: &Weight, p: f64, cubes: &[Cube]) -> Result<ApEstimate> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::ParameterOutOfRange(format!(
            "A_p needs p in (1, inf), got {p}"
        )));
    }
    if cubes.is_empty() {
        return Err(Error::ParameterOutOfRange("empty cube family".into()));
    }
    let dual = -1.0 / (p - 1.0);
    let mut per_cube = Vec::with_capacity(cubes.len());
    let mut divergent = false;
    for cube in cubes {
        let axes = weight.axes(cube.dim());
        check_len(cube.dim(), axes.len())?;
        let mut avg_w = 1.0;
        let mut avg_dual = 1.0;
        for (k, axis) in axes.iter().enumerate() {
            let (a, b) = (cube.lower[k], cube.upper[k]);
            avg_w *= axis_average(axis, a, b, 1.0)?;
            avg_dual *= axis_average(axis, a, b, dual)?;
        }
        let value = avg_w * avg_dual.powf(p - 1.0);
        if !value.is_finite() {
            divergent = true;
        }
        per_cube.push(if value.is_finite() { value } else { f64::INFINITY });
    }
    let constant = per_cube.iter().copied().fold(0.0, f64::max);
    Ok(ApEstimate {
        constant,
        per_cube,
        divergent,
    })
}

/// `(1/(b-a)) ∫_a^b γ(x)^s dx`; `+∞` when the integral diverges.
fn axis_average(axis: &AxisWeight, a: f64, b: f64, s: f64) -> Result<f64> {
    if let AxisWeight::Table(_) = axis {
        return Err(Error::ParameterOutOfRange(
            "tabulated weights have no pointwise form for cube averages".into(),
        ));
    }
    if let AxisWeight::Cosine { amplitude, .. } = axis {
        if amplitude.abs() >= 1.0 {
            return Err(Error::NonPositiveWeight(format!("cosine amplitude {amplitude}")));
        }
    }
    let singular = axis.singular_points(a, b);
    if let Some(alpha) = axis.power_exponent() {
        if !singular.is_empty() && alpha * s <= -1.0 {
            return Ok(f64::INFINITY);
        }
    }
    let mut breaks = vec![a];
    breaks.extend(singular.iter().copied().filter(|&x| x > a && x < b));
    breaks.push(b);
    let is_singular = |x: f64| singular.contains(&x);
    let f = |x: f64| axis.eval(x).expect("pointwise weight").powf(s);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        // x = c ± h u^2 near a singular end point turns |x - c|^e into a
        // milder |u|^{2e + 1} singularity
        let mid = 0.5 * (w[0] + w[1]);
        for (end, other) in [(w[0], mid), (w[1], mid)] {
            let h = other - end;
            total += if is_singular(end) {
                let g = |u: f64| 2.0 * u * h.abs() * f(end + h * u * u);
                double_exponential::integrate(g, 0.0, 1.0, 1e-14 * h.abs()).integral
            } else {
                let (lo, hi) = if h > 0.0 { (end, other) } else { (other, end) };
                double_exponential::integrate(f, lo, hi, 1e-14 * h.abs()).integral
            };
        }
    }
    Ok(total / (b - a))
}
