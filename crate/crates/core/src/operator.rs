//! The diagonal positive operator `A = diag(d_1, …, d_M)` on `(C^M, ‖·‖_q)`:
//! powers, resolvent, positivity constant, interpolation norms and an
//! R-boundedness estimator.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{check_len, Error, Result};
use crate::grid_norms::{component_norm, Field};
use crate::random;

#[derive(Debug, Clone, PartialEq)]
pub struct DiagOperator {
    diag: Vec<f64>,
    q: f64,
    growth: Option<f64>,
}

impl DiagOperator {
    pub fn new(diag: &[f64], q: f64) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidDimension(
                "operator needs at least one entry".into(),
            ));
        }
        if let Some(bad) = diag.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
            return Err(Error::ParameterOutOfRange(format!(
                "diagonal entry {bad} is not strictly positive"
            )));
        }
        if !(q >= 1.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "component exponent q = {q} < 1"
            )));
        }
        Ok(Self {
            diag: diag.to_vec(),
            q,
            growth: None,
        })
    }

    /// `d_m = 2^{s m}` for `m = 1..=M`.
    pub fn dyadic(m: usize, s: f64, q: f64) -> Result<Self> {
        let diag: Vec<f64> = (1..=m).map(|i| (s * i as f64).exp2()).collect();
        let mut op = Self::new(&diag, q)?;
        op.growth = Some(s);
        Ok(op)
    }

    /// Identity on `C^1` with the Euclidean norm.
    pub fn scalar(d: f64) -> Result<Self> {
        Self::new(&[d], 2.0)
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn growth(&self) -> Option<f64> {
        self.growth
    }

    pub fn min_entry(&self) -> f64 {
        self.diag.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn norm(&self, v: &[Complex64]) -> f64 {
        component_norm(v, self.q)
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.len(), v.len())?;
        Ok(v.iter().zip(&self.diag).map(|(x, d)| x * d).collect())
    }

    /// Entries `d_m^θ`.
    pub fn powers(&self, theta: f64) -> Vec<f64> {
        self.diag.iter().map(|d| d.powf(theta)).collect()
    }

    pub fn fractional_apply(&self, theta: f64, v: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.len(), v.len())?;
        Ok(v.iter().zip(self.powers(theta)).map(|(x, d)| x * d).collect())
    }

    /// Entries `1 / (d_m + ξ)`.
    pub fn resolvent_entries(&self, xi: Complex64) -> Result<Vec<Complex64>> {
        self.diag
            .iter()
            .enumerate()
            .map(|(m, &d)| {
                let den = xi + d;
                if den.norm() <= f64::EPSILON * (d + xi.norm()) {
                    Err(Error::SingularResolvent {
                        component: m,
                        re: xi.re,
                        im: xi.im,
                    })
                } else {
                    Ok(den.inv())
                }
            })
            .collect()
    }

    pub fn resolvent_apply(&self, xi: Complex64, v: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.len(), v.len())?;
        Ok(self
            .resolvent_entries(xi)?
            .into_iter()
            .zip(v)
            .map(|(r, x)| r * x)
            .collect())
    }

    /// Applies `A` pointwise to a field.
    pub fn apply_field(&self, u: &Field) -> Result<Field> {
        self.fractional_apply_field(1.0, u)
    }

    pub fn fractional_apply_field(&self, theta: f64, u: &Field) -> Result<Field> {
        let factors: Vec<Complex64> = self
            .powers(theta)
            .into_iter()
            .map(|d| Complex64::new(d, 0.0))
            .collect();
        u.scale_components(&factors)
    }

    /// `max_ξ (1 + |ξ|) ‖(A + ξ)⁻¹‖` over the sampled sector.
    pub fn positivity_constant(&self, sector: &Sector) -> Result<f64> {
        let samples = sector.samples();
        if samples.is_empty() {
            return Err(Error::ParameterOutOfRange("sector has no samples".into()));
        }
        samples
            .par_iter()
            .map(|&xi| {
                let entries = self.resolvent_entries(xi)?;
                Ok((1.0 + xi.norm()) * diag_opnorm(&entries))
            })
            .try_reduce(|| 0.0, |a, b| Ok(f64::max(a, b)))
    }

    /// Real-interpolation norm of `v` in `(E(A), E)_{θ,σ}` by the canonical
    /// integral `(∫_0^∞ ‖y^{1-θ-1/σ} A^θ (A + y)⁻¹ v‖^σ dy)^{1/σ}`,
    /// trapezoid rule in `log y`.
    pub fn interpolation_norm(&self, v: &[Complex64], ip: &InterpParams) -> Result<f64> {
        check_len(self.len(), v.len())?;
        let powered = self.fractional_apply(ip.theta, v)?;
        let exponent = 1.0 - ip.theta - 1.0 / ip.sigma;
        let integrand: Vec<f64> = ip
            .y
            .iter()
            .map(|&y| {
                let w: Vec<Complex64> = powered.iter().zip(&self.diag).map(|(x, d)| x / (d + y)).collect();
                // dy = y d(log y)
                (y.powf(exponent) * self.norm(&w)).powf(ip.sigma) * y
            })
            .collect();
        let s = trapezoid_log(&ip.y, &integrand);
        Ok(s.powf(1.0 / ip.sigma))
    }

    /// Norm of the realized interpolation space: `‖A^{1-θ} v‖ + ‖v‖`.
    pub fn interpolation_norm_realized(&self, v: &[Complex64], theta: f64) -> Result<f64> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "theta = {theta} not in (0, 1)"
            )));
        }
        let w = self.fractional_apply(1.0 - theta, v)?;
        Ok(self.norm(&w) + self.norm(v))
    }
}

/// Operator norm of a diagonal map on `(C^M, ‖·‖_q)`, valid for every `q`.
pub fn diag_opnorm(entries: &[Complex64]) -> f64 {
    entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
}

fn trapezoid_log(y: &[f64], f: &[f64]) -> f64 {
    y.windows(2)
        .zip(f.windows(2))
        .map(|(ys, fs)| 0.5 * (fs[0] + fs[1]) * (ys[1] / ys[0]).ln())
        .sum()
}

/// Sample set of the closed sector `|arg ξ| ≤ φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    phi: f64,
    radii: Vec<f64>,
    angles: Vec<f64>,
}

impl Sector {
    pub fn new(phi: f64, radii: &[f64], angles: &[f64]) -> Result<Self> {
        if !(0.0..std::f64::consts::PI).contains(&phi) {
            return Err(Error::ParameterOutOfRange(format!(
                "sector angle {phi} not in [0, pi)"
            )));
        }
        if radii.iter().any(|r| !(*r >= 0.0)) {
            return Err(Error::ParameterOutOfRange("radii must be nonnegative".into()));
        }
        if angles.iter().any(|a| a.abs() > phi + 1e-15) {
            return Err(Error::ParameterOutOfRange(
                "sample angle outside the sector".into(),
            ));
        }
        Ok(Self {
            phi,
            radii: radii.to_vec(),
            angles: angles.to_vec(),
        })
    }

    /// Radii `2^{j/per_octave}` for `j` in `[j_min·per_octave, j_max·per_octave]`
    /// plus `0`, and `n_angles` equispaced arguments in `[-φ, φ]`.
    ///
    /// Doubling `per_octave` and using `2 n_angles - 1` angles nests the
    /// previous sample set.
    pub fn dyadic(phi: f64, j_min: i32, j_max: i32, per_octave: u32, n_angles: usize) -> Result<Self> {
        let po = per_octave.max(1) as i32;
        let mut radii = vec![0.0];
        radii.extend((j_min * po..=j_max * po).map(|j| (j as f64 / po as f64).exp2()));
        let angles: Vec<f64> = if n_angles <= 1 || phi == 0.0 {
            vec![0.0]
        } else {
            (0..n_angles)
                .map(|i| -phi + 2.0 * phi * i as f64 / (n_angles - 1) as f64)
                .collect()
        };
        Self::new(phi, &radii, &angles)
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn samples(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.radii.len() * self.angles.len());
        for &r in &self.radii {
            for &a in &self.angles {
                out.push(Complex64::from_polar(r, a));
            }
        }
        out
    }
}

/// Parameters of the canonical interpolation integral.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpParams {
    theta: f64,
    sigma: f64,
    y: Vec<f64>,
}

impl InterpParams {
    pub const DEFAULT_Y_MIN: f64 = 1e-6;
    pub const DEFAULT_Y_MAX: f64 = 1e6;
    pub const DEFAULT_Y_POINTS: usize = 200;

    pub fn new(theta: f64, sigma: f64) -> Result<Self> {
        Self::with_y_grid(
            theta,
            sigma,
            Self::DEFAULT_Y_MIN,
            Self::DEFAULT_Y_MAX,
            Self::DEFAULT_Y_POINTS,
        )
    }

    pub fn with_y_grid(theta: f64, sigma: f64, y_min: f64, y_max: f64, points: usize) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "theta = {theta} not in (0, 1)"
            )));
        }
        if !(sigma >= 1.0 && sigma.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!(
                "sigma = {sigma} not in [1, inf)"
            )));
        }
        if !(y_min > 0.0 && y_min <= 1.0 && y_max >= 1.0) {
            return Err(Error::DegenerateGrid(format!(
                "y range [{y_min}, {y_max}] must bracket 1"
            )));
        }
        if y_max / y_min < 1e4 {
            return Err(Error::DegenerateGrid(format!(
                "y range ratio {} below 1e4",
                y_max / y_min
            )));
        }
        if points < 2 {
            return Err(Error::DegenerateGrid("need at least two y points".into()));
        }
        let (a, b) = (y_min.ln(), y_max.ln());
        let y = (0..points)
            .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
            .collect();
        Ok(Self { theta, sigma, y })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Rademacher-average ratio `E‖Σ r_j T_j f_j‖ / E‖Σ r_j f_j‖`.
///
/// Signs are enumerated exactly for families of at most 12 members and
/// sampled (`trials` draws from `seed`) above that.
pub fn r_bound_estimate(
    ops: &[DiagOperator],
    vectors: &[Vec<Complex64>],
    trials: usize,
    seed: u64,
) -> Result<f64> {
    check_len(ops.len(), vectors.len())?;
    if ops.is_empty() {
        return Err(Error::ZeroDenominator);
    }
    let m = ops[0].len();
    let q = ops[0].q();
    for (op, v) in ops.iter().zip(vectors) {
        check_len(m, op.len())?;
        check_len(m, v.len())?;
    }
    let images: Vec<Vec<Complex64>> = ops
        .iter()
        .zip(vectors)
        .map(|(op, v)| op.apply(v))
        .collect::<Result<_>>()?;
    let eval = |signs: &dyn Fn(usize) -> f64| {
        let mut num = vec![Complex64::new(0.0, 0.0); m];
        let mut den = vec![Complex64::new(0.0, 0.0); m];
        for (j, (tf, f)) in images.iter().zip(vectors).enumerate() {
            let s = signs(j);
            for i in 0..m {
                num[i] += tf[i] * s;
                den[i] += f[i] * s;
            }
        }
        (component_norm(&num, q), component_norm(&den, q))
    };
    let family = ops.len();
    let (num, den) = if family <= 12 {
        (0u32..(1 << family))
            .map(|mask| eval(&|j| if mask >> j & 1 == 1 { -1.0 } else { 1.0 }))
            .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1))
    } else {
        let mut rng = random::seeded(seed);
        let mut acc = (0.0, 0.0);
        for _ in 0..trials.max(1) {
            let signs: Vec<f64> = (0..family)
                .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
                .collect();
            let (a, b) = eval(&|j| signs[j]);
            acc.0 += a;
            acc.1 += b;
        }
        acc
    };
    if den == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(num / den)
}
