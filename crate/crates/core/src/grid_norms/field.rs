use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftDirection;

use super::{fft, Grid};
use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Physical,
    Spectral,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Physical => "physical",
            Side::Spectral => "spectral",
        }
    }
}

/// Samples of a function with values in the truncated sequence space `C^M`.
///
/// Values are stored component-major: `values[m * grid.len() + point]`.
/// On the spectral side the slots hold discrete Fourier coefficients
/// normalized by `1 / ∏ N_k`, so a constant field maps to a single
/// coefficient equal to that constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    components: usize,
    values: Vec<Complex64>,
    side: Side,
}

impl Field {
    pub fn zeros(grid: &Grid, components: usize) -> Self {
        Self {
            grid: grid.clone(),
            components,
            values: vec![Complex64::new(0.0, 0.0); components * grid.len()],
            side: Side::Physical,
        }
    }

    pub fn from_values(grid: &Grid, components: usize, values: Vec<Complex64>, side: Side) -> Result<Self> {
        check_len(components * grid.len(), values.len())?;
        if components == 0 {
            return Err(Error::InvalidDimension(
                "field needs at least one component".into(),
            ));
        }
        Ok(Self {
            grid: grid.clone(),
            components,
            values,
            side,
        })
    }

    /// Physical-side field sampled from `f(x, m)`; `m` counts from 0.
    pub fn from_fn<F>(grid: &Grid, components: usize, f: F) -> Self
    where
        F: Fn(&[f64], usize) -> Complex64,
    {
        let npts = grid.len();
        let mut values = Vec::with_capacity(components * npts);
        for m in 0..components {
            for lin in 0..npts {
                values.push(f(&grid.point(lin), m));
            }
        }
        Self {
            grid: grid.clone(),
            components,
            values,
            side: Side::Physical,
        }
    }

    /// Real-valued physical field sampled from `f(x, m)`.
    pub fn from_real_fn<F>(grid: &Grid, components: usize, f: F) -> Self
    where
        F: Fn(&[f64], usize) -> f64,
    {
        Self::from_fn(grid, components, |x, m| Complex64::new(f(x, m), 0.0))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn component(&self, m: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.values[m * n..(m + 1) * n]
    }

    pub fn component_mut(&mut self, m: usize) -> &mut [Complex64] {
        let n = self.grid.len();
        &mut self.values[m * n..(m + 1) * n]
    }

    pub fn value(&self, lin: usize, m: usize) -> Complex64 {
        self.values[m * self.grid.len() + lin]
    }

    /// Component vector `u(x)` at point `lin`.
    pub fn vector_at(&self, lin: usize) -> Vec<Complex64> {
        (0..self.components).map(|m| self.value(lin, m)).collect()
    }

    pub(crate) fn expect_side(&self, side: Side) -> Result<()> {
        if self.side == side {
            Ok(())
        } else {
            Err(Error::SideMismatch {
                expected: side.name(),
                found: self.side.name(),
            })
        }
    }

    /// Discrete Fourier coefficients, normalized by `1 / ∏ N_k`.
    pub fn forward(&self) -> Result<Field> {
        self.expect_side(Side::Physical)?;
        let mut out = self.clone();
        let npts = self.grid.len();
        let scale = 1.0 / npts as f64;
        out.values.par_chunks_mut(npts).for_each(|block| {
            fft::transform(&self.grid, block, FftDirection::Forward);
            block.iter_mut().for_each(|v| *v *= scale);
        });
        out.side = Side::Spectral;
        Ok(out)
    }

    pub fn inverse(&self) -> Result<Field> {
        self.expect_side(Side::Spectral)?;
        let mut out = self.clone();
        let npts = self.grid.len();
        out.values.par_chunks_mut(npts).for_each(|block| {
            fft::transform(&self.grid, block, FftDirection::Inverse);
        });
        out.side = Side::Physical;
        Ok(out)
    }

    /// Multiplies the spectrum (spectral side, in place) by `symbol(ξ, m)`.
    pub fn scale_spectrum<F>(&mut self, symbol: F) -> Result<()>
    where
        F: Fn(&[f64], usize) -> Complex64 + Sync,
    {
        self.expect_side(Side::Spectral)?;
        let npts = self.grid.len();
        let grid = &self.grid;
        self.values
            .par_chunks_mut(npts)
            .enumerate()
            .for_each(|(m, block)| {
                for (lin, v) in block.iter_mut().enumerate() {
                    *v *= symbol(&grid.frequency(lin), m);
                }
            });
        Ok(())
    }

    /// Fallible variant of [`Field::scale_spectrum`]; the first error wins.
    pub fn try_scale_spectrum<F>(&mut self, symbol: F) -> Result<()>
    where
        F: Fn(&[f64], usize) -> Result<Complex64> + Sync,
    {
        self.expect_side(Side::Spectral)?;
        let npts = self.grid.len();
        let grid = &self.grid;
        self.values
            .par_chunks_mut(npts)
            .enumerate()
            .try_for_each(|(m, block)| {
                for (lin, v) in block.iter_mut().enumerate() {
                    *v *= symbol(&grid.frequency(lin), m)?;
                }
                Ok(())
            })
    }

    /// `F⁻¹ symbol F u` for a physical-side field.
    pub fn apply_multiplier<F>(&self, symbol: F) -> Result<Field>
    where
        F: Fn(&[f64], usize) -> Complex64 + Sync,
    {
        let mut spec = self.forward()?;
        spec.scale_spectrum(symbol)?;
        spec.inverse()
    }

    /// `D^α u` via the multiplier `∏ (iξ_k)^{α_k}`.
    ///
    /// The Nyquist slot has no symmetric partner, so it is dropped for odd
    /// derivative orders along that axis.
    pub fn spectral_derivative(&self, alpha: &[u32]) -> Result<Field> {
        check_len(self.grid.dim(), alpha.len())?;
        if alpha.iter().all(|&a| a == 0) {
            self.expect_side(Side::Physical)?;
            return Ok(self.clone());
        }
        let mut spec = self.forward()?;
        let npts = self.grid.len();
        let grid = &self.grid;
        let factors: Vec<Complex64> = (0..npts).map(|lin| derivative_factor(grid, lin, alpha)).collect();
        spec.values.par_chunks_mut(npts).for_each(|block| {
            for (v, f) in block.iter_mut().zip(&factors) {
                *v *= f;
            }
        });
        spec.inverse()
    }

    /// Pointwise product with a scalar field sampled on the same grid.
    pub fn multiply_pointwise(&self, scalar: &[Complex64]) -> Result<Field> {
        self.expect_side(Side::Physical)?;
        check_len(self.grid.len(), scalar.len())?;
        let mut out = self.clone();
        let npts = self.grid.len();
        out.values.par_chunks_mut(npts).for_each(|block| {
            for (v, s) in block.iter_mut().zip(scalar) {
                *v *= s;
            }
        });
        Ok(out)
    }

    /// Componentwise scaling `u_m ↦ factors[m] u_m`.
    pub fn scale_components(&self, factors: &[Complex64]) -> Result<Field> {
        check_len(self.components, factors.len())?;
        let mut out = self.clone();
        let npts = self.grid.len();
        out.values
            .par_chunks_mut(npts)
            .zip(factors.par_iter())
            .for_each(|(block, f)| block.iter_mut().for_each(|v| *v *= f));
        Ok(out)
    }

    pub fn map<F>(&self, f: F) -> Field
    where
        F: Fn(Complex64) -> Complex64,
    {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = f(*v));
        out
    }

    /// Largest modulus over all samples and components.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max_x ‖u(x) − v(x)‖` with the componentwise max modulus.
    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn compatible(&self, other: &Field) {
        assert_eq!(self.side, other.side, "side mismatch in field arithmetic");
        assert_eq!(self.components, other.components, "component count mismatch");
        assert_eq!(self.grid.sizes(), other.grid.sizes(), "grid mismatch");
    }

    /// Resamples along `axis` at arbitrary `points` by trigonometric
    /// interpolation; the result lives on `target`, whose size along `axis`
    /// must equal `points.len()`.
    pub fn resample_axis(&self, axis: usize, points: &[f64], target: &Grid) -> Result<Field> {
        self.expect_side(Side::Physical)?;
        check_len(self.grid.dim(), target.dim())?;
        check_len(target.sizes()[axis], points.len())?;
        for k in 0..self.grid.dim() {
            if k != axis {
                check_len(self.grid.sizes()[k], target.sizes()[k])?;
            }
        }
        let n_src = self.grid.sizes()[axis];
        let period = self.grid.periods()[axis];
        let src_stride = self.grid.stride(axis);
        let dst_stride = target.stride(axis);
        let npts_src = self.grid.len();
        let npts_dst = target.len();
        let mut out = Field::zeros(target, self.components);
        for m in 0..self.components {
            let src = self.component(m);
            let dst = &mut out.values[m * npts_dst..(m + 1) * npts_dst];
            for base in 0..npts_src {
                if self.grid.index_along(base, axis) != 0 {
                    continue;
                }
                let line: Vec<Complex64> = (0..n_src).map(|j| src[base + j * src_stride]).collect();
                let multi = self.grid.multi_index(base);
                let dst_base: usize = multi.iter().enumerate().map(|(k, &i)| i * target.stride(k)).sum();
                for (j, v) in fft::interpolate_line(&line, period, points)
                    .into_iter()
                    .enumerate()
                {
                    dst[dst_base + j * dst_stride] = v;
                }
            }
        }
        Ok(out)
    }
}

fn derivative_factor(grid: &Grid, lin: usize, alpha: &[u32]) -> Complex64 {
    let mut factor = Complex64::new(1.0, 0.0);
    for (k, &a) in alpha.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let j = grid.index_along(lin, k);
        if a % 2 == 1 && grid.is_nyquist(k, j) {
            return Complex64::new(0.0, 0.0);
        }
        let ixi = Complex64::new(0.0, grid.wavenumber(k, j));
        factor *= ixi.powu(a);
    }
    factor
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.compatible(rhs);
        let mut out = self.clone();
        out.values.iter_mut().zip(&rhs.values).for_each(|(a, b)| *a += b);
        out
    }
}

impl Add<&Field> for Field {
    type Output = Field;
    fn add(mut self, rhs: &Field) -> Field {
        self.compatible(rhs);
        self.values.iter_mut().zip(&rhs.values).for_each(|(a, b)| *a += b);
        self
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.compatible(rhs);
        let mut out = self.clone();
        out.values.iter_mut().zip(&rhs.values).for_each(|(a, b)| *a -= b);
        out
    }
}

impl Mul<Complex64> for &Field {
    type Output = Field;
    fn mul(self, rhs: Complex64) -> Field {
        self.map(|v| v * rhs)
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, rhs: f64) -> Field {
        self.map(|v| v * rhs)
    }
}

/// Forward transform as a free function.
pub fn forward_transform(u: &Field) -> Result<Field> {
    u.forward()
}

pub fn inverse_transform(u: &Field) -> Result<Field> {
    u.inverse()
}

pub fn spectral_derivative(u: &Field, alpha: &[u32]) -> Result<Field> {
    u.spectral_derivative(alpha)
}
