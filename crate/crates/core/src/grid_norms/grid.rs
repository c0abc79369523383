use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Anisotropic periodic sampling lattice.
///
/// Axis `k` carries `sizes[k]` uniform nodes `j * periods[k] / sizes[k]` on
/// one period. Points are stored with axis 0 varying fastest, so the
/// innermost integral of a mixed norm runs over contiguous memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    sizes: Vec<usize>,
    periods: Vec<f64>,
    strides: Vec<usize>,
}

impl Grid {
    pub fn new(sizes: &[usize], periods: &[f64]) -> Result<Self> {
        Self::make(sizes.len(), sizes, periods)
    }

    /// Builds an `n`-dimensional grid, checking that the size and period
    /// vectors agree with `n`.
    pub fn make(n: usize, sizes: &[usize], periods: &[f64]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("n must be at least 1".into()));
        }
        if sizes.len() != n || periods.len() != n {
            return Err(Error::InvalidDimension(format!(
                "expected {n} sizes and periods, got {} and {}",
                sizes.len(),
                periods.len()
            )));
        }
        for (k, (&size, &period)) in sizes.iter().zip(periods).enumerate() {
            if size < 4 || size % 2 != 0 {
                return Err(Error::InvalidDimension(format!(
                    "axis {k}: size {size} must be even and at least 4"
                )));
            }
            if !(period > 0.0 && period.is_finite()) {
                return Err(Error::InvalidDimension(format!(
                    "axis {k}: period {period} must be positive"
                )));
            }
        }
        let mut strides = Vec::with_capacity(n);
        let mut acc = 1;
        for &size in sizes {
            strides.push(acc);
            acc *= size;
        }
        Ok(Self {
            sizes: sizes.to_vec(),
            periods: periods.to_vec(),
            strides,
        })
    }

    /// Uniform `n`-cube grid with period `2π` on every axis.
    pub fn cube(n: usize, size: usize) -> Result<Self> {
        Self::make(n, &vec![size; n], &vec![2.0 * PI; n])
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    /// Total number of lattice points.
    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.periods[axis] / self.sizes[axis] as f64
    }

    pub fn node(&self, axis: usize, j: usize) -> f64 {
        j as f64 * self.spacing(axis)
    }

    pub fn nodes(&self, axis: usize) -> Vec<f64> {
        (0..self.sizes[axis]).map(|j| self.node(axis, j)).collect()
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|k| self.spacing(k)).product()
    }

    /// Signed mode number in `{-N/2, …, N/2 - 1}` for FFT slot `j`.
    pub fn mode(&self, axis: usize, j: usize) -> i64 {
        let n = self.sizes[axis];
        if j < n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    /// Angular frequency `2π m / L` of FFT slot `j`.
    pub fn wavenumber(&self, axis: usize, j: usize) -> f64 {
        2.0 * PI * self.mode(axis, j) as f64 / self.periods[axis]
    }

    pub fn is_nyquist(&self, axis: usize, j: usize) -> bool {
        j == self.sizes[axis] / 2
    }

    /// Index along `axis` of linear point index `lin`.
    pub fn index_along(&self, lin: usize, axis: usize) -> usize {
        (lin / self.strides[axis]) % self.sizes[axis]
    }

    pub fn multi_index(&self, lin: usize) -> Vec<usize> {
        (0..self.dim()).map(|k| self.index_along(lin, k)).collect()
    }

    pub fn point(&self, lin: usize) -> Vec<f64> {
        (0..self.dim())
            .map(|k| self.node(k, self.index_along(lin, k)))
            .collect()
    }

    /// Wave vector of spectral slot `lin`.
    pub fn frequency(&self, lin: usize) -> Vec<f64> {
        (0..self.dim())
            .map(|k| self.wavenumber(k, self.index_along(lin, k)))
            .collect()
    }

    /// Same lattice with the period of `axis` replaced.
    pub fn with_period(&self, axis: usize, period: f64) -> Result<Self> {
        let mut periods = self.periods.clone();
        periods[axis] = period;
        Self::new(&self.sizes, &periods)
    }

    pub fn with_periods(&self, periods: &[f64]) -> Result<Self> {
        Self::make(self.dim(), &self.sizes, periods)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_nodes() {
        let g = Grid::make(1, &[16], &[2.0 * PI]).unwrap();
        assert_eq!(g.len(), 16);
        for j in 0..16 {
            assert!((g.node(0, j) - j as f64 * PI / 8.0).abs() < 1e-15);
        }
    }

    #[test]
    fn anisotropic_lattice() {
        let g = Grid::make(2, &[8, 16], &[2.0 * PI, 4.0 * PI]).unwrap();
        assert_eq!(g.len(), 128);
        assert!((g.spacing(1) - PI / 4.0).abs() < 1e-15);
        assert_eq!(g.multi_index(8 * 3 + 5), vec![5, 3]);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(
            Grid::make(1, &[5], &[1.0]),
            Err(Error::InvalidDimension(_))
        ));
        assert!(Grid::make(1, &[2], &[1.0]).is_err());
        assert!(Grid::make(1, &[8], &[0.0]).is_err());
        assert!(Grid::make(2, &[8], &[1.0]).is_err());
        assert!(Grid::make(0, &[], &[]).is_err());
    }

    #[test]
    fn frequency_set() {
        let g = Grid::make(1, &[8], &[4.0 * PI]).unwrap();
        let modes: Vec<i64> = (0..8).map(|j| g.mode(0, j)).collect();
        assert_eq!(modes, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert!((g.wavenumber(0, 1) - 0.5).abs() < 1e-15);
    }
}
