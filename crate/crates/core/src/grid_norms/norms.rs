use num_complex::Complex64;

use super::{Field, Grid, Side, Weight};
use crate::error::{check_len, Error, Result};

/// Spatial exponents `p = (p_1, …, p_n)` and an optional time exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedExponents {
    p: Vec<f64>,
    p0: Option<f64>,
}

impl MixedExponents {
    pub fn new(p: &[f64]) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidDimension("need at least one exponent".into()));
        }
        for &pk in p {
            check_exponent(pk)?;
        }
        Ok(Self {
            p: p.to_vec(),
            p0: None,
        })
    }

    pub fn uniform(n: usize, p: f64) -> Result<Self> {
        Self::new(&vec![p; n])
    }

    pub fn with_time(mut self, p0: f64) -> Result<Self> {
        check_exponent(p0)?;
        self.p0 = Some(p0);
        Ok(self)
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn p0(&self) -> Option<f64> {
        self.p0
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if (1.0..f64::INFINITY).contains(&p) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange(format!(
            "exponent {p} must lie in [1, inf)"
        )))
    }
}

/// The `q`-norm on `C^M`, `q ∈ [1, ∞]`.
pub fn component_norm(v: &[Complex64], q: f64) -> f64 {
    if q.is_infinite() {
        v.iter().map(|c| c.norm()).fold(0.0, f64::max)
    } else if q == 2.0 {
        v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    } else {
        v.iter().map(|c| c.norm().powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Pointwise `‖u(x)‖_q` for every lattice point.
pub fn pointwise_norms(u: &Field, q: f64) -> Vec<f64> {
    let npts = u.grid().len();
    let mut acc = vec![0.0; npts];
    if q.is_infinite() {
        for m in 0..u.components() {
            for (a, v) in acc.iter_mut().zip(u.component(m)) {
                *a = f64::max(*a, v.norm());
            }
        }
        return acc;
    }
    for m in 0..u.components() {
        for (a, v) in acc.iter_mut().zip(u.component(m)) {
            *a += if q == 2.0 { v.norm_sqr() } else { v.norm().powf(q) };
        }
    }
    acc.iter_mut().for_each(|a| *a = a.powf(1.0 / q));
    acc
}

/// Iterated rectangle-rule mixed norm of nonnegative pointwise values.
///
/// Axis 0 is integrated first, carrying `weights`; each later axis raises
/// the previous level to its own exponent.
pub fn mixed_norm_of_values(
    grid: &Grid,
    values: &[f64],
    exps: &MixedExponents,
    weights: &[f64],
) -> Result<f64> {
    check_len(grid.dim(), exps.dim())?;
    check_len(grid.len(), values.len())?;
    check_len(grid.len(), weights.len())?;
    let p = exps.p();
    let n0 = grid.sizes()[0];
    let h0 = grid.spacing(0);
    let mut level: Vec<f64> = values
        .chunks(n0)
        .zip(weights.chunks(n0))
        .map(|(vs, ws)| {
            let s: f64 = vs.iter().zip(ws).map(|(v, w)| v.powf(p[0]) * w).sum();
            (s * h0).powf(1.0 / p[0])
        })
        .collect();
    for (k, &pk) in p.iter().enumerate().skip(1) {
        let nk = grid.sizes()[k];
        let hk = grid.spacing(k);
        level = level
            .chunks(nk)
            .map(|vs| {
                let s: f64 = vs.iter().map(|v| v.powf(pk)).sum();
                (s * hk).powf(1.0 / pk)
            })
            .collect();
    }
    Ok(level[0])
}

/// Weighted mixed norm `‖u‖_{L_{p,γ}(E)}` with `E = (C^M, ‖·‖_q)`.
pub fn mixed_norm(u: &Field, exps: &MixedExponents, weight: &Weight, q: f64) -> Result<f64> {
    u.expect_side(Side::Physical)?;
    let weights = weight.values_on(u.grid())?;
    mixed_norm_of_values(u.grid(), &pointwise_norms(u, q), exps, &weights)
}

/// Exponents, weight and component norm of one function space `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormSpec {
    pub exponents: MixedExponents,
    pub weight: Weight,
    pub q: f64,
}

impl NormSpec {
    pub fn new(exponents: MixedExponents, weight: Weight, q: f64) -> Result<Self> {
        if !(q >= 1.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "component exponent q = {q} < 1"
            )));
        }
        Ok(Self { exponents, weight, q })
    }

    /// Unweighted `L_2(ℓ_2)` on `n` axes.
    pub fn l2(n: usize) -> Self {
        Self {
            exponents: MixedExponents::uniform(n, 2.0).expect("2 is a valid exponent"),
            weight: Weight::Unit,
            q: 2.0,
        }
    }

    pub fn norm(&self, u: &Field) -> Result<f64> {
        mixed_norm(u, &self.exponents, &self.weight, self.q)
    }

    /// Norm of precomputed pointwise values on `grid`.
    pub fn norm_of_values(&self, grid: &Grid, values: &[f64]) -> Result<f64> {
        let weights = self.weight.values_on(grid)?;
        mixed_norm_of_values(grid, values, &self.exponents, &weights)
    }
}
