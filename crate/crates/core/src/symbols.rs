//! Operator-valued multiplier symbols and a sampled Mikhlin-condition check.
//!
//! Every symbol here is diagonal in the component basis, so it is returned
//! as the vector of its diagonal entries and its operator norm is the
//! largest entry modulus.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{check_len, Error, Result};
use crate::operator::{diag_opnorm, DiagOperator};

/// `(t, h, μ, λ, l, α, σ)` for the embedding symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolParams {
    t: Vec<f64>,
    h: f64,
    mu: f64,
    lambda: Complex64,
    l: Vec<u32>,
    alpha: Vec<u32>,
    sigma: Vec<f64>,
}

impl SymbolParams {
    pub fn new(
        t: &[f64],
        h: f64,
        mu: f64,
        lambda: Complex64,
        l: &[u32],
        alpha: &[u32],
        sigma: &[f64],
    ) -> Result<Self> {
        let n = t.len();
        check_len(n, l.len())?;
        check_len(n, alpha.len())?;
        check_len(n, sigma.len())?;
        if t.iter().any(|tk| !(*tk > 0.0)) {
            return Err(Error::ParameterOutOfRange("t_k must be positive".into()));
        }
        if !(h > 0.0) {
            return Err(Error::ParameterOutOfRange(format!("h = {h} must be positive")));
        }
        if l.contains(&0) {
            return Err(Error::ParameterOutOfRange("l_k must be positive".into()));
        }
        if sigma.iter().any(|s| !(*s >= 0.0)) {
            return Err(Error::ParameterOutOfRange("sigma_k must be nonnegative".into()));
        }
        let kappa = kappa_from_sigma(alpha, l, sigma);
        if !(mu >= 0.0 && mu <= 1.0 - kappa + 1e-12) {
            return Err(Error::ParameterOutOfRange(format!(
                "mu = {mu} outside [0, 1 - kappa] with kappa = {kappa}"
            )));
        }
        Ok(Self {
            t: t.to_vec(),
            h,
            mu,
            lambda,
            l: l.to_vec(),
            alpha: alpha.to_vec(),
            sigma: sigma.to_vec(),
        })
    }

    pub fn kappa(&self) -> f64 {
        kappa_from_sigma(&self.alpha, &self.l, &self.sigma)
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }

    /// The same parameters with `t` and `h` replaced.
    pub fn rescaled(&self, t: &[f64], h: f64) -> Result<Self> {
        Self::new(t, h, self.mu, self.lambda, &self.l, &self.alpha, &self.sigma)
    }
}

/// `Σ (α_k + σ_k) / l_k`.
pub fn kappa_from_sigma(alpha: &[u32], l: &[u32], sigma: &[f64]) -> f64 {
    alpha
        .iter()
        .zip(l)
        .zip(sigma)
        .map(|((&a, &lk), &s)| (a as f64 + s) / lk as f64)
        .sum()
}

/// `T(t) |ξ|^{α+σ} A^{1-κ-μ} h^{-μ} [A + Σ t_k |ξ_k|^{l_k} + h^{-1}]⁻¹`.
pub fn psi_symbol(xi: &[f64], sp: &SymbolParams, op: &DiagOperator) -> Vec<Complex64> {
    let kappa = sp.kappa();
    let mut scalar = sp.h.powf(-sp.mu);
    let mut shift = 1.0 / sp.h;
    for (k, &x) in xi.iter().enumerate().take(sp.dim()) {
        let e = sp.alpha[k] as f64 + sp.sigma[k];
        let lk = sp.l[k] as f64;
        scalar *= sp.t[k].powf(e / lk) * abs_pow(x, e);
        shift += sp.t[k] * x.abs().powf(lk);
    }
    op.diag()
        .iter()
        .map(|&d| Complex64::new(scalar * d.powf(1.0 - kappa - sp.mu) / (d + shift), 0.0))
        .collect()
}

// |x|^e with 0^0 = 1
fn abs_pow(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        x.abs().powf(e)
    }
}

/// `Σ t_k ξ_k^{2 l_k}`.
pub fn principal_part(xi: &[f64], t: &[f64], l: &[u32]) -> f64 {
    xi.iter()
        .zip(t)
        .zip(l)
        .map(|((x, tk), lk)| tk * x.powi(2 * *lk as i32))
        .sum()
}

/// `(A + λ + Σ t_k ξ_k^{2 l_k})⁻¹`.
pub fn principal_symbol(
    xi: &[f64],
    lambda: Complex64,
    t: &[f64],
    l: &[u32],
    op: &DiagOperator,
) -> Result<Vec<Complex64>> {
    op.resolvent_entries(lambda + principal_part(xi, t, l))
}

/// `t_k^{i/2l_k} |λ|^{1-i/2l_k} ξ_k^i (A + λ + Σ t ξ^{2l})⁻¹`.
pub fn coercive_symbol_term(
    xi: &[f64],
    lambda: Complex64,
    t: &[f64],
    l: &[u32],
    k: usize,
    i: u32,
    op: &DiagOperator,
) -> Result<Vec<Complex64>> {
    let lk2 = 2.0 * l[k] as f64;
    if i as f64 > lk2 {
        return Err(Error::ParameterOutOfRange(format!(
            "order {i} exceeds 2 l_k = {lk2}"
        )));
    }
    let r = i as f64 / lk2;
    let factor = t[k].powf(r) * lambda.norm().powf(1.0 - r) * xi[k].powi(i as i32);
    Ok(principal_symbol(xi, lambda, t, l, op)?
        .into_iter()
        .map(|v| v * factor)
        .collect())
}

/// A diagonal symbol `ξ ↦ Ψ(ξ)` on `R^n`.
pub trait Symbol: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, xi: &[f64]) -> Result<Vec<Complex64>>;

    /// Exact mixed partial `D^β Ψ(ξ)`, when available.
    fn derivative(&self, _xi: &[f64], _beta: &[u8]) -> Option<Result<Vec<Complex64>>> {
        None
    }
}

pub struct PsiSymbol<'a> {
    pub params: &'a SymbolParams,
    pub op: &'a DiagOperator,
}

impl Symbol for PsiSymbol<'_> {
    fn dim(&self) -> usize {
        self.params.dim()
    }

    fn eval(&self, xi: &[f64]) -> Result<Vec<Complex64>> {
        Ok(psi_symbol(xi, self.params, self.op))
    }
}

pub struct PrincipalSymbol<'a> {
    pub lambda: Complex64,
    pub t: &'a [f64],
    pub l: &'a [u32],
    pub op: &'a DiagOperator,
}

impl Symbol for PrincipalSymbol<'_> {
    fn dim(&self) -> usize {
        self.t.len()
    }

    fn eval(&self, xi: &[f64]) -> Result<Vec<Complex64>> {
        principal_symbol(xi, self.lambda, self.t, self.l, self.op)
    }

    /// With `D = d + λ + Σ g_k(ξ_k)`, `∂^β D⁻¹ = (-1)^r r! ∏_{β_k=1} g_k' / D^{r+1}`.
    fn derivative(&self, xi: &[f64], beta: &[u8]) -> Option<Result<Vec<Complex64>>> {
        let base = match principal_symbol(xi, self.lambda, self.t, self.l, self.op) {
            Ok(b) => b,
            Err(e) => return Some(Err(e)),
        };
        let mut r = 0;
        let mut prod = 1.0;
        for (k, &b) in beta.iter().enumerate() {
            if b == 1 {
                r += 1;
                let lk = self.l[k] as i32;
                prod *= 2.0 * lk as f64 * self.t[k] * xi[k].powi(2 * lk - 1);
            }
        }
        let fact: f64 = (1..=r).map(|v| v as f64).product();
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        Some(Ok(base
            .into_iter()
            .map(|inv| inv.powu(r + 1) * (sign * fact * prod))
            .collect()))
    }
}

pub struct CoerciveTermSymbol<'a> {
    pub lambda: Complex64,
    pub t: &'a [f64],
    pub l: &'a [u32],
    pub axis: usize,
    pub order: u32,
    pub op: &'a DiagOperator,
}

impl Symbol for CoerciveTermSymbol<'_> {
    fn dim(&self) -> usize {
        self.t.len()
    }

    fn eval(&self, xi: &[f64]) -> Result<Vec<Complex64>> {
        coercive_symbol_term(xi, self.lambda, self.t, self.l, self.axis, self.order, self.op)
    }
}

/// Scalar symbol from a closure, for ad-hoc checks.
pub struct FnSymbol<F> {
    pub dim: usize,
    pub f: F,
}

impl<F> Symbol for FnSymbol<F>
where
    F: Fn(&[f64]) -> Vec<Complex64> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, xi: &[f64]) -> Result<Vec<Complex64>> {
        Ok((self.f)(xi))
    }
}

/// Product sample set `∏_k S_k` in frequency space.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySamples {
    axes: Vec<Vec<f64>>,
}

impl FrequencySamples {
    /// `±2^{j/per_octave}` for `j/per_octave ∈ [j_min, j_max]` on every axis.
    pub fn dyadic(n: usize, j_min: i32, j_max: i32, per_octave: u32) -> Self {
        let po = per_octave.max(1) as i32;
        let mut axis: Vec<f64> = (j_min * po..=j_max * po)
            .map(|j| (j as f64 / po as f64).exp2())
            .collect();
        let neg: Vec<f64> = axis.iter().map(|x| -x).collect();
        axis.extend(neg);
        Self { axes: vec![axis; n] }
    }

    /// Default: 8 points per octave over `2^{-10} … 2^{10}`.
    pub fn default_dyadic(n: usize) -> Self {
        Self::dyadic(n, -10, 10, 8)
    }

    pub fn from_axes(axes: Vec<Vec<f64>>) -> Self {
        Self { axes }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, mut idx: usize) -> Vec<f64> {
        self.axes
            .iter()
            .map(|a| {
                let v = a[idx % a.len()];
                idx /= a.len();
                v
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MikhlinSup {
    pub sup: f64,
    pub argmax: Vec<f64>,
}

/// `max_ξ ∏|ξ_k|^{β_k+σ_k} ‖D^β Ψ(ξ)‖` over the sample set.
///
/// Uses the symbol's exact derivative when it provides one, otherwise
/// central differences with step `1e-4 |ξ_k|` on each differentiated axis.
pub fn mikhlin_sup(
    symbol: &dyn Symbol,
    beta: &[u8],
    sigma: &[f64],
    samples: &FrequencySamples,
) -> Result<MikhlinSup> {
    mikhlin_sup_with(symbol, beta, sigma, samples, true)
}

/// As [`mikhlin_sup`], forcing finite differences when `exact` is false.
pub fn mikhlin_sup_with(
    symbol: &dyn Symbol,
    beta: &[u8],
    sigma: &[f64],
    samples: &FrequencySamples,
    exact: bool,
) -> Result<MikhlinSup> {
    let n = symbol.dim();
    check_len(n, beta.len())?;
    check_len(n, sigma.len())?;
    check_len(n, samples.dim())?;
    if beta.iter().any(|b| *b > 1) {
        return Err(Error::ParameterOutOfRange("beta must be binary".into()));
    }
    if samples.axes.iter().flatten().any(|x| *x == 0.0) {
        return Err(Error::GridTouchesAxis);
    }
    if samples.is_empty() {
        return Err(Error::ParameterOutOfRange("empty frequency sample set".into()));
    }
    let (sup, idx) = (0..samples.len())
        .into_par_iter()
        .map(|idx| {
            let xi = samples.point(idx);
            let d = match symbol.derivative(&xi, beta).filter(|_| exact) {
                Some(res) => res?,
                None => finite_difference(symbol, &xi, beta)?,
            };
            let weight: f64 = xi
                .iter()
                .zip(beta)
                .zip(sigma)
                .map(|((x, &b), s)| x.abs().powf(b as f64 + s))
                .product();
            Ok((weight * diag_opnorm(&d), idx))
        })
        .try_reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                Ok(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                })
            },
        )?;
    Ok(MikhlinSup {
        sup,
        argmax: samples.point(idx),
    })
}

fn finite_difference(symbol: &dyn Symbol, xi: &[f64], beta: &[u8]) -> Result<Vec<Complex64>> {
    let axes: Vec<usize> = (0..xi.len()).filter(|&k| beta[k] == 1).collect();
    if axes.is_empty() {
        return symbol.eval(xi);
    }
    let steps: Vec<f64> = axes.iter().map(|&k| 1e-4 * xi[k].abs()).collect();
    let denom: f64 = steps.iter().map(|h| 2.0 * h).product();
    let mut acc: Option<Vec<Complex64>> = None;
    for mask in 0u32..(1 << axes.len()) {
        let mut point = xi.to_vec();
        let mut sign = 1.0;
        for (i, &k) in axes.iter().enumerate() {
            if mask >> i & 1 == 1 {
                point[k] -= steps[i];
                sign = -sign;
            } else {
                point[k] += steps[i];
            }
        }
        let v = symbol.eval(&point)?;
        match acc.as_mut() {
            None => acc = Some(v.into_iter().map(|x| x * sign).collect()),
            Some(a) => a.iter_mut().zip(v).for_each(|(a, x)| *a += x * sign),
        }
    }
    Ok(acc
        .expect("at least one stencil point")
        .into_iter()
        .map(|x| x / denom)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn model_params(t: f64, h: f64) -> SymbolParams {
        SymbolParams::new(&[t], h, 0.0, re(0.0), &[2], &[1], &[0.0]).unwrap()
    }

    #[test]
    fn psi_vanishes_at_origin() {
        let op = DiagOperator::dyadic(3, 1.0, 2.0).unwrap();
        let v = psi_symbol(&[0.0], &model_params(1.0, 1.0), &op);
        assert!(v.iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn psi_closed_form_peak() {
        // xi / (2 + xi^2) peaks at sqrt(2) with value sqrt(2)/4
        let op = DiagOperator::scalar(1.0).unwrap();
        let sp = model_params(1.0, 1.0);
        let v = psi_symbol(&[2f64.sqrt()], &sp, &op)[0].re;
        assert!((v - 2f64.sqrt() / 4.0).abs() < 1e-15);
        let s = mikhlin_sup(
            &PsiSymbol { params: &sp, op: &op },
            &[0],
            &[0.0],
            &FrequencySamples::default_dyadic(1),
        )
        .unwrap();
        assert!((s.sup - 2f64.sqrt() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn psi_sup_invariant_under_t_dilation() {
        let op = DiagOperator::scalar(1.0).unwrap();
        let samples = FrequencySamples::dyadic(1, -20, 20, 8);
        let sup = |t: f64| {
            let sp = model_params(t, 1.0);
            mikhlin_sup(&PsiSymbol { params: &sp, op: &op }, &[0], &[0.0], &samples)
                .unwrap()
                .sup
        };
        // t = 4 rescales xi by 1/2, which maps the dyadic grid onto itself
        assert!((sup(1.0) - sup(4.0)).abs() < 1e-15);
    }

    #[test]
    fn mu_range_is_enforced() {
        // kappa = 1/2
        assert!(SymbolParams::new(&[1.0], 1.0, 0.6, re(0.0), &[2], &[1], &[0.0]).is_err());
        assert!(SymbolParams::new(&[1.0], 1.0, 0.5, re(0.0), &[2], &[1], &[0.0]).is_ok());
        assert!(SymbolParams::new(&[0.0], 1.0, 0.0, re(0.0), &[2], &[1], &[0.0]).is_err());
    }

    #[test]
    fn principal_examples() {
        let one = DiagOperator::scalar(1.0).unwrap();
        let v = principal_symbol(&[1.0], re(0.0), &[1.0], &[1], &one).unwrap();
        assert!((v[0] - re(0.5)).norm() < 1e-15);
        let v = principal_symbol(&[0.0], re(1.0), &[1.0], &[1], &one).unwrap();
        assert!((v[0] - re(0.5)).norm() < 1e-15);

        let op = DiagOperator::dyadic(4, 1.0, 2.0).unwrap();
        let lam = Complex64::new(0.0, 1.0);
        let v = principal_symbol(&[2.0], lam, &[1.0], &[1], &op).unwrap();
        for (m, x) in v.iter().enumerate() {
            let expected = (lam + 2f64.powi(m as i32 + 1) + 4.0).inv();
            assert!((x - expected).norm() < 1e-15);
        }
        assert!(v.windows(2).all(|w| w[1].norm() < w[0].norm()));
    }

    #[test]
    fn principal_pole_is_reported() {
        let one = DiagOperator::scalar(1.0).unwrap();
        assert!(matches!(
            principal_symbol(&[1.0], re(-2.0), &[1.0], &[1], &one),
            Err(Error::SingularResolvent { .. })
        ));
    }

    #[test]
    fn coercive_terms() {
        let one = DiagOperator::scalar(1.0).unwrap();
        let v = coercive_symbol_term(&[0.0], re(1.0), &[1.0], &[1], 0, 0, &one).unwrap();
        assert!((v[0] - re(0.5)).norm() < 1e-15);

        let samples = FrequencySamples::dyadic(1, -10, 10, 8);
        let term = CoerciveTermSymbol {
            lambda: re(1.0),
            t: &[1.0],
            l: &[1],
            axis: 0,
            order: 2,
            op: &one,
        };
        let s = mikhlin_sup(&term, &[0], &[0.0], &samples).unwrap();
        assert!(s.sup <= 1.0 && s.sup > 0.999);
        assert!(coercive_symbol_term(&[0.0], re(1.0), &[1.0], &[1], 0, 3, &one).is_err());
    }

    #[test]
    fn scalar_mikhlin_anchor() {
        // phi = 1/(2 + xi^2): sup |xi phi'| = 1/4 at xi^2 = 2
        let one = DiagOperator::scalar(1.0).unwrap();
        let phi = PrincipalSymbol {
            lambda: re(1.0),
            t: &[1.0],
            l: &[1],
            op: &one,
        };
        let samples = FrequencySamples::default_dyadic(1);
        let fd = mikhlin_sup_with(&phi, &[1], &[0.0], &samples, false).unwrap();
        assert!((fd.sup - 0.25).abs() < 1e-3);
        let exact = mikhlin_sup(&phi, &[1], &[0.0], &samples).unwrap();
        assert!((exact.sup - 0.25).abs() < 1e-12);
        assert!((exact.sup - fd.sup).abs() < 1e-5 * exact.sup);

        let zeroth = mikhlin_sup(&phi, &[0], &[0.0], &samples).unwrap();
        assert!((zeroth.sup - 0.5).abs() < 1e-6);
    }

    #[test]
    fn samples_must_avoid_axes() {
        let one = DiagOperator::scalar(1.0).unwrap();
        let phi = PrincipalSymbol {
            lambda: re(1.0),
            t: &[1.0],
            l: &[1],
            op: &one,
        };
        let bad = FrequencySamples::from_axes(vec![vec![0.0, 1.0]]);
        assert!(matches!(
            mikhlin_sup(&phi, &[1], &[0.0], &bad),
            Err(Error::GridTouchesAxis)
        ));
    }
}
