//! Embedding, multiplicative and interpolation inequalities for the
//! anisotropic space `W = W^l_{p,t}(E(A), E)`, evaluated on concrete fields.
//!
//! All constants are measured, never assumed: each report carries both
//! sides of the inequality and their ratio.

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::grid_norms::{mixed_norm_of_values, Field, MixedExponents, Weight};
use crate::operator::{DiagOperator, InterpParams};

/// `κ = Σ (α_k + 1/p_k − 1/q_k) / l_k`.
pub fn kappa(alpha: &[u32], l: &[u32], p: &[f64], q: &[f64]) -> Result<f64> {
    check_len(alpha.len(), l.len())?;
    check_len(alpha.len(), p.len())?;
    check_len(alpha.len(), q.len())?;
    Ok(alpha
        .iter()
        .zip(l)
        .zip(p.iter().zip(q))
        .map(|((&a, &lk), (pk, qk))| (a as f64 + 1.0 / pk - 1.0 / qk) / lk as f64)
        .sum())
}

/// `T(t) = ∏ t_k^{(α_k + σ_k)/l_k}`.
pub fn t_factor(t: &[f64], alpha: &[u32], l: &[u32], sigma: &[f64]) -> f64 {
    t.iter()
        .zip(alpha)
        .zip(l.iter().zip(sigma))
        .map(|((tk, &a), (&lk, s))| tk.powf((a as f64 + s) / lk as f64))
        .product()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingParams {
    pub alpha: Vec<u32>,
    pub l: Vec<u32>,
    pub p: MixedExponents,
    pub q: MixedExponents,
    pub mu: f64,
    pub t: Vec<f64>,
    pub h: f64,
    pub op: DiagOperator,
    pub weight: Weight,
}

impl EmbeddingParams {
    /// Validates `p_k ≤ q_k`, `κ ≤ 1`, `0 ≤ μ ≤ 1 − κ`, `t_k, h > 0`.
    /// `μ = 0` is accepted only for interior exponents `1 < p_k`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha: &[u32],
        l: &[u32],
        p: MixedExponents,
        q: MixedExponents,
        mu: f64,
        t: &[f64],
        h: f64,
        op: DiagOperator,
        weight: Weight,
    ) -> Result<Self> {
        let n = alpha.len();
        check_len(n, l.len())?;
        check_len(n, p.dim())?;
        check_len(n, q.dim())?;
        check_len(n, t.len())?;
        if l.contains(&0) {
            return Err(Error::ParameterOutOfRange("l_k must be positive".into()));
        }
        if p.p().iter().zip(q.p()).any(|(pk, qk)| pk > qk) {
            return Err(Error::ParameterOutOfRange("need p_k <= q_k".into()));
        }
        if t.iter().any(|tk| !(*tk > 0.0)) || !(h > 0.0) {
            return Err(Error::ParameterOutOfRange("t_k and h must be positive".into()));
        }
        let ep = Self {
            alpha: alpha.to_vec(),
            l: l.to_vec(),
            p,
            q,
            mu,
            t: t.to_vec(),
            h,
            op,
            weight,
        };
        let kappa = ep.kappa();
        if kappa > 1.0 + 1e-12 {
            return Err(Error::ParameterOutOfRange(format!("kappa = {kappa} exceeds 1")));
        }
        if !(mu >= 0.0 && mu + kappa <= 1.0 + 1e-12) {
            return Err(Error::ParameterOutOfRange(format!(
                "mu = {mu} outside [0, 1 - kappa] with kappa = {kappa}"
            )));
        }
        if mu == 0.0 && ep.p.p().iter().any(|&pk| pk <= 1.0) {
            return Err(Error::ParameterOutOfRange(
                "mu = 0 requires p_k > 1 on every axis".into(),
            ));
        }
        Ok(ep)
    }

    pub fn kappa(&self) -> f64 {
        kappa(&self.alpha, &self.l, self.p.p(), self.q.p()).expect("lengths checked")
    }

    /// `σ_k = 1/p_k − 1/q_k`.
    pub fn sigma(&self) -> Vec<f64> {
        self.p
            .p()
            .iter()
            .zip(self.q.p())
            .map(|(pk, qk)| 1.0 / pk - 1.0 / qk)
            .collect()
    }

    pub fn t_factor(&self) -> f64 {
        t_factor(&self.t, &self.alpha, &self.l, &self.sigma())
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn with_h(&self, h: f64) -> Result<Self> {
        self.with_t_h(&self.t.clone(), h)
    }

    pub fn with_t_h(&self, t: &[f64], h: f64) -> Result<Self> {
        Self::new(
            &self.alpha,
            &self.l,
            self.p.clone(),
            self.q.clone(),
            self.mu,
            t,
            h,
            self.op.clone(),
            self.weight.clone(),
        )
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        let out = self.clone();
        Self::new(
            &out.alpha, &out.l, out.p, out.q, mu, &out.t, out.h, out.op, out.weight,
        )
    }

    fn check_field(&self, u: &Field) -> Result<()> {
        check_len(self.dim(), u.grid().dim())?;
        check_len(self.op.len(), u.components())
    }

    /// `1 + d_min^{κ+μ−1}` when `p = q = 2`, the weight is trivial and the
    /// component norm is Euclidean: a per-mode weighted AM-GM bound plus
    /// Parseval caps the ratio of [`embedding_inequality_report`] by it.
    pub fn analytic_cap(&self) -> Option<f64> {
        let all_two = |e: &MixedExponents| e.p().iter().all(|&v| v == 2.0);
        if all_two(&self.p) && all_two(&self.q) && self.weight == Weight::Unit && self.op.q() == 2.0 {
            Some(1.0 + self.op.min_entry().powf(self.kappa() + self.mu - 1.0))
        } else {
            None
        }
    }
}

fn norm_with(u: &Field, ep: &EmbeddingParams, exps: &MixedExponents, pointwise: &[f64]) -> Result<f64> {
    let w = ep.weight.values_on(u.grid())?;
    mixed_norm_of_values(u.grid(), pointwise, exps, &w)
}

fn pointwise<F>(u: &Field, f: F) -> Vec<f64>
where
    F: Fn(&[Complex64]) -> f64,
{
    (0..u.grid().len()).map(|lin| f(&u.vector_at(lin))).collect()
}

/// `‖u‖_{L_p(E)}` with the weight and component norm of `ep`.
pub fn lp_norm(u: &Field, ep: &EmbeddingParams) -> Result<f64> {
    ep.check_field(u)?;
    let vals = pointwise(u, |v| ep.op.norm(v));
    norm_with(u, ep, &ep.p, &vals)
}

/// `‖u‖_{W,t} = ‖u‖_{L_p(E(A))} + Σ t_k ‖D_k^{l_k} u‖_{L_p(E)}` with the
/// graph norm `‖Av‖ + ‖v‖` on `E(A)`.
pub fn w_norm(u: &Field, ep: &EmbeddingParams) -> Result<f64> {
    ep.check_field(u)?;
    let graph = pointwise(u, |v| {
        ep.op.norm(&ep.op.apply(v).expect("length checked")) + ep.op.norm(v)
    });
    let mut total = norm_with(u, ep, &ep.p, &graph)?;
    for k in 0..ep.dim() {
        let mut order = vec![0; ep.dim()];
        order[k] = ep.l[k];
        let d = u.spectral_derivative(&order)?;
        total += ep.t[k] * lp_norm(&d, ep)?;
    }
    Ok(total)
}

/// `T(t) ‖D^α u‖_{L_q(E(A^{1−κ−μ}))}`, graph norm on the fractional domain.
pub fn embedding_lhs(u: &Field, ep: &EmbeddingParams) -> Result<f64> {
    ep.check_field(u)?;
    let theta = 1.0 - ep.kappa() - ep.mu;
    let d = u.spectral_derivative(&ep.alpha)?;
    let vals = pointwise(&d, |v| {
        ep.op
            .norm(&ep.op.fractional_apply(theta, v).expect("length checked"))
            + ep.op.norm(v)
    });
    Ok(ep.t_factor() * norm_with(&d, ep, &ep.q, &vals)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingReport {
    pub lhs: f64,
    pub rhs: f64,
    pub w_norm: f64,
    pub lp_norm: f64,
    /// `lhs / rhs`, defined as 0 when both vanish.
    pub ratio: f64,
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 && rhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

/// Both sides of `T(t)‖D^α u‖ ≤ C (h^μ ‖u‖_{W,t} + h^{−(1−μ)} ‖u‖_{L_p})`.
pub fn embedding_inequality_report(u: &Field, ep: &EmbeddingParams) -> Result<EmbeddingReport> {
    let lhs = embedding_lhs(u, ep)?;
    let w = w_norm(u, ep)?;
    let lp = lp_norm(u, ep)?;
    let rhs = ep.h.powf(ep.mu) * w + ep.h.powf(ep.mu - 1.0) * lp;
    Ok(EmbeddingReport {
        lhs,
        rhs,
        w_norm: w,
        lp_norm: lp,
        ratio: ratio(lhs, rhs),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicativeReport {
    pub lhs: f64,
    pub w_norm: f64,
    pub lp_norm: f64,
    /// `h* = ‖u‖_{L_p} / ‖u‖_{W,t}`.
    pub h_star: f64,
    /// `lhs / (‖u‖_W^{1−μ} ‖u‖_{L_p}^μ)`.
    pub constant: f64,
}

/// Empirical constant in `T(t)‖D^α u‖ ≤ C ‖u‖_W^{1−μ} ‖u‖_{L_p}^μ`.
pub fn multiplicative_report(u: &Field, ep: &EmbeddingParams) -> Result<MultiplicativeReport> {
    let lp = lp_norm(u, ep)?;
    if lp == 0.0 {
        return Err(Error::ZeroField);
    }
    let lhs = embedding_lhs(u, ep)?;
    let w = w_norm(u, ep)?;
    Ok(MultiplicativeReport {
        lhs,
        w_norm: w,
        lp_norm: lp,
        h_star: lp / w,
        constant: lhs / (w.powf(1.0 - ep.mu) * lp.powf(ep.mu)),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationReport {
    pub lhs: f64,
    /// `h^μ ‖u‖_W + h^{−(1−μ)} ‖u‖_{L_p}` at the `h` of the parameters.
    pub rhs: f64,
    /// The same at `h* = ‖u‖_{L_p} / ‖u‖_W`, i.e. `2 ‖u‖_W^{1−μ} ‖u‖^μ`.
    pub rhs_optimal: f64,
    pub constant: f64,
}

/// `T(t) ‖ ‖D^α u(·)‖_{(E(A),E)_{κ+μ,σ}} ‖_{L_q}` against the right-hand
/// side, with the pointwise norm from the canonical interpolation integral.
pub fn interpolation_embedding_report(
    u: &Field,
    ep: &EmbeddingParams,
    sigma: f64,
) -> Result<InterpolationReport> {
    let ip = InterpParams::new(interior_theta(ep)?, sigma)?;
    interpolation_with(u, ep, |v| ep.op.interpolation_norm(v, &ip))
}

/// As [`interpolation_embedding_report`] with the realized norm
/// `‖A^{1−κ−μ} v‖ + ‖v‖` of the interpolation space.
pub fn interpolation_embedding_report_realized(
    u: &Field,
    ep: &EmbeddingParams,
) -> Result<InterpolationReport> {
    let theta = interior_theta(ep)?;
    interpolation_with(u, ep, |v| ep.op.interpolation_norm_realized(v, theta))
}

fn interior_theta(ep: &EmbeddingParams) -> Result<f64> {
    let kappa = ep.kappa();
    if !(ep.mu > 0.0 && ep.mu < 1.0 - kappa) {
        return Err(Error::ParameterOutOfRange(format!(
            "interpolation estimate needs 0 < mu < 1 - kappa, got mu = {} with kappa = {kappa}",
            ep.mu
        )));
    }
    Ok(kappa + ep.mu)
}

fn interpolation_with<N>(u: &Field, ep: &EmbeddingParams, norm: N) -> Result<InterpolationReport>
where
    N: Fn(&[Complex64]) -> Result<f64>,
{
    ep.check_field(u)?;
    let d = u.spectral_derivative(&ep.alpha)?;
    let vals = (0..d.grid().len())
        .map(|lin| norm(&d.vector_at(lin)))
        .collect::<Result<Vec<f64>>>()?;
    let lhs = ep.t_factor() * norm_with(&d, ep, &ep.q, &vals)?;
    let w = w_norm(u, ep)?;
    let lp = lp_norm(u, ep)?;
    let rhs = ep.h.powf(ep.mu) * w + ep.h.powf(ep.mu - 1.0) * lp;
    let rhs_optimal = if w > 0.0 {
        2.0 * w.powf(1.0 - ep.mu) * lp.powf(ep.mu)
    } else {
        0.0
    };
    Ok(InterpolationReport {
        lhs,
        rhs,
        rhs_optimal,
        constant: ratio(lhs, rhs),
    })
}

/// Same samples on the grid with periods `L_k t_k^{1/l_k}`: the dilation
/// `x_k ↦ t_k^{1/l_k} x_k` that absorbs `t` into the coordinates.
pub fn dilate_for_t(u: &Field, t: &[f64], l: &[u32]) -> Result<Field> {
    let grid = u.grid();
    check_len(grid.dim(), t.len())?;
    check_len(grid.dim(), l.len())?;
    let periods: Vec<f64> = grid
        .periods()
        .iter()
        .zip(t.iter().zip(l))
        .map(|(lk, (tk, &lo))| lk * tk.powf(1.0 / lo as f64))
        .collect();
    Field::from_values(
        &grid.with_periods(&periods)?,
        u.components(),
        u.values().to_vec(),
        u.side(),
    )
}
