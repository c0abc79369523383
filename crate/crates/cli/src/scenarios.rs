use std::f64::consts::PI;

use anisolab::degenerate::{
    degenerate_coercivity_report, degenerate_residual, solve_degenerate, substitution, transform_field,
    DegWeight, Direction,
};
use anisolab::elliptic::{self, resolvent_sweep, Coefficient, EllipticProblem, LowerTerm, PerturbedOptions};
use anisolab::embedding::{
    dilate_for_t, embedding_inequality_report, multiplicative_report, EmbeddingParams,
};
use anisolab::operator::InterpParams;
use anisolab::parabolic::{
    infinite_system_solve, parabolic_coercivity_report, system_residual, ParabolicProblem, SpaceTimeField,
};
use anisolab::random::{band_limited_batch_with, random_vector, seeded};
use anisolab::symbols::{mikhlin_sup, FrequencySamples, PsiSymbol, SymbolParams};
use anisolab::{Complex64, DiagOperator, Field, Grid, MixedExponents, NormSpec, Weight};
use rayon::prelude::*;

use crate::config::{Config, DataKind, Scenario};
use crate::error::{invalid, CliError};
use crate::report::{status, Cell, Report};

/// Every parameter object of a run, built and validated before any field
/// is allocated.
pub enum Plan {
    Elliptic(EllipticPlan),
    Coercivity(CoercivityPlan),
    Degenerate(DegeneratePlan),
    Embedding(EmbeddingPlan),
    Multiplier(MultiplierPlan),
    Interp(InterpPlan),
    Parabolic(ParabolicPlan),
}

pub struct Common {
    grid: Grid,
    op: DiagOperator,
    norm: NormSpec,
    seed: u64,
    data: DataKind,
    mode: Vec<i64>,
    band: Option<usize>,
    count: usize,
}

pub struct EllipticPlan {
    common: Common,
    problems: Vec<(Vec<f64>, Complex64, EllipticProblem)>,
    opts: PerturbedOptions,
}

pub struct CoercivityPlan {
    common: Common,
    templates: Vec<(Vec<f64>, EllipticProblem)>,
    lambdas: Vec<Complex64>,
    cap: f64,
}

pub struct DegeneratePlan {
    common: Common,
    weights: Vec<DegWeight>,
    problems: Vec<(Vec<f64>, Complex64, EllipticProblem)>,
}

pub struct EmbeddingPlan {
    common: Common,
    params: Vec<EmbeddingParams>,
    dilate: bool,
}

pub struct MultiplierPlan {
    op: DiagOperator,
    params: Vec<SymbolParams>,
    beta: Vec<u8>,
    samples: FrequencySamples,
}

pub struct InterpPlan {
    op: DiagOperator,
    params: Vec<(f64, f64, InterpParams)>,
    seed: u64,
    count: usize,
}

pub struct ParabolicPlan {
    common: Common,
    problems: Vec<ParabolicProblem>,
    weights: Option<Vec<DegWeight>>,
}

fn grid(cfg: &Config) -> Result<Grid, CliError> {
    let periods = cfg
        .grid_periods
        .clone()
        .unwrap_or_else(|| vec![2.0 * PI; cfg.dim()]);
    Grid::new(&cfg.grid_sizes, &periods).map_err(invalid)
}

fn operator(cfg: &Config) -> Result<DiagOperator, CliError> {
    match (&cfg.operator_diag, cfg.operator_m, cfg.operator_s) {
        (Some(d), _, _) => DiagOperator::new(d, cfg.operator_q),
        (None, Some(m), Some(s)) => DiagOperator::dyadic(m, s, cfg.operator_q),
        _ => DiagOperator::new(&[1.0], cfg.operator_q),
    }
    .map_err(invalid)
}

fn p_exponents(cfg: &Config) -> Vec<f64> {
    cfg.norm_p.clone().unwrap_or_else(|| vec![2.0; cfg.dim()])
}

fn common(cfg: &Config) -> Result<Common, CliError> {
    let grid = grid(cfg)?;
    let op = operator(cfg)?;
    let exps = MixedExponents::new(&p_exponents(cfg)).map_err(invalid)?;
    let norm = NormSpec::new(exps, Weight::Unit, cfg.operator_q).map_err(invalid)?;
    let mut mode = vec![0; cfg.dim()];
    mode[0] = 1;
    Ok(Common {
        grid,
        op,
        norm,
        seed: cfg.seed,
        data: cfg.data_kind,
        mode: cfg.data_mode.clone().unwrap_or(mode),
        band: cfg.data_band,
        count: cfg.data_count,
    })
}

fn l_orders(cfg: &Config) -> Vec<u32> {
    cfg.problem_l.clone().unwrap_or_else(|| vec![1; cfg.dim()])
}

/// All `n`-tuples drawn from `values`, first axis fastest.
fn tuples(values: &[f64], n: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = values
            .iter()
            .flat_map(|&v| {
                out.iter().map(move |head| {
                    let mut t = head.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

fn lambdas(cfg: &Config) -> Vec<Complex64> {
    cfg.sweep_lambda
        .iter()
        .flatten()
        .map(|v| {
            let (re, im) = v.parts();
            Complex64::new(re, im)
        })
        .collect()
}

fn lower_term(cfg: &Config, grid: &Grid) -> Option<LowerTerm> {
    let alpha = cfg.lower_alpha.as_ref()?;
    let coeff = if cfg.lower_variable {
        let w = 2.0 * PI / grid.periods()[0];
        Coefficient::Samples(
            (0..grid.len())
                .map(|lin| Complex64::new(cfg.lower_coeff * (w * grid.point(lin)[0]).cos(), 0.0))
                .collect(),
        )
    } else {
        Coefficient::Constant(Complex64::new(cfg.lower_coeff, 0.0))
    };
    Some(LowerTerm::new(alpha, cfg.lower_theta, coeff))
}

fn elliptic_problems(
    cfg: &Config,
    op: &DiagOperator,
    grid: &Grid,
) -> Result<Vec<(Vec<f64>, Complex64, EllipticProblem)>, CliError> {
    let l = l_orders(cfg);
    let lower = lower_term(cfg, grid);
    let mut out = Vec::new();
    for t in tuples(cfg.sweep_t.as_deref().unwrap_or(&[]), cfg.dim()) {
        for lambda in lambdas(cfg) {
            let mut p = EllipticProblem::principal(op.clone(), &t, lambda, &l).map_err(invalid)?;
            if let Some(term) = &lower {
                p = p.with_lower_term(term.clone()).map_err(invalid)?;
            }
            out.push((t.clone(), lambda, p));
        }
    }
    Ok(out)
}

fn cosine_weights(cfg: &Config) -> Option<Vec<DegWeight>> {
    cfg.degenerate_amplitude
        .as_ref()
        .map(|a| a.iter().map(|&a| DegWeight::Cosine(a)).collect())
}

pub fn plan(cfg: &Config) -> Result<Plan, CliError> {
    match cfg.scenario {
        Scenario::SolveElliptic => {
            let common = common(cfg)?;
            let problems = elliptic_problems(cfg, &common.op, &common.grid)?;
            let opts = PerturbedOptions {
                tol: cfg.solver_tol,
                maxit: cfg.solver_maxit,
                seed: cfg.seed,
                ..PerturbedOptions::default()
            };
            Ok(Plan::Elliptic(EllipticPlan {
                common,
                problems,
                opts,
            }))
        }
        Scenario::CheckCoercivity => {
            let common = common(cfg)?;
            if cfg.lower_alpha.is_some() {
                return Err(CliError::ConfigInvalid(
                    "check-coercivity measures the principal problem; drop lower.*".into(),
                ));
            }
            let l = l_orders(cfg);
            let lambdas = lambdas(cfg);
            let templates = tuples(cfg.sweep_t.as_deref().unwrap_or(&[]), cfg.dim())
                .into_iter()
                .map(|t| {
                    let p =
                        EllipticProblem::principal(common.op.clone(), &t, lambdas[0], &l).map_err(invalid)?;
                    Ok((t, p))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            // n + Σ (2 l_k + 1) + 1
            let cap = cfg.dim() as f64 + l.iter().map(|&lk| 2.0 * lk as f64 + 1.0).sum::<f64>() + 1.0;
            Ok(Plan::Coercivity(CoercivityPlan {
                common,
                templates,
                lambdas,
                cap,
            }))
        }
        Scenario::CheckDegenerate => {
            let common = common(cfg)?;
            let weights = cosine_weights(cfg).ok_or_else(|| {
                CliError::ConfigInvalid("check-degenerate needs degenerate.amplitude".into())
            })?;
            substitution(&weights, &common.grid).map_err(invalid)?;
            if cfg.lower_alpha.is_some() {
                return Err(CliError::ConfigInvalid(
                    "check-degenerate solves the principal problem; drop lower.*".into(),
                ));
            }
            let problems = elliptic_problems(cfg, &common.op, &common.grid)?;
            Ok(Plan::Degenerate(DegeneratePlan {
                common,
                weights,
                problems,
            }))
        }
        Scenario::CheckEmbedding => {
            let common = common(cfg)?;
            let p = p_exponents(cfg);
            let q = cfg.norm_q.clone().unwrap_or_else(|| p.clone());
            let alpha = cfg.problem_alpha.clone().unwrap_or_default();
            let l = l_orders(cfg);
            let mut params = Vec::new();
            for t in tuples(cfg.sweep_t.as_deref().unwrap_or(&[]), cfg.dim()) {
                for &h in cfg.sweep_h.iter().flatten() {
                    for &mu in cfg.sweep_mu.iter().flatten() {
                        params.push(
                            EmbeddingParams::new(
                                &alpha,
                                &l,
                                MixedExponents::new(&p).map_err(invalid)?,
                                MixedExponents::new(&q).map_err(invalid)?,
                                mu,
                                &t,
                                h,
                                common.op.clone(),
                                Weight::Unit,
                            )
                            .map_err(invalid)?,
                        );
                    }
                }
            }
            Ok(Plan::Embedding(EmbeddingPlan {
                common,
                params,
                dilate: cfg.embedding_dilate,
            }))
        }
        Scenario::CheckMultiplier => {
            let op = operator(cfg)?;
            let p = p_exponents(cfg);
            let q = cfg.norm_q.clone().unwrap_or_else(|| p.clone());
            let sigma: Vec<f64> = p.iter().zip(&q).map(|(pk, qk)| 1.0 / pk - 1.0 / qk).collect();
            let alpha = cfg.problem_alpha.clone().unwrap_or_default();
            let l = l_orders(cfg);
            let mut params = Vec::new();
            for t in tuples(cfg.sweep_t.as_deref().unwrap_or(&[]), cfg.dim()) {
                for &h in cfg.sweep_h.iter().flatten() {
                    for &mu in cfg.sweep_mu.iter().flatten() {
                        params.push(
                            SymbolParams::new(&t, h, mu, Complex64::new(1.0, 0.0), &l, &alpha, &sigma)
                                .map_err(invalid)?,
                        );
                    }
                }
            }
            if cfg.multiplier_j_min > cfg.multiplier_j_max || cfg.multiplier_per_octave == 0 {
                return Err(CliError::ConfigInvalid(
                    "multiplier range needs j_min <= j_max and per_octave >= 1".into(),
                ));
            }
            Ok(Plan::Multiplier(MultiplierPlan {
                op,
                params,
                beta: cfg.multiplier_beta.clone().unwrap_or_else(|| vec![0; cfg.dim()]),
                samples: FrequencySamples::dyadic(
                    cfg.dim(),
                    cfg.multiplier_j_min,
                    cfg.multiplier_j_max,
                    cfg.multiplier_per_octave,
                ),
            }))
        }
        Scenario::CheckInterp => {
            let op = operator(cfg)?;
            let params = cfg
                .interp_theta
                .iter()
                .flatten()
                .map(|&theta| {
                    InterpParams::new(theta, cfg.interp_sigma)
                        .map(|ip| (theta, cfg.interp_sigma, ip))
                        .map_err(invalid)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(Plan::Interp(InterpPlan {
                op,
                params,
                seed: cfg.seed,
                count: cfg.data_count,
            }))
        }
        Scenario::SolveParabolic => {
            let common = common(cfg)?;
            let l = l_orders(cfg);
            let problems = tuples(cfg.sweep_eps.as_deref().unwrap_or(&[]), cfg.dim())
                .into_iter()
                .map(|eps| {
                    ParabolicProblem::new(common.op.clone(), &eps, &l, cfg.time_final, cfg.time_steps)
                        .and_then(|p| p.with_p0(cfg.time_p0))
                        .map_err(invalid)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let weights = cosine_weights(cfg);
            if let Some(w) = &weights {
                substitution(w, &common.grid).map_err(invalid)?;
            }
            Ok(Plan::Parabolic(ParabolicPlan {
                common,
                problems,
                weights,
            }))
        }
    }
}

impl Common {
    fn data(&self) -> Vec<Field> {
        match self.data {
            DataKind::Cosine => {
                let w: Vec<f64> = self.grid.periods().iter().map(|l| 2.0 * PI / l).collect();
                let mode = self.mode.clone();
                vec![Field::from_real_fn(&self.grid, self.op.len(), |x, _| {
                    let phase: f64 = x
                        .iter()
                        .zip(&w)
                        .zip(&mode)
                        .map(|((x, w), &m)| x * w * m as f64)
                        .sum();
                    phase.cos()
                })]
            }
            DataKind::Random => band_limited_batch_with(
                &self.grid,
                self.op.len(),
                self.count,
                self.band,
                &mut seeded(self.seed),
            ),
        }
    }
}

fn axis_columns(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{prefix}_{k}")).collect()
}

fn columns(head: Vec<String>, tail: &[&str]) -> Vec<String> {
    head.into_iter()
        .chain(tail.iter().map(|s| s.to_string()))
        .collect()
}

fn nums(v: &[f64]) -> Vec<Cell> {
    v.iter().map(|&x| Cell::Num(x)).collect()
}

pub fn run(plan: &Plan) -> Report {
    match plan {
        Plan::Elliptic(p) => run_elliptic(p),
        Plan::Coercivity(p) => run_coercivity(p),
        Plan::Degenerate(p) => run_degenerate(p),
        Plan::Embedding(p) => run_embedding(p),
        Plan::Multiplier(p) => run_multiplier(p),
        Plan::Interp(p) => run_interp(p),
        Plan::Parabolic(p) => run_parabolic(p),
    }
}

fn run_elliptic(plan: &EllipticPlan) -> Report {
    let n = plan.common.grid.dim();
    let mut report = Report::new(
        columns(
            axis_columns("t", n),
            &[
                "lambda_re",
                "lambda_im",
                "sample",
                "residual",
                "iterations",
                "rho",
                "status",
            ],
        ),
        "residual",
    );
    let fields = plan.common.data();
    let tasks: Vec<(usize, usize)> = (0..plan.problems.len())
        .flat_map(|i| (0..fields.len()).map(move |s| (i, s)))
        .collect();
    let rows: Vec<Vec<Cell>> = tasks
        .par_iter()
        .map(|&(i, s)| {
            let (t, lambda, prob) = &plan.problems[i];
            let f = &fields[s];
            let out = elliptic::solve_perturbed(f, prob, &plan.opts).and_then(|sol| {
                let r = elliptic::residual(&sol.u, f, prob)? / f.max_abs();
                Ok((r, sol.iterations, sol.rho))
            });
            let mut row = nums(t);
            row.extend([Cell::Num(lambda.re), Cell::Num(lambda.im), s.into()]);
            match &out {
                Ok((r, it, rho)) => row.extend([Cell::Num(*r), (*it).into(), Cell::Num(*rho)]),
                Err(_) => row.extend([Cell::Empty, Cell::Empty, Cell::Empty]),
            }
            row.push(status(&out));
            row
        })
        .collect();
    rows.into_iter().for_each(|r| report.push(r));
    report
}

fn run_coercivity(plan: &CoercivityPlan) -> Report {
    let n = plan.common.grid.dim();
    let mut report = Report::new(
        columns(
            axis_columns("t", n),
            &["lambda_re", "lambda_im", "empirical_constant", "cap", "status"],
        ),
        "empirical_constant",
    );
    let fields = plan.common.data();
    let sweeps: Vec<_> = plan
        .templates
        .par_iter()
        .map(|(t, template)| {
            (
                t,
                resolvent_sweep(template, &plan.lambdas, &fields, &plan.common.norm),
            )
        })
        .collect();
    for (t, sweep) in sweeps {
        match sweep {
            Ok(s) => {
                for row in s.rows {
                    let mut cells = nums(t);
                    cells.extend([
                        Cell::Num(row.lambda.re),
                        Cell::Num(row.lambda.im),
                        row.outcome.clone().ok().into(),
                        Cell::Num(plan.cap),
                        status(&row.outcome),
                    ]);
                    report.push(cells);
                }
            }
            Err(e) => {
                for lambda in &plan.lambdas {
                    let mut cells = nums(t);
                    cells.extend([
                        Cell::Num(lambda.re),
                        Cell::Num(lambda.im),
                        Cell::Empty,
                        Cell::Num(plan.cap),
                        Cell::Text(e.kind().into()),
                    ]);
                    report.push(cells);
                }
            }
        }
    }
    report
}

fn run_degenerate(plan: &DegeneratePlan) -> Report {
    let n = plan.common.grid.dim();
    let mut report = Report::new(
        columns(
            axis_columns("t", n),
            &[
                "lambda_re",
                "lambda_im",
                "sample",
                "residual",
                "round_trip",
                "empirical_constant",
                "status",
            ],
        ),
        "residual",
    );
    let fields = plan.common.data();
    let tasks: Vec<(usize, usize)> = (0..plan.problems.len())
        .flat_map(|i| (0..fields.len()).map(move |s| (i, s)))
        .collect();
    let rows: Vec<Vec<Cell>> = tasks
        .par_iter()
        .map(|&(i, s)| {
            let (t, lambda, prob) = &plan.problems[i];
            let f = &fields[s];
            let out = solve_degenerate(f, prob, &plan.weights).and_then(|sol| {
                let r = degenerate_residual(&sol.u, f, prob, &plan.weights)? / f.max_abs();
                let back = transform_field(&sol.f_tau, &sol.map, Direction::ToX)?;
                let c = degenerate_coercivity_report(&sol.u, f, prob, &plan.weights, &plan.common.norm)?;
                Ok((r, back.max_abs_diff(f), c.constant))
            });
            let mut row = nums(t);
            row.extend([Cell::Num(lambda.re), Cell::Num(lambda.im), s.into()]);
            match &out {
                Ok((r, rt, c)) => row.extend(nums(&[*r, *rt, *c])),
                Err(_) => row.extend([Cell::Empty, Cell::Empty, Cell::Empty]),
            }
            row.push(status(&out));
            row
        })
        .collect();
    rows.into_iter().for_each(|r| report.push(r));
    report
}

fn run_embedding(plan: &EmbeddingPlan) -> Report {
    let n = plan.common.grid.dim();
    let mut report = Report::new(
        columns(
            axis_columns("t", n),
            &[
                "h",
                "mu",
                "sample",
                "lhs",
                "rhs",
                "ratio",
                "cap",
                "multiplicative_constant",
                "status",
            ],
        ),
        "ratio",
    );
    let fields = plan.common.data();
    let tasks: Vec<(usize, usize)> = (0..plan.params.len())
        .flat_map(|i| (0..fields.len()).map(move |s| (i, s)))
        .collect();
    let rows: Vec<Vec<Cell>> = tasks
        .par_iter()
        .map(|&(i, s)| {
            let ep = &plan.params[i];
            let out = (if plan.dilate {
                dilate_for_t(&fields[s], &ep.t, &ep.l)
            } else {
                Ok(fields[s].clone())
            })
            .and_then(|u| {
                let e = embedding_inequality_report(&u, ep)?;
                let m = multiplicative_report(&u, ep).ok().map(|m| m.constant);
                Ok((e, m))
            });
            let mut row = nums(&ep.t);
            row.extend([Cell::Num(ep.h), Cell::Num(ep.mu), s.into()]);
            match &out {
                Ok((e, m)) => {
                    row.extend(nums(&[e.lhs, e.rhs, e.ratio]));
                    row.push(ep.analytic_cap().into());
                    row.push((*m).into());
                }
                Err(_) => row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]),
            }
            row.push(status(&out));
            row
        })
        .collect();
    rows.into_iter().for_each(|r| report.push(r));
    report
}

fn run_multiplier(plan: &MultiplierPlan) -> Report {
    let n = plan.beta.len();
    let mut report = Report::new(
        columns(
            axis_columns("t", n),
            &["h", "mu", "sup"]
                .iter()
                .map(|s| s.to_string())
                .chain(axis_columns("argmax", n))
                .chain(std::iter::once("status".to_string()))
                .collect::<Vec<_>>()
                .iter()
                .map(String::as_str)
                .collect::<Vec<_>>(),
        ),
        "sup",
    );
    // Ψ already carries |ξ|^σ, so the Mikhlin weight is |ξ|^β alone
    let zeros = vec![0.0; n];
    let rows: Vec<Vec<Cell>> = plan
        .params
        .par_iter()
        .map(|sp| {
            let out = mikhlin_sup(
                &PsiSymbol {
                    params: sp,
                    op: &plan.op,
                },
                &plan.beta,
                &zeros,
                &plan.samples,
            );
            let mut row = nums(sp.t());
            row.extend([Cell::Num(sp.h()), Cell::Num(sp.mu())]);
            match &out {
                Ok(m) => {
                    row.push(Cell::Num(m.sup));
                    row.extend(nums(&m.argmax));
                }
                Err(_) => row.extend(std::iter::repeat_n(Cell::Empty, n + 1)),
            }
            row.push(status(&out));
            row
        })
        .collect();
    rows.into_iter().for_each(|r| report.push(r));
    report
}

fn run_interp(plan: &InterpPlan) -> Report {
    let mut report = Report::new(
        columns(
            Vec::new(),
            &[
                "theta",
                "sigma",
                "sample",
                "canonical",
                "realized",
                "ratio",
                "status",
            ],
        ),
        "ratio",
    );
    let mut rng = seeded(plan.seed);
    let vectors: Vec<Vec<Complex64>> = (0..plan.count)
        .map(|_| random_vector(plan.op.len(), &mut rng))
        .collect();
    for (theta, sigma, ip) in &plan.params {
        for (s, v) in vectors.iter().enumerate() {
            let out = plan
                .op
                .interpolation_norm(v, ip)
                .and_then(|c| Ok((c, plan.op.interpolation_norm_realized(v, *theta)?)));
            let mut row = vec![Cell::Num(*theta), Cell::Num(*sigma), s.into()];
            match &out {
                Ok((c, r)) => row.extend(nums(&[*c, *r, c / r])),
                Err(_) => row.extend([Cell::Empty, Cell::Empty, Cell::Empty]),
            }
            row.push(status(&out));
            report.push(row);
        }
    }
    report
}

fn run_parabolic(plan: &ParabolicPlan) -> Report {
    let n = plan.common.grid.dim();
    let mut report = Report::new(
        columns(
            axis_columns("eps", n),
            &[
                "sample",
                "dt_norm",
                "eps_norm",
                "a_norm",
                "f_norm",
                "empirical_constant",
                "residual",
                "status",
            ],
        ),
        // the coercive terms are only measured without degeneration
        if plan.weights.is_some() {
            "residual"
        } else {
            "empirical_constant"
        },
    );
    let fields = plan.common.data();
    let d = plan.common.op.diag().to_vec();
    let tasks: Vec<(usize, usize)> = (0..plan.problems.len())
        .flat_map(|i| (0..fields.len()).map(move |s| (i, s)))
        .collect();
    let rows: Vec<Vec<Cell>> = tasks
        .par_iter()
        .map(|&(i, s)| {
            let prob = &plan.problems[i];
            let times = prob.times();
            let f = SpaceTimeField::new(times.clone(), vec![fields[s].clone(); times.len()]);
            let unit = vec![DegWeight::Constant(1.0); n];
            let weights = plan.weights.as_deref();
            let out = f.and_then(|f| {
                let sol = infinite_system_solve(&f, &d, prob.eps(), prob.l(), weights)?;
                let r = system_residual(&sol, &f, &d, prob.eps(), prob.l(), weights.unwrap_or(&unit))?
                    / f.max_abs();
                let report = match weights {
                    None => Some(parabolic_coercivity_report(&sol.u, &f, prob, &plan.common.norm)?),
                    Some(_) => None,
                };
                Ok((report, r))
            });
            let mut row = nums(prob.eps());
            row.push(s.into());
            match &out {
                Ok((Some(c), r)) => row.extend(nums(&[
                    c.dt_norm,
                    c.eps_terms.iter().sum(),
                    c.a_norm,
                    c.f_norm,
                    c.constant,
                    *r,
                ])),
                Ok((None, r)) => {
                    row.extend(std::iter::repeat_n(Cell::Empty, 5));
                    row.push(Cell::Num(*r));
                }
                Err(_) => row.extend(std::iter::repeat_n(Cell::Empty, 6)),
            }
            row.push(status(&out));
            row
        })
        .collect();
    rows.into_iter().for_each(|r| report.push(r));
    report
}
