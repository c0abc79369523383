use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    SolveElliptic,
    SolveParabolic,
    CheckEmbedding,
    CheckMultiplier,
    CheckCoercivity,
    CheckInterp,
    CheckDegenerate,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::SolveElliptic,
        Scenario::SolveParabolic,
        Scenario::CheckEmbedding,
        Scenario::CheckMultiplier,
        Scenario::CheckCoercivity,
        Scenario::CheckInterp,
        Scenario::CheckDegenerate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::SolveElliptic => "solve-elliptic",
            Scenario::SolveParabolic => "solve-parabolic",
            Scenario::CheckEmbedding => "check-embedding",
            Scenario::CheckMultiplier => "check-multiplier",
            Scenario::CheckCoercivity => "check-coercivity",
            Scenario::CheckInterp => "check-interp",
            Scenario::CheckDegenerate => "check-degenerate",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Scenario::SolveElliptic => {
                "principal or perturbed elliptic solve, residual per (t, lambda, sample)"
            }
            Scenario::SolveParabolic => "Cauchy problem by exponential integrator, coercive terms per eps",
            Scenario::CheckEmbedding => {
                "embedding and multiplicative inequality ratios per (t, h, mu, sample)"
            }
            Scenario::CheckMultiplier => "Mikhlin sup of the embedding symbol per (t, h, mu)",
            Scenario::CheckCoercivity => "empirical coercive constant of the resolvent per (t, lambda)",
            Scenario::CheckInterp => "canonical vs realized interpolation norm per (theta, sample)",
            Scenario::CheckDegenerate => "degenerate solve through the substitution, residual and constant",
        }
    }

    /// Keys that must be present for this scenario.
    fn required(self) -> &'static [&'static str] {
        match self {
            Scenario::SolveElliptic | Scenario::CheckCoercivity | Scenario::CheckDegenerate => {
                &["sweep.t", "sweep.lambda"]
            }
            Scenario::SolveParabolic => &["sweep.eps"],
            Scenario::CheckEmbedding | Scenario::CheckMultiplier => {
                &["problem.alpha", "sweep.t", "sweep.h", "sweep.mu"]
            }
            Scenario::CheckInterp => &["interp.theta"],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaValue {
    Real(f64),
    Complex([f64; 2]),
}

impl LambdaValue {
    pub fn parts(self) -> (f64, f64) {
        match self {
            LambdaValue::Real(re) => (re, 0.0),
            LambdaValue::Complex([re, im]) => (re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataKind {
    /// `cos(m · x)` in every component.
    Cosine,
    /// Seeded random band-limited fields.
    #[default]
    Random,
}

fn two() -> f64 {
    2.0
}

fn count() -> usize {
    4
}

fn steps() -> usize {
    64
}

fn one() -> f64 {
    1.0
}

fn j_min() -> i32 {
    -10
}

fn j_max() -> i32 {
    10
}

fn per_octave() -> u32 {
    8
}

fn tol() -> f64 {
    1e-10
}

fn maxit() -> usize {
    200
}

/// Flat JSON config; namespaces are part of the key names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: Scenario,
    /// Base name of the output files; defaults to the config file stem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(rename = "output.dir", default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,

    #[serde(rename = "grid.sizes")]
    pub grid_sizes: Vec<usize>,
    /// Defaults to `2π` on every axis.
    #[serde(rename = "grid.periods", default, skip_serializing_if = "Option::is_none")]
    pub grid_periods: Option<Vec<f64>>,

    #[serde(rename = "operator.diag", default, skip_serializing_if = "Option::is_none")]
    pub operator_diag: Option<Vec<f64>>,
    /// With `operator.s`: `diag(2^{s m})`, `m = 1..M`.
    #[serde(rename = "operator.m", default, skip_serializing_if = "Option::is_none")]
    pub operator_m: Option<usize>,
    #[serde(rename = "operator.s", default, skip_serializing_if = "Option::is_none")]
    pub operator_s: Option<f64>,
    #[serde(rename = "operator.q", default = "two")]
    pub operator_q: f64,

    #[serde(rename = "norm.p", default, skip_serializing_if = "Option::is_none")]
    pub norm_p: Option<Vec<f64>>,
    #[serde(rename = "norm.q", default, skip_serializing_if = "Option::is_none")]
    pub norm_q: Option<Vec<f64>>,

    #[serde(rename = "problem.l", default, skip_serializing_if = "Option::is_none")]
    pub problem_l: Option<Vec<u32>>,
    #[serde(rename = "problem.alpha", default, skip_serializing_if = "Option::is_none")]
    pub problem_alpha: Option<Vec<u32>>,

    #[serde(rename = "sweep.t", default, skip_serializing_if = "Option::is_none")]
    pub sweep_t: Option<Vec<f64>>,
    #[serde(rename = "sweep.lambda", default, skip_serializing_if = "Option::is_none")]
    pub sweep_lambda: Option<Vec<LambdaValue>>,
    #[serde(rename = "sweep.eps", default, skip_serializing_if = "Option::is_none")]
    pub sweep_eps: Option<Vec<f64>>,
    #[serde(rename = "sweep.h", default, skip_serializing_if = "Option::is_none")]
    pub sweep_h: Option<Vec<f64>>,
    #[serde(rename = "sweep.mu", default, skip_serializing_if = "Option::is_none")]
    pub sweep_mu: Option<Vec<f64>>,

    #[serde(rename = "data.kind", default)]
    pub data_kind: DataKind,
    /// Wave vector of the cosine datum; defaults to `(1, 0, …)`.
    #[serde(rename = "data.mode", default, skip_serializing_if = "Option::is_none")]
    pub data_mode: Option<Vec<i64>>,
    /// Largest mode per axis of random data; defaults to `N_k / 4`.
    #[serde(rename = "data.band", default, skip_serializing_if = "Option::is_none")]
    pub data_band: Option<usize>,
    #[serde(rename = "data.count", default = "count")]
    pub data_count: usize,

    #[serde(rename = "time.steps", default = "steps")]
    pub time_steps: usize,
    #[serde(rename = "time.final", default = "one")]
    pub time_final: f64,
    #[serde(rename = "time.p0", default = "two")]
    pub time_p0: f64,

    #[serde(rename = "interp.theta", default, skip_serializing_if = "Option::is_none")]
    pub interp_theta: Option<Vec<f64>>,
    #[serde(rename = "interp.sigma", default = "two")]
    pub interp_sigma: f64,

    /// Amplitudes `a_k` of `γ_k = 1 / (1 + a_k cos(2π x_k / L_k))`.
    #[serde(
        rename = "degenerate.amplitude",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub degenerate_amplitude: Option<Vec<f64>>,

    #[serde(rename = "embedding.dilate", default)]
    pub embedding_dilate: bool,

    #[serde(rename = "multiplier.beta", default, skip_serializing_if = "Option::is_none")]
    pub multiplier_beta: Option<Vec<u8>>,
    #[serde(rename = "multiplier.j_min", default = "j_min")]
    pub multiplier_j_min: i32,
    #[serde(rename = "multiplier.j_max", default = "j_max")]
    pub multiplier_j_max: i32,
    #[serde(rename = "multiplier.per_octave", default = "per_octave")]
    pub multiplier_per_octave: u32,

    #[serde(rename = "lower.alpha", default, skip_serializing_if = "Option::is_none")]
    pub lower_alpha: Option<Vec<u32>>,
    #[serde(rename = "lower.theta", default)]
    pub lower_theta: f64,
    #[serde(rename = "lower.coeff", default)]
    pub lower_coeff: f64,
    /// Multiply the coefficient by `cos x_1`.
    #[serde(rename = "lower.variable", default)]
    pub lower_variable: bool,

    #[serde(rename = "solver.tol", default = "tol")]
    pub solver_tol: f64,
    #[serde(rename = "solver.maxit", default = "maxit")]
    pub solver_maxit: usize,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
        cfg.check_shape()?;
        Ok(cfg)
    }

    pub fn dim(&self) -> usize {
        self.grid_sizes.len()
    }

    /// Structural checks; numeric constraints of the solvers are checked
    /// when the plan is built.
    fn check_shape(&self) -> Result<(), CliError> {
        let invalid = |msg: String| Err(CliError::ConfigInvalid(msg));
        let n = self.dim();
        if n == 0 {
            return invalid("grid.sizes must not be empty".into());
        }
        let sweeps: [(&str, Option<usize>); 6] = [
            ("sweep.t", self.sweep_t.as_ref().map(Vec::len)),
            ("sweep.lambda", self.sweep_lambda.as_ref().map(Vec::len)),
            ("sweep.eps", self.sweep_eps.as_ref().map(Vec::len)),
            ("sweep.h", self.sweep_h.as_ref().map(Vec::len)),
            ("sweep.mu", self.sweep_mu.as_ref().map(Vec::len)),
            ("interp.theta", self.interp_theta.as_ref().map(Vec::len)),
        ];
        for (key, len) in sweeps {
            if len == Some(0) {
                return invalid(format!("{key} is an empty sweep list"));
            }
        }
        for key in self.scenario.required() {
            if !sweeps.iter().any(|(k, len)| k == key && len.is_some())
                && !(*key == "problem.alpha" && self.problem_alpha.is_some())
            {
                return invalid(format!("{} needs {key}", self.scenario));
            }
        }
        let per_axis: [(&str, Option<usize>); 8] = [
            ("grid.periods", self.grid_periods.as_ref().map(Vec::len)),
            ("norm.p", self.norm_p.as_ref().map(Vec::len)),
            ("norm.q", self.norm_q.as_ref().map(Vec::len)),
            ("problem.l", self.problem_l.as_ref().map(Vec::len)),
            ("problem.alpha", self.problem_alpha.as_ref().map(Vec::len)),
            ("data.mode", self.data_mode.as_ref().map(Vec::len)),
            (
                "degenerate.amplitude",
                self.degenerate_amplitude.as_ref().map(Vec::len),
            ),
            ("lower.alpha", self.lower_alpha.as_ref().map(Vec::len)),
        ];
        for (key, len) in per_axis {
            if let Some(len) = len {
                if len != n {
                    return invalid(format!("{key} has {len} entries for a {n}-axis grid"));
                }
            }
        }
        if let Some(beta) = &self.multiplier_beta {
            if beta.len() != n || beta.iter().any(|b| *b > 1) {
                return invalid(format!("multiplier.beta must be {n} binary entries"));
            }
        }
        match (&self.operator_diag, self.operator_m, self.operator_s) {
            (Some(_), None, None) | (None, Some(_), Some(_)) => {}
            (None, None, None) => {}
            _ => return invalid("give either operator.diag or both operator.m and operator.s".into()),
        }
        if self.data_count == 0 {
            return invalid("data.count must be at least 1".into());
        }
        if let Some(name) = &self.name {
            if name.is_empty() || name.contains(['/', '\\']) {
                return invalid(format!("name {name:?} is not a plain file stem"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "scenario": "check-coercivity",
        "grid.sizes": [16],
        "sweep.t": [1],
        "sweep.lambda": [1, [0, 1]]
    }"#;

    #[test]
    fn parses_with_defaults() {
        let c = Config::parse(MINIMAL).unwrap();
        assert_eq!(c.scenario, Scenario::CheckCoercivity);
        assert_eq!(c.operator_q, 2.0);
        assert_eq!(c.data_kind, DataKind::Random);
        assert_eq!(c.sweep_lambda.as_ref().unwrap()[1].parts(), (0.0, 1.0));
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = MINIMAL.replace("\"grid.sizes\"", "\"grid.size\"");
        assert!(matches!(Config::parse(&text), Err(CliError::ConfigInvalid(_))));
    }

    #[test]
    fn rejects_empty_sweeps() {
        let text = MINIMAL.replace("\"sweep.t\": [1]", "\"sweep.t\": []");
        let err = Config::parse(&text).unwrap_err();
        assert!(err.to_string().contains("sweep.t"));
    }

    #[test]
    fn rejects_missing_scenario_keys() {
        let text = MINIMAL.replace(",\n        \"sweep.lambda\": [1, [0, 1]]", "");
        assert!(matches!(Config::parse(&text), Err(CliError::ConfigInvalid(_))));
    }

    #[test]
    fn rejects_axis_count_mismatch() {
        let text = MINIMAL.replace("\"sweep.t\"", "\"problem.l\": [1, 1],\n\"sweep.t\"");
        assert!(matches!(Config::parse(&text), Err(CliError::ConfigInvalid(_))));
    }

    #[test]
    fn scenario_names_round_trip() {
        for s in Scenario::ALL {
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(json, format!("\"{}\"", s.name()));
        }
    }
}
