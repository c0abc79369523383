use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("field is on the {found} side, expected {expected}")]
    SideMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("weight is not strictly positive: {0}")]
    NonPositiveWeight(String),

    #[error("resolvent is singular for component {component} at xi = {re}{im:+}i")]
    SingularResolvent { component: usize, re: f64, im: f64 },

    #[error("degenerate integration grid: {0}")]
    DegenerateGrid(String),

    #[error("all probe vectors vanish, ratio undefined")]
    ZeroDenominator,

    #[error("sample grid touches a coordinate axis (xi_k = 0)")]
    GridTouchesAxis,

    #[error("residual {residual:.3e} exceeds bound {bound:.3e}")]
    ResidualTooLarge { residual: f64, bound: f64 },

    #[error("perturbation is not contractive: rho = {rho:.4}{}", suggestion(.suggested_lambda))]
    NotContractive { rho: f64, suggested_lambda: Option<f64> },

    #[error("no convergence after {iterations} iterations (last gap {gap:.3e})")]
    MaxIterations { iterations: usize, gap: f64 },

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("field vanishes identically")]
    ZeroField,
}

fn suggestion(lambda: &Option<f64>) -> String {
    match lambda {
        Some(l) => format!("; try lambda >= {l}"),
        None => "; no lambda up to 2^20 restores contraction".to_string(),
    }
}

impl Error {
    /// Stable machine-readable tag, used in report rows and CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDimension(_) => "InvalidDimension",
            Error::SideMismatch { .. } => "SideMismatch",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NonPositiveWeight(_) => "NonPositiveWeight",
            Error::SingularResolvent { .. } => "SingularResolvent",
            Error::DegenerateGrid(_) => "DegenerateGrid",
            Error::ZeroDenominator => "ZeroDenominator",
            Error::GridTouchesAxis => "GridTouchesAxis",
            Error::ResidualTooLarge { .. } => "ResidualTooLarge",
            Error::NotContractive { .. } => "NotContractive",
            Error::MaxIterations { .. } => "MaxIterations",
            Error::ParameterOutOfRange(_) => "ParameterOutOfRange",
            Error::ZeroField => "ZeroField",
        }
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
