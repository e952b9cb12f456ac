use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("{0}")]
    InvalidParameter(String),

    #[error("no propagating lead mode at E = {energy} eV (lead potential {lead} eV)")]
    NoPropagatingMode { energy: f64, lead: f64 },

    #[error("closed form requires equal lateral barriers; use the transfer-matrix engine")]
    UnequalLateralBarriers,

    #[error("grid needs at least 3 interior points, got {0}")]
    GridTooSmall(usize),

    #[error("constant-mass Numerov needs a uniform mass grid (sample {index} differs)")]
    NonUniformMass { index: usize },

    #[error("mass must be positive everywhere (sample {index} has {value})")]
    NonPositiveMass { index: usize, value: f64 },

    #[error("super-Gaussian exponent must be even and >= 2, got {0}")]
    InvalidExponent(u32),

    #[error("transfer matrix became singular at E = {energy} eV")]
    NumericalOverflow { energy: f64 },

    #[error("eigensolver did not converge for mode {mode}")]
    EigenNonConvergence { mode: usize },

    #[error("requested {requested} modes but the grid supports {available}")]
    TooManyModes { requested: usize, available: usize },

    #[error("von Roos parameters must satisfy alpha + beta + gamma = -1 (sum = {0})")]
    OrderingConstraint(f64),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by numerics rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NumericalOverflow { .. } | Error::EigenNonConvergence { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}
