use thiserror::Error;

/// Errors raised by the estimation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mean service time infinite")]
    InfiniteMean,

    #[error("moment of order {order} diverges")]
    DivergentMoment { order: u32 },

    #[error("{what} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("lag {lag} out of range for {n} samples")]
    LagOutOfRange { lag: usize, n: usize },

    #[error(
        "window holds {have} grid points but degree {ell} needs {need}; \
         choose h >= (ell + 2) * delta / 2"
    )]
    TooFewPoints { have: usize, need: usize, ell: usize },

    #[error("infeasible design: {0}")]
    InfeasibleDesign(String),

    #[error("missing value for lag {0}")]
    MissingLag(usize),

    #[error("positivity of f1 violated (min {min:e}); reduce c3")]
    PositivityViolated { min: f64 },

    #[error("(N + pi/(4 x0)) * delta = {value} exceeds pi; reduce N or delta")]
    FrequencyAboveNyquist { value: f64 },

    #[error("covariance is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("singular covariance matrix")]
    Singular,

    #[error("rung aborted: {failures} of {replicates} replicates failed ({first})")]
    RungAborted {
        failures: usize,
        replicates: usize,
        first: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
