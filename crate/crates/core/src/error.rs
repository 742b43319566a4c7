//! Error types shared by the solver, the oracles and the harness.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid EOS parameters, mesh bounds, run settings, or config file content.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("thermodynamic domain error: {0}")]
    Domain(String),

    /// The state is not hyperbolic (squared sound speed not positive).
    #[error("loss of hyperbolicity at rho = {rho:e}, p = {p:e} (c^2 = {c2:e})")]
    Hyperbolicity { rho: f64, p: f64, c2: f64 },

    /// A time step produced an inadmissible state.
    #[error("step failure at dof {dof}, stage {stage}: {reason}")]
    StepFailure {
        dof: usize,
        stage: usize,
        reason: String,
    },

    /// The pressure correction could not be computed on an element.
    #[error("pressure correction failed on element {element}: {reason}")]
    Correction { element: usize, reason: String },

    #[error("riemann oracle failure: {0}")]
    Oracle(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn oracle(msg: impl Into<String>) -> Self {
        Error::Oracle(msg.into())
    }

    /// Process exit code for the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Length { .. } | Error::Io { .. } => 1,
            Error::Domain(_)
            | Error::Hyperbolicity { .. }
            | Error::StepFailure { .. }
            | Error::Correction { .. } => 2,
            Error::Oracle(_) => 3,
        }
    }
}
