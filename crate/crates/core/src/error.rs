use std::path::PathBuf;

use thiserror::Error;

use crate::model::Violation;

/// Errors raised while reading or constructing a problem definition.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: line {line}, column {column}: {message}")]
    Parse {
        context: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid problem: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// Errors from finite element assembly and the equilibrium solve.
#[derive(Debug, Error)]
pub enum FemError {
    #[error("stiffness matrix is not positive definite (non-positive pivot at permuted column {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("conjugate gradient did not converge: relative residual {residual:e} after {iterations} iterations")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("linear solver failure: {0}")]
    Backend(String),
    #[error("design vector has {got} entries, problem has {expected} elements")]
    SizeMismatch { expected: usize, got: usize },
    #[error("design variable {value} of element {element} is outside (0, 1]")]
    InvalidDesign { element: usize, value: f64 },
}

/// Errors from the QUBO builder and decoder.
#[derive(Debug, Error)]
pub enum QuboError {
    #[error("{what}: expected {expected}, got {got}")]
    SizeMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite coefficient for qubit {0}")]
    NonFinite(usize),
}

/// Errors from the ground-state solvers.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("exhaustive search over {n} qubits exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("invalid solver parameter: {0}")]
    InvalidParameter(String),
    #[error("network error talking to {endpoint}: {message}")]
    Network { endpoint: String, message: String },
    #[error("remote solver timed out after {0:?}")]
    Timeout(std::time::Duration),
    #[error("malformed remote response: {0}")]
    MalformedResponse(String),
    #[error("malformed QUBO exchange data: {0}")]
    MalformedExchange(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Errors from the optimality-criteria update.
#[derive(Debug, Error)]
pub enum OcError {
    #[error("volume bisection cannot bracket target {target} (all sensitivities vanish, volume stays at {volume})")]
    NonBracketing { target: f64, volume: f64 },
    #[error("invalid OC input: {0}")]
    InvalidInput(String),
}

/// Top-level error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Qubo(#[from] QuboError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Oc(#[from] OcError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad input rather than a numerical or solver failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Model(_)
                | Error::Config(_)
                | Error::Qubo(QuboError::InvalidParameter(_))
                | Error::Solver(SolverError::InvalidParameter(_))
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
