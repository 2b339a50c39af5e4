use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("orbitals not orthogonal: <R{a}|R{b}> = {overlap:e}")]
    NonOrthogonal { a: usize, b: usize, overlap: f64 },

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("no convergence after {iterations} iterations (energy {energy}, residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        energy: f64,
        residual: f64,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("missing prerequisite: {0}")]
    MissingPrerequisite(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
