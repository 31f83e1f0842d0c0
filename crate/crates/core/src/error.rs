use thiserror::Error;

use crate::geometry::DegeneracyWitness;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("invalid rational `{0}`")]
    Rational(String),
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("json: {0}")]
    Json(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("points coincide; no bisector")]
    CoincidentPoints,
    #[error("degenerate line: a and b both zero")]
    DegenerateLine,
    #[error("operation requires dimension 2, got {0}")]
    NotPlanar(usize),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid subset: {0}")]
    InvalidSubset(String),
    #[error("not in general position: {0}")]
    NotGeneralPosition(DegeneracyWitness),
    #[error("no two-page embedding with the variable order fixed; odd conflict cycle of clauses {0:?}")]
    NotEmbeddable(Vec<usize>),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("gadget verification failed: {0}")]
    Verification(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
