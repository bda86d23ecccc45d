use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported Cartan type {0:?}")]
    UnsupportedType(String),
    #[error("invalid lattice: {0}")]
    BadLattice(String),
    #[error("datum mismatch: {0}")]
    DatumMismatch(String),
    #[error("coweight {0} is not dominant")]
    NotDominant(String),
    #[error("denominator does not divide numerator in the group algebra")]
    NotDivisible,
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("input is not in the spherical part of the Hecke algebra")]
    NotSpherical,
    #[error("cache error at line {line}: {msg}")]
    Cache { line: usize, msg: String },
    #[error("identity violated: {0}")]
    IdentityViolation(String),
    #[error("internal invariant failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
