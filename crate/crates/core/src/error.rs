use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("a chain needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("expected {expected} scaling constants (one per bond), got {got}")]
    LambdaCount { expected: usize, got: usize },
    #[error("first vertex must sit at 0, got {0}")]
    FirstVertexNotZero(f64),
    #[error("vertices must be strictly increasing: b[{index}] = {value} does not exceed b[{prev_index}]")]
    NonIncreasingVertices {
        index: usize,
        prev_index: usize,
        value: f64,
    },
    #[error("scaling constant lambda[{index}] = {value} is outside [0, 1)")]
    LambdaOutOfRange { index: usize, value: f64 },
    #[error("non-finite value in chain definition")]
    NonFinite,
    #[error("vertex {index} is not an interior vertex of a chain with {bonds} bonds")]
    NotInterior { index: usize, bonds: usize },
    #[error("exponential sum exceeded the term cap of {cap} terms")]
    TermCapExceeded { cap: usize },
    #[error("determinant normalization failed: {0}")]
    Normalization(String),
    #[error("frequency pairing failed at S = {frequency}: imaginary residue {residue:.3e}")]
    PairingFailure { frequency: f64, residue: f64 },
    #[error("bisection did not converge in {0} steps")]
    NoConvergence(usize),
    #[error("index range {lo}..={hi} is invalid (must satisfy 1 <= lo <= hi <= {max})")]
    BadIndexRange { lo: usize, hi: usize, max: usize },
    #[error("max_bonds = {got} exceeds the enumeration cap of {cap}")]
    OrbitCapExceeded { got: usize, cap: usize },
    #[error("orbit code has an illegal transition at position {0}")]
    IllegalTransition(usize),
    #[error("orbit code is empty")]
    EmptyOrbit,
    #[error("chain is not certified regular (margin {0:.6}); the periodic-orbit eigenvalue series is refused")]
    NotRegular(f64),
    #[error("periodic-orbit resummation exceeded {cap} action classes")]
    ClassCapExceeded { cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
