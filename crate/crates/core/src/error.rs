use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("weight {weight} is not admissible: {reason}")]
    WeightOutOfRange { weight: String, reason: String },
    #[error("regime violation: {0}")]
    Regime(String),
    #[error("{0} is undefined for this map")]
    Undefined(&'static str),
    #[error("blow-up is not holomorphic: term ({i},{j}) gets exponent {exponent}")]
    NotHolomorphic { i: u32, j: u32, exponent: String },
    #[error("degenerate fiber at step {0}")]
    DegenerateFiber(usize),
    #[error("orbit left the wedge at step {0}")]
    LeftWedge(usize),
    #[error("no boundary crossing found along the ray")]
    NoBoundary,
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("semiconjugacy check failed with residual {0:e}")]
    Semiconjugacy(f64),
    #[error("root residual {0:e} above threshold")]
    RootResidual(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
