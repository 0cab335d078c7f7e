use thiserror::Error;

pub type Result<T> = std::result::Result<T, NqdError>;

#[derive(Debug, Error)]
pub enum NqdError {
    #[error("malformed curve: {0}")]
    MalformedCurve(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The point lies within the boundary tolerance, so membership is undecidable.
    #[error("point ({re}, {im}) lies within {tol:e} of the boundary")]
    AmbiguousPoint { re: f64, im: f64, tol: f64 },

    #[error("non-finite integrand value at component {component}, t = {t}")]
    NonFinite { component: usize, t: f64 },

    #[error("inadmissible test function: {0}")]
    Inadmissible(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("point ({re}, {im}) is too close to the boundary ({dist:e} < {limit:e})")]
    NearBoundary {
        re: f64,
        im: f64,
        dist: f64,
        limit: f64,
    },

    #[error("no admissible path: {0}")]
    Pathing(String),

    #[error("construction inconsistent: {0}")]
    Inconsistent(String),

    #[error("tract pinches off at t = {0}")]
    TractPinch(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl NqdError {
    /// Process exit code: 3 for bad input, 2 for numerics that did not settle, 1 for a failed construction.
    pub fn exit_code(&self) -> i32 {
        match self {
            NqdError::Pathing(_) | NqdError::NonFinite { .. } | NqdError::TractPinch(_) => 2,
            NqdError::Inconsistent(_) | NqdError::Inadmissible(_) => 1,
            _ => 3,
        }
    }
}

impl From<serde_json::Error> for NqdError {
    fn from(e: serde_json::Error) -> Self {
        let (line, column) = (e.line(), e.column());
        let text = e.to_string();
        let suffix = format!(" at line {line} column {column}");
        NqdError::Parse {
            line,
            column,
            msg: text.strip_suffix(&suffix).unwrap_or(&text).to_string(),
        }
    }
}
