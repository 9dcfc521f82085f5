use thiserror::Error;

/// Errors raised by evaluation, verification and solving.
///
/// Offending values are carried pre-formatted so the error type stays
/// independent of the scalar type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{coordinate} = {value} is outside the domain of `{space}`")]
    Domain {
        space: String,
        coordinate: &'static str,
        value: String,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("map is undefined at x = {0}")]
    MapUndefined(String),

    #[error("map guards overlap at x = {point} (pieces {first} and {second})")]
    MapAmbiguous {
        point: String,
        first: usize,
        second: usize,
    },

    #[error("distance rule returned negative value {value} at ({x}, {y})")]
    NegativeDistance { x: String, y: String, value: String },

    #[error("orbit left the domain at iterate {index}: x = {value}")]
    DomainEscape { index: usize, value: String },

    #[error("maps disagree on the intersection at x = {point}: f = {f}, g = {g}")]
    Gluing { point: String, f: String, g: String },

    #[error("insufficient data: {qualifying} qualifying steps, need at least {needed}")]
    InsufficientData { qualifying: usize, needed: usize },

    #[error("parse error in `{input}` at column {column}: {message}")]
    Parse {
        input: String,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
