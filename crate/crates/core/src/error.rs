use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("size bound exceeded: {what} = {value} > {bound}")]
    SizeBound {
        what: &'static str,
        value: usize,
        bound: usize,
    },

    #[error("boundary mismatch: {0}")]
    Boundary(String),

    #[error("invalid construction: {0}")]
    Construction(String),

    #[error("structural mismatch: {0}")]
    Structural(String),

    #[error("invalid weight: {0}")]
    Weight(String),

    #[error("search exhausted: {0}")]
    Search(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
