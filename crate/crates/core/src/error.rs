use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at q = {0}")]
    Pole(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("slot algebra mismatch: {0}")]
    SlotMismatch(String),
    #[error("leg size mismatch: {0}")]
    Size(String),
    #[error("index {0} out of range")]
    Index(i32),
    #[error("invalid parameters: {0}")]
    Params(String),
}

pub type Result<T> = std::result::Result<T, Error>;
