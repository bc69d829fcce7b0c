use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    ParameterRange(String),

    #[error("degenerate state: {0}")]
    Degenerate(String),

    #[error("order {order} exceeds the supported cap of {cap}")]
    OrderCap { order: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("moment matrix entry ({row}, {col}) has imaginary part {imag:e}")]
    ComplexMoment { row: usize, col: usize, imag: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
