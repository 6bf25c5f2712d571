use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KError {
    #[error("matrix has no rows")]
    Empty,
    #[error("row {row} has {len} entries, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
    #[error("transition matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("negative transition entry {value} at ({row}, {col})")]
    Negative { row: usize, col: usize, value: i64 },
    #[error("transition matrix is reducible: state {to} is unreachable from state {from}")]
    Reducible { from: usize, to: usize },
    #[error("corpus fixture is malformed: {0}")]
    Fixture(String),
}
