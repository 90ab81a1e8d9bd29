// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::layout::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid array size {0}: at least two cells are required")]
    InvalidArraySize(usize),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("state is not normalized: {0}")]
    Normalization(String),

    #[error("gate is not unitary (deviation {0:e})")]
    NonUnitaryGate(f64),

    #[error("cell index {index} out of range for {n_cells} cells")]
    Index { index: usize, n_cells: usize },

    #[error("malformed gate: {0}")]
    MalformedGate(String),

    #[error("controlled-U gate requires a 2x2 unitary parameter")]
    MissingParameter,

    #[error("parity error: {0}")]
    Parity(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("margin exceeded while compiling instruction {instruction}: {detail}")]
    MarginExceeded { instruction: usize, detail: String },

    #[error("copy kernel unavailable: {0}")]
    KernelUnavailable(String),

    #[error("layout invalid: {}", format_violations(.0))]
    LayoutInvalid(Vec<Violation>),

    #[error("step {0} has no inverse within the alphabet")]
    NonInvertibleInAlphabet(usize),

    #[error("no kernel of length <= {max_len} satisfies the requirements")]
    NotFound { max_len: usize },

    #[error("I/O error: {0}")]
    Io(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
