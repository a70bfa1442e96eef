// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the simulator, the sharing engine and the query-game search.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("unsupported size: {0}")]
    Capability(String),
    #[error("table validation failed: {0}")]
    Validation(String),
    #[error("post-selection on a zero-probability outcome: {0}")]
    PostSelection(String),
    #[error("not a member of the family: {0}")]
    Family(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
