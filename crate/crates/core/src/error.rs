use thiserror::Error;

use crate::formal::grammar::ParseError;
use crate::machine::{Fuel, Program, Status};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The request is beyond the configured desk-scale limits.
    #[error("refused: {0}")]
    Refused(String),
    #[error("claim is false: program {} halts with the subject", .witness.code.to_dashed())]
    ClaimFalse { witness: Program },
    #[error("not found: {0}")]
    NotFound(String),
    #[error("subprogram {} did not halt within fuel {fuel} ({status:?})", .program.code.to_dashed())]
    Divergence {
        program: Program,
        status: Status,
        fuel: Fuel,
    },
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}
