//! A desk-scale laboratory for program-size complexity.
//!
//! - [`machine`]: a tiny deterministic machine running raw bit strings under
//!   a step budget.
//! - [`complexity`]: exhaustive fuel-bounded complexity `C_T` and the census
//!   engine.
//! - [`formal`]: a formal system whose theorems are lower bounds
//!   `C_T(s) > n`, with checkable exhaustive-run certificates.
//! - [`construction`]: proof enumeration in size order, the bound-driven
//!   composite program and its size accounting, the target-driven searcher
//!   and the first-unproduced-string driver.

pub mod bits;
pub mod cache;
pub mod complexity;
pub mod construction;
pub mod descriptor;
pub mod enumeration;
pub mod error;
pub mod formal;
pub mod machine;
pub mod par;

pub use bits::BitString;
pub use complexity::{CensusTable, ComplexityRecord, Engine, Limits};
pub use error::{Error, Result};
pub use formal::{ComplexityClaim, ProofCertificate, Verdict};
pub use machine::{Fuel, Program, RunOutcome, Status};
