//! The toy formal system.
//!
//! It has one statement form, "`C_T(s) > n`", and one kind of proof: a
//! transcript of every program of length `0..=n` run under fuel `T`, listed
//! positionally in program-index order. The checker replays each program and
//! accepts when every recorded outcome is reproduced and none of them halts
//! with `s`. Transcripts have `2^(n+1) - 1` records, so proofs grow
//! exponentially with the bound they establish.

pub mod grammar;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::complexity::Engine;
use crate::descriptor::{description_bits, CHECKER_DESCRIPTION, CHECKER_VERSION};
use crate::enumeration::{program_at, programs_up_to, write_program_at};
use crate::error::{Error, Result};
use crate::machine::{machine_digest, run_bits, Fuel, Program, RunOutcome};
use crate::par;

pub use grammar::{
    decode_proof, encode_proof, parse_certificate, parse_certificate_bytes, render_certificate,
    ParseError,
};

/// "No program of at most `bound` bits halts with `subject` within `fuel`
/// steps."
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComplexityClaim {
    pub subject: BitString,
    pub bound: u32,
    pub fuel: Fuel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofCertificate {
    /// Hex digest of the machine the transcript was recorded on.
    pub machine: String,
    pub claim: ComplexityClaim,
    /// Record `i` belongs to the program with index `i`.
    pub transcript: Vec<RunOutcome>,
}

impl ProofCertificate {
    /// `2^(bound+1) - 1`, or `None` when that does not fit in a `u64`.
    pub fn required_records(&self) -> Option<u64> {
        programs_up_to(self.claim.bound)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum InvalidReason {
    MachineMismatch { found: String },
    ZeroFuel,
    CountMismatch { expected: Option<u64>, found: u64 },
    OutcomeMismatch { index: u64 },
    SubjectProduced { index: u64 },
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidReason::MachineMismatch { found } => {
                write!(f, "certificate is for machine {found}")
            }
            InvalidReason::ZeroFuel => write!(f, "claims need fuel of at least 1"),
            InvalidReason::CountMismatch { expected, found } => match expected {
                Some(e) => write!(f, "transcript has {found} records, expected {e}"),
                None => write!(f, "transcript has {found} records, bound is out of range"),
            },
            InvalidReason::OutcomeMismatch { index } => write!(
                f,
                "record {index} (program {}) does not match re-execution",
                program_at(*index).to_dashed()
            ),
            InvalidReason::SubjectProduced { index } => write!(
                f,
                "program {} (record {index}) halts with the subject",
                program_at(*index).to_dashed()
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid(InvalidReason),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Builds the exhaustive transcript for `claim`, failing with
/// [`Error::ClaimFalse`] if some program of at most `bound` bits produces the
/// subject.
pub fn generate_certificate(engine: &Engine, claim: &ComplexityClaim) -> Result<ProofCertificate> {
    if claim.fuel.0 == 0 {
        return Err(Error::Domain("claims need fuel of at least 1".into()));
    }
    let sweep = engine.sweep(claim.bound, claim.fuel)?;
    let records = sweep.prefix(claim.bound);
    if let Some(i) = records.iter().position(|o| o.halted_with(&claim.subject)) {
        return Err(Error::ClaimFalse {
            witness: Program::new(program_at(i as u64)),
        });
    }
    Ok(ProofCertificate {
        machine: machine_digest().to_string(),
        claim: claim.clone(),
        transcript: records.to_vec(),
    })
}

pub fn check_certificate(cert: &ProofCertificate) -> Verdict {
    check_certificate_with_jobs(cert, par::available_jobs())
}

/// Replays the transcript on `jobs` workers. When several records are bad,
/// the one with the smallest index is reported.
pub fn check_certificate_with_jobs(cert: &ProofCertificate, jobs: usize) -> Verdict {
    if cert.machine != machine_digest() {
        return Verdict::Invalid(InvalidReason::MachineMismatch {
            found: cert.machine.clone(),
        });
    }
    if cert.claim.fuel.0 == 0 {
        return Verdict::Invalid(InvalidReason::ZeroFuel);
    }
    let expected = cert.required_records();
    let found = cert.transcript.len() as u64;
    if expected != Some(found) {
        return Verdict::Invalid(InvalidReason::CountMismatch { expected, found });
    }
    let fuel = cert.claim.fuel;
    let subject = &cert.claim.subject;
    let first_failure = par::map_blocks(found, jobs, |range| {
        let mut code = Vec::new();
        for i in range {
            write_program_at(i, &mut code);
            let actual = run_bits(&code, fuel);
            if actual != cert.transcript[i as usize] {
                return Some(InvalidReason::OutcomeMismatch { index: i });
            }
            if actual.halted_with(subject) {
                return Some(InvalidReason::SubjectProduced { index: i });
            }
        }
        None
    })
    .into_iter()
    .flatten()
    .next();
    match first_failure {
        Some(reason) => Verdict::Invalid(reason),
        None => Verdict::Valid,
    }
}

/// Identity and size of the proof-checking rules shipped with this release.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckerDescriptor {
    pub machine_spec_hash: String,
    pub checker_version: String,
    /// Bit length of the canonical checker description file.
    pub serialized_size_k: u64,
}

pub fn system_size() -> CheckerDescriptor {
    CheckerDescriptor {
        machine_spec_hash: machine_digest().to_string(),
        checker_version: CHECKER_VERSION.to_string(),
        serialized_size_k: description_bits(CHECKER_DESCRIPTION),
    }
}
