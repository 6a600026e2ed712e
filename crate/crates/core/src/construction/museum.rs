//! Proof enumeration in size order.
//!
//! Blind mode walks every bit string in length-lex order, decodes it as a
//! binary proof, replays the ones that parse and stops at the first valid
//! proof whose bound reaches `N`. Direct mode jumps to the same theorem: for a
//! fixed bound every valid proof has the same transcript, the subject code is
//! length-lex monotone, and raising the bound adds at least `3 * 2^(n+1)`
//! bits of records, so the first proof is the first unproduced subject at
//! bound exactly `N`.

use serde::{Deserialize, Serialize};

use super::berry::first_unproduced_string;
use crate::complexity::Engine;
use crate::error::{Error, Result};
use crate::formal::grammar::PackedBits;
use crate::formal::{
    check_certificate_with_jobs, decode_proof, encode_proof, generate_certificate, ComplexityClaim,
    ProofCertificate,
};
use crate::machine::Fuel;
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuseumMode {
    Blind,
    Direct,
}

/// Largest bound blind mode accepts.
pub const BLIND_MAX_BOUND: u32 = 2;
/// Blind mode gives up after candidates of this many bits.
pub const BLIND_MAX_BITS: u32 = 40;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuseumStats {
    /// Candidate proofs examined, up to and including the one returned.
    pub candidates: u64,
    pub parse_failures: u64,
    pub check_failures: u64,
    /// Valid proofs of a bound smaller than requested.
    pub valid_below_bound: u64,
    /// Length of the returned proof in its binary encoding.
    pub proof_bits: u64,
    /// Programs swept to build the proof (direct mode).
    pub programs_swept: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuseumResult {
    pub theorem: ComplexityClaim,
    pub proof: ProofCertificate,
    pub stats: MuseumStats,
}

pub fn british_museum(
    engine: &Engine,
    bound: u32,
    fuel: Fuel,
    mode: MuseumMode,
) -> Result<MuseumResult> {
    if bound == 0 {
        return Err(Error::Domain("the bound N must be positive".into()));
    }
    if fuel.0 == 0 {
        return Err(Error::Domain("claims need fuel of at least 1".into()));
    }
    match mode {
        MuseumMode::Blind => blind(engine, bound, fuel),
        MuseumMode::Direct => direct(engine, bound, fuel),
    }
}

fn direct(engine: &Engine, bound: u32, fuel: Fuel) -> Result<MuseumResult> {
    let berry = first_unproduced_string(engine, bound, fuel)?;
    let theorem = ComplexityClaim {
        subject: berry.subject,
        bound,
        fuel,
    };
    let proof = generate_certificate(engine, &theorem)?;
    let stats = MuseumStats {
        proof_bits: encode_proof(&proof).len() as u64,
        programs_swept: proof.transcript.len() as u64,
        ..MuseumStats::default()
    };
    Ok(MuseumResult {
        theorem,
        proof,
        stats,
    })
}

struct BlockScan {
    stats: MuseumStats,
    hit: Option<ProofCertificate>,
}

fn blind(engine: &Engine, bound: u32, fuel: Fuel) -> Result<MuseumResult> {
    engine.limits().admit(bound, fuel)?;
    if bound > BLIND_MAX_BOUND {
        return Err(Error::Refused(format!(
            "blind enumeration is limited to bounds <= {BLIND_MAX_BOUND}; use direct mode"
        )));
    }
    let mut stats = MuseumStats::default();
    for len in 0..=BLIND_MAX_BITS {
        let scans = par::map_blocks(1u64 << len, engine.jobs(), |range| {
            let mut scan = BlockScan {
                stats: MuseumStats::default(),
                hit: None,
            };
            for value in range {
                let s = &mut scan.stats;
                s.candidates += 1;
                let cert = match decode_proof(&PackedBits { value, len }, fuel) {
                    Ok(c) => c,
                    Err(_) => {
                        s.parse_failures += 1;
                        continue;
                    }
                };
                if !check_certificate_with_jobs(&cert, 1).is_valid() {
                    s.check_failures += 1;
                } else if cert.claim.bound < bound {
                    s.valid_below_bound += 1;
                } else {
                    s.proof_bits = len as u64;
                    scan.hit = Some(cert);
                    break;
                }
            }
            scan
        });
        for scan in scans {
            stats.candidates += scan.stats.candidates;
            stats.parse_failures += scan.stats.parse_failures;
            stats.check_failures += scan.stats.check_failures;
            stats.valid_below_bound += scan.stats.valid_below_bound;
            if let Some(proof) = scan.hit {
                stats.proof_bits = scan.stats.proof_bits;
                return Ok(MuseumResult {
                    theorem: proof.claim.clone(),
                    proof,
                    stats,
                });
            }
        }
    }
    Err(Error::NotFound(format!(
        "no valid proof of bound >= {bound} among proofs of at most {BLIND_MAX_BITS} bits"
    )))
}
