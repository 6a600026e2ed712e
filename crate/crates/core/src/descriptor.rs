//! Canonical description files whose sizes stand for program sizes.
//!
//! `checker.kd` describes the whole bound-driven routine (machine, proof
//! grammar, checking rules, proof enumeration and the "first proof with
//! bound >= N" search) minus the number N itself. It is exactly the bodies of
//! `proof_checker.kd` and `searcher.kd` under a single header line, so the
//! split costs only the extra header.

pub const CHECKER_DESCRIPTION: &str = include_str!("../descriptors/checker.kd");
pub const PROOF_CHECKER_DESCRIPTION: &str = include_str!("../descriptors/proof_checker.kd");
pub const SEARCHER_DESCRIPTION: &str = include_str!("../descriptors/searcher.kd");

pub const CHECKER_VERSION: &str = "kolmo-checker/1";

pub fn description_bits(text: &str) -> u64 {
    8 * text.len() as u64
}
