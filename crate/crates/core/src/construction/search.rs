//! The target-driven searcher and its complexity audit.
//!
//! The proof stream lists valid proofs with subjects in length-lex order and,
//! per subject, bounds ascending from `N`. The searcher walks it looking for
//! one subject: either a literal pattern it carries, or the output of a
//! subprogram it carries. Whatever it can find is described by its own
//! target, so the audit can bound the complexity of the pattern by the size
//! of that target.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::complexity::{CensusTable, Engine};
use crate::enumeration::LengthLex;
use crate::error::{Error, Result};
use crate::formal::{generate_certificate, ComplexityClaim, ProofCertificate};
use crate::machine::{run, Fuel, Program, Status};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "bits", rename_all = "kebab-case")]
pub enum SearchTarget {
    Literal(BitString),
    Generated(Program),
}

impl SearchTarget {
    /// Serialized form: `0` or `1` for the kind, then the carried bits as
    /// `(1 b)* 0`.
    pub fn encoded(&self) -> BitString {
        let (tag, bits) = match self {
            SearchTarget::Literal(s) => (false, s),
            SearchTarget::Generated(p) => (true, &p.code),
        };
        let mut out = BitString::new();
        out.push(tag);
        for b in bits.iter() {
            out.push(true);
            out.push(b);
        }
        out.push(false);
        out
    }

    pub fn encoded_size(&self) -> usize {
        self.encoded().len()
    }

    /// The string the searcher is looking for.
    pub fn effective_pattern(&self, fuel: Fuel) -> Result<BitString> {
        match self {
            SearchTarget::Literal(s) => Ok(s.clone()),
            SearchTarget::Generated(p) => {
                let r = run(p, fuel);
                if r.status == Status::Halted {
                    Ok(r.output)
                } else {
                    Err(Error::Divergence {
                        program: p.clone(),
                        status: r.status,
                        fuel,
                    })
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamConfig {
    /// Bounds streamed per subject: `N ..= N + extra_bounds`.
    pub extra_bounds: u32,
    pub max_subject_len: usize,
}

impl Default for StreamConfig {
    fn default() -> Self {
        Self {
            extra_bounds: 0,
            max_subject_len: 20,
        }
    }
}

/// Valid theorems in canonical order. Validity is decided from the census;
/// certificates are materialised on demand with [`generate_certificate`].
pub struct ProofStream {
    table: CensusTable,
    min_bound: u32,
    max_bound: u32,
    fuel: Fuel,
    subjects: LengthLex,
    current: Option<(BitString, u32, u32)>,
}

impl ProofStream {
    pub fn new(engine: &Engine, bound: u32, fuel: Fuel, config: StreamConfig) -> Result<Self> {
        let max_bound = bound
            .checked_add(config.extra_bounds)
            .ok_or_else(|| Error::Domain("bound range overflows".into()))?;
        Ok(Self {
            table: engine.census(max_bound, fuel)?,
            min_bound: bound,
            max_bound,
            fuel,
            subjects: LengthLex::starting_at(BitString::zeros(1), Some(config.max_subject_len)),
            current: None,
        })
    }
}

impl Iterator for ProofStream {
    type Item = ComplexityClaim;

    fn next(&mut self) -> Option<ComplexityClaim> {
        loop {
            if let Some((subject, next, last)) = &mut self.current {
                if *next <= *last {
                    let claim = ComplexityClaim {
                        subject: subject.clone(),
                        bound: *next,
                        fuel: self.fuel,
                    };
                    *next += 1;
                    return Some(claim);
                }
            }
            let subject = self.subjects.next()?;
            // Bounds strictly below C_T(subject) are provable.
            let last = match self.table.get(&subject) {
                Some(rec) if rec.k_value <= self.min_bound => continue,
                Some(rec) => rec.k_value - 1,
                None => self.max_bound,
            };
            self.current = Some((subject, self.min_bound, last.min(self.max_bound)));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found {
        theorem: ComplexityClaim,
        proof: ProofCertificate,
        proofs_streamed: u64,
    },
    NotFound {
        proofs_streamed: u64,
        reason: String,
    },
}

pub fn search_proof_stream(
    engine: &Engine,
    target: &SearchTarget,
    bound: u32,
    fuel: Fuel,
) -> Result<SearchOutcome> {
    search_proof_stream_with(engine, target, bound, fuel, StreamConfig::default())
}

pub fn search_proof_stream_with(
    engine: &Engine,
    target: &SearchTarget,
    bound: u32,
    fuel: Fuel,
    config: StreamConfig,
) -> Result<SearchOutcome> {
    let pattern = target.effective_pattern(fuel)?;
    if pattern.len() > config.max_subject_len {
        return Ok(SearchOutcome::NotFound {
            proofs_streamed: 0,
            reason: format!(
                "pattern of {} bits lies beyond the stream's subject cap of {}",
                pattern.len(),
                config.max_subject_len
            ),
        });
    }
    let mut streamed = 0u64;
    for theorem in ProofStream::new(engine, bound, fuel, config)? {
        streamed += 1;
        if theorem.subject == pattern {
            let proof = generate_certificate(engine, &theorem)?;
            return Ok(SearchOutcome::Found {
                theorem,
                proof,
                proofs_streamed: streamed,
            });
        }
        if theorem.subject > pattern {
            break;
        }
    }
    Ok(SearchOutcome::NotFound {
        proofs_streamed: streamed,
        reason: format!("no valid proof of bound >= {bound} has this subject"),
    })
}

/// Largest census an audit runs to cross-check a bound.
pub const AUDIT_MAX_LEN: u32 = 14;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub target: SearchTarget,
    pub pattern: BitString,
    pub pattern_len: usize,
    pub encoded_size: usize,
    /// Size of the subprogram, for generated targets.
    pub witness_size: Option<usize>,
    /// The subprogram re-executes to the pattern within fuel.
    pub witness_verified: bool,
    /// `C_T(pattern)` from a census of `census_max_len`, if found there.
    pub census_k: Option<u32>,
    pub census_max_len: u32,
    /// Upper bound on `C_T(pattern)` the audit certifies, if any.
    pub certified_upper_bound: Option<u64>,
    pub relation_holds: bool,
}

pub fn target_complexity_audit(
    engine: &Engine,
    target: &SearchTarget,
    fuel: Fuel,
) -> Result<AuditRecord> {
    let pattern = target.effective_pattern(fuel)?;
    let encoded_size = target.encoded_size();
    let (witness_size, witness_verified, census_max_len) = match target {
        SearchTarget::Generated(p) => {
            let replay = run(p, fuel);
            let verified = replay.halted_with(&pattern);
            let len = (p.size() as u32).min(AUDIT_MAX_LEN);
            (Some(p.size()), verified, len)
        }
        SearchTarget::Literal(_) => (None, false, AUDIT_MAX_LEN),
    };
    let census_k = engine
        .k_of(&pattern, census_max_len, fuel)?
        .map(|r| r.k_value);
    let certified_upper_bound = witness_size
        .filter(|_| witness_verified)
        .map(|w| w as u64)
        .or(census_k.map(u64::from));
    let relation_holds = match target {
        SearchTarget::Generated(p) => {
            witness_verified && census_k.is_none_or(|k| k as usize <= p.size())
        }
        SearchTarget::Literal(s) => s.len() <= encoded_size,
    };
    Ok(AuditRecord {
        target: target.clone(),
        pattern_len: pattern.len(),
        pattern,
        encoded_size,
        witness_size,
        witness_verified,
        census_k,
        census_max_len,
        certified_upper_bound,
        relation_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::museum::{british_museum, MuseumMode};
    use crate::formal::{check_certificate, Verdict};

    const T: Fuel = Fuel(512);

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn literal_and_generated_find_the_museum_theorem() {
        let engine = Engine::new();
        let museum = british_museum(&engine, 3, T, MuseumMode::Direct).unwrap();
        let s = museum.theorem.subject.clone();

        let lit = search_proof_stream(&engine, &SearchTarget::Literal(s.clone()), 3, T).unwrap();
        let SearchOutcome::Found { theorem, proof, .. } = lit else {
            panic!("literal search failed")
        };
        assert_eq!(theorem, museum.theorem);
        assert_eq!(check_certificate(&proof), Verdict::Valid);

        let witness = engine.k_of(&s, 12, T).unwrap().unwrap().witness;
        let gen = search_proof_stream(&engine, &SearchTarget::Generated(witness), 3, T).unwrap();
        let SearchOutcome::Found { theorem: t2, .. } = gen else {
            panic!("generated search failed")
        };
        assert_eq!(t2, museum.theorem);
    }

    #[test]
    fn compressible_literal_not_found() {
        let engine = Engine::new();
        // "01" has C_T = 6, so no proof of a bound >= 6 mentions it.
        let out = search_proof_stream(&engine, &SearchTarget::Literal(bs("01")), 6, T).unwrap();
        assert!(matches!(out, SearchOutcome::NotFound { .. }));
        let out = search_proof_stream(&engine, &SearchTarget::Literal(bs("01")), 5, T).unwrap();
        assert!(matches!(out, SearchOutcome::Found { .. }));
    }

    #[test]
    fn stream_order_and_validity() {
        let engine = Engine::new();
        let config = StreamConfig {
            extra_bounds: 3,
            max_subject_len: 4,
        };
        let claims: Vec<_> = ProofStream::new(&engine, 3, T, config).unwrap().collect();
        assert!(!claims.is_empty());
        for w in claims.windows(2) {
            let ordered = (&w[0].subject, w[0].bound) < (&w[1].subject, w[1].bound);
            assert!(ordered, "{:?} then {:?}", w[0], w[1]);
        }
        let table = engine.census(6, T).unwrap();
        for c in &claims {
            assert!((3..=6).contains(&c.bound));
            assert!(table.get(&c.subject).is_none_or(|r| r.k_value > c.bound));
        }
    }

    #[test]
    fn audit_generated_target() {
        let engine = Engine::new();
        // ONE then five DBLs: 32 ones from 18 bits.
        let p = Program::assemble(&[2, 3, 3, 3, 3, 3]);
        let audit = target_complexity_audit(&engine, &SearchTarget::Generated(p), T).unwrap();
        assert_eq!(audit.pattern_len, 32);
        assert_eq!(audit.certified_upper_bound, Some(18));
        assert!(audit.witness_verified);
        assert!(audit.relation_holds);
        assert!(audit.encoded_size >= 18);
    }

    #[test]
    fn audit_literal_target() {
        let engine = Engine::new();
        let audit =
            target_complexity_audit(&engine, &SearchTarget::Literal(bs("0101")), T).unwrap();
        assert!(audit.encoded_size >= 4);
        assert!(audit.relation_holds);
        assert!(audit.census_k.is_some());
    }

    #[test]
    fn diverging_subprogram() {
        let engine = Engine::new();
        let looping = Program::assemble(&[7, 4, 0]);
        let target = SearchTarget::Generated(looping);
        assert!(matches!(
            target_complexity_audit(&engine, &target, T),
            Err(Error::Divergence { .. })
        ));
        assert!(matches!(
            search_proof_stream(&engine, &target, 2, T),
            Err(Error::Divergence { .. })
        ));
    }
}
