//! Size accounting for the bound-driven composite program: the checker
//! description (`k` bits) followed by `N` in binary.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::museum::{british_museum, MuseumMode, MuseumResult};
use crate::bits::BitString;
use crate::complexity::Engine;
use crate::descriptor::{description_bits, PROOF_CHECKER_DESCRIPTION, SEARCHER_DESCRIPTION};
use crate::error::{Error, Result};
use crate::formal::{system_size, CheckerDescriptor};
use crate::machine::Fuel;

/// Release budget for `k1 + k2 - k`.
pub const SLACK_BUDGET_BITS: i64 = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeProgram {
    pub checker: CheckerDescriptor,
    pub bound: BigUint,
    /// `bound` in binary, `floor(log2 bound) + 1` bits.
    pub bound_encoding: BitString,
    pub total_size: u64,
}

pub fn build_composite(bound: &BigUint) -> Result<CompositeProgram> {
    if bound.is_zero() {
        return Err(Error::Domain("the bound N must be positive".into()));
    }
    let checker = system_size();
    let width = bound.bits();
    let bound_encoding: BitString = (0..width).rev().map(|i| bound.bit(i)).collect();
    Ok(CompositeProgram {
        total_size: checker.serialized_size_k + bound_encoding.len() as u64,
        checker,
        bound: bound.clone(),
        bound_encoding,
    })
}

impl CompositeProgram {
    /// True once the description is shorter than the complexity its output
    /// is proved to exceed.
    pub fn shorter_than_bound(&self) -> bool {
        BigUint::from(self.total_size) < self.bound
    }

    /// Runs the routine: the first proof, in size order, of a bound >= N.
    pub fn execute(&self, engine: &Engine, fuel: Fuel) -> Result<MuseumResult> {
        let bound = self
            .bound
            .to_u32()
            .ok_or_else(|| Error::Refused(format!("bound {} is beyond any sweep", self.bound)))?;
        british_museum(engine, bound, fuel, MuseumMode::Direct)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub checker_part_size: u64,
    pub searcher_part_size: u64,
    pub k: u64,
    /// `k1 + k2 - k`.
    pub slack: i64,
}

impl Decomposition {
    pub fn within_budget(&self) -> bool {
        (0..=SLACK_BUDGET_BITS).contains(&self.slack)
    }
}

pub fn decompose() -> Decomposition {
    let checker_part_size = description_bits(PROOF_CHECKER_DESCRIPTION);
    let searcher_part_size = description_bits(SEARCHER_DESCRIPTION);
    let k = system_size().serialized_size_k;
    Decomposition {
        checker_part_size,
        searcher_part_size,
        k,
        slack: (checker_part_size + searcher_part_size) as i64 - k as i64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn composite(n: u64) -> CompositeProgram {
        build_composite(&BigUint::from(n)).unwrap()
    }

    #[test]
    fn bound_encoding_lengths() {
        let k = system_size().serialized_size_k;
        assert_eq!(composite(1024).bound_encoding.len(), 11);
        let one = composite(1);
        assert_eq!(one.bound_encoding.to_string(), "1");
        assert_eq!(one.total_size, k + 1);
        for n in [1u64, 3, 1000, 1 << 19] {
            assert_eq!(composite(2 * n).total_size - composite(n).total_size, 1);
        }
        assert_eq!(composite(1024).bound_encoding.to_u64(), Some(1024));
    }

    #[test]
    fn zero_bound_rejected() {
        assert!(build_composite(&BigUint::zero()).is_err());
    }

    #[test]
    fn decomposition_is_stable_and_within_budget() {
        let d = decompose();
        assert_eq!(d, decompose());
        assert!(d.checker_part_size > 0 && d.searcher_part_size > 0);
        assert_eq!(
            d.checker_part_size + d.searcher_part_size,
            (d.k as i64 + d.slack) as u64
        );
        assert!(d.within_budget(), "{d:?}");
    }

    #[test]
    fn paradox_regime_starts_past_k() {
        let k = system_size().serialized_size_k;
        assert!(!composite(k).shorter_than_bound());
        assert!(composite(2 * k).shorter_than_bound());
    }

    #[test]
    fn execute_small_bound() {
        let r = composite(4).execute(&Engine::new(), Fuel(512)).unwrap();
        assert_eq!(r.theorem.bound, 4);
    }
}
