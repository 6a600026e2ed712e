//! Length-lexicographic enumeration of bit strings and the ordinal bijection.
//!
//! Nonempty strings are numbered from 1: `"0"`, `"1"`, `"00"`, `"01"`, `"10"`,
//! `"11"`, `"000"`, ... The n-th string is `n + 1` written in binary with its
//! leading `1` removed, so its length is `floor(log2(n + 1))`.
//!
//! Program sweeps also need the empty program, so the `u64` helpers below use
//! a 0-based *program index*: index 0 is the empty string and index `i >= 1`
//! coincides with ordinal `i`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::bits::BitString;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("ordinals start at 1")]
    ZeroOrdinal,
    #[error("the empty string has no ordinal")]
    EmptyString,
}

/// 1-based position of a nonempty string in length-lex order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrdinalIndex(BigUint);

impl OrdinalIndex {
    pub fn new(value: BigUint) -> Result<Self, EnumError> {
        if value.is_zero() {
            Err(EnumError::ZeroOrdinal)
        } else {
            Ok(Self(value))
        }
    }

    pub fn from_u64(value: u64) -> Result<Self, EnumError> {
        Self::new(BigUint::from(value))
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }
}

pub fn ordinal_to_string(n: &OrdinalIndex) -> BitString {
    let shifted = &n.0 + 1u32;
    let width = shifted.bits();
    (0..width - 1).rev().map(|i| shifted.bit(i)).collect()
}

pub fn string_to_ordinal(p: &BitString) -> Result<OrdinalIndex, EnumError> {
    if p.is_empty() {
        return Err(EnumError::EmptyString);
    }
    let mut acc = BigUint::one();
    for bit in p.iter() {
        acc <<= 1u32;
        if bit {
            acc += 1u32;
        }
    }
    Ok(OrdinalIndex(acc - 1u32))
}

/// Number of programs of length `0..=max_len`, i.e. `2^(max_len+1) - 1`.
///
/// Returns `None` if the count does not fit in a `u64`.
pub fn programs_up_to(max_len: u32) -> Option<u64> {
    if max_len >= 63 {
        return None;
    }
    Some((1u64 << (max_len + 1)) - 1)
}

/// The program with 0-based index `index` (0 is the empty program).
pub fn program_at(index: u64) -> BitString {
    let mut out = Vec::new();
    write_program_at(index, &mut out);
    BitString::from_bits(out)
}

/// Allocation-free variant of [`program_at`] for sweep loops.
pub fn write_program_at(index: u64, out: &mut Vec<bool>) {
    out.clear();
    let shifted = index as u128 + 1;
    let width = 128 - shifted.leading_zeros();
    out.extend((0..width - 1).rev().map(|i| (shifted >> i) & 1 == 1));
}

/// Inverse of [`program_at`]. `None` for strings of 64 bits or more.
pub fn program_index(p: &BitString) -> Option<u64> {
    if p.len() >= 64 {
        return None;
    }
    let with_marker = (1u64 << p.len()) | p.to_u64()?;
    Some(with_marker - 1)
}

/// Streams every nonempty string in length-lex order, optionally stopping
/// after strings of length `max_len`.
#[derive(Debug, Clone)]
pub struct LengthLex {
    next: Option<BitString>,
    max_len: Option<usize>,
}

impl LengthLex {
    pub fn starting_at(first: BitString, max_len: Option<usize>) -> Self {
        let next = match max_len {
            Some(m) if first.len() > m => None,
            _ => Some(first),
        };
        Self { next, max_len }
    }

    pub fn unbounded() -> Self {
        Self::starting_at(BitString::zeros(1), None)
    }
}

impl Iterator for LengthLex {
    type Item = BitString;

    fn next(&mut self) -> Option<BitString> {
        let current = self.next.take()?;
        let mut bits = current.clone().into_bits();
        // Binary increment; all-ones rolls over to the next length.
        match bits.iter().rposition(|&b| !b) {
            Some(pos) => {
                bits[pos] = true;
                bits[pos + 1..].iter_mut().for_each(|b| *b = false);
            }
            None => bits = vec![false; bits.len() + 1],
        }
        if self.max_len.is_none_or(|m| bits.len() <= m) {
            self.next = Some(BitString::from_bits(bits));
        }
        Some(current)
    }
}

/// All `2^(max_len+1) - 2` nonempty strings of length at most `max_len`.
pub fn enumerate_strings(max_len: usize) -> LengthLex {
    LengthLex::starting_at(BitString::zeros(1), Some(max_len))
}
