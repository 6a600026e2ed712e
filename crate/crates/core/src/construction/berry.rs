//! The first string no short program produces.
//!
//! Given a complexity level `C`, sweep every program up to the stopping
//! ordinal `2^(C+1) - 2` (all programs of at most `C` bits; the empty program
//! is swept too) and return the length-lex first nonempty string none of them
//! outputs. The routine's description therefore has to carry the stopping
//! ordinal, about `C` bits, and its output has `C_T > C`.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::complexity::{count_upper_bound, Engine};
use crate::enumeration::{programs_up_to, LengthLex};
use crate::error::{Error, Result};
use crate::machine::Fuel;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BerryResult {
    pub subject: BitString,
    pub complexity: u32,
    pub stop_ordinal: u64,
    pub fuel: Fuel,
    pub programs_swept: u64,
    pub distinct_outputs: usize,
}

/// Ordinal of the last program of `c` bits: `2^(c+1) - 2`.
pub fn stop_ordinal_for(c: u32) -> Option<u64> {
    programs_up_to(c).map(|n| n - 1)
}

/// Inverse of [`stop_ordinal_for`]; `None` unless `ordinal` is the last
/// ordinal of some length.
pub fn complexity_for_stop_ordinal(ordinal: u64) -> Option<u32> {
    let total = ordinal.checked_add(2)?;
    total.is_power_of_two().then(|| total.trailing_zeros() - 1)
}

pub fn first_unproduced_string(engine: &Engine, c: u32, fuel: Fuel) -> Result<BerryResult> {
    let table = engine.census(c, fuel)?;
    let stop_ordinal = stop_ordinal_for(c)
        .ok_or_else(|| Error::Refused(format!("complexity {c} is out of range")))?;
    // At most 2^(c+1) - 2 nonempty outputs exist, so some string of length
    // c + 1 is always free.
    debug_assert_eq!(count_upper_bound(c), stop_ordinal.into());
    let subject = LengthLex::unbounded()
        .find(|s| !table.produces(s))
        .expect("length-lex stream is infinite");
    Ok(BerryResult {
        subject,
        complexity: c,
        stop_ordinal,
        fuel,
        programs_swept: stop_ordinal + 1,
        distinct_outputs: table.entries.len(),
    })
}
