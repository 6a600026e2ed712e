mod common;

use common::{all_strings, oracle_ordinal};
use kolmo_core::enumeration::{
    enumerate_strings, ordinal_to_string, program_at, program_index, programs_up_to,
    string_to_ordinal, EnumError, LengthLex, OrdinalIndex,
};
use kolmo_core::BitString;
use num_bigint::BigUint;
use proptest::prelude::*;

fn ord(n: u64) -> OrdinalIndex {
    OrdinalIndex::from_u64(n).unwrap()
}

proptest! {
    #[test]
    fn round_trip_and_length(n in 1u64..=1 << 20) {
        let s = ordinal_to_string(&ord(n));
        prop_assert_eq!(s.to_string(), oracle_ordinal(n));
        prop_assert_eq!(s.len() as u32, (n + 1).ilog2());
        prop_assert_eq!(string_to_ordinal(&s).unwrap().into_inner(), BigUint::from(n));
    }

    #[test]
    fn order_preserving(a in 1u64..1 << 40, b in 1u64..1 << 40) {
        let (s, t) = (ordinal_to_string(&ord(a)), ordinal_to_string(&ord(b)));
        prop_assert_eq!(a.cmp(&b), s.cmp(&t));
    }

    #[test]
    fn big_ordinals_round_trip(digits in "[1-9][0-9]{0,60}") {
        let n: BigUint = digits.parse().unwrap();
        let s = ordinal_to_string(&OrdinalIndex::new(n.clone()).unwrap());
        prop_assert_eq!(s.len() as u64, (n.clone() + 1u32).bits() - 1);
        prop_assert_eq!(string_to_ordinal(&s).unwrap().into_inner(), n);
    }

    #[test]
    fn program_index_matches_position(i in 0u64..1 << 30) {
        let p = program_at(i);
        prop_assert_eq!(program_index(&p), Some(i));
    }
}

#[test]
fn domain_errors() {
    assert_eq!(
        OrdinalIndex::from_u64(0).unwrap_err(),
        EnumError::ZeroOrdinal
    );
    assert_eq!(
        string_to_ordinal(&BitString::new()).unwrap_err(),
        EnumError::EmptyString
    );
}

#[test]
fn stream_matches_reference_order_and_counts() {
    for max_len in 0..=20usize {
        let count = enumerate_strings(max_len).count() as u64;
        assert_eq!(count, (1u64 << (max_len + 1)) - 2, "L = {max_len}");
    }
    let ours: Vec<String> = enumerate_strings(12).map(|s| s.to_string()).collect();
    let reference: Vec<String> = all_strings(12).skip(1).collect();
    assert_eq!(ours, reference);
    for (i, s) in all_strings(10).enumerate() {
        assert_eq!(program_at(i as u64).to_string(), s);
    }
    assert_eq!(programs_up_to(10), Some(2047));
}

#[test]
fn stream_resumes_anywhere() {
    let start: BitString = "0110".parse().unwrap();
    let tail: Vec<String> = LengthLex::starting_at(start, Some(5))
        .map(|s| s.to_string())
        .collect();
    let reference: Vec<String> = all_strings(5).skip_while(|s| s != "0110").collect();
    assert_eq!(tail, reference);
}
