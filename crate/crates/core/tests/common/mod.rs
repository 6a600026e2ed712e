//! Reference implementations written straight from the machine table and
//! the definitions, sharing no code with the library.

#![allow(dead_code)]

use std::collections::HashMap;

use kolmo_core::machine::{RunOutcome, Status};
use kolmo_core::{BitString, ProofCertificate};
use rand::Rng;

pub const T: u64 = 512;
const CAP: usize = 65536;

/// `(status letter, output as 0/1 text, steps)`.
pub fn oracle_run(code: &str, fuel: u64) -> (char, String, u64) {
    let ops: Vec<u8> = code
        .as_bytes()
        .chunks_exact(3)
        .map(|c| c.iter().fold(0u8, |acc, b| acc * 2 + (b - b'0')))
        .collect();
    let mut out = String::new();
    let mut ip: i64 = 0;
    let mut steps = 0u64;
    loop {
        if ip as usize >= ops.len() {
            return ('H', out, steps);
        }
        if steps == fuel {
            return ('F', String::new(), steps);
        }
        steps += 1;
        let op = ops[ip as usize];
        let grow = match op {
            1 | 2 => 1,
            3 | 6 => out.len(),
            _ => 0,
        };
        if out.len() + grow > CAP {
            return ('C', String::new(), steps);
        }
        match op {
            0 => return ('H', out, steps),
            1 => out.push('0'),
            2 => out.push('1'),
            3 => out = out.repeat(2),
            4 => {
                let Some(&d) = ops.get(ip as usize + 1) else {
                    return ('C', String::new(), steps);
                };
                ip -= d as i64 + 1;
                if ip < 0 {
                    return ('C', String::new(), steps);
                }
                continue;
            }
            5 => {
                if out.len().is_multiple_of(2) {
                    ip += 1;
                }
            }
            6 => {
                let flipped: String = out
                    .chars()
                    .map(|c| if c == '0' { '1' } else { '0' })
                    .collect();
                out.push_str(&flipped);
            }
            _ => {}
        }
        ip += 1;
    }
}

/// Every bit string of length `0..=max_len`, shortest first, each length in
/// numeric order.
pub fn all_strings(max_len: usize) -> impl Iterator<Item = String> {
    (0..=max_len).flat_map(|len| {
        (0u64..1 << len).map(move |v| {
            if len == 0 {
                String::new()
            } else {
                format!("{v:0len$b}")
            }
        })
    })
}

/// Output -> (shortest witness), from running every program of at most
/// `max_len` bits.
pub fn oracle_census(max_len: usize, fuel: u64) -> HashMap<String, String> {
    let mut first = HashMap::new();
    for p in all_strings(max_len) {
        let (status, out, _) = oracle_run(&p, fuel);
        if status == 'H' {
            first.entry(out).or_insert(p);
        }
    }
    first
}

/// `|{s != empty : C(s) <= m}|` for each `m` in `0..=max_len`.
pub fn cumulative_counts(census: &HashMap<String, String>, max_len: usize) -> Vec<u64> {
    let mut per_len = vec![0u64; max_len + 1];
    for (out, witness) in census {
        if !out.is_empty() {
            per_len[witness.len()] += 1;
        }
    }
    per_len
        .iter()
        .scan(0u64, |acc, c| {
            *acc += c;
            Some(*acc)
        })
        .collect()
}

/// Ordinal `n >= 1` as a string: binary of `n + 1` without its leading 1.
pub fn oracle_ordinal(n: u64) -> String {
    format!("{:b}", n + 1)[1..].to_string()
}

/// Replaces one transcript record with a different, well-formed record.
/// Returns the index changed.
pub fn mutate_record<R: Rng>(cert: &mut ProofCertificate, rng: &mut R) -> usize {
    let i = rng.gen_range(0..cert.transcript.len());
    let original = cert.transcript[i].clone();
    loop {
        let mut m = original.clone();
        match rng.gen_range(0..4) {
            0 => {
                m.status =
                    [Status::Halted, Status::OutOfFuel, Status::Crashed][rng.gen_range(0..3)];
                if m.status != Status::Halted {
                    m.output = BitString::new();
                }
            }
            1 => {
                let delta = rng.gen_range(1..5);
                m.steps_used = if rng.gen() || m.steps_used < delta {
                    m.steps_used + delta
                } else {
                    m.steps_used - delta
                };
            }
            _ => {
                m.status = Status::Halted;
                let mut bits = m.output.into_bits();
                match rng.gen_range(0..3) {
                    0 if !bits.is_empty() => {
                        let j = rng.gen_range(0..bits.len());
                        bits[j] = !bits[j];
                    }
                    1 if !bits.is_empty() => {
                        bits.pop();
                    }
                    _ => bits.push(rng.gen()),
                }
                m.output = BitString::from_bits(bits);
            }
        }
        if m != original {
            cert.transcript[i] = m;
            return i;
        }
    }
}

pub fn outcome(status: char, output: &str, steps: u64) -> RunOutcome {
    RunOutcome {
        status: Status::from_tag(status).unwrap(),
        output: output.parse().unwrap(),
        steps_used: steps,
    }
}
