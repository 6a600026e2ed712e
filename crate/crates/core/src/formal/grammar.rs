//! Certificate syntax: the line-oriented text format and the compact binary
//! proof encoding.
//!
//! Text format (UTF-8, one item per line):
//!
//! ```text
//! #kolmo-cert v1 machine=<64 hex> fuel=<T>
//! claim subject=<bits or -> bound=<n>
//! <H|F|C> <output bits or -> <steps>      one per program, empty program first
//! end count=<records>
//! ```
//!
//! `F` and `C` records always carry `-` as output. Numbers are decimal
//! without leading zeros. A final newline after `end` is optional.
//!
//! Binary encoding (a proof as a bit string; machine and fuel are fixed by
//! the formal system and not encoded):
//!
//! ```text
//! proof   = bound subject record{2^(n+1) - 1}
//! bound   = 1^n 0
//! subject = (1 b)* 0
//! record  = 0 output steps | 10 steps | 11 steps     H | F | C
//! output  = (1 b)* 0
//! steps   = gamma(steps + 1)                          Elias gamma
//! ```
//!
//! The binary code is length-lex monotone in the subject for a fixed bound,
//! which makes "first proof in size order" coincide with "first subject in
//! length-lex order" at the smallest admissible bound.

use std::fmt::Write as _;

use thiserror::Error;

use super::{ComplexityClaim, ProofCertificate};
use crate::bits::BitString;
use crate::machine::{machine_digest, Fuel, RunOutcome, Status};

pub const CERT_MAGIC: &str = "#kolmo-cert v1";

/// Position is a byte offset for text input and a bit offset for binary
/// input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {position}: expected {expected}")]
pub struct ParseError {
    pub position: usize,
    pub expected: &'static str,
}

fn fail<T>(position: usize, expected: &'static str) -> Result<T, ParseError> {
    Err(ParseError { position, expected })
}

pub fn render_certificate(cert: &ProofCertificate) -> String {
    let mut out = String::with_capacity(32 + cert.transcript.len() * 8);
    let _ = writeln!(
        out,
        "{CERT_MAGIC} machine={} fuel={}",
        cert.machine, cert.claim.fuel
    );
    let _ = writeln!(
        out,
        "claim subject={} bound={}",
        cert.claim.subject.to_dashed(),
        cert.claim.bound
    );
    for r in &cert.transcript {
        let _ = writeln!(
            out,
            "{} {} {}",
            r.status.tag(),
            r.output.to_dashed(),
            r.steps_used
        );
    }
    let _ = writeln!(out, "end count={}", cert.transcript.len());
    out
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn literal(&mut self, lit: &'static str) -> Result<(), ParseError> {
        for (i, b) in lit.bytes().enumerate() {
            if self.src.get(self.pos + i) != Some(&b) {
                return fail(self.pos + i, lit);
            }
        }
        self.pos += lit.len();
        Ok(())
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn decimal(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(d @ b'0'..=b'9') = self.peek() {
            if self.pos > start && value == 0 {
                return fail(self.pos, "no leading zeros");
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(d - b'0')))
                .ok_or(ParseError {
                    position: self.pos,
                    expected: "a number below 2^64",
                })?;
            self.pos += 1;
        }
        if self.pos == start {
            return fail(start, "decimal digit");
        }
        Ok(value)
    }

    /// `-` or a nonempty run of `0`/`1`.
    fn bits(&mut self) -> Result<BitString, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(BitString::new());
        }
        let start = self.pos;
        let mut bits = Vec::new();
        while let Some(b @ (b'0' | b'1')) = self.peek() {
            bits.push(b == b'1');
            self.pos += 1;
        }
        if self.pos == start {
            return fail(start, "bits or '-'");
        }
        Ok(BitString::from_bits(bits))
    }

    fn hex64(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        for i in 0..64 {
            match self.src.get(start + i) {
                Some(b'0'..=b'9' | b'a'..=b'f') => {}
                _ => return fail(start + i, "64 lowercase hex digits"),
            }
        }
        self.pos += 64;
        Ok(String::from_utf8_lossy(&self.src[start..start + 64]).into_owned())
    }
}

pub fn parse_certificate(text: &str) -> Result<ProofCertificate, ParseError> {
    parse_certificate_bytes(text.as_bytes())
}

pub fn parse_certificate_bytes(src: &[u8]) -> Result<ProofCertificate, ParseError> {
    let mut c = Cursor { src, pos: 0 };
    c.literal(CERT_MAGIC)?;
    c.literal(" machine=")?;
    let machine = c.hex64()?;
    c.literal(" fuel=")?;
    let fuel = Fuel(c.decimal()?);
    c.literal("\n")?;

    c.literal("claim subject=")?;
    let subject = c.bits()?;
    c.literal(" bound=")?;
    let bound_pos = c.pos;
    let bound = u32::try_from(c.decimal()?).or(fail(bound_pos, "a bound below 2^32"))?;
    c.literal("\n")?;

    let mut transcript = Vec::new();
    loop {
        let status = match c.peek() {
            Some(b'e') => break,
            Some(t @ (b'H' | b'F' | b'C')) => {
                Status::from_tag(t as char).unwrap_or(Status::Crashed)
            }
            _ => return fail(c.pos, "record status H, F or C, or 'end'"),
        };
        c.pos += 1;
        c.literal(" ")?;
        let out_pos = c.pos;
        let output = c.bits()?;
        if status != Status::Halted && !output.is_empty() {
            return fail(out_pos, "'-' as output of a non-halted record");
        }
        c.literal(" ")?;
        let steps_used = c.decimal()?;
        c.literal("\n")?;
        transcript.push(RunOutcome {
            status,
            output,
            steps_used,
        });
    }
    c.literal("end count=")?;
    let count_pos = c.pos;
    if c.decimal()? != transcript.len() as u64 {
        return fail(count_pos, "count equal to the number of records");
    }
    if c.peek() == Some(b'\n') {
        c.pos += 1;
    }
    if c.pos != src.len() {
        return fail(c.pos, "end of input");
    }
    Ok(ProofCertificate {
        machine,
        claim: ComplexityClaim {
            subject,
            bound,
            fuel,
        },
        transcript,
    })
}

/// Random-access bit input for the binary decoder.
pub trait BitSource {
    fn bit_len(&self) -> usize;
    fn bit(&self, i: usize) -> bool;
}

impl BitSource for BitString {
    fn bit_len(&self) -> usize {
        self.len()
    }

    fn bit(&self, i: usize) -> bool {
        self.as_slice()[i]
    }
}

/// Up to 64 bits packed in an integer, most significant bit first, so that
/// numeric order within one length is lexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PackedBits {
    pub value: u64,
    pub len: u32,
}

impl BitSource for PackedBits {
    fn bit_len(&self) -> usize {
        self.len as usize
    }

    fn bit(&self, i: usize) -> bool {
        (self.value >> (self.len as usize - 1 - i)) & 1 == 1
    }
}

struct BitReader<'a, S: BitSource> {
    src: &'a S,
    pos: usize,
}

impl<S: BitSource> BitReader<'_, S> {
    fn remaining(&self) -> usize {
        self.src.bit_len() - self.pos
    }

    fn next(&mut self, expected: &'static str) -> Result<bool, ParseError> {
        if self.pos >= self.src.bit_len() {
            return fail(self.pos, expected);
        }
        self.pos += 1;
        Ok(self.src.bit(self.pos - 1))
    }

    fn continuation_string(&mut self) -> Result<BitString, ParseError> {
        let mut out = Vec::new();
        while self.next("continuation flag")? {
            out.push(self.next("string bit")?);
        }
        Ok(BitString::from_bits(out))
    }

    fn gamma(&mut self) -> Result<u64, ParseError> {
        let mut zeros = 0u32;
        while !self.next("gamma code")? {
            zeros += 1;
            if zeros > 63 {
                return fail(self.pos, "gamma code below 2^64");
            }
        }
        let mut value = 1u64;
        for _ in 0..zeros {
            value = (value << 1) | self.next("gamma payload")? as u64;
        }
        Ok(value)
    }
}

/// Smallest possible encoded record.
const MIN_RECORD_BITS: usize = 3;

pub fn decode_proof<S: BitSource>(src: &S, fuel: Fuel) -> Result<ProofCertificate, ParseError> {
    let mut r = BitReader { src, pos: 0 };
    let mut bound = 0u32;
    while r.next("bound terminator")? {
        bound += 1;
    }
    let subject = r.continuation_string()?;
    let count = 1usize
        .checked_shl(bound + 1)
        .map(|c| c - 1)
        .filter(|&c| c.saturating_mul(MIN_RECORD_BITS) <= r.remaining());
    let Some(count) = count else {
        return fail(src.bit_len(), "enough bits for every record");
    };
    let mut transcript = Vec::with_capacity(count);
    for _ in 0..count {
        let (status, output) = if !r.next("record status")? {
            (Status::Halted, r.continuation_string()?)
        } else if !r.next("record status")? {
            (Status::OutOfFuel, BitString::new())
        } else {
            (Status::Crashed, BitString::new())
        };
        let steps_used = r.gamma()? - 1;
        transcript.push(RunOutcome {
            status,
            output,
            steps_used,
        });
    }
    if r.remaining() != 0 {
        return fail(r.pos, "end of proof");
    }
    Ok(ProofCertificate {
        machine: machine_digest().to_string(),
        claim: ComplexityClaim {
            subject,
            bound,
            fuel,
        },
        transcript,
    })
}

fn push_continuation(out: &mut BitString, s: &BitString) {
    for b in s.iter() {
        out.push(true);
        out.push(b);
    }
    out.push(false);
}

fn push_gamma(out: &mut BitString, value: u64) {
    debug_assert!(value >= 1);
    let width = 64 - value.leading_zeros();
    for _ in 1..width {
        out.push(false);
    }
    for i in (0..width).rev() {
        out.push((value >> i) & 1 == 1);
    }
}

/// Binary encoding of a certificate. Records with a non-empty output on a
/// non-halted status have no encoding and are written without the output.
pub fn encode_proof(cert: &ProofCertificate) -> BitString {
    let mut out = BitString::new();
    for _ in 0..cert.claim.bound {
        out.push(true);
    }
    out.push(false);
    push_continuation(&mut out, &cert.claim.subject);
    for r in &cert.transcript {
        match r.status {
            Status::Halted => {
                out.push(false);
                push_continuation(&mut out, &r.output);
            }
            Status::OutOfFuel => {
                out.push(true);
                out.push(false);
            }
            Status::Crashed => {
                out.push(true);
                out.push(true);
            }
        }
        push_gamma(&mut out, r.steps_used.saturating_add(1));
    }
    out
}
