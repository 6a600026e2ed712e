//! The reference toy machine.
//!
//! Programs are raw bit strings read as 3-bit opcodes. Every bit string is a
//! program; execution is bounded by a step budget ("fuel") so that halting is
//! decidable for each individual run. The normative description lives in
//! `descriptors/machine.txt` and its SHA-256 digest keys caches and
//! certificates.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bits::BitString;

/// Normative text of the instruction set.
pub const MACHINE_SPEC: &str = include_str!("../descriptors/machine.txt");

/// Appends that would grow the output past this many bits crash the run.
pub const MAX_OUTPUT_BITS: usize = 1 << 16;

pub const DEFAULT_FUEL: Fuel = Fuel(512);

/// Hex SHA-256 of [`MACHINE_SPEC`].
pub fn machine_digest() -> &'static str {
    static DIGEST: OnceLock<String> = OnceLock::new();
    DIGEST.get_or_init(|| {
        Sha256::digest(MACHINE_SPEC.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Opcode {
    Halt,
    Zero,
    One,
    Dbl,
    Back,
    SkipEven,
    Flip,
    Nop,
}

impl Opcode {
    pub fn decode(value: u8) -> Self {
        match value & 0b111 {
            0 => Opcode::Halt,
            1 => Opcode::Zero,
            2 => Opcode::One,
            3 => Opcode::Dbl,
            4 => Opcode::Back,
            5 => Opcode::SkipEven,
            6 => Opcode::Flip,
            _ => Opcode::Nop,
        }
    }

    pub fn encode(self) -> u8 {
        match self {
            Opcode::Halt => 0,
            Opcode::Zero => 1,
            Opcode::One => 2,
            Opcode::Dbl => 3,
            Opcode::Back => 4,
            Opcode::SkipEven => 5,
            Opcode::Flip => 6,
            Opcode::Nop => 7,
        }
    }
}

/// Step budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fuel(pub u64);

impl fmt::Display for Fuel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Program {
    pub code: BitString,
}

impl Program {
    pub fn new(code: BitString) -> Self {
        Self { code }
    }

    /// Assembles opcodes (and raw operand slots) into a program.
    pub fn assemble(slots: &[u8]) -> Self {
        let code = slots
            .iter()
            .flat_map(|&s| (0..3).rev().map(move |i| (s >> i) & 1 == 1))
            .collect();
        Self { code }
    }

    pub fn size(&self) -> usize {
        self.code.len()
    }
}

impl From<BitString> for Program {
    fn from(code: BitString) -> Self {
        Self { code }
    }
}

pub fn program_size(p: &Program) -> usize {
    p.size()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Halted,
    OutOfFuel,
    Crashed,
}

impl Status {
    /// One-letter tag used in cache files and certificates.
    pub fn tag(self) -> char {
        match self {
            Status::Halted => 'H',
            Status::OutOfFuel => 'F',
            Status::Crashed => 'C',
        }
    }

    pub fn from_tag(tag: char) -> Option<Self> {
        match tag {
            'H' => Some(Status::Halted),
            'F' => Some(Status::OutOfFuel),
            'C' => Some(Status::Crashed),
            _ => None,
        }
    }
}

/// Result of one bounded execution. `output` is always empty unless the run
/// halted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RunOutcome {
    pub status: Status,
    pub output: BitString,
    pub steps_used: u64,
}

impl RunOutcome {
    pub fn halted_with(&self, s: &BitString) -> bool {
        self.status == Status::Halted && &self.output == s
    }
}

pub fn run(p: &Program, fuel: Fuel) -> RunOutcome {
    run_bits(p.code.as_slice(), fuel)
}

pub fn run_bits(code: &[bool], fuel: Fuel) -> RunOutcome {
    let slot = |i: usize| -> u8 {
        let b = &code[3 * i..3 * i + 3];
        (b[0] as u8) << 2 | (b[1] as u8) << 1 | b[2] as u8
    };
    let slots = code.len() / 3;
    let mut out: Vec<bool> = Vec::new();
    let mut ip = 0usize;
    let mut steps = 0u64;

    let finish = |status: Status, out: Vec<bool>, steps: u64| RunOutcome {
        output: if status == Status::Halted {
            BitString::from_bits(out)
        } else {
            BitString::new()
        },
        status,
        steps_used: steps,
    };

    loop {
        if ip >= slots {
            return finish(Status::Halted, out, steps);
        }
        if steps >= fuel.0 {
            return finish(Status::OutOfFuel, out, steps);
        }
        steps += 1;
        match Opcode::decode(slot(ip)) {
            Opcode::Halt => return finish(Status::Halted, out, steps),
            Opcode::Zero | Opcode::One if out.len() >= MAX_OUTPUT_BITS => {
                return finish(Status::Crashed, out, steps)
            }
            Opcode::Zero => {
                out.push(false);
                ip += 1;
            }
            Opcode::One => {
                out.push(true);
                ip += 1;
            }
            Opcode::Dbl | Opcode::Flip if 2 * out.len() > MAX_OUTPUT_BITS => {
                return finish(Status::Crashed, out, steps)
            }
            Opcode::Dbl => {
                out.extend_from_within(..);
                ip += 1;
            }
            Opcode::Flip => {
                let n = out.len();
                out.reserve(n);
                for i in 0..n {
                    let b = !out[i];
                    out.push(b);
                }
                ip += 1;
            }
            Opcode::Back => {
                if ip + 1 >= slots {
                    return finish(Status::Crashed, out, steps);
                }
                let distance = slot(ip + 1) as usize + 1;
                match ip.checked_sub(distance) {
                    Some(target) => ip = target,
                    None => return finish(Status::Crashed, out, steps),
                }
            }
            Opcode::SkipEven => ip += if out.len().is_multiple_of(2) { 2 } else { 1 },
            Opcode::Nop => ip += 1,
        }
    }
}
