use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kolmo_core::BitString;
use num_bigint::BigUint;

#[derive(Debug, Parser)]
#[command(
    name = "kolmo",
    version,
    about = "Fuel-bounded program-size complexity at desk scale"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub report: Option<ReportFormat>,

    /// Worker threads [env: KOLMO_JOBS].
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Step budget T [env: KOLMO_FUEL, default 512].
    #[arg(long, global = true)]
    pub fuel: Option<u64>,

    /// Sweep cache directory [env: KOLMO_CACHE_DIR, default ~/.cache/kolmo].
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,

    /// Neither read nor write the sweep cache.
    #[arg(long, global = true)]
    pub no_cache: bool,

    /// Largest program length a sweep may cover (at most 24 without
    /// --i-understand).
    #[arg(long, global = true)]
    pub census_cap: Option<u32>,

    /// Lift the desk-scale caps on program length and fuel.
    #[arg(long = "i-understand", global = true)]
    pub i_understand: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

impl ReportFormat {
    pub fn name(self) -> &'static str {
        match self {
            ReportFormat::Text => "text",
            ReportFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Blind,
    Direct,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List strings in length-lex order, or look one up by ordinal.
    Enum(EnumArgs),
    /// Run one program.
    Run {
        #[arg(long, value_parser = bits)]
        program: BitString,
    },
    /// Sweep all programs of at most L bits and tabulate C_T.
    Census {
        #[arg(long)]
        max_len: u32,
        /// Write the canonical census report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// C_T of one string, searching programs of at most L bits.
    K {
        #[arg(long, value_parser = bits)]
        string: BitString,
        #[arg(long)]
        max_len: u32,
    },
    /// Write a certificate for "C_T(subject) > bound".
    Prove {
        #[arg(long, value_parser = bits)]
        subject: BitString,
        #[arg(long)]
        bound: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a certificate file.
    Check { file: PathBuf },
    /// Size of the formal system's checker.
    SystemSize,
    /// First proof, in size order, of a bound >= N.
    Museum {
        #[arg(long)]
        bound: u32,
        #[arg(long, value_enum, default_value = "direct")]
        mode: ModeArg,
        /// Write the proof as a text certificate here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Size of the checker followed by N in binary.
    Composite {
        #[arg(long)]
        bound: BigUint,
    },
    /// Look for a proof about one target string in the proof stream.
    Search(SearchArgs),
    /// First string no program of at most C bits produces.
    Berry {
        #[arg(long, required_unless_present = "stop_ordinal")]
        complexity: Option<u32>,
        /// Last program ordinal to sweep; must be 2^(C+1) - 2.
        #[arg(long)]
        stop_ordinal: Option<u64>,
    },
    /// Evict least recently used cache files down to a byte budget.
    CacheGc {
        #[arg(long)]
        max_bytes: u64,
    },
    /// Re-run the command recorded in a JSON report and compare results.
    Reproduce { file: PathBuf },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct EnumArgs {
    #[arg(long)]
    pub max_len: Option<u32>,
    #[arg(long)]
    pub ordinal: Option<BigUint>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long)]
    pub bound: u32,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct TargetArgs {
    #[arg(long, value_parser = bits)]
    pub literal: Option<BitString>,
    #[arg(long, value_parser = bits)]
    pub subprogram: Option<BitString>,
}

fn bits(s: &str) -> Result<BitString, String> {
    BitString::parse_dashed(s).map_err(|e| e.to_string())
}
