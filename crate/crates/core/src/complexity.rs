//! Exhaustive fuel-bounded complexity.
//!
//! `C_T(s)` is the length of the shortest program that halts with output `s`
//! within `T` steps on the reference machine. It is computable because every
//! run is bounded, and it only ever over-estimates plain (unbounded)
//! complexity: a witness found here is a witness there, but `C_T(s) > n` says
//! nothing about programs that need more than `T` steps.
//!
//! Sweeps run every program of length `0..=L` in program-index order. Work is
//! split into fixed index blocks and merged by smallest index, so results do
//! not depend on the worker count.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::cache::SweepCache;
use crate::enumeration::{program_at, programs_up_to, write_program_at, LengthLex};
use crate::error::{Error, Result};
use crate::machine::{machine_digest, run_bits, Fuel, Program, RunOutcome, Status};
use crate::par;

/// `2^(m+1) - 2`: the number of nonempty bit strings of length at most `m`.
pub fn count_upper_bound(m: u32) -> BigUint {
    (BigUint::one() << (m + 1)) - 2u32
}

/// Desk-scale caps on sweep size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_len: u32,
    pub max_fuel: u64,
    /// Lifts `max_len`/`max_fuel` up to the hard technical ceiling.
    pub override_caps: bool,
}

impl Limits {
    pub const DEFAULT_MAX_LEN: u32 = 24;
    pub const DEFAULT_MAX_FUEL: u64 = 1_000_000;
    /// Program indices must fit in a u64 regardless of overrides.
    pub const HARD_MAX_LEN: u32 = 40;

    pub fn admit(&self, max_len: u32, fuel: Fuel) -> Result<()> {
        if max_len > Self::HARD_MAX_LEN {
            return Err(Error::Refused(format!(
                "program length {max_len} exceeds the hard ceiling {}",
                Self::HARD_MAX_LEN
            )));
        }
        if self.override_caps {
            return Ok(());
        }
        if max_len > self.max_len {
            return Err(Error::Refused(format!(
                "sweep over programs of length <= {max_len} exceeds the cap {} \
                 ({} programs)",
                self.max_len,
                count_upper_bound(max_len) + 1u32
            )));
        }
        if fuel.0 > self.max_fuel {
            return Err(Error::Refused(format!(
                "fuel {fuel} exceeds the cap {}",
                self.max_fuel
            )));
        }
        Ok(())
    }
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_len: Self::DEFAULT_MAX_LEN,
            max_fuel: Self::DEFAULT_MAX_FUEL,
            override_caps: false,
        }
    }
}

/// Every run outcome for programs of length `0..=max_len`, indexed by
/// program index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sweep {
    pub max_len: u32,
    pub fuel: Fuel,
    pub outcomes: Vec<RunOutcome>,
}

impl Sweep {
    /// Outcomes for programs of length at most `len`.
    pub fn prefix(&self, len: u32) -> &[RunOutcome] {
        assert!(len <= self.max_len);
        let n = programs_up_to(len).expect("checked by Limits") as usize;
        &self.outcomes[..n]
    }

    pub fn truncated(mut self, len: u32) -> Sweep {
        let n = self.prefix(len).len();
        self.outcomes.truncate(n);
        self.max_len = len;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityRecord {
    pub subject: BitString,
    pub k_value: u32,
    pub witness: Program,
    pub fuel: Fuel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusRow {
    pub m: u32,
    /// Distinct outputs with `C_T = m`, the empty output included.
    pub count: u64,
    /// Distinct nonempty outputs with `C_T <= m`.
    pub cumulative_nonempty: u64,
    pub bound: BigUint,
}

impl CensusRow {
    pub fn within_bound(&self) -> bool {
        BigUint::from(self.cumulative_nonempty) <= self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusTable {
    pub max_len: u32,
    pub fuel: Fuel,
    /// Keyed and iterated in length-lex order.
    pub entries: BTreeMap<BitString, ComplexityRecord>,
    /// `class_counts[m] = |{s : C_T(s) = m}|`.
    pub class_counts: Vec<u64>,
}

impl CensusTable {
    fn from_first_witnesses(max_len: u32, fuel: Fuel, firsts: HashMap<BitString, u64>) -> Self {
        let mut class_counts = vec![0u64; max_len as usize + 1];
        let entries: BTreeMap<_, _> = firsts
            .into_iter()
            .map(|(subject, index)| {
                let witness = Program::new(program_at(index));
                let k_value = witness.size() as u32;
                class_counts[k_value as usize] += 1;
                let rec = ComplexityRecord {
                    subject: subject.clone(),
                    k_value,
                    witness,
                    fuel,
                };
                (subject, rec)
            })
            .collect();
        Self {
            max_len,
            fuel,
            entries,
            class_counts,
        }
    }

    pub fn from_sweep(sweep: &Sweep) -> Self {
        let mut firsts = HashMap::new();
        for (i, o) in sweep.outcomes.iter().enumerate() {
            if o.status == Status::Halted {
                firsts.entry(o.output.clone()).or_insert(i as u64);
            }
        }
        Self::from_first_witnesses(sweep.max_len, sweep.fuel, firsts)
    }

    pub fn get(&self, s: &BitString) -> Option<&ComplexityRecord> {
        self.entries.get(s)
    }

    pub fn produces(&self, s: &BitString) -> bool {
        self.entries.contains_key(s)
    }

    pub fn rows(&self) -> Vec<CensusRow> {
        let empty_k = self.get(&BitString::new()).map(|r| r.k_value);
        let mut cumulative = 0u64;
        self.class_counts
            .iter()
            .enumerate()
            .map(|(m, &count)| {
                let m = m as u32;
                cumulative += count - u64::from(empty_k == Some(m));
                CensusRow {
                    m,
                    count,
                    cumulative_nonempty: cumulative,
                    bound: count_upper_bound(m),
                }
            })
            .collect()
    }

    pub fn counting_bound_holds(&self) -> bool {
        self.rows().iter().all(CensusRow::within_bound)
    }

    /// Per-class rows: `m \t c_m \t cumulative \t bound=<2^(m+1)-2>`.
    pub fn render_rows(&self) -> String {
        let mut out = String::new();
        for r in self.rows() {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\tbound={}",
                r.m, r.count, r.cumulative_nonempty, r.bound
            );
        }
        out
    }

    /// Full deterministic report: header, class rows, then one line per
    /// entry (`subject \t k \t witness`) in length-lex order of subject.
    pub fn render_canonical(&self) -> String {
        let mut out = format!(
            "#kolmo-census v1 machine={} fuel={} maxlen={}\n\
             # cumulative counts nonempty outputs only\n",
            machine_digest(),
            self.fuel,
            self.max_len
        );
        out.push_str(&self.render_rows());
        out.push_str("#entries\n");
        for rec in self.entries.values() {
            let _ = writeln!(
                out,
                "{}\t{}\t{}",
                rec.subject.to_dashed(),
                rec.k_value,
                rec.witness.code.to_dashed()
            );
        }
        out
    }
}

#[derive(Debug, Default)]
pub struct CacheStats {
    hits: AtomicU64,
    misses: AtomicU64,
}

impl CacheStats {
    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }
}

/// Runs sweeps and census queries under a worker budget, caps and an
/// optional on-disk cache.
#[derive(Debug)]
pub struct Engine {
    jobs: usize,
    limits: Limits,
    cache: Option<SweepCache>,
    stats: CacheStats,
}

impl Default for Engine {
    fn default() -> Self {
        Self::new()
    }
}

impl Engine {
    pub fn new() -> Self {
        Self {
            jobs: par::available_jobs(),
            limits: Limits::default(),
            cache: None,
            stats: CacheStats::default(),
        }
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn with_cache(mut self, cache: SweepCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn jobs(&self) -> usize {
        self.jobs
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn cache(&self) -> Option<&SweepCache> {
        self.cache.as_ref()
    }

    pub fn cache_stats(&self) -> &CacheStats {
        &self.stats
    }

    /// All outcomes for programs of length `0..=max_len`, read from the
    /// cache when a compatible file exists.
    pub fn sweep(&self, max_len: u32, fuel: Fuel) -> Result<Arc<Sweep>> {
        self.limits.admit(max_len, fuel)?;
        let cacheable = self
            .cache
            .as_ref()
            .filter(|_| max_len <= SweepCache::MAX_CACHED_LEN);
        if let Some(cache) = cacheable {
            if let Some(sweep) = cache.load(max_len, fuel) {
                self.stats.hits.fetch_add(1, Ordering::Relaxed);
                return Ok(Arc::new(sweep));
            }
            self.stats.misses.fetch_add(1, Ordering::Relaxed);
        }
        let sweep = compute_sweep(max_len, fuel, self.jobs);
        if let Some(cache) = cacheable {
            // A failed write only costs a recomputation later.
            let _ = cache.store(&sweep);
        }
        Ok(Arc::new(sweep))
    }

    pub fn census(&self, max_len: u32, fuel: Fuel) -> Result<CensusTable> {
        self.limits.admit(max_len, fuel)?;
        if self.cache.is_some() && max_len <= SweepCache::MAX_CACHED_LEN {
            let sweep = self.sweep(max_len, fuel)?;
            return Ok(CensusTable::from_sweep(&sweep));
        }
        Ok(compute_census(max_len, fuel, self.jobs))
    }

    /// The census record for `s`, or `None` when `C_T(s) > max_len`.
    pub fn k_of(
        &self,
        s: &BitString,
        max_len: u32,
        fuel: Fuel,
    ) -> Result<Option<ComplexityRecord>> {
        Ok(self.census(max_len, fuel)?.get(s).cloned())
    }

    /// Some string of length `len` that no program shorter than `len`
    /// produces. One always exists: there are `2^len` candidates but only
    /// `2^len - 1` shorter programs.
    pub fn incompressible_exists(&self, len: u32, fuel: Fuel) -> Result<BitString> {
        if len == 0 {
            return Err(Error::Domain("length must be at least 1".into()));
        }
        let table = self.census(len - 1, fuel)?;
        LengthLex::starting_at(BitString::zeros(len as usize), Some(len as usize))
            .find(|s| !table.produces(s))
            .ok_or_else(|| Error::NotFound("pigeonhole violated".into()))
    }
}

pub fn compute_sweep(max_len: u32, fuel: Fuel, jobs: usize) -> Sweep {
    let total = programs_up_to(max_len).expect("checked by Limits");
    let blocks = par::map_blocks(total, jobs, |range| {
        let mut code = Vec::new();
        range
            .map(|i| {
                write_program_at(i, &mut code);
                run_bits(&code, fuel)
            })
            .collect::<Vec<_>>()
    });
    Sweep {
        max_len,
        fuel,
        outcomes: blocks.into_iter().flatten().collect(),
    }
}

/// Census without materialising per-program outcomes.
pub fn compute_census(max_len: u32, fuel: Fuel, jobs: usize) -> CensusTable {
    let total = programs_up_to(max_len).expect("checked by Limits");
    let partials = par::map_blocks(total, jobs, |range| {
        let mut code = Vec::new();
        let mut firsts: HashMap<BitString, u64> = HashMap::new();
        for i in range {
            write_program_at(i, &mut code);
            let o = run_bits(&code, fuel);
            if o.status == Status::Halted {
                firsts.entry(o.output).or_insert(i);
            }
        }
        firsts
    });
    let mut merged: HashMap<BitString, u64> = HashMap::new();
    for part in partials {
        for (s, i) in part {
            merged
                .entry(s)
                .and_modify(|j| *j = (*j).min(i))
                .or_insert(i);
        }
    }
    CensusTable::from_first_witnesses(max_len, fuel, merged)
}
