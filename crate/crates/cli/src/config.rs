//! Experiment configuration: environment, then global flags on top.

use std::env;
use std::path::PathBuf;

use kolmo_core::cache::SweepCache;
use kolmo_core::machine::{machine_digest, DEFAULT_FUEL};
use kolmo_core::par::available_jobs;
use kolmo_core::{Engine, Fuel, Limits};
use serde::{Deserialize, Serialize};

use crate::args::{Cli, ReportFormat};
use crate::Failure;

/// Values the flags are layered on. Normally read from the environment;
/// `reproduce` takes them from a report's config snapshot instead.
#[derive(Debug, Clone, Default)]
pub struct Baseline {
    pub fuel: Option<u64>,
    pub jobs: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub no_cache: bool,
    pub census_cap: Option<u32>,
    pub override_caps: bool,
}

impl Baseline {
    pub fn from_env() -> Result<Self, Failure> {
        Ok(Self {
            fuel: env_number("KOLMO_FUEL")?,
            jobs: env_number("KOLMO_JOBS")?,
            cache_dir: env::var_os("KOLMO_CACHE_DIR")
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
                .or_else(|| env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache/kolmo"))),
            ..Self::default()
        })
    }

    pub fn from_snapshot(snapshot: &ConfigSnapshot) -> Self {
        Self {
            fuel: Some(snapshot.default_fuel),
            jobs: Some(snapshot.worker_count),
            no_cache: snapshot.cache_dir.is_none(),
            cache_dir: snapshot.cache_dir.as_ref().map(PathBuf::from),
            census_cap: Some(snapshot.census_cap_l),
            override_caps: snapshot.override_caps,
        }
    }
}

fn env_number<T: std::str::FromStr>(name: &str) -> Result<Option<T>, Failure> {
    match env::var(name) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::usage(format!("{name}={v:?} is not a valid number"))),
        _ => Ok(None),
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub default_fuel: Fuel,
    pub census_cap: u32,
    pub worker_count: usize,
    pub cache_dir: Option<PathBuf>,
    pub report_format: ReportFormat,
    pub override_caps: bool,
}

impl ExperimentConfig {
    pub fn resolve(cli: &Cli, base: &Baseline) -> Result<Self, Failure> {
        let worker_count = cli.jobs.or(base.jobs).unwrap_or_else(available_jobs);
        if worker_count == 0 {
            return Err(Failure::usage("worker count must be at least 1".into()));
        }
        let override_caps = cli.i_understand || base.override_caps;
        let census_cap = cli
            .census_cap
            .or(base.census_cap)
            .unwrap_or(Limits::DEFAULT_MAX_LEN);
        if census_cap > Limits::DEFAULT_MAX_LEN && !override_caps {
            return Err(Failure::refused(format!(
                "a census cap of {census_cap} exceeds {} and needs --i-understand",
                Limits::DEFAULT_MAX_LEN
            )));
        }
        let cache_dir = if cli.no_cache || base.no_cache && cli.cache_dir.is_none() {
            None
        } else {
            cli.cache_dir.clone().or_else(|| base.cache_dir.clone())
        };
        Ok(Self {
            default_fuel: Fuel(cli.fuel.or(base.fuel).unwrap_or(DEFAULT_FUEL.0)),
            census_cap,
            worker_count,
            cache_dir,
            report_format: cli.report.unwrap_or(ReportFormat::Text),
            override_caps,
        })
    }

    pub fn engine(&self) -> Engine {
        let limits = Limits {
            max_len: self.census_cap,
            override_caps: self.override_caps,
            ..Limits::default()
        };
        let engine = Engine::new()
            .with_jobs(self.worker_count)
            .with_limits(limits);
        match &self.cache_dir {
            Some(dir) => engine.with_cache(SweepCache::new(dir)),
            None => engine,
        }
    }

    pub fn snapshot(&self) -> ConfigSnapshot {
        ConfigSnapshot {
            machine_spec_version: machine_digest().to_string(),
            default_fuel: self.default_fuel.0,
            census_cap_l: self.census_cap,
            worker_count: self.worker_count,
            cache_dir: self.cache_dir.as_ref().map(|p| p.display().to_string()),
            report_format: self.report_format.name().to_string(),
            override_caps: self.override_caps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub machine_spec_version: String,
    pub default_fuel: u64,
    #[serde(rename = "census_cap_L")]
    pub census_cap_l: u32,
    pub worker_count: usize,
    pub cache_dir: Option<String>,
    pub report_format: String,
    #[serde(rename = "override")]
    pub override_caps: bool,
}
