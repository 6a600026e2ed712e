use std::fs;
use std::path::Path;

use kolmo_core::complexity::CensusTable;
use kolmo_core::construction::berry::{complexity_for_stop_ordinal, stop_ordinal_for};
use kolmo_core::construction::{
    british_museum, build_composite, decompose, first_unproduced_string, search_proof_stream,
    target_complexity_audit, MuseumMode, SearchOutcome, SearchTarget,
};
use kolmo_core::enumeration::{enumerate_strings, ordinal_to_string, OrdinalIndex};
use kolmo_core::formal::{
    check_certificate_with_jobs, generate_certificate, parse_certificate_bytes, render_certificate,
    system_size,
};
use kolmo_core::machine::{self, machine_digest};
use kolmo_core::{ComplexityClaim, Engine, Program, ProofCertificate, Verdict};
use num_bigint::BigUint;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use similar::TextDiff;

use crate::args::{Command, ModeArg};
use crate::config::{Baseline, ExperimentConfig};
use crate::{execute, exit, Done, Execution, Failure, Report, REPORT_VERSION};

pub struct Context<'a> {
    pub config: &'a ExperimentConfig,
    pub engine: &'a Engine,
    /// Skip file writes.
    pub sandboxed: bool,
}

type Outcome = Result<Done, Failure>;

pub fn run(command: &Command, ctx: &Context) -> Outcome {
    let fuel = ctx.config.default_fuel;
    match command {
        Command::Enum(a) => match (&a.max_len, &a.ordinal) {
            (Some(len), _) => enum_up_to(ctx, *len),
            (None, Some(n)) => enum_ordinal(n),
            (None, None) => unreachable!("clap requires one of the two"),
        },
        Command::Run { program } => {
            let p = Program::new(program.clone());
            let r = machine::run(&p, fuel);
            let text = format!(
                "status: {:?}\noutput: {}\nsteps_used: {}\n",
                r.status,
                r.output.to_dashed(),
                r.steps_used
            );
            Ok(Done::with_text(
                json!({
                    "program": p.code,
                    "fuel": fuel,
                    "status": r.status,
                    "output": r.output,
                    "steps_used": r.steps_used,
                }),
                text,
            ))
        }
        Command::Census { max_len, out } => {
            let table = ctx.engine.census(*max_len, fuel)?;
            census(ctx, &table, out.as_deref())
        }
        Command::K { string, max_len } => match ctx.engine.k_of(string, *max_len, fuel)? {
            Some(rec) => Ok(Done::new(json!({
                "subject": rec.subject,
                "max_len": max_len,
                "fuel": fuel,
                "k_value": rec.k_value,
                "witness": rec.witness.code,
            }))),
            None => Err(Failure::new(
                exit::NOT_FOUND,
                "not-found",
                format!(
                    "no program of at most {max_len} bits outputs {} within {fuel} steps",
                    string.to_dashed()
                ),
            )
            .with_detail(json!({ "subject": string, "max_len": max_len, "fuel": fuel }))),
        },
        Command::Prove {
            subject,
            bound,
            out,
        } => {
            let claim = ComplexityClaim {
                subject: subject.clone(),
                bound: *bound,
                fuel,
            };
            let cert = generate_certificate(ctx.engine, &claim)?;
            let text = render_certificate(&cert);
            write_out(ctx, out, &text)?;
            Ok(Done::new(json!({
                "claim": claim,
                "records": cert.transcript.len(),
                "certificate_sha256": sha256_hex(text.as_bytes()),
                "out": out.display().to_string(),
            })))
        }
        Command::Check { file } => check(ctx, file),
        Command::SystemSize => {
            let d = system_size();
            let parts = decompose();
            Ok(Done::new(json!({
                "machine_spec_hash": d.machine_spec_hash,
                "checker_version": d.checker_version,
                "serialized_size_k": d.serialized_size_k,
                "decomposition": {
                    "checker_part_size": parts.checker_part_size,
                    "searcher_part_size": parts.searcher_part_size,
                    "k": parts.k,
                    "slack": parts.slack,
                    "within_budget": parts.within_budget(),
                },
            })))
        }
        Command::Museum { bound, mode, out } => {
            let mode = match mode {
                ModeArg::Blind => MuseumMode::Blind,
                ModeArg::Direct => MuseumMode::Direct,
            };
            let r = british_museum(ctx.engine, *bound, fuel, mode)?;
            let text = render_certificate(&r.proof);
            if let Some(out) = out {
                write_out(ctx, out, &text)?;
            }
            Ok(Done::new(json!({
                "mode": mode,
                "theorem": r.theorem,
                "proof_records": r.proof.transcript.len(),
                "certificate_sha256": sha256_hex(text.as_bytes()),
                "stats": r.stats,
                "out": out.as_ref().map(|p| p.display().to_string()),
            })))
        }
        Command::Composite { bound } => {
            let c = build_composite(bound)?;
            let parts = decompose();
            Ok(Done::new(json!({
                "bound": bound.to_string(),
                "k": c.checker.serialized_size_k,
                "bound_bits": c.bound_encoding.len(),
                "bound_encoding": c.bound_encoding,
                "total_size": c.total_size,
                "shorter_than_bound": c.shorter_than_bound(),
                "decomposition": {
                    "k1": parts.checker_part_size,
                    "k2": parts.searcher_part_size,
                    "k": parts.k,
                    "slack": parts.slack,
                    "within_budget": parts.within_budget(),
                },
            })))
        }
        Command::Search(a) => {
            let target = match (&a.target.literal, &a.target.subprogram) {
                (Some(s), _) => SearchTarget::Literal(s.clone()),
                (None, Some(p)) => SearchTarget::Generated(Program::new(p.clone())),
                (None, None) => unreachable!("clap requires one of the two"),
            };
            search(ctx, &target, a.bound)
        }
        Command::Berry {
            complexity,
            stop_ordinal,
        } => {
            let c = berry_complexity(*complexity, *stop_ordinal)?;
            let r = first_unproduced_string(ctx.engine, c, fuel)?;
            Ok(Done::new(serde_json::to_value(&r).expect("serializable")))
        }
        Command::CacheGc { max_bytes } => {
            if ctx.sandboxed {
                return Err(Failure::usage("cache-gc runs are not replayable".into()));
            }
            let cache = ctx
                .engine
                .cache()
                .ok_or_else(|| Failure::usage("no cache directory is configured".into()))?;
            let summary = cache.gc(*max_bytes)?;
            let mut v = serde_json::to_value(&summary).expect("serializable");
            v["max_bytes"] = json!(max_bytes);
            v["cache_dir"] = json!(cache.dir().display().to_string());
            Ok(Done::new(v))
        }
        Command::Reproduce { file } => reproduce(file),
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_out(ctx: &Context, path: &Path, text: &str) -> Result<(), Failure> {
    if !ctx.sandboxed {
        fs::write(path, text).map_err(|e| {
            Failure::from(e).with_detail(json!({ "path": path.display().to_string() }))
        })?;
    }
    Ok(())
}

fn enum_up_to(ctx: &Context, max_len: u32) -> Outcome {
    ctx.engine
        .limits()
        .admit(max_len, ctx.config.default_fuel)?;
    let strings: Vec<String> = enumerate_strings(max_len as usize)
        .map(|s| s.to_string())
        .collect();
    let mut text = strings.join("\n");
    if !text.is_empty() {
        text.push('\n');
    }
    Ok(Done::with_text(
        json!({ "max_len": max_len, "count": strings.len(), "strings": strings }),
        text,
    ))
}

fn enum_ordinal(n: &BigUint) -> Outcome {
    let ordinal = OrdinalIndex::new(n.clone())
        .map_err(|e| Failure::new(exit::USAGE, "invalid-argument", e.to_string()))?;
    let s = ordinal_to_string(&ordinal);
    let text = format!("{s}\n");
    Ok(Done::with_text(
        json!({ "ordinal": n.to_string(), "string": s, "length": s.len() }),
        text,
    ))
}

fn census(ctx: &Context, table: &CensusTable, out: Option<&Path>) -> Outcome {
    let canonical = table.render_canonical();
    if let Some(out) = out {
        write_out(ctx, out, &canonical)?;
    }
    let rows: Vec<Value> = table
        .rows()
        .iter()
        .map(|r| {
            json!({
                "m": r.m,
                "count": r.count,
                "cumulative": r.cumulative_nonempty,
                "bound": r.bound.to_string(),
                "within_bound": r.within_bound(),
            })
        })
        .collect();
    Ok(Done::with_text(
        json!({
            "max_len": table.max_len,
            "fuel": table.fuel,
            "rows": rows,
            "distinct_outputs": table.entries.len(),
            "counting_bound_holds": table.counting_bound_holds(),
            "canonical_sha256": sha256_hex(canonical.as_bytes()),
            "out": out.map(|p| p.display().to_string()),
        }),
        table.render_rows(),
    ))
}

fn check(ctx: &Context, file: &Path) -> Outcome {
    let bytes = fs::read(file)?;
    let cert: ProofCertificate = parse_certificate_bytes(&bytes).map_err(|e| {
        Failure::new(exit::CLAIM_FALSE, "malformed-certificate", e.to_string()).with_detail(
            json!({ "verdict": "invalid", "position": e.position, "expected": e.expected }),
        )
    })?;
    match check_certificate_with_jobs(&cert, ctx.engine.jobs()) {
        Verdict::Valid => Ok(Done::with_text(
            json!({
                "verdict": "valid",
                "claim": cert.claim,
                "records": cert.transcript.len(),
            }),
            format!(
                "valid: C_T(s) > {} for s = {}, T = {}\n",
                cert.claim.bound,
                cert.claim.subject.to_dashed(),
                cert.claim.fuel
            ),
        )),
        Verdict::Invalid(reason) => Err(Failure::new(
            exit::CLAIM_FALSE,
            "invalid-certificate",
            format!("invalid certificate: {reason}"),
        )
        .with_detail(json!({
            "verdict": "invalid",
            "reason": reason,
            "claim": cert.claim,
        }))),
    }
}

fn search(ctx: &Context, target: &SearchTarget, bound: u32) -> Outcome {
    let fuel = ctx.config.default_fuel;
    let outcome = search_proof_stream(ctx.engine, target, bound, fuel)?;
    let audit = serde_json::to_value(target_complexity_audit(ctx.engine, target, fuel)?)
        .expect("serializable");
    match outcome {
        SearchOutcome::Found {
            theorem,
            proof,
            proofs_streamed,
        } => {
            let text = render_certificate(&proof);
            Ok(Done::new(json!({
                "found": true,
                "theorem": theorem,
                "proofs_streamed": proofs_streamed,
                "proof_records": proof.transcript.len(),
                "certificate_sha256": sha256_hex(text.as_bytes()),
                "audit": audit,
            })))
        }
        SearchOutcome::NotFound {
            proofs_streamed,
            reason,
        } => Err(
            Failure::new(exit::NOT_FOUND, "not-found", reason).with_detail(json!({
                "found": false,
                "proofs_streamed": proofs_streamed,
                "audit": audit,
            })),
        ),
    }
}

fn berry_complexity(complexity: Option<u32>, stop_ordinal: Option<u64>) -> Result<u32, Failure> {
    let from_ordinal = match stop_ordinal {
        Some(m) => Some(complexity_for_stop_ordinal(m).ok_or_else(|| {
            Failure::usage(format!("stop ordinal {m} is not of the form 2^(C+1) - 2"))
        })?),
        None => None,
    };
    match (complexity, from_ordinal) {
        (Some(c), Some(d)) if c != d => Err(Failure::usage(format!(
            "stop ordinal for complexity {c} is {}, not {}",
            stop_ordinal_for(c).map_or("out of range".into(), |m| m.to_string()),
            stop_ordinal.unwrap_or_default()
        ))),
        (Some(c), _) | (None, Some(c)) => Ok(c),
        (None, None) => Err(Failure::usage("give --complexity or --stop-ordinal".into())),
    }
}

fn reproduce(file: &Path) -> Outcome {
    let raw = fs::read_to_string(file)?;
    let value: Value = serde_json::from_str(&raw)
        .map_err(|e| Failure::usage(format!("{} is not a JSON report: {e}", file.display())))?;
    let version = value.get("report_version").and_then(Value::as_u64);
    match version {
        Some(v) if v <= REPORT_VERSION => {}
        Some(v) => {
            return Err(Failure::new(
                exit::VERSION_INCOMPATIBLE,
                "version-incompatible",
                format!("report version {v} is newer than this release ({REPORT_VERSION})"),
            ))
        }
        None => return Err(Failure::usage("report has no report_version".into())),
    }
    let recorded_machine = value
        .pointer("/config/machine_spec_version")
        .and_then(Value::as_str)
        .unwrap_or_default()
        .to_string();
    if recorded_machine != machine_digest() {
        return Err(Failure::new(
            exit::VERSION_INCOMPATIBLE,
            "version-incompatible",
            format!(
                "report was made for machine {recorded_machine:?}, this release runs {}",
                machine_digest()
            ),
        ));
    }
    let recorded: Report = serde_json::from_value(value)
        .map_err(|e| Failure::usage(format!("malformed report: {e}")))?;
    if recorded.command.first().map(String::as_str) == Some("reproduce") {
        return Err(Failure::usage(
            "a reproduce report cannot be replayed".into(),
        ));
    }
    let base = Baseline::from_snapshot(&recorded.config);
    let (status, fresh) = match execute(&recorded.command, &base, true) {
        Execution::Ran { report, .. } => (report.exit_status, report.results),
        other => {
            let status = other.exit_status();
            (status, json!({ "error": { "class": "usage" } }))
        }
    };
    let before = pretty(&recorded.results, recorded.exit_status);
    let after = pretty(&fresh, status);
    let matched = before == after;
    let diff = (!matched).then(|| {
        TextDiff::from_lines(&before, &after)
            .unified_diff()
            .header("recorded", "reproduced")
            .to_string()
    });
    let results = json!({
        "verdict": if matched { "match" } else { "mismatch" },
        "command": recorded.command,
        "recorded_exit_status": recorded.exit_status,
        "reproduced_exit_status": status,
        "diff": diff,
    });
    let text = match &diff {
        None => "Match\n".to_string(),
        Some(d) => format!("Mismatch\n{d}"),
    };
    Ok(Done {
        results,
        text,
        exit: if matched { exit::OK } else { exit::MISMATCH },
    })
}

fn pretty(results: &Value, status: u8) -> String {
    let mut s = format!("exit_status: {status}\n");
    s.push_str(&serde_json::to_string_pretty(results).expect("serializable"));
    s.push('\n');
    s
}
