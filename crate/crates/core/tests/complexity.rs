mod common;

use common::{all_strings, cumulative_counts, oracle_census, oracle_run, T};
use kolmo_core::cache::{read_sweep, write_sweep, SweepCache};
use kolmo_core::complexity::{compute_census, compute_sweep};
use kolmo_core::{BitString, Engine, Error, Fuel, Limits};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn bs(s: &str) -> BitString {
    s.parse().unwrap()
}

#[test]
fn census_matches_reference() {
    for (max_len, fuel) in [(12usize, T), (12, 3), (9, 1), (13, 40)] {
        let reference = oracle_census(max_len, fuel);
        let table = compute_census(max_len as u32, Fuel(fuel), 2);
        assert_eq!(table.entries.len(), reference.len(), "L={max_len} T={fuel}");
        for (out, witness) in &reference {
            let rec = table.get(&bs(out)).expect("present");
            assert_eq!(&rec.witness.code.to_string(), witness);
            assert_eq!(rec.k_value as usize, witness.len());
        }
        let cumulative = cumulative_counts(&reference, max_len);
        for row in table.rows() {
            assert_eq!(row.cumulative_nonempty, cumulative[row.m as usize]);
            assert!(row.within_bound());
        }
    }
}

#[test]
fn sampled_entries_are_minimal() {
    let engine = Engine::new();
    let table = engine.census(16, Fuel(T)).unwrap();
    let mut recs: Vec<_> = table.entries.values().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    recs.shuffle(&mut rng);
    let shorter = oracle_census(15, T);
    for rec in recs.into_iter().take(100) {
        let code = rec.witness.code.to_string();
        let (status, out, _) = oracle_run(&code, T);
        assert_eq!(
            (status, out.as_str()),
            ('H', rec.subject.to_string().as_str())
        );
        // No program of fewer bits, and no earlier program of equal length.
        let s = rec.subject.to_string();
        for p in all_strings(rec.k_value as usize) {
            if p == code {
                break;
            }
            let (status, out, _) = oracle_run(&p, T);
            assert!(!(status == 'H' && out == s), "{p} also prints {s}");
        }
        if rec.k_value <= 15 {
            assert_eq!(shorter.get(&s), Some(&code));
        } else {
            assert!(!shorter.contains_key(&s));
        }
    }
}

#[test]
fn more_fuel_never_raises_complexity() {
    let fuels = [1u64, 2, 5, 20, 100, 512];
    let tables: Vec<_> = fuels
        .iter()
        .map(|&f| compute_census(12, Fuel(f), 1))
        .collect();
    for pair in tables.windows(2) {
        for (s, rec) in &pair[0].entries {
            let later = pair[1].get(s).expect("still produced with more fuel");
            assert!(later.k_value <= rec.k_value);
        }
        assert!(pair[1].entries.len() >= pair[0].entries.len());
    }
}

#[test]
fn k_of_examples() {
    let engine = Engine::new();
    let rec = engine.k_of(&bs("01"), 6, Fuel(T)).unwrap().unwrap();
    assert_eq!(rec.k_value, 6);
    assert_eq!(
        oracle_run(&rec.witness.code.to_string(), T),
        ('H', "01".into(), 2)
    );
    assert_eq!(engine.k_of(&bs("01"), 5, Fuel(T)).unwrap(), None);
    // The empty program prints the empty string.
    let empty = engine.k_of(&BitString::new(), 0, Fuel(T)).unwrap().unwrap();
    assert_eq!(empty.k_value, 0);
}

#[test]
fn caps_refuse_large_sweeps() {
    let engine = Engine::new();
    assert!(matches!(engine.census(25, Fuel(T)), Err(Error::Refused(_))));
    assert!(matches!(
        engine.census(4, Fuel(2_000_000)),
        Err(Error::Refused(_))
    ));
    let lifted = Engine::new().with_limits(Limits {
        override_caps: true,
        ..Limits::default()
    });
    assert!(lifted.census(4, Fuel(2_000_000)).is_ok());
    assert!(matches!(lifted.census(41, Fuel(T)), Err(Error::Refused(_))));
}

#[test]
fn incompressible_strings_escape_shorter_programs() {
    let engine = Engine::new();
    for len in 1..=12u32 {
        let s = engine.incompressible_exists(len, Fuel(T)).unwrap();
        assert_eq!(s.len(), len as usize);
        assert!(!oracle_census(len as usize - 1, T).contains_key(&s.to_string()));
    }
    assert!(matches!(
        engine.incompressible_exists(0, Fuel(T)),
        Err(Error::Domain(_))
    ));
}

#[test]
fn parallel_and_cached_census_match() {
    let serial = compute_census(15, Fuel(T), 1).render_canonical();
    for jobs in [2, 3, 8] {
        assert_eq!(compute_census(15, Fuel(T), jobs).render_canonical(), serial);
    }
    let dir = TempDir::new().unwrap();
    let cold = Engine::new()
        .with_jobs(4)
        .with_cache(SweepCache::new(dir.path()));
    assert_eq!(cold.census(15, Fuel(T)).unwrap().render_canonical(), serial);
    assert_eq!(cold.cache_stats().misses(), 1);
    let warm = Engine::new()
        .with_jobs(1)
        .with_cache(SweepCache::new(dir.path()));
    assert_eq!(warm.census(15, Fuel(T)).unwrap().render_canonical(), serial);
    // A smaller census is served from the larger file.
    let small = warm.census(11, Fuel(T)).unwrap().render_canonical();
    assert_eq!(small, compute_census(11, Fuel(T), 1).render_canonical());
    assert_eq!(warm.cache_stats().hits(), 2);
    assert_eq!(warm.cache_stats().misses(), 0);
}

#[test]
fn cache_file_format() {
    let sweep = compute_sweep(3, Fuel(T), 1);
    let mut buf = Vec::new();
    write_sweep(&mut buf, &sweep).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("#kolmo-cache v1 machine="));
    assert!(header.ends_with(" fuel=512 maxlen=3"));
    let records: Vec<&str> = lines.collect();
    assert_eq!(records.len(), 15);
    assert_eq!(records[0], "-\tH\t-\t0");
    for (line, p) in records.iter().zip(all_strings(3)) {
        let (status, out, steps) = oracle_run(&p, T);
        let p = if p.is_empty() { "-".to_string() } else { p };
        let out = if out.is_empty() { "-".to_string() } else { out };
        assert_eq!(*line, format!("{p}\t{status}\t{out}\t{steps}"));
    }
    let back = read_sweep(&buf[..], Some((3, Fuel(T))), None).unwrap();
    assert_eq!(back, sweep);
    // Wrong fuel, a reordered record or a stray output is rejected.
    assert!(read_sweep(&buf[..], Some((3, Fuel(7))), None).is_err());
    let mut lines: Vec<&str> = text.lines().collect();
    lines.swap(2, 3);
    let swapped = lines.join("\n");
    assert!(read_sweep(swapped.as_bytes(), None, None).is_err());
    // BACK with no operand slot crashes; a crash carries no output.
    let dirty = text.replacen("100\tC\t-\t", "100\tC\t1\t", 1);
    assert_ne!(dirty, text);
    assert!(read_sweep(dirty.as_bytes(), None, None).is_err());
}

#[test]
fn stale_machine_cache_is_ignored() {
    let dir = TempDir::new().unwrap();
    let cache = SweepCache::new(dir.path());
    let sweep = compute_sweep(6, Fuel(T), 1);
    let path = cache.store(&sweep).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let at = text.find("machine=").unwrap() + "machine=".len();
    let mut forged = text.clone();
    let c = if &text[at..at + 1] == "0" { "1" } else { "0" };
    forged.replace_range(at..at + 1, c);
    std::fs::write(&path, forged).unwrap();
    assert_eq!(cache.load(6, Fuel(T)), None);
}
