mod common;

use common::{all_strings, oracle_run, T};
use kolmo_core::machine::{run, Fuel, Program, Status};
use kolmo_core::BitString;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn library_run(code: &str, fuel: u64) -> (char, String, u64) {
    let p = Program::new(code.parse().unwrap());
    let r = run(&p, Fuel(fuel));
    (r.status.tag(), r.output.to_string(), r.steps_used)
}

fn random_code(rng: &mut ChaCha8Rng, max_len: usize) -> String {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| if rng.gen() { '1' } else { '0' })
        .collect()
}

#[test]
fn agrees_with_reference_on_every_short_program() {
    for code in all_strings(13) {
        assert_eq!(
            library_run(&code, T),
            oracle_run(&code, T),
            "program {code:?}"
        );
    }
}

#[test]
fn agrees_with_reference_on_random_programs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20_000 {
        let code = random_code(&mut rng, 90);
        let fuel = rng.gen_range(0..2000);
        assert_eq!(
            library_run(&code, fuel),
            oracle_run(&code, fuel),
            "{code} at {fuel}"
        );
    }
}

#[test]
fn output_cap_crashes() {
    // ONE, then DBL; BACK 1 loops forever doubling.
    let p = Program::assemble(&[2, 3, 4, 1]);
    let r = run(&p, Fuel(10_000));
    assert_eq!(r.status, Status::Crashed);
    assert!(r.output.is_empty());
    let code = p.code.to_string();
    assert_eq!(oracle_run(&code, 10_000).0, 'C');
    assert_eq!(r.steps_used, oracle_run(&code, 10_000).2);
}

#[test]
fn deterministic_over_repeated_runs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let programs: Vec<Program> = (0..100)
        .map(|_| Program::new(random_code(&mut rng, 40).parse().unwrap()))
        .collect();
    let first: Vec<_> = programs.iter().map(|p| run(p, Fuel(T))).collect();
    for round in 0..100 {
        for (p, expected) in programs.iter().zip(&first) {
            assert_eq!(&run(p, Fuel(T)), expected, "round {round}");
        }
    }
}

#[test]
fn fuel_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut halted = 0;
    for _ in 0..1000 {
        let p = Program::new(random_code(&mut rng, 30).parse().unwrap());
        let t = rng.gen_range(0..300);
        let more = t + rng.gen_range(0..300);
        let a = run(&p, Fuel(t));
        let b = run(&p, Fuel(more));
        assert!(a.steps_used <= t);
        if a.status == Status::Halted {
            halted += 1;
            assert_eq!(a, b, "{:?}", p.code);
        }
        if a.status == Status::Crashed {
            assert_eq!(a, b);
        }
        if b.status == Status::OutOfFuel {
            assert_eq!(a.status, Status::OutOfFuel);
        }
    }
    assert!(halted > 100);
}

#[test]
fn total_on_arbitrary_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..2000 {
        let bits: BitString = (0..rng.gen_range(0..400))
            .map(|_| rng.gen::<bool>())
            .collect();
        let r = run(&Program::new(bits), Fuel(rng.gen_range(0..5000)));
        if r.status != Status::Halted {
            assert!(r.output.is_empty());
        }
    }
}
