//! Minimal-time search against a brute-force oracle that runs every program
//! up to `T_U(x)` bits with budget `T_U(x)`.

use uncomp_core::enumeration::{enumerate_domain, EnumerationConfig};
use uncomp_core::predictor::{builtin_suite, canonical_program, min_time, slowdown_report};
use uncomp_core::{encode_machine, parse_machine, universal_run, BitString, Program, RegisterMode};

const CAPPED: RegisterMode = RegisterMode::Capped(64);

fn oracle(x: &Program) -> (u64, Program) {
    let r = universal_run(x, 10_000, CAPPED).unwrap();
    let (target, t) = (r.output().unwrap().clone(), r.halted_steps().unwrap());
    let mut best: Option<(u64, Program)> = None;
    for z in BitString::all_up_to(t as usize) {
        let rz = universal_run(&z, t, CAPPED).unwrap();
        if rz.output() == Some(&target) {
            let s = rz.halted_steps().unwrap();
            // all_up_to is quasi-lexicographic, so the first minimum wins ties
            if best.as_ref().is_none_or(|(b, _)| s < *b) {
                best = Some((s, z));
            }
        }
    }
    best.unwrap()
}

#[test]
fn min_time_matches_brute_force_oracle() {
    let report = enumerate_domain(&EnumerationConfig::new(12, 100_000, CAPPED)).unwrap();
    let programs: Vec<Program> = report.halting().map(|h| h.program.clone()).collect();
    assert!(programs.len() >= 10);
    for x in &programs {
        let got = min_time(x, 10_000, CAPPED, 1).unwrap();
        let (t, canonical) = oracle(x);
        assert_eq!(got.t_of_x, t, "t({x})");
        assert_eq!(got.canonical, canonical, "{x}#");
        let rc = universal_run(&got.canonical, t, CAPPED).unwrap();
        assert_eq!(rc.halted_steps(), Some(t));
        assert_eq!(rc.output(), universal_run(x, 10_000, CAPPED).unwrap().output());
    }
}

#[test]
fn canonical_program_is_idempotent() {
    let x = encode_machine(&parse_machine("WRITE r0\nWRITE r0\nHALT\nHALT").unwrap());
    let sharp = canonical_program(&x, 10_000, CAPPED).unwrap();
    assert_eq!(canonical_program(&sharp, 10_000, CAPPED).unwrap(), sharp);
    assert!(sharp <= x);
}

#[test]
fn worker_count_does_not_change_the_answer() {
    let x: Program = "001111011010".parse().unwrap();
    assert_eq!(min_time(&x, 1000, CAPPED, 1).unwrap(), min_time(&x, 1000, CAPPED, 3).unwrap());
}

#[test]
fn universal_machine_is_never_faster_than_what_it_simulates() {
    let report = slowdown_report(&builtin_suite(), 100_000, CAPPED).unwrap();
    assert_eq!(report.rows.len(), 100);
    assert_eq!(report.summary.faster_rows, 0);
    assert!(report.rows.iter().all(|r| r.t_u > r.t_c));
    // doubler on 1^19 0: T_C = 251, T_U = 597
    assert_eq!(report.summary.min_ratio, 597.0 / 251.0);
}

#[test]
fn extra_instructions_never_bring_u_below_c() {
    let base = "READ r0\nWRITE r0\nHALT";
    let padded = "READ r0\nWRITE r0\nHALT\nINC r1\nINC r2\nDEC r3\nJMP l\nl: HALT";
    for src in [base, padded] {
        let d = parse_machine(src).unwrap();
        for x in ["0", "1"] {
            let x: Program = x.parse().unwrap();
            let tc = uncomp_core::run(&d, &x, 100, CAPPED).unwrap().halted_steps().unwrap();
            let tu = universal_run(&encode_machine(&d).concat(&x), 1000, CAPPED).unwrap().halted_steps().unwrap();
            assert!(tu > tc);
        }
    }
}
