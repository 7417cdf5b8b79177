use uncomp_core::enumeration::{
    enumerate_domain, h_upper, omega_bounds, sigma_hat, sigma_table, Dyadic, EnumerationConfig, Retention,
};
use uncomp_core::{encode_machine, parse_machine, BitString, RegisterMode};

const CAPPED: RegisterMode = RegisterMode::Capped(64);
const GOLDEN_SIGMA: &str = include_str!("golden/sigma_capped64_len24.csv");

#[test]
fn capped_len_12_is_fully_resolved_with_pinned_omega() {
    let r = enumerate_domain(&EnumerationConfig::new(12, 100_000, CAPPED)).unwrap();
    assert!(r.unresolved.is_empty());
    let bounds = omega_bounds(&r);
    assert_eq!(bounds.lower, Dyadic { numerator: 641, log2_denominator: 11 });
    assert_eq!(bounds.upper, bounds.lower);
    assert!(bounds.valid_at_scale);
    assert_eq!(r.counts.halted, 35);
}

#[test]
fn shortest_description_of_empty_output_is_the_halt_machine() {
    let r = enumerate_domain(&EnumerationConfig::new(12, 100_000, CAPPED)).unwrap();
    let halt = encode_machine(&parse_machine("HALT").unwrap());
    assert_eq!(h_upper(&BitString::new(), &r), Some(halt.len()));
}

#[test]
fn exact_sigma_10() {
    let r = enumerate_domain(&EnumerationConfig::new(10, 100_000, CAPPED)).unwrap();
    let (value, exact) = sigma_hat(10, &r).unwrap();
    let (index, witness) = value.unwrap();
    assert!(exact);
    assert_eq!(index, 1u32.into());
    assert_eq!(witness.output.to_string(), "0");
    assert_eq!(witness.program.to_string(), "001001010");
}

#[test]
fn sigma_table_matches_golden_file_for_any_worker_count() {
    for jobs in [1, 3] {
        let config = EnumerationConfig::new(24, 100_000, CAPPED).jobs(jobs).retention(Retention::Summary);
        let table = sigma_table(&enumerate_domain(&config).unwrap());
        assert_eq!(table.to_csv(), GOLDEN_SIGMA, "jobs = {jobs}");
        assert_eq!(table.halting_time_constant, Some(15));
    }
}

#[test]
fn halting_time_bound_holds_on_the_exact_range() {
    let r = enumerate_domain(&EnumerationConfig::new(24, 100_000, CAPPED).retention(Retention::Summary)).unwrap();
    let table = sigma_table(&r);
    let c = table.halting_time_constant.unwrap();
    assert!(!table.checked_pairs(c).is_empty());
    for n in 0..=r.max_len - c {
        let bound = table.rows[n + c].sigma_hat.clone().unwrap_or_default();
        for h in r.halting().filter(|h| h.program.len() <= n) {
            assert!(bound >= h.steps.into(), "{} takes {} > sigma_hat({})", h.program, h.steps, n + c);
        }
    }
    // c is the least such constant
    assert!(!table.constant_holds(c - 1));
}

#[test]
fn reports_are_bit_identical_across_reruns_and_jobs() {
    let run = |jobs| {
        let r = enumerate_domain(&EnumerationConfig::new(14, 100_000, CAPPED).jobs(jobs)).unwrap();
        serde_json::to_string(&r).unwrap()
    };
    let a = run(1);
    assert_eq!(a, run(1));
    assert_eq!(a, run(4));
}

#[test]
fn unbounded_mode_leaves_loops_unresolved() {
    let r = enumerate_domain(&EnumerationConfig::new(18, 2_000, RegisterMode::Unbounded)).unwrap();
    assert!(!r.unresolved.is_empty());
    assert_eq!(r.unresolved_total as usize, r.unresolved.len());
    let bounds = omega_bounds(&r);
    assert!(!bounds.valid_at_scale);
    assert!(bounds.upper > bounds.lower);
    assert!(bounds.upper.to_f64() <= 1.0);
    let (_, exact) = sigma_hat(18, &r).unwrap();
    assert!(!exact);
}
