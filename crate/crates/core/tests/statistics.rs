mod common;

use common::{random_case_a, random_case_b, random_general, rng};
use rand::Rng;
use rsp_core::{exact_analyze, monte_carlo, monte_carlo_with_workers, TargetSpec};

#[test]
fn sampling_agrees_with_exact_enumeration() {
    let mut r = rng(2024);
    let mut targets: Vec<TargetSpec> = Vec::new();
    for i in 0..30 {
        let m = r.random_range(2..=6);
        targets.push(match i % 3 {
            0 => random_general(&mut r, m),
            1 => random_case_a(&mut r, m),
            _ => random_case_b(&mut r, m),
        });
    }
    let trials = 20_000u64;
    // Both success (0/1) and bits ({0,1} or {1,2}) are two-point, equally
    // weighted, so σ ≤ 0.5/√n.
    let sigma = 0.5 / (trials as f64).sqrt();
    for (i, t) in targets.iter().enumerate() {
        let exact = exact_analyze(t).unwrap();
        for branch in &exact.per_branch {
            assert!((branch.probability - 0.5).abs() < 1e-12);
        }
        let stats = monte_carlo(t, trials, 1000 + i as u64).unwrap();
        assert!(
            (stats.success_rate - exact.p_success).abs() < 5.0 * sigma,
            "target {i}: {} vs {}",
            stats.success_rate,
            exact.p_success
        );
        assert!(
            (stats.mean_bits - exact.expected_bits).abs() < 5.0 * sigma,
            "target {i}: {} vs {}",
            stats.mean_bits,
            exact.expected_bits
        );
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let t = random_general(&mut rng(5), 4);
    let one = monte_carlo_with_workers(&t, 12_345, 99, 1).unwrap();
    for workers in [2, 3, 8] {
        assert_eq!(
            monte_carlo_with_workers(&t, 12_345, 99, workers).unwrap(),
            one
        );
    }
    assert_eq!(monte_carlo(&t, 12_345, 99).unwrap(), one);
    assert_ne!(monte_carlo(&t, 12_345, 100).unwrap(), one);
}

#[test]
fn stats_fields_are_consistent() {
    let t = random_general(&mut rng(8), 2);
    let s = monte_carlo(&t, 3_000, 4).unwrap();
    assert_eq!(s.trials, 3_000);
    assert_eq!(s.seed, 4);
    assert_eq!(s.success_rate, s.successes as f64 / 3_000.0);
    assert_eq!(s.mean_bits, s.total_bits as f64 / 3_000.0);
    // General case: every success sends exactly one bit, every failure none.
    assert_eq!(s.successes, s.total_bits);
}
