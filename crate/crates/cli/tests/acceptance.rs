//! One line per acceptance criterion. Run with `--nocapture` to see them.
//!
//! Criterion 7 asks for strict range inclusion between two frames of `C^d`,
//! which cannot happen: both analysis operators have rank `d`. Its check is
//! expected to fail, and this test asserts that it still does.

use framemult_cli::config::RunConfig;
use framemult_cli::suite::{self, Status};

const UNATTAINABLE: &[&str] = &["C7"];

fn criterion(id: &str) {
    let checks = suite::run_matching(id, &RunConfig::default());
    assert!(!checks.is_empty(), "no checks for {id}");
    let passed = checks.iter().all(|c| c.status == Status::Pass);
    let details: Vec<String> = checks.iter().map(|c| c.line()).collect();
    println!("{} criterion {id}", if passed { "PASS" } else { "FAIL" });
    for line in &details {
        println!("    {line}");
    }
    if UNATTAINABLE.contains(&id) {
        assert!(!passed, "{id} unexpectedly passed:\n{}", details.join("\n"));
    } else {
        assert!(passed, "{id} failed:\n{}", details.join("\n"));
    }
}

#[test]
fn criterion_01_doubled_basis() {
    criterion("C1");
}

#[test]
fn criterion_02_tripled_pair() {
    criterion("C2");
}

#[test]
fn criterion_03_split_weight_identity() {
    criterion("C3");
}

#[test]
fn criterion_04_riesz_inverse() {
    criterion("C4");
}

#[test]
fn criterion_05_dagger_representations() {
    criterion("C5");
}

#[test]
fn criterion_06_equivalent_frames() {
    criterion("C6");
}

#[test]
fn criterion_07_strict_inclusion() {
    criterion("C7");
}

#[test]
fn criterion_08_symbol_factorization() {
    criterion("C8");
}

#[test]
fn criterion_09_gabor_equivalences() {
    criterion("C9");
}

#[test]
fn criterion_10_gabor_other_window() {
    criterion("C10");
}

#[test]
fn criterion_11_property_sweeps() {
    criterion("C11");
}

#[test]
fn worked_examples() {
    let cfg = RunConfig::default();
    for id in suite::check_ids().into_iter().filter(|id| id.starts_with('E')) {
        let checks = suite::run_matching(id, &cfg);
        assert_eq!(checks.len(), 1);
        println!("{}", checks[0].line());
        assert_eq!(checks[0].status, Status::Pass, "{}", checks[0].line());
    }
}
