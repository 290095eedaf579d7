//! The acceptance gate: every validation criterion at full scale, printed
//! one pass/fail line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to watch the
//! lines appear; the test fails iff any criterion does.

use willmore::validate::{self, Scale};

#[test]
fn acceptance_criteria_at_full_scale() {
    let summary = validate::run(Scale::Full);
    for r in &summary.results {
        println!(
            "[{}] criterion {}: {} ({:.2}s) - {}",
            if r.passed { "pass" } else { "FAIL" },
            r.id,
            r.name,
            r.seconds,
            r.detail
        );
    }
    let failed: Vec<String> = summary
        .results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("{} ({}): {}", r.id, r.name, r.detail))
        .collect();
    assert!(
        summary.all_passed,
        "failed acceptance criteria:\n{}",
        failed.join("\n")
    );
    assert_eq!(summary.results.len(), validate::CRITERIA);
}
