//! Runs the quick validation suite (the same nine criteria the acceptance
//! test runs at full scale, on smaller grids) and prints one line per
//! criterion. Finishes in well under a minute on a laptop.

use willmore::validate::{self, Scale};

fn main() {
    eprintln!("running the quick validation suite ({} criteria)...", validate::CRITERIA);
    let summary = validate::run(Scale::Quick);
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
    println!();
    println!("all passed: {}", summary.all_passed);
    std::process::exit(if summary.all_passed { 0 } else { 1 });
}
