//! Runs the built-in correctness checks on a fresh synthetic graph.

use mfgprep::checks::{run_validation, ValidateConfig};

pub fn run_example() -> mfgprep::Result<()> {
    let report = run_validation(&ValidateConfig {
        nodes: 1_500,
        hidden: 32,
        ..ValidateConfig::default()
    })?;
    for c in &report.checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    assert!(report.all_passed());
    Ok(())
}

#[allow(dead_code)]
fn main() -> mfgprep::Result<()> {
    run_example()
}
