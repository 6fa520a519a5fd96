//! One line per acceptance criterion, then a single assertion over all of them.

use lopforge::acceptance::{run_all, AcceptanceConfig, CHECKS};

#[test]
fn acceptance_criteria() {
    let outcomes = run_all(&AcceptanceConfig::default());
    assert_eq!(outcomes.len(), CHECKS.len());
    for o in &outcomes {
        println!("{o}");
    }
    let failed: Vec<_> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    println!("{} / {} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn impossible_tolerance_reports_failures_by_name() {
    let cfg = AcceptanceConfig {
        tolerance_override: Some(1e-30),
        ..AcceptanceConfig::default()
    };
    // cheap checks only; the tolerance is applied to every one of them
    for id in [4, 5, 13] {
        let o = lopforge::acceptance::run_check(id, &cfg).unwrap();
        assert!(!o.passed, "{o}");
        assert!(!o.name.is_empty());
    }
}
