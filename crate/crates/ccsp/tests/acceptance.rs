//! Runs the full acceptance suite and prints one pass/fail line per
//! criterion. Every threshold is pinned in `ccsp::acceptance`.

#[test]
fn acceptance_criteria() {
    let results = ccsp::acceptance::run_all();
    let mut all_passed = true;
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("criterion {} ({}): {}: {}", r.id, r.name, status, r.detail);
        all_passed &= r.passed;
    }
    assert!(all_passed, "acceptance criteria failed; see the lines above");
}
