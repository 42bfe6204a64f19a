//! The full acceptance run: criteria 1 to 11 at full counts in float mode,
//! criterion 12 by repeating them on a different worker count. Prints one
//! line per criterion with its pinned tolerance.

use std::io::Write;

use ksr_paving::suite::{run_suite, Status, SuiteConfig};

const SEED: u64 = 20240531;

#[test]
fn acceptance() {
    let report = run_suite(&SuiteConfig::new(SEED), 4, 1).expect("suite runs");
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    report.write_artifacts(&dir).expect("artifacts written");

    // Written past the test harness capture so the lines always show.
    let mut out = std::io::stdout().lock();
    for c in &report.criteria {
        writeln!(out, "{}", c.line()).unwrap();
    }
    drop(out);
    let ids: Vec<u8> = report.criteria.iter().map(|c| c.id).collect();
    assert_eq!(ids, (1..=12).collect::<Vec<_>>());
    let failed: Vec<String> = report
        .criteria
        .iter()
        .filter(|c| c.status != Status::Pass)
        .map(|c| format!("criterion {}: {:?} {:?}", c.id, c.status, c.notes))
        .collect();
    assert!(failed.is_empty(), "{failed:#?}");
    assert_eq!(report.exit_code(), 0);
}
