//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any criterion outside the
//! documented known failures does not pass.

use tronquee::acceptance::{run_all, KNOWN_FAILURES};
use tronquee::config::RunConfig;

fn main() {
    let reports = run_all(&RunConfig::default());
    let mut unexpected = Vec::new();
    for r in &reports {
        println!("{}", r.line());
        if !r.passed && !KNOWN_FAILURES.contains(&r.id) {
            unexpected.push(r.id);
        }
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    println!("summary: {passed} of {} criteria pass; known failures {:?}", reports.len(), KNOWN_FAILURES);
    if reports.len() != 12 || !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
