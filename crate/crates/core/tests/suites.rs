// SPDX-License-Identifier: Apache-2.0

use speedup_core::verify::{run_suite, Suite};

#[test]
fn every_suite_passes() {
    for suite in Suite::EACH {
        let start = std::time::Instant::now();
        let report = run_suite(suite, None);
        for c in report.checks.iter().filter(|c| !c.passed) {
            eprintln!("{suite}: {} failed: {}", c.name, c.detail);
        }
        eprintln!("{suite}: {} checks in {:.2?}", report.checks.len(), start.elapsed());
        assert!(report.passed, "{suite}");
    }
}
