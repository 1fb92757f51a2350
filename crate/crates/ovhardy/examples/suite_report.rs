//! The full verification pipeline driven from code instead of the CLI:
//! configure a run, execute two suites, assemble the report, and write
//! `report.json` + `summary.csv`.
//!
//!     cargo run --example suite_report

use ovhardy::config::RunConfig;
use ovhardy::report::{assemble, failures, write_report};
use ovhardy::suites::{dyadic_suite, identity_suite};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Start from the defaults and shrink the run; unknown or inconsistent
    // settings are rejected by the same validation the CLI uses.
    let raw = RunConfig::from_json(
        r#"{
            "grid": 256,
            "scale-nodes": 12,
            "duality-fields": 3,
            "families": [{"kind": "band-limited", "kmax": 4, "count": 2}]
        }"#,
    )?;
    let cfg = raw.resolve()?;

    let mut rows = identity_suite(&cfg)?;
    rows.extend(dyadic_suite(&cfg)?);

    for r in &rows {
        println!(
            "[{}] {}/{} ({}): observed {:.3e} vs bound {:.3e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.suite,
            r.check,
            r.variant,
            r.observed,
            r.bound
        );
    }

    let report = assemble(&raw, rows);
    let dir = std::env::temp_dir().join("ovhardy-example-report");
    write_report(&dir, &report)?;
    println!(
        "\noverall: {} ({} rows, config {})",
        if report.pass { "PASS" } else { "FAIL" },
        report.rows.len(),
        report.config_hash
    );
    for f in failures(&report) {
        println!("failing: {}/{}", f.suite, f.check);
    }
    println!("written: {}", dir.display());
    Ok(())
}
