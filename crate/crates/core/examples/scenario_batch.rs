//! Loads a scenario file, runs its replications and writes the metrics CSV
//! to stdout. With a reference file, also checks the batch against it.
//!
//! cargo run --release --example scenario_batch -- scenarios/retail_6_staff.json \
//!     scenarios/reference/retail_6_staff.json

use std::fs;

use orgsim::harness::{export_csv, load_reference, load_scenario, run_batch, validate_baseline};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "scenarios/team_gatewayed.json".into());
    let scenario = load_scenario(&fs::read_to_string(&path)?)?;
    let batch = run_batch(&scenario)?;
    print!("{}", export_csv(&batch));
    if let Some(reference) = args.next() {
        let report = validate_baseline(&batch, &load_reference(&fs::read_to_string(reference)?)?)?;
        for m in &report.metrics {
            eprintln!(
                "{:<20} mean {:>10.4}  reference {:>10.4} +/- {:<8}  {}",
                m.metric,
                m.simulated_mean,
                m.reference,
                m.tolerance,
                if m.pass { "ok" } else { "FAIL" }
            );
        }
    }
    Ok(())
}
