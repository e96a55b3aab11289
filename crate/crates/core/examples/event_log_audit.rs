//! Runs a small store with a full event log, prints the first events and
//! rebuilds the conversion count from the log alone.
//!
//! cargo run --example event_log_audit

use orgsim::engine::{LogMode, World};
use orgsim::retail::RetailConfig;

fn main() {
    let c = RetailConfig::default().with_uniform_staff(2, 0.6, 0.8);
    let mut w = World::new(c.build().unwrap(), 42, LogMode::Full);
    let run = w.run(500, 100);

    for r in w.log().records().iter().take(12) {
        let payload: Vec<String> = r.payload.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!("t={:<3} agent={:<4} {:<13} {}", r.tick, format!("{:?}", r.agent_id), r.kind, payload.join(" "));
    }
    println!("...");
    for (kind, n) in w.log().counts() {
        println!("{kind:<13} {n}");
    }

    let from_log: f64 = w
        .log()
        .records()
        .iter()
        .filter(|r| r.kind == "exit")
        .map(|r| r.value("purchased"))
        .sum();
    println!("conversions reported {}, rebuilt from log {from_log}", run.summary["conversions"]);
    assert_eq!(run.summary["conversions"], from_log);

    for line in w.log().to_csv().lines().take(6) {
        println!("{line}");
    }
}
