//! Sweeps the number of clerks on a three-department floor and reports
//! conversions and waiting.
//!
//! cargo run --release --example retail_staffing

use orgsim::engine::LogMode;
use orgsim::harness::run_model;
use orgsim::harness::stats::mean;
use orgsim::retail::{retail_metrics, Manager, RetailConfig};

fn main() {
    println!("staff  managed  conversions  mean_wait  reneges  utilization");
    for staff in 0..=6 {
        for managed in [false, true] {
            let mut c = RetailConfig::default().with_uniform_staff(staff, 0.5, 0.5);
            if managed {
                c.manager = Some(Manager { review_period: 10, min_staff_floor: 0, department: 0 });
            }
            let runs: Vec<_> = (0..20)
                .map(|seed| retail_metrics(&run_model(c.build().unwrap(), seed, 1000, 100, LogMode::CountsOnly).0))
                .collect();
            let avg = |f: &dyn Fn(&orgsim::retail::RetailMetrics) -> f64| mean(&runs.iter().map(f).collect::<Vec<_>>());
            println!(
                "{staff:>5}  {managed:>7}  {:>11.1}  {:>9.3}  {:>7.1}  {:>11.3}",
                avg(&|m| m.conversions as f64),
                avg(&|m| m.mean_wait),
                avg(&|m| m.reneges as f64),
                avg(&|m| m.staff_utilization),
            );
        }
    }
}
