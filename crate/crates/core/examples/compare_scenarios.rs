//! Builds two variants of one scenario in code and compares a metric with
//! Welch's t.
//!
//! cargo run --release --example compare_scenarios

use orgsim::harness::{compare, run_batch, ModelConfig, Scenario};
use orgsim::team::{Policy, TeamConfig};

fn main() -> orgsim::Result<()> {
    let variant = |policy| {
        let mut c = TeamConfig::default();
        c.params.policy = policy;
        c.params.liaison_capacity = Some(2);
        let mut s = Scenario::new(&format!("{policy:?}"), ModelConfig::TeamComms(c));
        s.ticks = 300;
        s.replications = 30;
        s
    };
    let gated = run_batch(&variant(Policy::Gatewayed))?;
    let direct = run_batch(&variant(Policy::AnyToAny))?;
    for metric in ["mean_fact_latency", "task_completion_rate", "mean_trust", "messages_sent"] {
        println!("{}", compare(&gated, &direct, metric)?.summary_line());
    }
    Ok(())
}
