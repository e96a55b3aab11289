//! Fact latency and task completion for direct and liaison-gated
//! communication, over a range of liaison capacities.
//!
//! cargo run --release --example team_topologies

use orgsim::engine::LogMode;
use orgsim::harness::run_model;
use orgsim::harness::stats::mean;
use orgsim::team::{effectiveness, Policy, TeamConfig};

fn main() {
    println!("policy       liaison_cap  latency  tasks_done  trust");
    for policy in [Policy::AnyToAny, Policy::Gatewayed] {
        for cap in [1, 2, 4, 8] {
            let mut c = TeamConfig::default();
            c.params.policy = policy;
            c.params.liaison_capacity = Some(cap);
            let runs: Vec<_> = (0..30)
                .map(|seed| run_model(c.build(seed).unwrap(), seed, 300, 50, LogMode::CountsOnly).0)
                .collect();
            let lat = mean(&runs.iter().map(|r| effectiveness(r).mean_fact_latency).collect::<Vec<_>>());
            let done = mean(&runs.iter().map(|r| effectiveness(r).task_completion_rate).collect::<Vec<_>>());
            let trust = mean(&runs.iter().map(|r| r.summary["mean_trust"]).collect::<Vec<_>>());
            println!("{:<12} {cap:>11}  {lat:>7.2}  {done:>10.3}  {trust:.3}", format!("{policy:?}"));
        }
    }
}
