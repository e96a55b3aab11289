//! Hand-built trace of a liaison draining its inbox: m messages at
//! capacity c leave over ceil(m/c) consecutive ticks.
//!
//! cargo run --example congestion_trace

use orgsim::engine::{LogMode, World};
use orgsim::team::{Policy, TaskSpec, TeamConfig, TeamSpec};

fn main() {
    let team = TeamSpec { size: 3, liaison: Some(0), leader: None };
    for (m, cap) in [(5, 1), (5, 2), (9, 3)] {
        let mut c = TeamConfig {
            teams: vec![team, team],
            tasks: TaskSpec { count: 0, ..TaskSpec::default() },
            ..TeamConfig::default()
        };
        c.facts.universe = m;
        c.facts.cross_team = 0;
        c.params.policy = Policy::Gatewayed;
        c.params.liaison_capacity = Some(cap);
        let mut w = World::new(c.build(0).unwrap(), 0, LogMode::Full);
        for fact in 0..m {
            w.model_mut().inject(fact, vec![0, 3, 4], 1, 0).unwrap();
        }
        println!("m = {m}, c = {cap}");
        while w.model().backlog() > 0 {
            w.tick();
            let hops: Vec<String> = w
                .log()
                .records()
                .iter()
                .filter(|r| r.tick == w.tick_count() && r.kind == "hop")
                .map(|r| format!("msg {}", r.value("msg")))
                .collect();
            println!("  tick {}: forwarded [{}], backlog {}", w.tick_count(), hops.join(", "), w.model().backlog());
        }
    }
}
