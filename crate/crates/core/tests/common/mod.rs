//! Metric recomputation from event logs, shared by the integration tests
//! and the acceptance runner.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use orgsim::ant::{AntConfig, Colony};
use orgsim::engine::{EventRecord, LogMode, RunResult, World};
use orgsim::retail::{RetailConfig, Store};
use orgsim::team::{jaccard, update_trust, Org, TeamConfig};

pub type Values = BTreeMap<&'static str, f64>;

/// Replays `records` tick by tick, handing each sampled tick of `run` to
/// `at_tick` after all of that tick's events have been applied, and
/// reports every metric that differs from the recorded value.
fn check_series<S>(
    run: &RunResult,
    records: &[EventRecord],
    state: &mut S,
    mut apply: impl FnMut(&mut S, &EventRecord),
    mut begin_tick: impl FnMut(&mut S, u64),
    mut at_tick: impl FnMut(&S, u64) -> Values,
) -> Vec<String> {
    assert!(!records.is_empty() && !run.series.is_empty(), "nothing to audit");
    let mut wanted: BTreeMap<u64, Vec<(&str, f64)>> = BTreeMap::new();
    for s in &run.series {
        wanted.entry(s.tick).or_default().push((s.name.as_str(), s.value));
    }
    let mut out = Vec::new();
    let mut next = 0;
    for tick in run.start_tick..=run.end_tick {
        if tick > run.start_tick {
            begin_tick(state, tick);
        }
        while next < records.len() && records[next].tick == tick {
            apply(state, &records[next]);
            next += 1;
        }
        let Some(samples) = wanted.get(&tick) else { continue };
        let got = at_tick(state, tick);
        for &(name, value) in samples {
            match got.get(name) {
                Some(&v) if v == value || (v.is_nan() && value.is_nan()) => {}
                Some(&v) => out.push(format!("tick {tick}: {name} reported {value}, log gives {v}")),
                None => out.push(format!("tick {tick}: {name} not recomputed")),
            }
        }
    }
    if next != records.len() {
        out.push(format!("{} events after the final tick", records.len() - next));
    }
    out
}

fn check_summary(run: &RunResult, got: &Values) -> Vec<String> {
    let mut out = Vec::new();
    for (name, &value) in &run.summary {
        match got.get(name.as_str()) {
            Some(&v) if v == value => {}
            Some(&v) => out.push(format!("summary {name} reported {value}, log gives {v}")),
            None => out.push(format!("summary {name} not recomputed")),
        }
    }
    out
}

#[derive(Default)]
struct AntReplay {
    width: usize,
    pheromone: Vec<f64>,
    keep: f64,
    delivered: u64,
    steps: u64,
    harvested: u64,
    initial: u64,
    informed: BTreeSet<u32>,
    depleted_at: Option<u64>,
}

impl AntReplay {
    fn values(&self) -> Values {
        BTreeMap::from([
            ("units_delivered", self.delivered as f64),
            ("ant_steps", self.steps as f64),
            ("food_remaining", (self.initial - self.harvested) as f64),
            ("informed_ants", self.informed.len() as f64),
            ("pheromone_total", self.pheromone.iter().sum()),
        ])
    }
}

/// Runs a colony with a full log and checks every metric against the log.
pub fn audit_ants(config: &AntConfig, seed: u64, ticks: u64, interval: u64) -> Vec<String> {
    let colony: Colony = config.build(seed).expect("valid config");
    let grid = colony.grid();
    let mut replay = AntReplay {
        width: grid.width() as usize,
        pheromone: vec![0.0; (grid.width() * grid.height()) as usize],
        keep: 1.0 - colony.params().evaporation_rate,
        initial: grid.food_initial(),
        ..AntReplay::default()
    };
    let mut world = World::new(colony, seed, LogMode::Full);
    let run = world.run(ticks, interval);
    let mut out = check_series(
        &run,
        world.log().records(),
        &mut replay,
        |r, e| match e.kind {
            "move" => r.steps += 1,
            "deliver" => r.delivered += 1,
            "harvest" => {
                r.harvested += 1;
                if r.harvested == r.initial {
                    r.depleted_at = Some(e.tick);
                }
            }
            "deposit" => {
                let i = e.value("y") as usize * r.width + e.value("x") as usize;
                r.pheromone[i] += e.value("amount");
            }
            "learn" => {
                r.informed.insert(e.agent_id.expect("ant event"));
            }
            "forget" => {
                r.informed.remove(&e.agent_id.expect("ant event"));
            }
            _ => {}
        },
        |r, _| {
            for v in &mut r.pheromone {
                *v *= r.keep;
            }
        },
        |r, _| r.values(),
    );
    let mut summary = replay.values();
    let efficiency = if replay.steps == 0 { 0.0 } else { replay.delivered as f64 / replay.steps as f64 };
    summary.insert("efficiency", efficiency);
    summary.insert("depleted", replay.depleted_at.is_some() as u8 as f64);
    summary.insert("time_to_depletion", replay.depleted_at.unwrap_or(run.end_tick) as f64);
    out.extend(check_summary(&run, &summary));
    out
}

#[derive(Default)]
struct RetailReplay {
    staff: u64,
    entered: u64,
    exited: u64,
    conversions: u64,
    reneges: u64,
    served: u64,
    total_wait: u64,
    queued: i64,
    /// (start tick, duration) of every service begun.
    services: Vec<(u64, u64)>,
}

impl RetailReplay {
    fn values(&self, tick: u64) -> Values {
        let serving: u64 = self
            .services
            .iter()
            .map(|&(s, d)| d.min(tick + 1 - s))
            .sum();
        let capacity = self.staff * tick;
        BTreeMap::from([
            ("customers_entered", self.entered as f64),
            ("customers_exited", self.exited as f64),
            ("customers_inside", (self.entered - self.exited) as f64),
            ("conversions", self.conversions as f64),
            ("reneges", self.reneges as f64),
            ("served", self.served as f64),
            (
                "mean_wait",
                if self.served == 0 { 0.0 } else { self.total_wait as f64 / self.served as f64 },
            ),
            (
                "staff_utilization",
                if capacity == 0 { 0.0 } else { serving as f64 / capacity as f64 },
            ),
            ("queue_length", self.queued as f64),
        ])
    }
}

pub fn audit_retail(config: &RetailConfig, seed: u64, ticks: u64, interval: u64) -> Vec<String> {
    let store: Store = config.build().expect("valid config");
    let mut replay = RetailReplay {
        staff: store.staff().len() as u64,
        ..RetailReplay::default()
    };
    let mut world = World::new(store, seed, LogMode::Full);
    let run = world.run(ticks, interval);
    let mut out = check_series(
        &run,
        world.log().records(),
        &mut replay,
        |r, e| match e.kind {
            "arrive" => r.entered += 1,
            "exit" => {
                r.exited += 1;
                r.conversions += e.value("purchased") as u64;
            }
            "renege" => {
                r.reneges += 1;
                r.queued -= 1;
            }
            "join_queue" => r.queued += 1,
            "service_start" => {
                r.served += 1;
                r.queued -= 1;
                r.total_wait += e.value("wait") as u64;
                r.services.push((e.tick, e.value("duration") as u64));
            }
            _ => {}
        },
        |_, _| {},
        |r, tick| r.values(tick),
    );
    out.extend(check_summary(&run, &replay.values(run.end_tick)));
    out
}

struct TeamReplay {
    team_of: Vec<u32>,
    teams: u32,
    knowledge: Vec<BTreeSet<u32>>,
    trust: Vec<BTreeMap<u32, f64>>,
    trust_initial: f64,
    trust_up: f64,
    trust_down: f64,
    tasks: u64,
    hops: u64,
    drops: u64,
    sends: u64,
    delivers: u64,
    cross: u64,
    latency_sum: u64,
    completed: u64,
}

impl TeamReplay {
    fn values(&self) -> Values {
        let team_knowledge: Vec<BTreeSet<u32>> = (0..self.teams)
            .map(|t| {
                self.knowledge
                    .iter()
                    .zip(&self.team_of)
                    .filter(|(_, &tm)| tm == t)
                    .flat_map(|(k, _)| k.iter().copied())
                    .collect()
            })
            .collect();
        let mut sum = 0.0;
        let mut pairs = 0;
        for i in 0..team_knowledge.len() {
            for j in i + 1..team_knowledge.len() {
                sum += jaccard(&team_knowledge[i], &team_knowledge[j]);
                pairs += 1;
            }
        }
        let trust: Vec<f64> = self.trust.iter().flat_map(|m| m.values().copied()).collect();
        BTreeMap::from([
            ("messages_sent", self.hops as f64),
            ("messages_dropped", self.drops as f64),
            ("cross_deliveries", self.cross as f64),
            (
                "mean_fact_latency",
                if self.cross == 0 { 0.0 } else { self.latency_sum as f64 / self.cross as f64 },
            ),
            ("tasks_completed", self.completed as f64),
            (
                "task_completion_rate",
                if self.tasks == 0 { 0.0 } else { self.completed as f64 / self.tasks as f64 },
            ),
            ("shared_understanding", if pairs == 0 { 1.0 } else { sum / pairs as f64 }),
            (
                "mean_trust",
                if trust.is_empty() {
                    self.trust_initial
                } else {
                    trust.iter().sum::<f64>() / trust.len() as f64
                },
            ),
            ("backlog", (self.sends - self.drops - self.delivers) as f64),
        ])
    }
}

pub fn audit_team(config: &TeamConfig, seed: u64, ticks: u64, interval: u64) -> Vec<String> {
    let org: Org = config.build(seed).expect("valid config");
    let p = org.params().clone();
    let mut replay = TeamReplay {
        team_of: org.engineers().iter().map(|e| e.team).collect(),
        teams: config.teams.len() as u32,
        knowledge: org.engineers().iter().map(|e| e.knowledge.clone()).collect(),
        trust: vec![BTreeMap::new(); org.engineers().len()],
        trust_initial: p.trust_initial,
        trust_up: p.trust_up,
        trust_down: p.trust_down,
        tasks: org.tasks().len() as u64,
        hops: 0,
        drops: 0,
        sends: 0,
        delivers: 0,
        cross: 0,
        latency_sum: 0,
        completed: 0,
    };
    let mut world = World::new(org, seed, LogMode::Full);
    let run = world.run(ticks, interval);
    let mut out = check_series(
        &run,
        world.log().records(),
        &mut replay,
        |r, e| {
            let me = e.agent_id.map(|a| a as usize);
            match e.kind {
                "send" => r.sends += 1,
                "hop" => r.hops += 1,
                "drop" => r.drops += 1,
                "learn" => {
                    r.knowledge[me.expect("engineer event")].insert(e.value("fact") as u32);
                }
                "receive" => {
                    let from = e.value("from") as u32;
                    let t = r.trust[me.expect("engineer event")].entry(from).or_insert(r.trust_initial);
                    *t = update_trust(*t, e.value("novel") == 1.0, r.trust_up, r.trust_down);
                }
                "deliver" => {
                    r.delivers += 1;
                    if e.value("cross") == 1.0 {
                        r.cross += 1;
                        r.latency_sum += e.value("latency") as u64;
                    }
                }
                "task_complete" => r.completed += 1,
                _ => {}
            }
        },
        |_, _| {},
        |r, _| r.values(),
    );
    out.extend(check_summary(&run, &replay.values()));
    out
}
