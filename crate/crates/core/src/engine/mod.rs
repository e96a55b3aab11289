//! Discrete-time engine shared by every model.
//!
//! A [`World`] owns one model instance, its clock, its random streams and its
//! event log. Each call to [`World::tick`] advances the clock by one, lets the
//! model run its system phase, then updates every live agent exactly once in
//! an order freshly shuffled from the schedule stream. Models only mutate
//! their state through these callbacks and report each transition as an
//! event, so aggregate metrics can always be rebuilt from the log.

pub mod event;
pub mod rng;

use std::collections::BTreeMap;

use serde::Serialize;

pub use event::{AgentId, EventLog, EventRecord, LogMode, Payload};
pub use rng::{RngSet, RngStream};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SimClock(u64);

impl SimClock {
    pub fn tick(self) -> u64 {
        self.0
    }

    fn advance(&mut self) {
        self.0 += 1;
    }
}

/// Mutable view handed to model callbacks during one tick.
pub struct TickContext<'a> {
    tick: u64,
    log: &'a mut EventLog,
    rngs: &'a mut RngSet,
}

impl<'a> TickContext<'a> {
    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn emit(&mut self, agent: Option<AgentId>, kind: &'static str, payload: &[(&'static str, f64)]) {
        self.log.push(EventRecord {
            tick: self.tick,
            agent_id: agent,
            kind,
            payload: Payload::from_slice(payload),
        });
    }

    pub fn agent_rng(&mut self, agent: AgentId) -> &mut RngStream {
        self.rngs.agent(agent)
    }

    pub fn stream(&mut self, stream_id: u64) -> &mut RngStream {
        self.rngs.stream(stream_id)
    }

    pub fn retire_agent(&mut self, agent: AgentId) {
        self.rngs.retire_agent(agent);
    }
}

/// Per-model rules plugged into the engine.
pub trait Model: Clone + Send + Serialize {
    /// Agents to update this tick, in any order (the engine sorts and shuffles).
    fn live_agents(&self, out: &mut Vec<AgentId>);

    /// System phase run before agent updates.
    fn begin_tick(&mut self, _ctx: &mut TickContext<'_>) {}

    fn update_agent(&mut self, agent: AgentId, ctx: &mut TickContext<'_>);

    /// System phase run after agent updates.
    fn end_tick(&mut self, _ctx: &mut TickContext<'_>) {}

    /// Instantaneous metrics sampled into the series.
    fn metrics(&self) -> Vec<(&'static str, f64)>;

    /// End-of-run metrics. Defaults to the sampled metrics.
    fn summary(&self, _tick: u64) -> Vec<(&'static str, f64)> {
        self.metrics()
    }

    /// Lets a model end a run before the tick budget is spent.
    fn is_finished(&self, _tick: u64) -> bool {
        false
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricSample {
    pub tick: u64,
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunResult {
    pub start_tick: u64,
    pub end_tick: u64,
    pub series: Vec<MetricSample>,
    pub summary: BTreeMap<String, f64>,
    pub event_counts: BTreeMap<String, u64>,
}

impl RunResult {
    pub fn ticks_run(&self) -> u64 {
        self.end_tick - self.start_tick
    }

    /// Samples of one metric in tick order.
    pub fn metric_series<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a MetricSample> + 'a {
        self.series.iter().filter(move |s| s.name == name)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct World<M> {
    clock: SimClock,
    model: M,
    log: EventLog,
    rngs: RngSet,
    #[serde(skip)]
    schedule: Vec<AgentId>,
}

impl<M: Model> World<M> {
    pub fn new(model: M, seed: u64, mode: LogMode) -> Self {
        Self {
            clock: SimClock::default(),
            model,
            log: EventLog::new(mode),
            rngs: RngSet::new(seed),
            schedule: Vec::new(),
        }
    }

    pub fn clock(&self) -> SimClock {
        self.clock
    }

    pub fn tick_count(&self) -> u64 {
        self.clock.tick()
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    /// Direct model access, for building hand traces. Changes made here
    /// bypass the event log.
    pub fn model_mut(&mut self) -> &mut M {
        &mut self.model
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn seed(&self) -> u64 {
        self.rngs.seed()
    }

    /// Agent order used by the most recent tick.
    pub fn last_schedule(&self) -> &[AgentId] {
        &self.schedule
    }

    /// Advances one step.
    pub fn tick(&mut self) {
        self.clock.advance();
        let mut ctx = TickContext {
            tick: self.clock.tick(),
            log: &mut self.log,
            rngs: &mut self.rngs,
        };
        self.model.begin_tick(&mut ctx);

        self.schedule.clear();
        self.model.live_agents(&mut self.schedule);
        self.schedule.sort_unstable();
        ctx.stream(rng::SCHEDULE_STREAM).shuffle(&mut self.schedule);
        for &agent in &self.schedule {
            self.model.update_agent(agent, &mut ctx);
        }

        self.model.end_tick(&mut ctx);
    }

    fn sample(&self, out: &mut Vec<MetricSample>) {
        let tick = self.clock.tick();
        if out.last().is_some_and(|s| s.tick == tick) {
            return;
        }
        out.extend(self.model.metrics().into_iter().map(|(name, value)| MetricSample {
            tick,
            name: name.to_string(),
            value,
        }));
    }

    /// Runs up to `ticks` steps, sampling metrics at the starting tick, at
    /// every multiple of `metric_interval`, and at the final tick.
    pub fn run(&mut self, ticks: u64, metric_interval: u64) -> RunResult {
        let interval = metric_interval.max(1);
        let start_tick = self.clock.tick();
        let mut series = Vec::new();
        self.sample(&mut series);
        while self.clock.tick() - start_tick < ticks && !self.model.is_finished(self.clock.tick()) {
            self.tick();
            if self.clock.tick().is_multiple_of(interval) {
                self.sample(&mut series);
            }
        }
        self.sample(&mut series);
        let end_tick = self.clock.tick();
        RunResult {
            start_tick,
            end_tick,
            series,
            summary: self
                .model
                .summary(end_tick)
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            event_counts: self
                .log
                .counts()
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
        }
    }

    /// Serialized state, used to compare worlds for equality.
    pub fn snapshot(&self) -> String {
        serde_json::to_string(self).expect("world state serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Counters that bump on each update and emit one event per bump.
    #[derive(Clone, Debug, Serialize)]
    struct Counters {
        values: Vec<u64>,
        emit_every: u64,
    }

    impl Model for Counters {
        fn live_agents(&self, out: &mut Vec<AgentId>) {
            out.extend(0..self.values.len() as AgentId);
        }

        fn update_agent(&mut self, agent: AgentId, ctx: &mut TickContext<'_>) {
            let draw = ctx.agent_rng(agent).below(3);
            self.values[agent as usize] += draw;
            if ctx.tick().is_multiple_of(self.emit_every) {
                for _ in 0..draw {
                    ctx.emit(Some(agent), "bump", &[("by", 1.0)]);
                }
            }
        }

        fn metrics(&self) -> Vec<(&'static str, f64)> {
            vec![("total", self.values.iter().sum::<u64>() as f64)]
        }
    }

    fn world(n: usize, seed: u64) -> World<Counters> {
        World::new(
            Counters {
                values: vec![0; n],
                emit_every: 1,
            },
            seed,
            LogMode::Full,
        )
    }

    #[test]
    fn empty_world_only_advances_clock() {
        let mut w = world(0, 1);
        w.tick();
        assert_eq!(w.tick_count(), 1);
        assert!(w.log().is_empty());
    }

    #[test]
    fn same_seed_same_successor() {
        let mut a = world(6, 9);
        a.tick();
        let mut b = a.clone();
        a.tick();
        b.tick();
        assert_eq!(a.snapshot(), b.snapshot());
        assert_eq!(a.last_schedule(), b.last_schedule());
    }

    #[test]
    fn events_follow_schedule_order() {
        let mut w = world(8, 3);
        for _ in 0..20 {
            let before = w.log().records().len();
            w.tick();
            let tick = w.tick_count();
            let new = &w.log().records()[before..];
            assert!(new.iter().all(|e| e.tick == tick));
            // Each agent's events form one contiguous block, in schedule order.
            let mut order: Vec<AgentId> = new.iter().filter_map(|e| e.agent_id).collect();
            order.dedup();
            let positions: Vec<usize> = order
                .iter()
                .map(|a| w.last_schedule().iter().position(|s| s == a).unwrap())
                .collect();
            assert!(positions.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn zero_tick_run_samples_initial_state_only() {
        let mut w = world(3, 1);
        let r = w.run(0, 5);
        assert_eq!(r.ticks_run(), 0);
        assert_eq!(r.series.len(), 1);
        assert_eq!(r.series[0].tick, 0);
    }

    #[test]
    fn split_run_matches_single_run() {
        let mut a = world(5, 77);
        a.run(13, 4);
        a.run(29, 4);
        let mut b = world(5, 77);
        b.run(42, 4);
        assert_eq!(a.snapshot(), b.snapshot());
        assert_eq!(a.log().records(), b.log().records());
    }

    #[test]
    fn sampling_grid() {
        let mut w = world(2, 1);
        let r = w.run(10, 4);
        let ticks: Vec<u64> = r.metric_series("total").map(|s| s.tick).collect();
        assert_eq!(ticks, vec![0, 4, 8, 10]);
        assert!(r.ticks_run() <= 10);
    }

    #[test]
    fn schedule_positions_are_fair() {
        let n = 5;
        let mut w = world(n, 2024);
        let mut freq = vec![vec![0u32; n]; n];
        let ticks = 1_000;
        for _ in 0..ticks {
            w.tick();
            for (pos, &agent) in w.last_schedule().iter().enumerate() {
                freq[agent as usize][pos] += 1;
            }
        }
        for row in &freq {
            for &count in row {
                let f = count as f64 / ticks as f64;
                assert!((f - 1.0 / n as f64).abs() <= 0.05, "{freq:?}");
            }
        }
    }

    #[test]
    fn world_is_send() {
        fn assert_send<T: Send>() {}
        assert_send::<World<Counters>>();
    }
}
