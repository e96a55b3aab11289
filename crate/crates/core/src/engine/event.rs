use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use smallvec::SmallVec;

pub type AgentId = u32;

/// Scalar payload of an event, kept inline for the common small case.
pub type Payload = SmallVec<[(&'static str, f64); 4]>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventRecord {
    pub tick: u64,
    /// `None` for system events.
    pub agent_id: Option<AgentId>,
    pub kind: &'static str,
    pub payload: Payload,
}

impl EventRecord {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.payload.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    /// Payload lookup for keys a model always writes.
    pub fn value(&self, key: &str) -> f64 {
        self.get(key)
            .unwrap_or_else(|| panic!("event `{}` has no `{key}`", self.kind))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum LogMode {
    /// Keep every record.
    #[default]
    Full,
    /// Keep per-kind counts only. Used for long batch runs where the
    /// record stream is not needed.
    CountsOnly,
}

/// Append-only event log.
#[derive(Clone, Debug, Default, Serialize)]
pub struct EventLog {
    mode: LogMode,
    records: Vec<EventRecord>,
    counts: BTreeMap<&'static str, u64>,
    total: u64,
}

impl EventLog {
    pub fn new(mode: LogMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    pub fn mode(&self) -> LogMode {
        self.mode
    }

    pub fn push(&mut self, record: EventRecord) {
        *self.counts.entry(record.kind).or_insert(0) += 1;
        self.total += 1;
        if self.mode == LogMode::Full {
            self.records.push(record);
        }
    }

    /// Retained records. Empty in `CountsOnly` mode.
    pub fn records(&self) -> &[EventRecord] {
        &self.records
    }

    pub fn counts(&self) -> &BTreeMap<&'static str, u64> {
        &self.counts
    }

    pub fn count(&self, kind: &str) -> u64 {
        self.counts.get(kind).copied().unwrap_or(0)
    }

    /// Number of events ever appended, whatever the mode.
    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Renders retained records as `tick,agent_id,kind,key,value`, one row
    /// per payload entry. Events without payload get a single row with
    /// empty key and value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tick,agent_id,kind,key,value\n");
        for r in &self.records {
            let agent = r.agent_id.map(|a| a.to_string()).unwrap_or_default();
            if r.payload.is_empty() {
                let _ = writeln!(out, "{},{},{},,", r.tick, agent, r.kind);
            }
            for (key, value) in &r.payload {
                let _ = writeln!(out, "{},{},{},{},{}", r.tick, agent, r.kind, key, value);
            }
        }
        out
    }
}
