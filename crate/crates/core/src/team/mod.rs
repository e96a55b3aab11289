//! Engineers in separate teams sharing facts, either directly with anyone
//! in another team or only through one liaison per team.
//!
//! Every engineer works through at most `capacity` inbox messages a tick.
//! Forwarded messages land in the next engineer's inbox on the following
//! tick, so congestion at a liaison shows up as latency. Under the gated
//! policy the receiving liaison passes each new fact on to all of its
//! teammates, one message each.

mod org;
mod topology;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use org::{
    jaccard, update_trust, CommsParams, Engineer, FactId, Message, Org, Role, Share, Task,
};
pub use topology::{gateway, Policy, Team, Topology};

use crate::engine::{rng, AgentId, RngStream, RunResult};
use crate::error::{check_positive, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeamSpec {
    pub size: u32,
    /// Index within the team.
    #[serde(default)]
    pub liaison: Option<u32>,
    #[serde(default)]
    pub leader: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FactSpec {
    /// Facts in play; each starts with one engineer drawn at random.
    pub universe: u32,
    /// How many facts (the lowest ids) their owners announce to the other
    /// teams.
    pub cross_team: u32,
    /// Announcements happen at ticks drawn uniformly from 1..=share_window.
    pub share_window: u64,
}

impl Default for FactSpec {
    fn default() -> Self {
        Self {
            universe: 40,
            cross_team: 20,
            share_window: 10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TaskSpec {
    pub count: u32,
    /// Facts each task needs, drawn without replacement.
    pub k: u32,
    pub deadline: u64,
}

impl Default for TaskSpec {
    fn default() -> Self {
        Self {
            count: 10,
            k: 3,
            deadline: 100,
        }
    }
}

/// Model-specific part of a `team_comms` scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TeamConfig {
    pub teams: Vec<TeamSpec>,
    pub facts: FactSpec,
    pub tasks: TaskSpec,
    #[serde(flatten)]
    pub params: CommsParams,
}

impl Default for TeamConfig {
    fn default() -> Self {
        let team = TeamSpec {
            size: 6,
            liaison: Some(0),
            leader: Some(0),
        };
        Self {
            teams: vec![team, team],
            facts: FactSpec::default(),
            tasks: TaskSpec::default(),
            params: CommsParams::default(),
        }
    }
}

impl TeamConfig {
    pub const KEYS: &'static [&'static str] = &[
        "teams",
        "facts",
        "tasks",
        "policy",
        "capacity",
        "liaison_capacity",
        "trust_initial",
        "trust_up",
        "trust_down",
        "trust_drop",
    ];

    pub fn validate(&self) -> Result<()> {
        self.build(0).map(|_| ())
    }

    fn teams(&self) -> Result<Vec<Team>> {
        let mut next: AgentId = 0;
        let mut out = Vec::new();
        for (i, t) in self.teams.iter().enumerate() {
            check_positive("teams.size", t.size)?;
            for (field, idx) in [("teams.liaison", t.liaison), ("teams.leader", t.leader)] {
                if let Some(x) = idx {
                    if x >= t.size {
                        return Err(Error::range(field, x, &format!("< team size {}", t.size)));
                    }
                }
            }
            out.push(Team {
                id: i as u32,
                members: (next..next + t.size).collect(),
                liaison: t.liaison.map(|x| next + x),
                leader: t.leader.map(|x| next + x),
            });
            next += t.size;
        }
        Ok(out)
    }

    /// Initial organisation for a run seeded with `seed`. Fact owners,
    /// announcement ticks and tasks come from the setup stream.
    pub fn build(&self, seed: u64) -> Result<Org> {
        let teams = self.teams()?;
        let n: u32 = self.teams.iter().map(|t| t.size).sum();
        let f = self.facts;
        if f.cross_team > f.universe {
            return Err(Error::range("facts.cross_team", f.cross_team, &format!("<= universe ({})", f.universe)));
        }
        if f.cross_team > 0 {
            check_positive("facts.share_window", f.share_window)?;
        }
        let t = self.tasks;
        if t.count > 0 {
            check_positive("tasks.k", t.k)?;
            check_positive("tasks.deadline", t.deadline)?;
            if t.k > f.universe {
                return Err(Error::range("tasks.k", t.k, &format!("<= universe ({})", f.universe)));
            }
        }
        let mut setup = RngStream::new(seed, rng::SETUP_STREAM);
        let mut knowledge = vec![BTreeSet::new(); n as usize];
        let mut owner = Vec::with_capacity(f.universe as usize);
        for fact in 0..f.universe {
            let o = setup.below(n as u64) as AgentId;
            knowledge[o as usize].insert(fact);
            owner.push(o);
        }
        let shares = (0..f.cross_team)
            .map(|fact| Share {
                tick: setup.range_inclusive(1, f.share_window),
                fact,
                origin: owner[fact as usize],
            })
            .collect();
        let assignees: Vec<AgentId> = teams
            .iter()
            .map(|tm| tm.leader.unwrap_or(tm.members[0]))
            .collect();
        let tasks = (0..t.count)
            .map(|id| {
                let mut required: Vec<FactId> = setup
                    .sample_indices(f.universe as usize, t.k as usize)
                    .into_iter()
                    .map(|x| x as FactId)
                    .collect();
                required.sort_unstable();
                Task {
                    id,
                    required_facts: required,
                    deadline: t.deadline,
                    assigned_to: assignees[id as usize % assignees.len()],
                    completed_at: None,
                }
            })
            .collect();
        Org::new(teams, knowledge, shares, tasks, self.params.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Effectiveness {
    pub task_completion_rate: f64,
    /// 0 when no cross-team fact was delivered.
    pub mean_fact_latency: f64,
    pub cross_deliveries: u64,
}

/// Effectiveness of a finished run of an [`Org`].
pub fn effectiveness(run: &RunResult) -> Effectiveness {
    let get = |k: &str| run.summary.get(k).copied().unwrap_or(0.0);
    Effectiveness {
        task_completion_rate: get("task_completion_rate"),
        mean_fact_latency: get("mean_fact_latency"),
        cross_deliveries: get("cross_deliveries") as u64,
    }
}
