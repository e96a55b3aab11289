use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::engine::AgentId;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Everyone may talk to everyone.
    AnyToAny,
    /// Cross-team traffic passes through one liaison per team.
    Gatewayed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Team {
    pub id: u32,
    pub members: Vec<AgentId>,
    pub liaison: Option<AgentId>,
    pub leader: Option<AgentId>,
}

/// Undirected communication graph over engineers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Topology {
    pub policy: Policy,
    n: usize,
    edges: BTreeSet<(AgentId, AgentId)>,
    adjacency: Vec<Vec<AgentId>>,
}

fn key(a: AgentId, b: AgentId) -> (AgentId, AgentId) {
    (a.min(b), a.max(b))
}

impl Topology {
    pub fn build(teams: &[Team], policy: Policy) -> Result<Self> {
        if teams.len() < 2 {
            return Err(Error::range("teams", teams.len(), ">= 2"));
        }
        let mut seen = BTreeSet::new();
        for t in teams {
            if t.members.is_empty() {
                return Err(Error::Config(format!("team {} has no members", t.id)));
            }
            for &m in &t.members {
                if !seen.insert(m) {
                    return Err(Error::Config(format!("engineer {m} is in two teams")));
                }
            }
        }
        let n = seen.last().map_or(0, |&m| m as usize + 1);
        let mut edges = BTreeSet::new();
        for t in teams {
            for (i, &a) in t.members.iter().enumerate() {
                for &b in &t.members[i + 1..] {
                    edges.insert(key(a, b));
                }
            }
        }
        for (i, ta) in teams.iter().enumerate() {
            for tb in &teams[i + 1..] {
                match policy {
                    Policy::AnyToAny => {
                        for &a in &ta.members {
                            for &b in &tb.members {
                                edges.insert(key(a, b));
                            }
                        }
                    }
                    Policy::Gatewayed => {
                        let la = gateway(ta)?;
                        let lb = gateway(tb)?;
                        edges.insert(key(la, lb));
                    }
                }
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        Ok(Self {
            policy,
            n,
            edges,
            adjacency,
        })
    }

    pub fn edges(&self) -> &BTreeSet<(AgentId, AgentId)> {
        &self.edges
    }

    pub fn has_edge(&self, a: AgentId, b: AgentId) -> bool {
        self.edges.contains(&key(a, b))
    }

    /// Shortest path from `src` to `dst`, both ends included. Breadth-first
    /// with neighbours in id order, so ties resolve to the lowest ids.
    pub fn route(&self, src: AgentId, dst: AgentId) -> Result<Vec<AgentId>> {
        let unreachable = Error::Unreachable { from: src, to: dst };
        if src as usize >= self.n || dst as usize >= self.n {
            return Err(unreachable);
        }
        let mut parent = vec![None; self.n];
        let mut queue = VecDeque::from([src]);
        parent[src as usize] = Some(src);
        while let Some(v) = queue.pop_front() {
            if v == dst {
                let mut path = vec![dst];
                let mut cur = dst;
                while cur != src {
                    cur = parent[cur as usize].expect("visited");
                    path.push(cur);
                }
                path.reverse();
                return Ok(path);
            }
            for &w in &self.adjacency[v as usize] {
                if parent[w as usize].is_none() {
                    parent[w as usize] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        Err(unreachable)
    }
}

/// The member that carries a team's cross-team traffic under the gated
/// policy: the liaison, or failing that the leader.
pub fn gateway(team: &Team) -> Result<AgentId> {
    team.liaison
        .or(team.leader)
        .ok_or_else(|| Error::Config(format!("team {} needs a liaison for the gatewayed policy", team.id)))
}
