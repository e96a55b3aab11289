use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::topology::{gateway, Policy, Team, Topology};
use crate::engine::{AgentId, Model, TickContext};
use crate::error::{check_non_negative, check_positive, check_unit, Error, Result};

pub type FactId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Role {
    Member,
    Liaison,
    Leader,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Message {
    pub id: u64,
    pub fact: FactId,
    pub origin: AgentId,
    pub created_tick: u64,
    /// Full route; `path[at]` currently holds the message.
    pub path: Vec<AgentId>,
    pub at: usize,
    /// Addressed to a whole team: the receiving liaison passes it on.
    pub team_share: bool,
}

impl Message {
    pub fn path_so_far(&self) -> &[AgentId] {
        &self.path[..=self.at]
    }

    fn at_end(&self) -> bool {
        self.at + 1 == self.path.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Engineer {
    pub id: AgentId,
    pub team: u32,
    pub role: Role,
    pub capacity: u32,
    pub inbox: VecDeque<Message>,
    pub knowledge: BTreeSet<FactId>,
    /// Peers met so far; missing peers sit at the initial trust.
    pub trust: BTreeMap<AgentId, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Task {
    pub id: u32,
    pub required_facts: Vec<FactId>,
    pub deadline: u64,
    pub assigned_to: AgentId,
    pub completed_at: Option<u64>,
}

/// A fact its owner announces to the other teams at `tick`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Share {
    pub tick: u64,
    pub fact: FactId,
    pub origin: AgentId,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CommsParams {
    pub policy: Policy,
    /// Messages each engineer handles per tick.
    pub capacity: u32,
    /// Overrides `capacity` for liaisons.
    pub liaison_capacity: Option<u32>,
    pub trust_initial: f64,
    pub trust_up: f64,
    pub trust_down: f64,
    /// Drop a message at a hop with probability `1 - trust`.
    pub trust_drop: bool,
}

impl Default for CommsParams {
    fn default() -> Self {
        Self {
            policy: Policy::AnyToAny,
            capacity: 2,
            liaison_capacity: None,
            trust_initial: 0.5,
            trust_up: 0.05,
            trust_down: 0.02,
            trust_drop: false,
        }
    }
}

impl CommsParams {
    pub fn validate(&self) -> Result<()> {
        check_positive("capacity", self.capacity)?;
        if let Some(c) = self.liaison_capacity {
            check_positive("liaison_capacity", c)?;
        }
        check_unit("trust_initial", self.trust_initial)?;
        check_non_negative("trust_up", self.trust_up)?;
        check_non_negative("trust_down", self.trust_down)?;
        Ok(())
    }
}

/// Trust after one received message, clamped to [0, 1].
pub fn update_trust(trust: f64, novel: bool, up: f64, down: f64) -> f64 {
    let t = if novel { trust + up } else { trust - down };
    t.clamp(0.0, 1.0)
}

/// Jaccard overlap of two knowledge sets; 1 when both are empty.
pub fn jaccard(a: &BTreeSet<FactId>, b: &BTreeSet<FactId>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Engineers in several teams passing facts over a topology.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Org {
    teams: Vec<Team>,
    topology: Topology,
    engineers: Vec<Engineer>,
    params: CommsParams,
    shares: Vec<Share>,
    next_share: usize,
    tasks: Vec<Task>,
    next_message: u64,
    #[serde(skip)]
    in_flight: Vec<(AgentId, Message)>,
    hops: u64,
    drops: u64,
    cross_deliveries: u64,
    latency_sum: u64,
}

impl Org {
    /// `knowledge[i]` is engineer `i`'s initial knowledge. Engineers are
    /// numbered team by team in `teams` order.
    pub fn new(
        teams: Vec<Team>,
        knowledge: Vec<BTreeSet<FactId>>,
        mut shares: Vec<Share>,
        tasks: Vec<Task>,
        params: CommsParams,
    ) -> Result<Self> {
        params.validate()?;
        let topology = Topology::build(&teams, params.policy)?;
        let n: usize = teams.iter().map(|t| t.members.len()).sum();
        if knowledge.len() != n {
            return Err(Error::Config(format!(
                "{} knowledge sets for {n} engineers",
                knowledge.len()
            )));
        }
        let mut engineers: Vec<Engineer> = Vec::with_capacity(n);
        for (i, t) in teams.iter().enumerate() {
            if t.id as usize != i {
                return Err(Error::Config(format!("team {i} has id {}", t.id)));
            }
            for &m in &t.members {
                if m as usize != engineers.len() {
                    return Err(Error::Config("engineers must be numbered team by team".into()));
                }
                let role = if Some(m) == t.liaison {
                    Role::Liaison
                } else if Some(m) == t.leader {
                    Role::Leader
                } else {
                    Role::Member
                };
                let gated = params.policy == Policy::Gatewayed && gateway(t).ok() == Some(m);
                let capacity = match (role == Role::Liaison || gated, params.liaison_capacity) {
                    (true, Some(c)) => c,
                    _ => params.capacity,
                };
                engineers.push(Engineer {
                    id: m,
                    team: t.id,
                    role,
                    capacity,
                    inbox: VecDeque::new(),
                    knowledge: knowledge[m as usize].clone(),
                    trust: BTreeMap::new(),
                });
            }
        }
        for s in &shares {
            if s.origin as usize >= n {
                return Err(Error::Config(format!("share from unknown engineer {}", s.origin)));
            }
            check_positive("share tick", s.tick)?;
        }
        for t in &tasks {
            if t.required_facts.is_empty() {
                return Err(Error::Config(format!("task {} requires no facts", t.id)));
            }
            check_positive("task deadline", t.deadline)?;
        }
        shares.sort_by_key(|s| (s.tick, s.fact, s.origin));
        Ok(Self {
            teams,
            topology,
            engineers,
            params,
            shares,
            next_share: 0,
            tasks,
            next_message: 0,
            in_flight: Vec::new(),
            hops: 0,
            drops: 0,
            cross_deliveries: 0,
            latency_sum: 0,
        })
    }

    pub fn teams(&self) -> &[Team] {
        &self.teams
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn engineers(&self) -> &[Engineer] {
        &self.engineers
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn params(&self) -> &CommsParams {
        &self.params
    }

    pub fn trust(&self, of: AgentId, peer: AgentId) -> f64 {
        self.engineers[of as usize]
            .trust
            .get(&peer)
            .copied()
            .unwrap_or(self.params.trust_initial)
    }

    fn team_of(&self, e: AgentId) -> u32 {
        self.engineers[e as usize].team
    }

    /// Union of a team's knowledge.
    pub fn team_knowledge(&self, team: u32) -> BTreeSet<FactId> {
        self.engineers
            .iter()
            .filter(|e| e.team == team)
            .flat_map(|e| e.knowledge.iter().copied())
            .collect()
    }

    /// Mean Jaccard overlap of team knowledge over all pairs of teams.
    pub fn shared_understanding(&self) -> f64 {
        let ks: Vec<_> = self.teams.iter().map(|t| self.team_knowledge(t.id)).collect();
        let mut sum = 0.0;
        let mut pairs = 0;
        for i in 0..ks.len() {
            for j in i + 1..ks.len() {
                sum += jaccard(&ks[i], &ks[j]);
                pairs += 1;
            }
        }
        if pairs == 0 {
            1.0
        } else {
            sum / pairs as f64
        }
    }

    pub fn mean_fact_latency(&self) -> f64 {
        if self.cross_deliveries == 0 {
            0.0
        } else {
            self.latency_sum as f64 / self.cross_deliveries as f64
        }
    }

    pub fn cross_deliveries(&self) -> u64 {
        self.cross_deliveries
    }

    pub fn tasks_completed(&self) -> u64 {
        self.tasks.iter().filter(|t| t.completed_at.is_some()).count() as u64
    }

    /// 0 when there are no tasks.
    pub fn task_completion_rate(&self) -> f64 {
        if self.tasks.is_empty() {
            0.0
        } else {
            self.tasks_completed() as f64 / self.tasks.len() as f64
        }
    }

    /// Mean over every trust value recorded so far; the initial trust when
    /// nobody has met yet.
    pub fn mean_trust(&self) -> f64 {
        let values: Vec<f64> = self
            .engineers
            .iter()
            .flat_map(|e| e.trust.values().copied())
            .collect();
        if values.is_empty() {
            self.params.trust_initial
        } else {
            values.iter().sum::<f64>() / values.len() as f64
        }
    }

    pub fn backlog(&self) -> usize {
        self.engineers.iter().map(|e| e.inbox.len()).sum::<usize>() + self.in_flight.len()
    }

    /// Puts a message straight into the inbox of `path[at]`, as if it had
    /// arrived there. For hand-built traces.
    pub fn inject(&mut self, fact: FactId, path: Vec<AgentId>, at: usize, created_tick: u64) -> Result<u64> {
        if path.is_empty() || at >= path.len() {
            return Err(Error::Config("message position outside its path".into()));
        }
        for w in path.windows(2) {
            if !self.topology.has_edge(w[0], w[1]) {
                return Err(Error::Unreachable { from: w[0], to: w[1] });
            }
        }
        let id = self.next_message;
        self.next_message += 1;
        let holder = path[at];
        self.engineers[holder as usize].inbox.push_back(Message {
            id,
            fact,
            origin: path[0],
            created_tick,
            path,
            at,
            team_share: false,
        });
        Ok(id)
    }

    /// Broken invariants in the current state, if any.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for e in &self.engineers {
            for (&p, &t) in &e.trust {
                if !(0.0..=1.0).contains(&t) {
                    out.push(format!("trust {} -> {p} = {t}", e.id));
                }
            }
            for m in &e.inbox {
                if m.path[m.at] != e.id {
                    out.push(format!("message {} queued at the wrong engineer", m.id));
                }
                if m.path.windows(2).any(|w| !self.topology.has_edge(w[0], w[1])) {
                    out.push(format!("message {} has an illegal path", m.id));
                }
            }
        }
        out
    }

    fn send(
        &mut self,
        fact: FactId,
        path: Vec<AgentId>,
        origin: AgentId,
        created_tick: u64,
        team_share: bool,
        ctx: &mut TickContext<'_>,
    ) {
        let id = self.next_message;
        self.next_message += 1;
        let (from, to) = (path[0], *path.last().expect("non-empty path"));
        ctx.emit(
            Some(from),
            "send",
            &[("msg", id as f64), ("fact", fact as f64), ("to", to as f64)],
        );
        self.engineers[from as usize].inbox.push_back(Message {
            id,
            fact,
            origin,
            created_tick,
            path,
            at: 0,
            team_share,
        });
    }

    fn announce(&mut self, share: Share, ctx: &mut TickContext<'_>) {
        let o = share.origin;
        ctx.emit(Some(o), "share", &[("fact", share.fact as f64)]);
        let home = self.team_of(o);
        let others: Vec<Team> = self.teams.iter().filter(|t| t.id != home).cloned().collect();
        for t in others {
            match self.params.policy {
                Policy::AnyToAny => {
                    for &m in &t.members {
                        self.send(share.fact, vec![o, m], o, share.tick, false, ctx);
                    }
                }
                Policy::Gatewayed => {
                    let lb = gateway(&t).expect("validated topology");
                    let path = self.topology.route(o, lb).expect("connected topology");
                    self.send(share.fact, path, o, share.tick, true, ctx);
                }
            }
        }
    }

    fn process(&mut self, e: AgentId, mut msg: Message, ctx: &mut TickContext<'_>) {
        let ei = e as usize;
        let mut novel = false;
        if msg.at > 0 {
            let from = msg.path[msg.at - 1];
            let trust = self.trust(e, from);
            if self.params.trust_drop && ctx.agent_rng(e).bernoulli(1.0 - trust) {
                self.drops += 1;
                ctx.emit(Some(e), "drop", &[("msg", msg.id as f64), ("from", from as f64)]);
                return;
            }
            novel = self.engineers[ei].knowledge.insert(msg.fact);
            ctx.emit(
                Some(e),
                "receive",
                &[
                    ("msg", msg.id as f64),
                    ("from", from as f64),
                    ("fact", msg.fact as f64),
                    ("novel", novel as u8 as f64),
                ],
            );
            if novel {
                ctx.emit(Some(e), "learn", &[("fact", msg.fact as f64)]);
            }
            let p = &self.params;
            let t = update_trust(trust, novel, p.trust_up, p.trust_down);
            self.engineers[ei].trust.insert(from, t);
        }
        if !msg.at_end() {
            let next = msg.path[msg.at + 1];
            self.hops += 1;
            ctx.emit(
                Some(e),
                "hop",
                &[("msg", msg.id as f64), ("from", e as f64), ("to", next as f64)],
            );
            msg.at += 1;
            self.in_flight.push((next, msg));
            return;
        }
        if msg.at == 0 {
            return;
        }
        let cross = self.team_of(msg.origin) != self.team_of(e);
        let latency = ctx.tick() - msg.created_tick;
        if cross {
            self.cross_deliveries += 1;
            self.latency_sum += latency;
        }
        ctx.emit(
            Some(e),
            "deliver",
            &[
                ("msg", msg.id as f64),
                ("fact", msg.fact as f64),
                ("latency", latency as f64),
                ("cross", cross as u8 as f64),
            ],
        );
        if msg.team_share && novel {
            let team = self.team_of(e);
            let mates: Vec<AgentId> = self.teams[team as usize]
                .members
                .iter()
                .copied()
                .filter(|&m| m != e)
                .collect();
            for m in mates {
                self.send(msg.fact, vec![e, m], msg.origin, msg.created_tick, false, ctx);
            }
        }
    }

    fn check_tasks(&mut self, ctx: &mut TickContext<'_>) {
        let tick = ctx.tick();
        for t in &mut self.tasks {
            if t.completed_at.is_some() || tick > t.deadline {
                continue;
            }
            let done = self
                .engineers
                .iter()
                .any(|e| t.required_facts.iter().all(|f| e.knowledge.contains(f)));
            if done {
                t.completed_at = Some(tick);
                ctx.emit(Some(t.assigned_to), "task_complete", &[("task", t.id as f64)]);
            }
        }
    }
}

impl Model for Org {
    fn live_agents(&self, out: &mut Vec<AgentId>) {
        out.extend(self.engineers.iter().map(|e| e.id));
    }

    fn begin_tick(&mut self, ctx: &mut TickContext<'_>) {
        while let Some(&s) = self.shares.get(self.next_share) {
            if s.tick > ctx.tick() {
                break;
            }
            self.next_share += 1;
            if s.tick == ctx.tick() {
                self.announce(s, ctx);
            }
        }
    }

    fn update_agent(&mut self, agent: AgentId, ctx: &mut TickContext<'_>) {
        let capacity = self.engineers[agent as usize].capacity;
        for _ in 0..capacity {
            let Some(msg) = self.engineers[agent as usize].inbox.pop_front() else {
                break;
            };
            self.process(agent, msg, ctx);
        }
    }

    fn end_tick(&mut self, ctx: &mut TickContext<'_>) {
        for (to, msg) in std::mem::take(&mut self.in_flight) {
            self.engineers[to as usize].inbox.push_back(msg);
        }
        self.check_tasks(ctx);
    }

    fn metrics(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("messages_sent", self.hops as f64),
            ("messages_dropped", self.drops as f64),
            ("cross_deliveries", self.cross_deliveries as f64),
            ("mean_fact_latency", self.mean_fact_latency()),
            ("tasks_completed", self.tasks_completed() as f64),
            ("task_completion_rate", self.task_completion_rate()),
            ("shared_understanding", self.shared_understanding()),
            ("mean_trust", self.mean_trust()),
            ("backlog", self.backlog() as f64),
        ]
    }
}
