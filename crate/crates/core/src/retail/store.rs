use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::engine::{rng, AgentId, Model, TickContext};
use crate::error::{check_non_negative, check_positive, check_unit, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AgeBand {
    #[serde(rename = "under25")]
    Under25,
    #[serde(rename = "25to45")]
    From25To45,
    #[serde(rename = "over45")]
    Over45,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ShopperMode {
    Browser,
    GoalDirected { target: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CustomerState {
    Entering,
    Browsing,
    Traveling,
    Waiting,
    InService,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Customer {
    pub id: AgentId,
    pub mode: ShopperMode,
    pub state: CustomerState,
    pub department: u32,
    pub patience: u32,
    pub entered_tick: u64,
    pub joined_tick: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StaffState {
    Idle,
    Serving { customer: AgentId, remaining: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StaffMember {
    pub id: AgentId,
    pub department: u32,
    pub age_band: AgeBand,
    pub skill: f64,
    pub attitude: f64,
    pub state: StaffState,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manager {
    #[serde(default = "one")]
    pub review_period: u64,
    #[serde(default)]
    pub min_staff_floor: u32,
    #[serde(default)]
    pub department: u32,
}

fn one() -> u64 {
    1
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Department {
    pub id: u32,
    pub staff: Vec<AgentId>,
    pub queue: VecDeque<AgentId>,
}

/// Service-time multiplier per age band; 1.0 means no effect.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgeMultipliers {
    #[serde(rename = "under25", default = "unit")]
    pub under25: f64,
    #[serde(rename = "25to45", default = "unit")]
    pub from25to45: f64,
    #[serde(rename = "over45", default = "unit")]
    pub over45: f64,
}

fn unit() -> f64 {
    1.0
}

impl Default for AgeMultipliers {
    fn default() -> Self {
        Self {
            under25: 1.0,
            from25to45: 1.0,
            over45: 1.0,
        }
    }
}

impl AgeMultipliers {
    pub fn get(&self, band: AgeBand) -> f64 {
        match band {
            AgeBand::Under25 => self.under25,
            AgeBand::From25To45 => self.from25to45,
            AgeBand::Over45 => self.over45,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetailParams {
    pub arrival_rate: f64,
    pub browser_fraction: f64,
    pub base_service_time: u32,
    pub skill_speedup: f64,
    pub base_purchase_prob: f64,
    pub attitude_weight: f64,
    pub goal_bonus: f64,
    pub impulse_prob: f64,
    /// Chance per tick that a browser who did not ask for help leaves.
    pub browse_exit_prob: f64,
    pub patience_min: u32,
    pub patience_max: u32,
    pub age_service_multiplier: AgeMultipliers,
}

impl Default for RetailParams {
    fn default() -> Self {
        Self {
            arrival_rate: 0.3,
            browser_fraction: 0.5,
            base_service_time: 5,
            skill_speedup: 1.0,
            base_purchase_prob: 0.25,
            attitude_weight: 0.3,
            goal_bonus: 0.3,
            impulse_prob: 0.1,
            browse_exit_prob: 0.1,
            patience_min: 10,
            patience_max: 30,
            age_service_multiplier: AgeMultipliers::default(),
        }
    }
}

impl RetailParams {
    pub fn validate(&self) -> Result<()> {
        check_non_negative("arrival_rate", self.arrival_rate)?;
        check_unit("browser_fraction", self.browser_fraction)?;
        check_positive("base_service_time", self.base_service_time)?;
        check_non_negative("skill_speedup", self.skill_speedup)?;
        check_unit("base_purchase_prob", self.base_purchase_prob)?;
        check_non_negative("attitude_weight", self.attitude_weight)?;
        check_non_negative("goal_bonus", self.goal_bonus)?;
        check_unit("impulse_prob", self.impulse_prob)?;
        check_unit("browse_exit_prob", self.browse_exit_prob)?;
        check_positive("patience_min", self.patience_min)?;
        if self.patience_max < self.patience_min {
            return Err(Error::range(
                "patience_max",
                self.patience_max,
                &format!(">= patience_min ({})", self.patience_min),
            ));
        }
        let m = self.age_service_multiplier;
        for (k, v) in [
            ("age_service_multiplier.under25", m.under25),
            ("age_service_multiplier.25to45", m.from25to45),
            ("age_service_multiplier.over45", m.over45),
        ] {
            check_non_negative(k, v)?;
            check_positive(k, v)?;
        }
        Ok(())
    }

    /// Ticks a staff member needs for one customer.
    pub fn service_time(&self, skill: f64, band: AgeBand) -> u32 {
        let t = self.base_service_time as f64 * self.age_service_multiplier.get(band)
            / (1.0 + self.skill_speedup * skill);
        (t.ceil() as u32).max(1)
    }

    pub fn purchase_prob(&self, attitude: f64, goal_directed: bool) -> f64 {
        let g = if goal_directed { self.goal_bonus } else { 0.0 };
        (self.base_purchase_prob + self.attitude_weight * attitude + g).clamp(0.0, 1.0)
    }
}

/// Department-store floor. Departments sit on a line and every customer
/// enters at department 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Store {
    params: RetailParams,
    departments: Vec<Department>,
    staff: Vec<StaffMember>,
    manager: Option<Manager>,
    customers: BTreeMap<AgentId, Customer>,
    next_customer: AgentId,
    ticks: u64,
    entered: u64,
    exited: u64,
    conversions: u64,
    reneges: u64,
    served: u64,
    total_wait: u64,
    serving_ticks: u64,
}

impl Store {
    pub fn new(
        departments: u32,
        staff: Vec<StaffMember>,
        manager: Option<Manager>,
        params: RetailParams,
    ) -> Result<Self> {
        params.validate()?;
        check_positive("departments", departments)?;
        let mut depts: Vec<Department> = (0..departments)
            .map(|id| Department {
                id,
                ..Department::default()
            })
            .collect();
        for (i, s) in staff.iter().enumerate() {
            if s.id != i as AgentId {
                return Err(Error::Config(format!("staff {i} has id {}", s.id)));
            }
            if s.department >= departments {
                return Err(Error::range(
                    "staff.department",
                    s.department,
                    &format!("< {departments}"),
                ));
            }
            check_unit("staff.skill", s.skill)?;
            check_unit("staff.attitude", s.attitude)?;
            depts[s.department as usize].staff.push(s.id);
        }
        if let Some(m) = manager {
            check_positive("manager.review_period", m.review_period)?;
            if m.department >= departments {
                return Err(Error::range(
                    "manager.department",
                    m.department,
                    &format!("< {departments}"),
                ));
            }
        }
        let first_customer = staff.len() as AgentId + manager.is_some() as AgentId;
        Ok(Self {
            params,
            departments: depts,
            staff,
            manager,
            customers: BTreeMap::new(),
            next_customer: first_customer,
            ticks: 0,
            entered: 0,
            exited: 0,
            conversions: 0,
            reneges: 0,
            served: 0,
            total_wait: 0,
            serving_ticks: 0,
        })
    }

    pub fn params(&self) -> &RetailParams {
        &self.params
    }

    pub fn departments(&self) -> &[Department] {
        &self.departments
    }

    pub fn staff(&self) -> &[StaffMember] {
        &self.staff
    }

    pub fn customers(&self) -> &BTreeMap<AgentId, Customer> {
        &self.customers
    }

    /// Agent id of the manager, if the store has one.
    pub fn manager_id(&self) -> Option<AgentId> {
        self.manager.map(|_| self.staff.len() as AgentId)
    }

    pub fn conversions(&self) -> u64 {
        self.conversions
    }

    pub fn reneges(&self) -> u64 {
        self.reneges
    }

    pub fn served(&self) -> u64 {
        self.served
    }

    pub fn customers_entered(&self) -> u64 {
        self.entered
    }

    pub fn customers_exited(&self) -> u64 {
        self.exited
    }

    pub fn mean_wait(&self) -> f64 {
        if self.served == 0 {
            0.0
        } else {
            self.total_wait as f64 / self.served as f64
        }
    }

    /// Serving ticks over staff-ticks so far; 0 without staff.
    pub fn utilization(&self) -> f64 {
        let capacity = self.staff.len() as u64 * self.ticks;
        if capacity == 0 {
            0.0
        } else {
            self.serving_ticks as f64 / capacity as f64
        }
    }

    /// Places a customer on the floor directly, as if it had just arrived.
    pub fn admit(&mut self, mode: ShopperMode, patience: u32, tick: u64) -> AgentId {
        let id = self.next_customer;
        self.next_customer += 1;
        self.entered += 1;
        self.customers.insert(
            id,
            Customer {
                id,
                mode,
                state: CustomerState::Entering,
                department: 0,
                patience,
                entered_tick: tick,
                joined_tick: None,
            },
        );
        id
    }

    /// Broken invariants in the current state, if any.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let inside = self.customers.len() as u64;
        if self.entered != self.exited + inside {
            out.push(format!(
                "customer accounting: entered {} != exited {} + inside {inside}",
                self.entered, self.exited
            ));
        }
        let mut seen = BTreeMap::new();
        for d in &self.departments {
            for &c in &d.queue {
                if seen.insert(c, d.id).is_some() {
                    out.push(format!("customer {c} queued twice"));
                }
                match self.customers.get(&c) {
                    Some(cu) if cu.state == CustomerState::Waiting && cu.department == d.id => {}
                    _ => out.push(format!("customer {c} in queue {} is not waiting there", d.id)),
                }
            }
        }
        let mut serving = BTreeMap::new();
        for s in &self.staff {
            if let StaffState::Serving { customer, remaining } = s.state {
                if remaining == 0 {
                    out.push(format!("staff {} serving with nothing left", s.id));
                }
                if serving.insert(customer, s.id).is_some() || seen.contains_key(&customer) {
                    out.push(format!("customer {customer} served twice"));
                }
            }
        }
        let u = self.utilization();
        if !(0.0..=1.0).contains(&u) {
            out.push(format!("utilization {u} outside [0,1]"));
        }
        out
    }

    fn spawn_arrivals(&mut self, ctx: &mut TickContext<'_>) {
        let n = ctx.stream(rng::ENVIRONMENT_STREAM).poisson(self.params.arrival_rate);
        for _ in 0..n {
            let env = ctx.stream(rng::ENVIRONMENT_STREAM);
            let mode = if env.bernoulli(self.params.browser_fraction) {
                ShopperMode::Browser
            } else {
                ShopperMode::GoalDirected {
                    target: env.below(self.departments.len() as u64) as u32,
                }
            };
            let patience = env.range_inclusive(
                self.params.patience_min as u64,
                self.params.patience_max as u64,
            ) as u32;
            let id = self.admit(mode, patience, ctx.tick());
            let target = match mode {
                ShopperMode::Browser => -1.0,
                ShopperMode::GoalDirected { target } => target as f64,
            };
            ctx.emit(Some(id), "arrive", &[("target", target), ("patience", patience as f64)]);
        }
    }

    fn join_queue(&mut self, id: AgentId, ctx: &mut TickContext<'_>) {
        let c = self.customers.get_mut(&id).expect("live customer");
        c.state = CustomerState::Waiting;
        c.joined_tick = Some(ctx.tick());
        self.departments[c.department as usize].queue.push_back(id);
        ctx.emit(Some(id), "join_queue", &[("dept", c.department as f64)]);
    }

    fn move_to(&mut self, id: AgentId, dept: u32, ctx: &mut TickContext<'_>) {
        self.customers.get_mut(&id).expect("live customer").department = dept;
        ctx.emit(Some(id), "move", &[("dept", dept as f64)]);
    }

    fn leave(&mut self, id: AgentId, purchased: bool, ctx: &mut TickContext<'_>) {
        self.customers.remove(&id).expect("live customer");
        self.exited += 1;
        self.conversions += purchased as u64;
        ctx.emit(Some(id), "exit", &[("purchased", purchased as u8 as f64)]);
        ctx.retire_agent(id);
    }

    fn update_customer(&mut self, id: AgentId, ctx: &mut TickContext<'_>) {
        let c = &self.customers[&id];
        let (state, mode, dept) = (c.state, c.mode, c.department);
        match (state, mode) {
            (CustomerState::Entering | CustomerState::Traveling, ShopperMode::GoalDirected { target }) => {
                if dept != target {
                    let next = if target > dept { dept + 1 } else { dept - 1 };
                    self.move_to(id, next, ctx);
                }
                if self.customers[&id].department == target {
                    self.join_queue(id, ctx);
                } else {
                    self.customers.get_mut(&id).expect("live customer").state = CustomerState::Traveling;
                }
            }
            (CustomerState::Entering, ShopperMode::Browser) | (CustomerState::Browsing, _) => {
                let r = ctx.agent_rng(id);
                if r.bernoulli(self.params.impulse_prob) {
                    self.join_queue(id, ctx);
                } else if r.bernoulli(self.params.browse_exit_prob) {
                    self.leave(id, false, ctx);
                } else {
                    self.customers.get_mut(&id).expect("live customer").state = CustomerState::Browsing;
                    let last = self.departments.len() as u32 - 1;
                    let next = match (dept, last) {
                        (_, 0) => None,
                        (0, _) => Some(1),
                        (d, l) if d == l => Some(d - 1),
                        (d, _) => Some(if ctx.agent_rng(id).bernoulli(0.5) { d + 1 } else { d - 1 }),
                    };
                    if let Some(n) = next {
                        self.move_to(id, n, ctx);
                    }
                }
            }
            (CustomerState::Waiting, _) => {
                let c = self.customers.get_mut(&id).expect("live customer");
                c.patience = c.patience.saturating_sub(1);
                if c.patience == 0 {
                    self.departments[dept as usize].queue.retain(|&q| q != id);
                    ctx.emit(Some(id), "renege", &[("dept", dept as f64)]);
                    self.reneges += 1;
                    self.leave(id, false, ctx);
                }
            }
            _ => {}
        }
    }

    fn update_staff(&mut self, i: usize, ctx: &mut TickContext<'_>) {
        let id = self.staff[i].id;
        if self.staff[i].state == StaffState::Idle {
            let dept = self.staff[i].department;
            let Some(cid) = self.departments[dept as usize].queue.pop_front() else {
                return;
            };
            let s = &self.staff[i];
            let duration = self.params.service_time(s.skill, s.age_band);
            let c = self.customers.get_mut(&cid).expect("queued customer is live");
            c.state = CustomerState::InService;
            let wait = ctx.tick() - c.joined_tick.expect("queued customer joined");
            self.served += 1;
            self.total_wait += wait;
            self.staff[i].state = StaffState::Serving {
                customer: cid,
                remaining: duration,
            };
            ctx.emit(
                Some(id),
                "service_start",
                &[
                    ("customer", cid as f64),
                    ("dept", dept as f64),
                    ("wait", wait as f64),
                    ("duration", duration as f64),
                ],
            );
        }
        let StaffState::Serving { customer, remaining } = self.staff[i].state else {
            return;
        };
        self.serving_ticks += 1;
        if remaining > 1 {
            self.staff[i].state = StaffState::Serving {
                customer,
                remaining: remaining - 1,
            };
            return;
        }
        let goal = matches!(self.customers[&customer].mode, ShopperMode::GoalDirected { .. });
        let p = self.params.purchase_prob(self.staff[i].attitude, goal);
        let purchased = ctx.agent_rng(id).bernoulli(p);
        self.staff[i].state = StaffState::Idle;
        ctx.emit(
            Some(id),
            "service_end",
            &[("customer", customer as f64), ("purchased", purchased as u8 as f64)],
        );
        self.leave(customer, purchased, ctx);
    }

    /// Moves one idle staff member from the shortest queue to the longest
    /// when they differ by at least 2 and the donor keeps its floor.
    fn review(&mut self, ctx: &mut TickContext<'_>) {
        let Some(m) = self.manager else { return };
        let lens: Vec<usize> = self.departments.iter().map(|d| d.queue.len()).collect();
        let longest = (0..lens.len()).max_by_key(|&d| (lens[d], std::cmp::Reverse(d))).expect("departments");
        let shortest = (0..lens.len()).min_by_key(|&d| (lens[d], d)).expect("departments");
        if lens[longest] < lens[shortest] + 2 {
            return;
        }
        let donor = &self.departments[shortest];
        if donor.staff.len() < m.min_staff_floor as usize + 1 {
            return;
        }
        let Some(pos) = donor
            .staff
            .iter()
            .position(|&s| self.staff[s as usize].state == StaffState::Idle)
        else {
            return;
        };
        let s = self.departments[shortest].staff.remove(pos);
        self.departments[longest].staff.push(s);
        self.departments[longest].staff.sort_unstable();
        self.staff[s as usize].department = longest as u32;
        ctx.emit(
            self.manager_id(),
            "reassign",
            &[("staff", s as f64), ("from", shortest as f64), ("to", longest as f64)],
        );
    }
}

impl Model for Store {
    fn live_agents(&self, out: &mut Vec<AgentId>) {
        out.extend(self.staff.iter().map(|s| s.id));
        out.extend(self.manager_id());
        out.extend(self.customers.keys().copied());
    }

    fn begin_tick(&mut self, ctx: &mut TickContext<'_>) {
        self.ticks = ctx.tick();
        self.spawn_arrivals(ctx);
    }

    fn update_agent(&mut self, agent: AgentId, ctx: &mut TickContext<'_>) {
        if (agent as usize) < self.staff.len() {
            self.update_staff(agent as usize, ctx);
        } else if Some(agent) == self.manager_id() {
            let period = self.manager.expect("manager").review_period;
            if ctx.tick().is_multiple_of(period) {
                self.review(ctx);
            }
        } else if self.customers.contains_key(&agent) {
            self.update_customer(agent, ctx);
        }
    }

    fn metrics(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("customers_entered", self.entered as f64),
            ("customers_exited", self.exited as f64),
            ("customers_inside", self.customers.len() as f64),
            ("conversions", self.conversions as f64),
            ("reneges", self.reneges as f64),
            ("served", self.served as f64),
            ("mean_wait", self.mean_wait()),
            ("staff_utilization", self.utilization()),
            (
                "queue_length",
                self.departments.iter().map(|d| d.queue.len()).sum::<usize>() as f64,
            ),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{LogMode, World};

    fn clerk(id: AgentId, department: u32, skill: f64, attitude: f64) -> StaffMember {
        StaffMember {
            id,
            department,
            age_band: AgeBand::From25To45,
            skill,
            attitude,
            state: StaffState::Idle,
        }
    }

    fn quiet() -> RetailParams {
        RetailParams {
            arrival_rate: 0.0,
            ..RetailParams::default()
        }
    }

    fn world(store: Store, seed: u64) -> World<Store> {
        World::new(store, seed, LogMode::Full)
    }

    /// Puts `n` goal-directed customers straight into a department queue.
    fn enqueue(store: &mut Store, dept: u32, n: usize, patience: u32) {
        for _ in 0..n {
            let id = store.admit(ShopperMode::GoalDirected { target: dept }, patience, 0);
            let c = store.customers.get_mut(&id).unwrap();
            c.department = dept;
            c.state = CustomerState::Waiting;
            c.joined_tick = Some(0);
            store.departments[dept as usize].queue.push_back(id);
        }
    }

    #[test]
    fn no_arrivals_means_empty_run() {
        let store = Store::new(3, vec![clerk(0, 0, 0.5, 0.5)], None, quiet()).unwrap();
        let mut w = world(store, 1);
        let r = w.run(500, 50);
        for (k, v) in &r.summary {
            assert_eq!(*v, 0.0, "{k}");
        }
        assert!(w.log().is_empty());
    }

    #[test]
    fn arrival_count_concentrates() {
        let p = RetailParams {
            arrival_rate: 0.5,
            browse_exit_prob: 1.0,
            impulse_prob: 0.0,
            browser_fraction: 1.0,
            ..RetailParams::default()
        };
        let mut w = world(Store::new(3, vec![], None, p).unwrap(), 8);
        w.run(10_000, 1000);
        let n = w.model().customers_entered();
        assert!((4700..=5300).contains(&n), "{n}");
        assert!(w.log().records().iter().filter(|e| e.kind == "arrive").all(|e| e.value("target") == -1.0));
    }

    #[test]
    fn impulse_free_browsers_never_queue() {
        let p = RetailParams {
            arrival_rate: 0.4,
            browser_fraction: 1.0,
            impulse_prob: 0.0,
            ..RetailParams::default()
        };
        let mut w = world(Store::new(4, vec![clerk(0, 1, 0.0, 0.0)], None, p).unwrap(), 2);
        w.run(3000, 100);
        assert!(w.model().customers_entered() > 0);
        assert_eq!(w.log().count("join_queue"), 0);
    }

    #[test]
    fn goal_directed_two_hops_queues_on_second_tick() {
        let mut w = world(Store::new(3, vec![], None, quiet()).unwrap(), 3);
        let id = w.model_mut().admit(ShopperMode::GoalDirected { target: 2 }, 20, 0);
        w.tick();
        let c = &w.model().customers()[&id];
        assert_eq!((c.state, c.department), (CustomerState::Traveling, 1));
        w.tick();
        let c = &w.model().customers()[&id];
        assert_eq!((c.state, c.department), (CustomerState::Waiting, 2));
        assert_eq!(w.model().departments()[2].queue, [id]);
    }

    #[test]
    fn patience_one_reneges_this_tick() {
        let mut store = Store::new(1, vec![], None, quiet()).unwrap();
        enqueue(&mut store, 0, 1, 1);
        let mut w = world(store, 4);
        w.tick();
        let m = w.model();
        assert!(m.customers().is_empty());
        assert_eq!((m.reneges(), m.customers_exited(), m.conversions()), (1, 1, 0));
        assert!(m.departments()[0].queue.is_empty());
        assert_eq!(w.log().count("renege"), 1);
        assert_eq!(w.log().records().last().unwrap().value("purchased"), 0.0);
    }

    #[test]
    fn service_time_and_purchase_formula() {
        let p = RetailParams::default();
        assert_eq!(p.service_time(0.0, AgeBand::Under25), 5);
        assert_eq!(p.service_time(1.0, AgeBand::Over45), 3);
        let q = RetailParams {
            base_purchase_prob: 0.2,
            attitude_weight: 0.5,
            ..RetailParams::default()
        };
        assert!((q.purchase_prob(1.0, false) - 0.7).abs() < 1e-12);
        let r = RetailParams {
            base_purchase_prob: 0.9,
            attitude_weight: 0.5,
            ..RetailParams::default()
        };
        assert_eq!(r.purchase_prob(1.0, false), 1.0);
        let slow = RetailParams {
            age_service_multiplier: AgeMultipliers {
                over45: 2.0,
                ..AgeMultipliers::default()
            },
            ..RetailParams::default()
        };
        assert_eq!(slow.service_time(0.0, AgeBand::Over45), 10);
    }

    #[test]
    fn purchase_prob_is_monotone() {
        for p0 in [0.0, 0.3, 0.8] {
            for a in [0.0, 0.4, 1.5] {
                for g in [0.0, 0.2, 0.9] {
                    let p = RetailParams {
                        base_purchase_prob: p0,
                        attitude_weight: a,
                        goal_bonus: g,
                        ..RetailParams::default()
                    };
                    let mut prev = 0.0;
                    for k in 0..=10 {
                        let x = p.purchase_prob(k as f64 / 10.0, false);
                        assert!(x >= prev && (0.0..=1.0).contains(&x));
                        assert!(p.purchase_prob(k as f64 / 10.0, true) >= x);
                        prev = x;
                    }
                }
            }
        }
    }

    #[test]
    fn one_service_takes_its_duration() {
        let mut store = Store::new(1, vec![clerk(0, 0, 0.0, 1.0)], None, RetailParams {
            base_purchase_prob: 1.0,
            ..quiet()
        }).unwrap();
        enqueue(&mut store, 0, 1, 100);
        let mut w = world(store, 5);
        w.run(20, 1);
        let log = w.log().records();
        let start = log.iter().find(|e| e.kind == "service_start").unwrap();
        let end = log.iter().find(|e| e.kind == "service_end").unwrap();
        assert_eq!(start.tick, 1);
        assert_eq!(start.value("duration"), 5.0);
        assert_eq!(end.tick, 5);
        let m = w.model();
        assert_eq!((m.conversions(), m.served()), (1, 1));
        assert_eq!(m.mean_wait(), 1.0);
        assert!((m.utilization() - 5.0 / 20.0).abs() < 1e-12);
    }

    fn two_departments(floor: u32, b_staff: u32) -> World<Store> {
        let staff = (0..b_staff).map(|i| clerk(i, 1, 0.0, 0.0)).collect();
        let manager = Manager {
            review_period: 1,
            min_staff_floor: floor,
            department: 0,
        };
        let mut store = Store::new(2, staff, Some(manager), quiet()).unwrap();
        enqueue(&mut store, 0, 5, 100);
        world(store, 6)
    }

    #[test]
    fn manager_moves_idle_staff_to_longest_queue() {
        let mut w = two_departments(0, 1);
        w.tick();
        assert_eq!(w.log().count("reassign"), 1);
        assert_eq!(w.model().staff()[0].department, 0);
        assert_eq!(w.model().departments()[0].staff, [0]);
        assert!(w.model().departments()[1].staff.is_empty());
    }

    #[test]
    fn manager_respects_floor_and_calm_floors() {
        let mut w = two_departments(1, 1);
        w.tick();
        assert_eq!(w.log().count("reassign"), 0);
        let manager = Manager {
            review_period: 1,
            min_staff_floor: 0,
            department: 0,
        };
        let calm = Store::new(2, vec![clerk(0, 1, 0.0, 0.0)], Some(manager), quiet()).unwrap();
        let mut w = world(calm, 1);
        w.run(50, 10);
        assert_eq!(w.log().count("reassign"), 0);
    }

    #[test]
    fn without_staff_everyone_who_queues_reneges() {
        let p = RetailParams {
            arrival_rate: 0.3,
            ..RetailParams::default()
        };
        let mut w = world(Store::new(3, vec![], None, p).unwrap(), 10);
        w.run(2000, 100);
        let m = w.model();
        assert_eq!(m.conversions(), 0);
        let waiting = m.customers().values().filter(|c| c.state == CustomerState::Waiting).count() as u64;
        assert_eq!(w.log().count("join_queue"), m.reneges() + waiting);
        assert!(m.reneges() > 0);
    }

    #[test]
    fn invariants_hold_with_manager() {
        let staff = (0..4).map(|i| clerk(i, i % 2, 0.3 * i as f64 / 3.0, 0.5)).collect();
        let manager = Manager {
            review_period: 5,
            min_staff_floor: 0,
            department: 0,
        };
        let p = RetailParams {
            arrival_rate: 0.8,
            ..RetailParams::default()
        };
        let mut w = world(Store::new(4, staff, Some(manager), p).unwrap(), 12);
        for _ in 0..3000 {
            w.tick();
            let v = w.model().invariant_violations();
            assert!(v.is_empty(), "{v:?}");
        }
        let m = w.model();
        assert!(m.conversions() <= m.served());
        assert!(w.log().count("reassign") > 0);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(Store::new(0, vec![], None, quiet()).is_err());
        assert!(Store::new(2, vec![clerk(0, 2, 0.0, 0.0)], None, quiet()).is_err());
        assert!(Store::new(2, vec![clerk(0, 0, 1.5, 0.0)], None, quiet()).is_err());
        let p = RetailParams {
            patience_min: 10,
            patience_max: 5,
            ..quiet()
        };
        assert!(matches!(Store::new(2, vec![], None, p), Err(Error::Range { .. })));
    }
}
