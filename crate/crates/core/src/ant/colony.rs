use serde::{Deserialize, Serialize};

use super::grid::{Coord, GridWorld, PheromoneField};
use crate::engine::{AgentId, Model, RngStream, TickContext};
use crate::error::{check_non_negative, check_positive, check_unit, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    MassRecruitment,
    TandemRecruitment,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AntState {
    Seeking,
    ReturningWithFood,
    IdleAtNest,
    LeadingTandem,
    FollowingTandem,
    TravelingToKnownFood,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ant {
    pub id: AgentId,
    pub position: Coord,
    pub state: AntState,
    pub carrying: u8,
    /// Loop-erased cells visited since leaving the nest; the last entry is
    /// the current cell. Empty at the nest.
    pub path: Vec<Coord>,
    pub known_food: Option<Coord>,
    /// Cell occupied before the last move.
    pub previous: Option<Coord>,
    /// Tandem partner while leading or following.
    pub partner: Option<AgentId>,
}

impl Ant {
    fn new(id: AgentId, nest: Coord, state: AntState) -> Self {
        Self {
            id,
            position: nest,
            state,
            carrying: 0,
            path: Vec::new(),
            known_food: None,
            previous: None,
            partner: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForagingParams {
    pub strategy: Strategy,
    pub n_ants: u32,
    pub evaporation_rate: f64,
    pub deposit_seek: f64,
    pub deposit_return: f64,
    pub exploration_prob: f64,
    pub smoothing_bias: f64,
    pub max_ticks: u64,
    /// Share of the colony that scouts at the start of a tandem run; the
    /// rest wait at the nest to be recruited.
    pub scout_fraction: f64,
    /// Mass recruitment: exclude the cell just left from the trail-weighted
    /// choice, unless it is the only option.
    pub avoid_backtrack: bool,
}

impl Default for ForagingParams {
    fn default() -> Self {
        Self {
            strategy: Strategy::MassRecruitment,
            n_ants: 50,
            evaporation_rate: 0.02,
            deposit_seek: 0.02,
            deposit_return: 5.0,
            exploration_prob: 0.05,
            smoothing_bias: 0.1,
            max_ticks: 20_000,
            scout_fraction: 0.02,
            avoid_backtrack: true,
        }
    }
}

impl ForagingParams {
    pub fn validate(&self) -> Result<()> {
        check_positive("n_ants", self.n_ants)?;
        check_unit("evaporation_rate", self.evaporation_rate)?;
        check_non_negative("deposit_seek", self.deposit_seek)?;
        check_non_negative("deposit_return", self.deposit_return)?;
        check_unit("exploration_prob", self.exploration_prob)?;
        check_non_negative("smoothing_bias", self.smoothing_bias)?;
        check_positive("max_ticks", self.max_ticks)?;
        check_unit("scout_fraction", self.scout_fraction)?;
        check_positive("scout_fraction", self.scout_fraction)?;
        Ok(())
    }

    /// Ants that start out seeking under the tandem strategy.
    pub fn scout_count(&self) -> u32 {
        ((self.scout_fraction * self.n_ants as f64).ceil() as u32).clamp(1, self.n_ants)
    }
}

/// Next cell for a seeking ant under mass recruitment.
///
/// With probability `exploration_prob` the ant picks uniformly among its
/// in-bounds neighbours; otherwise it samples a neighbour with weight
/// `intensity + smoothing_bias`.
pub fn choose_step_mass(
    ant: &Ant,
    field: &PheromoneField,
    rng: &mut RngStream,
    params: &ForagingParams,
) -> Coord {
    let mut options: Vec<Coord> = field.neighbors(ant.position).collect();
    if rng.bernoulli(params.exploration_prob) {
        return options[rng.index(options.len())];
    }
    if params.avoid_backtrack && options.len() > 1 {
        if let Some(prev) = ant.previous {
            let forward: Vec<Coord> = options.iter().copied().filter(|&c| c != prev).collect();
            if weight_sum(field, &forward, params.smoothing_bias) > 0.0 {
                options = forward;
            }
        }
    }
    let total = weight_sum(field, &options, params.smoothing_bias);
    if total <= 0.0 {
        return options[rng.index(options.len())];
    }
    let mut target = rng.next_uniform() * total;
    for &c in &options {
        let w = field.at(c) + params.smoothing_bias;
        if target < w {
            return c;
        }
        target -= w;
    }
    // Rounding left a sliver past the last weight.
    *options
        .iter()
        .rev()
        .find(|&&c| field.at(c) + params.smoothing_bias > 0.0)
        .expect("positive total implies a positive weight")
}

fn weight_sum(field: &PheromoneField, cells: &[Coord], bias: f64) -> f64 {
    cells.iter().map(|&c| field.at(c) + bias).sum()
}

/// Neighbour of `from` closest to `to` in Chebyshev distance (Manhattan
/// distance, then neighbour order, break ties).
pub fn greedy_step(field: &PheromoneField, from: Coord, to: Coord) -> Coord {
    field
        .neighbors(from)
        .min_by_key(|n| (n.chebyshev(to), n.manhattan(to)))
        .expect("every cell of a non-empty grid has a neighbour or is the target")
}

/// Ant colony on a grid, foraging with one of two recruitment strategies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Colony {
    grid: GridWorld,
    ants: Vec<Ant>,
    params: ForagingParams,
    units_delivered: u64,
    ant_steps: u64,
    depleted_at: Option<u64>,
}

impl Colony {
    pub fn new(grid: GridWorld, params: ForagingParams) -> Result<Self> {
        params.validate()?;
        let scouts = params.scout_count();
        let ants = (0..params.n_ants)
            .map(|id| {
                let state = match params.strategy {
                    Strategy::MassRecruitment => AntState::Seeking,
                    Strategy::TandemRecruitment if id < scouts => AntState::Seeking,
                    Strategy::TandemRecruitment => AntState::IdleAtNest,
                };
                Ant::new(id, grid.nest, state)
            })
            .collect();
        Ok(Self {
            grid,
            ants,
            params,
            units_delivered: 0,
            ant_steps: 0,
            depleted_at: None,
        })
    }

    pub fn grid(&self) -> &GridWorld {
        &self.grid
    }

    pub fn ants(&self) -> &[Ant] {
        &self.ants
    }

    /// Direct ant access for building hand traces.
    pub fn ants_mut(&mut self) -> &mut [Ant] {
        &mut self.ants
    }

    pub fn params(&self) -> &ForagingParams {
        &self.params
    }

    pub fn units_delivered(&self) -> u64 {
        self.units_delivered
    }

    pub fn ant_steps(&self) -> u64 {
        self.ant_steps
    }

    pub fn depleted_at(&self) -> Option<u64> {
        self.depleted_at
    }

    pub fn units_carried(&self) -> u64 {
        self.ants.iter().map(|a| a.carrying as u64).sum()
    }

    pub fn informed_ants(&self) -> u64 {
        self.ants.iter().filter(|a| a.known_food.is_some()).count() as u64
    }

    pub fn efficiency(&self) -> f64 {
        if self.ant_steps == 0 {
            0.0
        } else {
            self.units_delivered as f64 / self.ant_steps as f64
        }
    }

    /// Broken invariants in the current state, if any.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let held = self.grid.food_remaining() + self.units_carried() + self.units_delivered;
        if held != self.grid.food_initial() {
            out.push(format!(
                "food accounting: initial {} != remaining+carried+delivered {held}",
                self.grid.food_initial()
            ));
        }
        if let Some(c) = self.grid.pheromone.cells().iter().position(|&v| v.is_nan() || v < 0.0) {
            out.push(format!("pheromone cell {c} is negative"));
        }
        for a in &self.ants {
            if !self.grid.in_bounds(a.position) {
                out.push(format!("ant {} out of bounds at {:?}", a.id, a.position));
            }
            if (a.carrying == 1) != (a.state == AntState::ReturningWithFood) || a.carrying > 1 {
                out.push(format!("ant {} carries {} in {:?}", a.id, a.carrying, a.state));
            }
            if a.position != self.grid.nest && a.path.last() != Some(&a.position) {
                out.push(format!("ant {} path does not end at its cell", a.id));
            }
            if a.state == AntState::FollowingTandem {
                let leader = a.partner.map(|p| &self.ants[p as usize]);
                if !leader.is_some_and(|l| l.position.is_adjacent_or_same(a.position)) {
                    out.push(format!("follower {} separated from its leader", a.id));
                }
            }
        }
        out
    }

    fn relocate(&mut self, i: usize, to: Coord, ctx: &mut TickContext<'_>) {
        let nest = self.grid.nest;
        let ant = &mut self.ants[i];
        if ant.position == to {
            return;
        }
        ant.previous = Some(ant.position);
        ant.position = to;
        if to == nest {
            // Back home: the next trip starts fresh in any direction.
            ant.path.clear();
            ant.previous = None;
        } else if let Some(k) = ant.path.iter().position(|&c| c == to) {
            ant.path.truncate(k + 1);
        } else {
            ant.path.push(to);
        }
        self.ant_steps += 1;
        ctx.emit(Some(ant.id), "move", &[("x", to.x as f64), ("y", to.y as f64)]);
    }

    fn lay(&mut self, i: usize, amount: f64, ctx: &mut TickContext<'_>) {
        if amount <= 0.0 {
            return;
        }
        let ant = &self.ants[i];
        self.grid
            .pheromone
            .deposit(ant.position, amount)
            .expect("ants stay in bounds");
        ctx.emit(
            Some(ant.id),
            "deposit",
            &[
                ("x", ant.position.x as f64),
                ("y", ant.position.y as f64),
                ("amount", amount),
            ],
        );
    }

    /// Takes a unit if the ant stands on a non-empty source.
    fn try_harvest(&mut self, i: usize, ctx: &mut TickContext<'_>) -> bool {
        let pos = self.ants[i].position;
        let Some(s) = self.grid.source_at(pos) else {
            return false;
        };
        if self.grid.food[s].harvest().is_err() {
            return false;
        }
        let ant = &mut self.ants[i];
        ant.carrying = 1;
        ant.state = AntState::ReturningWithFood;
        ctx.emit(
            Some(ant.id),
            "harvest",
            &[
                ("source", s as f64),
                ("remaining", self.grid.food[s].remaining as f64),
            ],
        );
        if self.depleted_at.is_none() && self.grid.all_depleted() {
            self.depleted_at = Some(ctx.tick());
        }
        true
    }

    /// One backtracking step; delivers on reaching the nest.
    fn step_home(&mut self, i: usize, ctx: &mut TickContext<'_>) -> bool {
        let nest = self.grid.nest;
        let ant = &mut self.ants[i];
        ant.path.pop();
        let next = ant.path.last().copied().unwrap_or(nest);
        self.relocate(i, next, ctx);
        if self.ants[i].position != nest {
            return false;
        }
        self.units_delivered += 1;
        let ant = &mut self.ants[i];
        ant.carrying = 0;
        ctx.emit(Some(ant.id), "deliver", &[("delivered", self.units_delivered as f64)]);
        true
    }

    fn update_mass(&mut self, i: usize, ctx: &mut TickContext<'_>) {
        match self.ants[i].state {
            AntState::Seeking => {
                self.lay(i, self.params.deposit_seek, ctx);
                let id = self.ants[i].id;
                let next = choose_step_mass(
                    &self.ants[i],
                    &self.grid.pheromone,
                    ctx.agent_rng(id),
                    &self.params,
                );
                self.relocate(i, next, ctx);
                self.try_harvest(i, ctx);
            }
            AntState::ReturningWithFood => {
                self.lay(i, self.params.deposit_return, ctx);
                if self.step_home(i, ctx) {
                    self.ants[i].state = AntState::Seeking;
                }
            }
            _ => {}
        }
    }

    fn update_tandem(&mut self, i: usize, ctx: &mut TickContext<'_>) {
        match self.ants[i].state {
            AntState::Seeking => {
                let id = self.ants[i].id;
                let pos = self.ants[i].position;
                let options: Vec<Coord> = self.grid.pheromone.neighbors(pos).collect();
                let next = options[ctx.agent_rng(id).index(options.len())];
                self.relocate(i, next, ctx);
                if self.try_harvest(i, ctx) {
                    self.ants[i].known_food = Some(next);
                    ctx.emit(
                        Some(id),
                        "learn",
                        &[("x", next.x as f64), ("y", next.y as f64), ("recruited", 0.0)],
                    );
                }
            }
            AntState::ReturningWithFood => {
                if self.step_home(i, ctx) {
                    let ant = &mut self.ants[i];
                    ant.state = if ant.known_food.is_some() {
                        AntState::TravelingToKnownFood
                    } else {
                        AntState::Seeking
                    };
                }
            }
            AntState::TravelingToKnownFood => {
                if self.ants[i].position == self.grid.nest {
                    self.recruit(i, ctx);
                }
                self.advance_to_food(i, ctx);
            }
            AntState::LeadingTandem => self.advance_to_food(i, ctx),
            AntState::FollowingTandem | AntState::IdleAtNest => {}
        }
    }

    /// Pairs a knowledgeable ant at the nest with a random idle nestmate.
    /// Without one, the ant sets off alone.
    fn recruit(&mut self, i: usize, ctx: &mut TickContext<'_>) {
        let id = self.ants[i].id;
        let idle: Vec<usize> = self
            .ants
            .iter()
            .enumerate()
            .filter(|(_, a)| a.state == AntState::IdleAtNest)
            .map(|(k, _)| k)
            .collect();
        if idle.is_empty() {
            ctx.emit(Some(id), "depart", &[]);
            return;
        }
        let f = idle[ctx.agent_rng(id).index(idle.len())];
        let follower_id = self.ants[f].id;
        self.ants[f].state = AntState::FollowingTandem;
        self.ants[f].partner = Some(id);
        let leader = &mut self.ants[i];
        leader.state = AntState::LeadingTandem;
        leader.partner = Some(follower_id);
        ctx.emit(Some(id), "recruit", &[("follower", follower_id as f64)]);
    }

    fn advance_to_food(&mut self, i: usize, ctx: &mut TickContext<'_>) {
        let target = self.ants[i]
            .known_food
            .expect("travelling ants know their target");
        let from = self.ants[i].position;
        if from != target {
            let next = greedy_step(&self.grid.pheromone, from, target);
            self.relocate(i, next, ctx);
            if self.ants[i].state == AntState::LeadingTandem {
                let f = self.ants[i].partner.expect("leader has a follower") as usize;
                self.relocate(f, from, ctx);
            }
        }
        if self.ants[i].position != target {
            return;
        }
        if self.ants[i].state == AntState::LeadingTandem {
            let f = self.ants[i].partner.take().expect("leader has a follower") as usize;
            let follower = &mut self.ants[f];
            follower.partner = None;
            follower.state = AntState::TravelingToKnownFood;
            follower.known_food = Some(target);
            ctx.emit(
                Some(follower.id),
                "learn",
                &[("x", target.x as f64), ("y", target.y as f64), ("recruited", 1.0)],
            );
        }
        if !self.try_harvest(i, ctx) {
            let ant = &mut self.ants[i];
            ant.known_food = None;
            ant.state = AntState::Seeking;
            ctx.emit(Some(ant.id), "forget", &[]);
        }
    }
}

impl Model for Colony {
    fn live_agents(&self, out: &mut Vec<AgentId>) {
        out.extend(self.ants.iter().map(|a| a.id));
    }

    fn begin_tick(&mut self, _ctx: &mut TickContext<'_>) {
        self.grid
            .pheromone
            .evaporate(self.params.evaporation_rate)
            .expect("validated rate");
    }

    fn update_agent(&mut self, agent: AgentId, ctx: &mut TickContext<'_>) {
        let i = agent as usize;
        match self.params.strategy {
            Strategy::MassRecruitment => self.update_mass(i, ctx),
            Strategy::TandemRecruitment => self.update_tandem(i, ctx),
        }
    }

    fn metrics(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("units_delivered", self.units_delivered as f64),
            ("ant_steps", self.ant_steps as f64),
            ("food_remaining", self.grid.food_remaining() as f64),
            ("informed_ants", self.informed_ants() as f64),
            ("pheromone_total", self.grid.pheromone.total()),
        ]
    }

    fn summary(&self, tick: u64) -> Vec<(&'static str, f64)> {
        let mut out = self.metrics();
        out.push(("efficiency", self.efficiency()));
        out.push(("depleted", self.depleted_at.is_some() as u8 as f64));
        // Censored at the final tick when the food never ran out.
        out.push(("time_to_depletion", self.depleted_at.unwrap_or(tick) as f64));
        out
    }

    fn is_finished(&self, tick: u64) -> bool {
        tick >= self.params.max_ticks || (self.grid.all_depleted() && self.units_carried() == 0)
    }
}
