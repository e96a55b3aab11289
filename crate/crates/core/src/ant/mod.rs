//! Grid-world ant colony with mass (pheromone trail) and tandem (one-to-one)
//! recruitment.
//!
//! Mass recruiters leave the nest on a trail-biased random walk, depositing
//! `deposit_seek` on each cell they leave, and return by retracing their
//! loop-erased outbound path while depositing `deposit_return`. Tandem
//! scouts random-walk without pheromone; a scout that finds food carries a
//! unit home and, on every later nest visit, leads one idle nestmate back to
//! the source along a greedy Chebyshev path.

mod colony;
mod grid;

use serde::{Deserialize, Serialize};

pub use colony::{choose_step_mass, greedy_step, Ant, AntState, Colony, ForagingParams, Strategy};
pub use grid::{Coord, FoodSource, GridWorld, PheromoneField};

use crate::engine::{rng, RngStream, RunResult};
use crate::error::{check_positive, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSize {
    pub width: u32,
    pub height: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoodSpec {
    pub cell: Coord,
    pub units: u32,
}

/// Sources placed at distinct random cells (never the nest) from the
/// run's setup stream, so each replication gets its own layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomFood {
    pub count: u32,
    pub units: u32,
}

/// Model-specific part of an `ant_foraging` scenario. Unknown keys are
/// rejected by the scenario loader against [`AntConfig::KEYS`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AntConfig {
    pub grid: GridSize,
    /// Defaults to the grid centre.
    pub nest: Option<Coord>,
    pub food: Vec<FoodSpec>,
    pub random_food: Option<RandomFood>,
    #[serde(flatten)]
    pub params: ForagingParams,
}

impl Default for AntConfig {
    fn default() -> Self {
        Self {
            grid: GridSize {
                width: 50,
                height: 50,
            },
            nest: None,
            food: Vec::new(),
            random_food: None,
            params: ForagingParams::default(),
        }
    }
}

impl AntConfig {
    pub const KEYS: &'static [&'static str] = &[
        "grid",
        "nest",
        "food",
        "random_food",
        "strategy",
        "n_ants",
        "evaporation_rate",
        "deposit_seek",
        "deposit_return",
        "exploration_prob",
        "smoothing_bias",
        "max_ticks",
        "scout_fraction",
        "avoid_backtrack",
    ];

    pub fn nest(&self) -> Coord {
        self.nest.unwrap_or(Coord::new(
            (self.grid.width / 2) as i32,
            (self.grid.height / 2) as i32,
        ))
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let fixed: Vec<FoodSource> = self
            .food
            .iter()
            .map(|f| FoodSource::new(f.cell, f.units))
            .collect();
        GridWorld::new(self.grid.width, self.grid.height, self.nest(), fixed)?;
        if let Some(r) = self.random_food {
            check_positive("random_food.units", r.units)?;
            let free = self.grid.width as u64 * self.grid.height as u64 - 1 - self.food.len() as u64;
            if r.count as u64 > free {
                return Err(Error::range(
                    "random_food.count",
                    r.count,
                    &format!("<= {free} free cells"),
                ));
            }
        }
        Ok(())
    }

    /// Initial colony for a run seeded with `seed`.
    pub fn build(&self, seed: u64) -> Result<Colony> {
        self.validate()?;
        let nest = self.nest();
        let mut food: Vec<FoodSource> = self
            .food
            .iter()
            .map(|f| FoodSource::new(f.cell, f.units))
            .collect();
        if let Some(r) = self.random_food {
            let mut setup = RngStream::new(seed, rng::SETUP_STREAM);
            let (w, h) = (self.grid.width as u64, self.grid.height as u64);
            while food.len() < self.food.len() + r.count as usize {
                let cell = Coord::new(setup.below(w) as i32, setup.below(h) as i32);
                if cell != nest && food.iter().all(|f| f.cell != cell) {
                    food.push(FoodSource::new(cell, r.units));
                }
            }
        }
        let grid = GridWorld::new(self.grid.width, self.grid.height, nest, food)?;
        Colony::new(grid, self.params.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ForagingMetrics {
    pub time_to_depletion: Option<u64>,
    pub units_delivered: u64,
    pub ant_steps: u64,
    pub efficiency: f64,
}

/// Foraging outcome of a finished run of a [`Colony`].
pub fn foraging_metrics(run: &RunResult) -> ForagingMetrics {
    let get = |k: &str| run.summary.get(k).copied().unwrap_or(0.0);
    ForagingMetrics {
        time_to_depletion: (get("depleted") == 1.0).then(|| get("time_to_depletion") as u64),
        units_delivered: get("units_delivered") as u64,
        ant_steps: get("ant_steps") as u64,
        efficiency: get("efficiency"),
    }
}
