use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid cell, serialized as `[x, y]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i32; 2]", into = "[i32; 2]")]
pub struct Coord {
    pub x: i32,
    pub y: i32,
}

impl Coord {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn chebyshev(self, other: Coord) -> i32 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }

    pub fn manhattan(self, other: Coord) -> i32 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }

    pub fn is_adjacent_or_same(self, other: Coord) -> bool {
        self.chebyshev(other) <= 1
    }
}

impl From<[i32; 2]> for Coord {
    fn from([x, y]: [i32; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Coord> for [i32; 2] {
    fn from(c: Coord) -> Self {
        [c.x, c.y]
    }
}

const OFFSETS: [(i32, i32); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Per-cell trail intensity. Never negative.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PheromoneField {
    width: u32,
    height: u32,
    cells: Vec<f64>,
}

impl PheromoneField {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            cells: vec![0.0; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn in_bounds(&self, c: Coord) -> bool {
        c.x >= 0 && c.y >= 0 && (c.x as u32) < self.width && (c.y as u32) < self.height
    }

    fn index(&self, c: Coord) -> Result<usize> {
        if !self.in_bounds(c) {
            return Err(Error::OutOfBounds {
                x: c.x as i64,
                y: c.y as i64,
                width: self.width,
                height: self.height,
            });
        }
        Ok(c.y as usize * self.width as usize + c.x as usize)
    }

    pub fn get(&self, c: Coord) -> Result<f64> {
        Ok(self.cells[self.index(c)?])
    }

    /// Intensity of an in-bounds cell.
    pub fn at(&self, c: Coord) -> f64 {
        self.cells[c.y as usize * self.width as usize + c.x as usize]
    }

    /// Multiplies every cell by `1 - rate`.
    pub fn evaporate(&mut self, rate: f64) -> Result<()> {
        crate::error::check_unit("evaporation_rate", rate)?;
        let keep = 1.0 - rate;
        for v in &mut self.cells {
            *v *= keep;
        }
        Ok(())
    }

    pub fn deposit(&mut self, c: Coord, amount: f64) -> Result<()> {
        crate::error::check_non_negative("amount", amount)?;
        let i = self.index(c)?;
        self.cells[i] += amount;
        Ok(())
    }

    /// Sum over cells in row-major order.
    pub fn total(&self) -> f64 {
        self.cells.iter().sum()
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    /// In-bounds 8-neighbourhood of `c`, in a fixed order.
    pub fn neighbors(&self, c: Coord) -> impl Iterator<Item = Coord> + '_ {
        OFFSETS
            .iter()
            .map(move |&(dx, dy)| Coord::new(c.x + dx, c.y + dy))
            .filter(|n| self.in_bounds(*n))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoodSource {
    pub cell: Coord,
    pub remaining: u32,
    pub initial: u32,
}

impl FoodSource {
    pub fn new(cell: Coord, units: u32) -> Self {
        Self {
            cell,
            remaining: units,
            initial: units,
        }
    }

    /// Takes one unit.
    pub fn harvest(&mut self) -> Result<()> {
        if self.remaining == 0 {
            return Err(Error::NoFood);
        }
        self.remaining -= 1;
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.remaining == 0
    }
}

/// Walled (non-toroidal) grid with one nest and any number of food sources.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridWorld {
    pub nest: Coord,
    pub food: Vec<FoodSource>,
    pub pheromone: PheromoneField,
}

impl GridWorld {
    pub fn new(width: u32, height: u32, nest: Coord, food: Vec<FoodSource>) -> Result<Self> {
        crate::error::check_positive("grid.width", width)?;
        crate::error::check_positive("grid.height", height)?;
        let pheromone = PheromoneField::new(width, height);
        pheromone.index(nest)?;
        for (i, f) in food.iter().enumerate() {
            pheromone.index(f.cell)?;
            if f.cell == nest {
                return Err(Error::Config(format!("food source {i} sits on the nest")));
            }
            if food[..i].iter().any(|g| g.cell == f.cell) {
                return Err(Error::Config(format!("food source {i} duplicates a cell")));
            }
            crate::error::check_positive("food.units", f.initial)?;
        }
        Ok(Self {
            nest,
            food,
            pheromone,
        })
    }

    pub fn width(&self) -> u32 {
        self.pheromone.width()
    }

    pub fn height(&self) -> u32 {
        self.pheromone.height()
    }

    pub fn in_bounds(&self, c: Coord) -> bool {
        self.pheromone.in_bounds(c)
    }

    pub fn source_at(&self, c: Coord) -> Option<usize> {
        self.food.iter().position(|f| f.cell == c)
    }

    pub fn food_remaining(&self) -> u64 {
        self.food.iter().map(|f| f.remaining as u64).sum()
    }

    pub fn food_initial(&self) -> u64 {
        self.food.iter().map(|f| f.initial as u64).sum()
    }

    pub fn all_depleted(&self) -> bool {
        !self.food.is_empty() && self.food.iter().all(FoodSource::is_empty)
    }
}
