//! Department-store floor with customers, sales staff and an optional
//! manager.
//!
//! Customers arrive as a Poisson stream at department 0. Goal-directed
//! shoppers walk one department per tick to their target and queue there;
//! browsers wander between neighbouring departments and now and then ask
//! for help where they stand. Queues are FIFO and waiting customers give up
//! when their patience runs out. Each staff member serves the head of its
//! department's queue, and every finished service ends in a purchase draw.

mod store;

use serde::{Deserialize, Serialize};

pub use store::{
    AgeBand, AgeMultipliers, Customer, CustomerState, Department, Manager, RetailParams,
    ShopperMode, StaffMember, StaffState, Store,
};

use crate::engine::RunResult;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaffSpec {
    pub department: u32,
    #[serde(default)]
    pub skill: f64,
    #[serde(default)]
    pub attitude: f64,
    #[serde(default = "default_band")]
    pub age_band: AgeBand,
}

fn default_band() -> AgeBand {
    AgeBand::From25To45
}

/// Model-specific part of a `retail` scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetailConfig {
    pub departments: u32,
    pub staff: Vec<StaffSpec>,
    pub manager: Option<Manager>,
    #[serde(flatten)]
    pub params: RetailParams,
}

impl Default for RetailConfig {
    fn default() -> Self {
        Self {
            departments: 3,
            staff: Vec::new(),
            manager: None,
            params: RetailParams::default(),
        }
    }
}

impl RetailConfig {
    pub const KEYS: &'static [&'static str] = &[
        "departments",
        "staff",
        "manager",
        "arrival_rate",
        "browser_fraction",
        "base_service_time",
        "skill_speedup",
        "base_purchase_prob",
        "attitude_weight",
        "goal_bonus",
        "impulse_prob",
        "browse_exit_prob",
        "patience_min",
        "patience_max",
        "age_service_multiplier",
    ];

    /// `n` staff with the given skill and attitude, dealt round-robin over
    /// the departments.
    pub fn with_uniform_staff(mut self, n: u32, skill: f64, attitude: f64) -> Self {
        self.staff = (0..n)
            .map(|i| StaffSpec {
                department: i % self.departments,
                skill,
                attitude,
                age_band: default_band(),
            })
            .collect();
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.build().map(|_| ())
    }

    pub fn build(&self) -> Result<Store> {
        let staff = self
            .staff
            .iter()
            .enumerate()
            .map(|(i, s)| StaffMember {
                id: i as u32,
                department: s.department,
                age_band: s.age_band,
                skill: s.skill,
                attitude: s.attitude,
                state: StaffState::Idle,
            })
            .collect();
        Store::new(self.departments, staff, self.manager, self.params.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RetailMetrics {
    pub conversions: u64,
    pub reneges: u64,
    pub served: u64,
    /// 0 when nobody was served.
    pub mean_wait: f64,
    pub staff_utilization: f64,
    pub customers_entered: u64,
    pub customers_exited: u64,
}

/// Productivity figures of a finished run of a [`Store`].
pub fn retail_metrics(run: &RunResult) -> RetailMetrics {
    let get = |k: &str| run.summary.get(k).copied().unwrap_or(0.0);
    RetailMetrics {
        conversions: get("conversions") as u64,
        reneges: get("reneges") as u64,
        served: get("served") as u64,
        mean_wait: get("mean_wait"),
        staff_utilization: get("staff_utilization"),
        customers_entered: get("customers_entered") as u64,
        customers_exited: get("customers_exited") as u64,
    }
}
