//! Scenario loading, replicated batches, validation against reference
//! values, two-sample comparison and CSV export.

mod batch;
mod export;
mod scenario;
pub mod stats;

pub use batch::{
    compare, compare_samples, load_reference, replication_seed, run_batch, run_model, run_once, validate_baseline,
    BatchResult, Comparison, MetricCheck, Reference, Replication, ValidationReport,
};
pub use export::{export_csv, format_g6, parse_csv, rows_to_csv, CsvRow, CSV_HEADER};
pub use scenario::{load_scenario, ModelConfig, Scenario};

/// One line per built-in model: name and a short description.
pub const MODELS: [(&str, &str); 3] = [
    ("ant_foraging", "ants on a grid collecting food by mass or tandem recruitment"),
    ("retail", "customers, staff and a manager in a department store"),
    ("team_comms", "engineering teams sharing facts directly or through liaisons"),
];
