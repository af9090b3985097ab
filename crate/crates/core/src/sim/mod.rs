//! Simulation scenarios with known truth, run classification and
//! replicated detection-rate grids.

mod classify;
mod grid;
mod scenario;

pub use classify::{classify, target_names, RunClassification};
pub use grid::{
    replication_seed, run_grid, CellKey, CellResult, DetectionTable, GridResult, SplitStats,
};
pub use scenario::{generate, generate_with, signal, theoretical_r2, ScenarioSpec};
