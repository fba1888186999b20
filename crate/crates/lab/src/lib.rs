//! Config-driven experiments over `loopspace-core`.
//!
//! An [`ExperimentConfig`] names one of nine experiments plus its grids and
//! tolerances; [`run_experiment`] turns it into a [`ResultTable`] whose
//! assertions record each checked statement, and [`write_outputs`] puts
//! `results.csv`, `report.json` and a gnuplot script on disk.

pub mod config;
pub mod error;
pub mod experiments;
pub mod plot;
pub mod table;

pub use config::{Experiment, ExperimentConfig};
pub use error::{LabError, Result};
pub use experiments::{preset, run_experiment, write_outputs, OutputFiles};
pub use plot::{emit_plot_data, plot_script};
pub use table::{format_float, Assertion, Relation, ResultTable};

/// Sizes the global rayon pool from `LOOPSPACE_THREADS`, if set.
pub fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("LOOPSPACE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| LabError::Usage(format!("LOOPSPACE_THREADS={raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| LabError::Usage(format!("thread pool: {e}")))
}
