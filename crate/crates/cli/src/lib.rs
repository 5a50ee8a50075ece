//! Batch front end for the mirror solvers: JSON configs in, CSV tables,
//! vessel reports and gnuplot scripts out.

pub mod config;
pub mod error;
pub mod plot;
pub mod run;
pub mod table;

pub use config::{Mode, ScanConfig};
pub use error::CliError;
pub use plot::{emit_plot_script, Layout};
pub use run::{run, run_config, Overrides};
