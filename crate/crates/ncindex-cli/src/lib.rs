//! Configuration-driven orchestration: build a model, run the requested index
//! methods, emit comparison reports.

mod config;
mod emit;
mod runner;

pub use config::{ConfigError, KeyValues, OutputFormat};
pub use emit::{emit_report, parse_csv_report};
pub use runner::{run_config, run_config_text, RunError, RunSpec};
