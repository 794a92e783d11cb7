//! Experiment runner behind the `equilattice` binary: JSON configs in,
//! CSV tables with JSON sidecars and a `report.json` out.

pub mod config;
pub mod output;
pub mod presets;
pub mod run;

pub use config::{ConfigError, Experiment, ExperimentConfig};
pub use presets::{list_presets, PresetInfo};
pub use run::{run, Assertion, RunReport};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "EQUILATTICE_OUT";
