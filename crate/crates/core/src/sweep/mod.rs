//! Parameter sweeps driven by a TOML config.

pub mod config;
pub mod emit;
pub mod run;

pub use config::{parse_config, ConfigError, OutputFormat, SensorConfig, SensorKind, SweepAxis, SweepConfig};
pub use emit::{emit, metadata_path, to_csv, to_json};
pub use run::{evaluate_point, run_sweep, Curve, RowStatus, SweepRow, COLUMNS};
