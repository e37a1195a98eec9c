//! Parameter sweeps: configuration, execution and table output.

pub mod config;
pub mod emit;
pub mod run;

pub use config::{parse_config, ConfigError, Envelope, Family, GridSetting, OutputFormat, Param, ParamRange, SweepSpec};
pub use emit::{emit, format_g12, CSV_HEADER};
pub use run::{run_sweep, Point, Probabilities, RunOptions, RunRecord};
