//! Front end of the `lgsim` binary: configuration, commands and tables.

mod commands;
mod config;
mod table;

pub use commands::{run, CliError, DEFAULT_SEED};
pub use config::{Command, ConfigError, OutputFormat, Range, SweepConfig};
pub use table::{
    read_records, AdroitnessRow, ClassicRow, Record, Rows, SweepRecord, Table, SWEEP_COLUMNS,
};
