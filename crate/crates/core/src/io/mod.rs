//! Configuration, snapshot and report files.

mod config;
mod report;
mod snapshot;

pub use config::{
    parse_config, Coupling, CouplingMode, Domain, GridSection, Initial, Output, ProfileParameters, RunConfig,
    RunSection, Scheme, Solver, PROFILE_NAMES,
};
pub use report::{ErrorRecord, Metadata, Report, ReportKind};
pub use snapshot::{format_sig, read_snapshot, write_snapshot, write_snapshot_digits, SnapshotHeader, DEFAULT_DIGITS};
