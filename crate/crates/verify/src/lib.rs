//! Verification suites over the `qshelf` engine, with deterministic text and
//! JSON reports.

pub mod config;
pub mod evidence;
pub mod report;
pub mod suites;

pub use config::{Config, ConfigError, Format};
pub use evidence::Fault;
pub use report::{CheckRecord, Status, VerificationReport};
pub use suites::{run_suite, SUITES};
