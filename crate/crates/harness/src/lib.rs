//! Verification harness: run configuration, suite orchestration and report
//! emission for the `wittcheck` binary.

pub mod config;
pub mod report;
pub mod run;
pub mod specfile;

pub use config::{ConfigError, ExtensionSource, Format, RunConfig, Suite};
pub use report::{emit_report, Report, Status, SuiteRecord};
pub use run::{run, RunOutcome};
