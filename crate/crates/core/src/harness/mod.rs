//! Case configuration, runs, outputs and convergence studies.

pub mod cases;
pub mod config;
pub mod convergence;
pub mod output;
pub mod run;

pub use cases::{builtin, CASES};
pub use config::{Domain, Problem, RunConfig};
pub use convergence::{convergence_study, lsq_slope, ConvergenceReport};
pub use output::write_outputs;
pub use run::{l1_error, reference_profile, run_case, AuditRow, CaseResult, L1Errors, Profile};
