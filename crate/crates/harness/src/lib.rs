//! Experiment harness: disorder-controlled generators, a seeded parallel
//! runner, bound verifiers and report aggregation.

pub mod error;
pub mod generators;
pub mod report;
pub mod runner;
pub mod seeds;
pub mod spec;
pub mod verify;

pub use error::{HarnessError, Result};
pub use report::{Report, Summary};
pub use runner::{run_experiment, TrialRow};
pub use spec::{Algorithm, ExperimentSpec, GeneratorKind, Workload};
pub use verify::{verify, Verdict};
