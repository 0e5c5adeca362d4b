//! Batch replay, experiment suites and tabular reports over the
//! assessment pipeline.

pub mod curves;
pub mod error;
pub mod experiment;
pub mod replay;
pub mod synth;

pub use error::CliError;
pub use experiment::{run_experiments, ExperimentConfig, ExperimentSummary};
pub use replay::{replay_record, ReplayOptions, ReplayReport};
pub use synth::{synthesize, write_method_suite, SuiteSpec, SynthSpec};
