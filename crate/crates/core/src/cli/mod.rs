//! The `qsig` command line: argument parsing, experiment orchestration and
//! report emission.

pub mod config;
pub mod report;
pub mod run;

pub use config::{ExperimentConfig, OutputFormat, SweepAxis, SweepSpec};
pub use report::{emit_sweep_plotdata, write_jsonl, RunHeader};
pub use run::{main_with_args, run_experiment, ExitStatus, RunOutput};
