//! Front end for the `bracket-bvp` binary: flag parsing, the command
//! dispatcher and the CSV/JSON writers.

mod args;
pub mod output;
mod run;

pub use args::{parse_args, ArgsError, Command, OperatorParams, OutputFormat, ProblemSource, RunConfig};
pub use output::{emit_trace_csv, parse_trace_csv, summary_path};
pub use run::{main_with_args, run, worker_threads, CliError};
