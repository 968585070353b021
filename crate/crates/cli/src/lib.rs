//! Library side of the `cuttail` command-line tool: input parsing, job
//! runners, report serialization and plot output.

pub mod error;
pub mod input;
pub mod job;
pub mod output;
pub mod plot;

pub use error::CliError;
pub use input::{parse_matrix_file, parse_matrix_text, InputSource};
pub use job::{run, Command, JobConfig, OutputFormat, Report, Tolerances};
