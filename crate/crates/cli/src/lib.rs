//! Front end for `rootex`: instance files, factor specifications, result
//! records and the subcommands behind the binary.

pub mod commands;
pub mod factors;
pub mod instance;
pub mod record;

pub use commands::{generate, run, run_batch, run_file, Command, GenMode, Options};
pub use instance::{Instance, InstanceFile, Int};
pub use record::{ResultRecord, Status};
