//! Batch front end for `multires-core`: problem files in, reports and
//! trace files out.

pub mod commands;
pub mod problem;
pub mod trace;

pub use commands::{run, Command, Options, Output};
pub use problem::ProblemFile;
pub use trace::TraceFile;

/// Front-end failures.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("malformed JSON at {line}:{column}: {msg}")]
    Json { line: usize, column: usize, msg: String },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] multires_core::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 when the input is outside the supported class or the algorithm
    /// gave up (the diagnostic is structured), 1 for malformed input.
    pub fn exit_code(&self) -> i32 {
        use multires_core::Error as E;
        match self {
            CliError::Core(
                E::UnsupportedLocus(_) | E::NotNice(_) | E::NonTermination(_) | E::LimitExceeded(_) | E::ConditionIotaFails(_),
            ) => 2,
            _ => 1,
        }
    }
}
