use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the toolkit.
#[derive(Debug, Error)]
pub enum DarpError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("request {request} is infeasible: {reason}")]
    InfeasibleRequest { request: usize, reason: String },

    #[error("instance is infeasible: request {request} has no remaining pickup event")]
    InfeasibleInstance { request: usize },

    #[error("precedence violated: delivery of request {request} precedes its pickup")]
    Precedence { request: usize },

    #[error("fixing arc {arc} leaves an empty time interval at event {event}")]
    InfeasibleFixing { arc: usize, event: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("instance too large for exhaustive enumeration: n = {n} exceeds cap {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("export error: {0}")]
    Export(String),

    #[error("model import error at line {line}: {message}")]
    Import { line: usize, message: String },

    #[error("backend executable `{program}` could not be started: {source}")]
    BackendMissing {
        program: String,
        #[source]
        source: std::io::Error,
    },

    #[error("backend exited with status {code:?}: {stderr}")]
    BackendFailed { code: Option<i32>, stderr: String },

    #[error("could not parse backend solution file {path}: {message}")]
    SolutionParse { path: PathBuf, message: String },

    #[error("malformed solution: {0}")]
    MalformedSolution(String),

    #[error("route extraction failed: {0}")]
    Extraction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = DarpError> = std::result::Result<T, E>;
