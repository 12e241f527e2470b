//! Model export, external backends, SEC separation, route extraction,
//! validation and the exhaustive oracle.

pub mod backend;
pub mod export;
pub mod oracle;
pub mod routes;
pub mod schedule;
pub mod sec;

pub use backend::{solve_external, Backend, BackendConfig, SolveResult, SolveStatus};
pub use export::{export_model, import_model, ExportFormat, RawModel};
pub use oracle::{brute_force, OracleSolution, Tour, ORACLE_MAX_REQUESTS};
pub use routes::{extract_routes, validate_solution, Route, ValidationReport, Violation, ViolationKind};
pub use schedule::{latest_schedule, schedule_route};
pub use sec::{add_sec_rows, separate_sec, solve_with_sec_loop, SecLoopOutcome};
