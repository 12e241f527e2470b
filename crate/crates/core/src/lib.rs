//! Dial-a-ride toolkit: event-based graph, MILP formulations (LB, EB, LAEB,
//! ALAEB), bound preprocessing, valid inequalities, an external-solver
//! adapter and an exhaustive oracle for small instances.

pub mod cuts;
pub mod error;
pub mod event_graph;
pub mod gen;
pub mod harness;
pub mod instance;
pub mod models;
pub mod preprocessing;
pub mod solver;

pub use error::{DarpError, Result};
pub use instance::{DarpInstance, Loc, Minutes, Request, RequestKind, Window};
