//! Batch commands and the HTTP stepping service for `cerl`.

pub mod commands;
pub mod service;

pub use commands::{
    check_equiv, eval_source, explore_node, load_node, load_program, load_trace, replay, EvalReport,
    ExploreSummary,
};
pub use service::{router, serve, AppState};
