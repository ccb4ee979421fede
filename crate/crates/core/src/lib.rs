//! Executable class models: a class diagram fused with Object Action
//! Language method bodies, interpreted over a live object graph with a
//! replayable event trace, and translated to a single-file Python program.

pub mod codegen;
pub mod ingest;
pub mod json;
pub mod model;
pub mod oal;
pub mod runtime;
pub mod trace;
pub mod value;
