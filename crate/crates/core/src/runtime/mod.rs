//! The interpreter: a heap of object instances, a link store and a call
//! stack, advanced one OAL command at a time.
//!
//! Method bodies are lowered to a flat instruction list in which every
//! statement starts with a command marker. A step runs from one marker to the
//! next, so calls nested inside expressions simply push a frame and the
//! callee's commands become steps of their own.

mod heap;
mod lower;
mod ops;
mod session;
mod snapshot;

use std::fmt;

pub use heap::{Link, ObjectInstance};
pub(crate) use lower::{bound_names, is_static_receiver};
pub(crate) use session::check_entry;
pub use session::{run, start_session, ExecSession, SessionOptions, DEFAULT_STEP_BUDGET, MAX_CALL_DEPTH};
pub use snapshot::Snapshot;

use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Ready,
    Running,
    Paused,
    Finished,
    Failed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ready => "ready",
            Status::Running => "running",
            Status::Paused => "paused",
            Status::Finished => "finished",
            Status::Failed => "failed",
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, Status::Finished | Status::Failed)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    StaleHandle,
    NoneDereference,
    TypeMismatch,
    DivisionByZero,
    UnknownMethod,
    ArityMismatch,
    CallDepthExceeded,
    StepBudgetExhausted,
    UnknownVariable,
    UnknownAttribute,
    UnknownClass,
    UnknownRelation,
    ArithmeticOverflow,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::StaleHandle => "stale-handle",
            ErrorKind::NoneDereference => "none-dereference",
            ErrorKind::TypeMismatch => "type-mismatch",
            ErrorKind::DivisionByZero => "division-by-zero",
            ErrorKind::UnknownMethod => "unknown-method",
            ErrorKind::ArityMismatch => "arity-mismatch",
            ErrorKind::CallDepthExceeded => "call-depth-exceeded",
            ErrorKind::StepBudgetExhausted => "step-budget-exhausted",
            ErrorKind::UnknownVariable => "unknown-variable",
            ErrorKind::UnknownAttribute => "unknown-attribute",
            ErrorKind::UnknownClass => "unknown-class",
            ErrorKind::UnknownRelation => "unknown-relation",
            ErrorKind::ArithmeticOverflow => "arithmetic-overflow",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}: {message}", kind.as_str())]
pub struct RuntimeError {
    pub kind: ErrorKind,
    pub message: String,
}

impl RuntimeError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        RuntimeError { kind, message: message.into() }
    }
}

/// Why a session could not be started.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StartError {
    #[error("entry method {class}.{method} is empty; an entry method must have at least one command in it")]
    EmptyBodyEntry { class: String, method: String },
    #[error("unknown entry {class}.{method}")]
    UnknownEntry { class: String, method: String },
    #[error("{class}.{method} takes {expected} argument(s), {given} given")]
    ArityMismatch { class: String, method: String, expected: usize, given: usize },
    #[error("bad entry argument {index}: {reason}")]
    BadArgument { index: usize, reason: String },
}

impl StartError {
    pub fn kind(&self) -> &'static str {
        match self {
            StartError::EmptyBodyEntry { .. } => "empty-body-entry",
            StartError::UnknownEntry { .. } => "unknown-entry",
            StartError::ArityMismatch { .. } => "arity-mismatch",
            StartError::BadArgument { .. } => "bad-argument",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    /// One command ran; the session is paused at the next one.
    Progressed,
    /// The entry method returned, with its value if it returned one.
    Finished(Option<Value>),
    Failed(RuntimeError),
}
