//! Stepping service: drives one execution session on behalf of a client
//! over newline-delimited stdio or a WebSocket.

mod executor;
pub mod protocol;
mod stdio;
mod ws;

use thiserror::Error;

pub use executor::Executor;
pub use stdio::{serve_lines, serve_stdio};
pub use ws::WsServer;

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("cannot bind {0}: {1}")]
    Bind(String, std::io::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("websocket handshake failed: {0}")]
    Handshake(String),
    #[error("websocket: {0}")]
    WebSocket(String),
    #[error("executor thread panicked")]
    ExecutorPanicked,
}
