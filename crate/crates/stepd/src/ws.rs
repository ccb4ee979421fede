use std::io::ErrorKind;
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, TryRecvError};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use serde_json::Value as Json;
use tungstenite::{Message, WebSocket};
use xuml_core::ingest::FusedModel;
use xuml_core::runtime::SessionOptions;

use crate::executor::Executor;
use crate::protocol::error_reply;
use crate::ServeError;

const POLL: Duration = Duration::from_millis(10);

/// WebSocket transport serving one client at a time.
pub struct WsServer {
    listener: TcpListener,
    fused: Arc<FusedModel>,
    options: SessionOptions,
    busy: Arc<AtomicBool>,
}

impl WsServer {
    pub fn bind(addr: &str, fused: Arc<FusedModel>, options: SessionOptions) -> Result<WsServer, ServeError> {
        let listener = TcpListener::bind(addr).map_err(|e| ServeError::Bind(addr.to_string(), e))?;
        Ok(WsServer { listener, fused, options, busy: Arc::new(AtomicBool::new(false)) })
    }

    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Accepts connections forever.
    pub fn serve(self) -> Result<(), ServeError> {
        for stream in self.listener.incoming() {
            let stream = match stream {
                Ok(s) => s,
                Err(e) => {
                    log::warn!("accept failed: {e}");
                    continue;
                }
            };
            if self.busy.swap(true, Ordering::SeqCst) {
                thread::spawn(move || reject_busy(stream));
                continue;
            }
            let (fused, options, busy) = (Arc::clone(&self.fused), self.options, Arc::clone(&self.busy));
            thread::spawn(move || {
                if let Err(e) = handle_client(stream, fused, options) {
                    log::info!("client connection ended: {e}");
                }
                busy.store(false, Ordering::SeqCst);
            });
        }
        Ok(())
    }
}

fn reject_busy(stream: TcpStream) {
    if let Ok(mut ws) = tungstenite::accept(stream) {
        let frame = error_reply(&Json::Null, "busy", "another client is connected");
        let _ = ws.send(Message::text(frame));
        let _ = ws.close(None);
        let _ = ws.flush();
    }
}

fn would_block(e: &tungstenite::Error) -> bool {
    matches!(e, tungstenite::Error::Io(io) if matches!(io.kind(), ErrorKind::WouldBlock | ErrorKind::TimedOut))
}

fn handle_client(stream: TcpStream, fused: Arc<FusedModel>, options: SessionOptions) -> Result<(), ServeError> {
    let peer = stream.peer_addr().ok();
    let mut ws: WebSocket<TcpStream> = tungstenite::accept(stream).map_err(|e| ServeError::Handshake(e.to_string()))?;
    ws.get_mut().set_read_timeout(Some(POLL))?;
    log::info!("client connected: {peer:?}");
    let (req_tx, req_rx) = mpsc::channel();
    let (out_tx, out_rx) = mpsc::channel::<String>();
    // Dropping `out_rx` on return tells the executor the client is gone.
    let _executor = Executor::new(fused, options, req_rx, out_tx).spawn();
    loop {
        let mut wrote = false;
        loop {
            match out_rx.try_recv() {
                Ok(frame) => {
                    ws.write(Message::text(frame)).map_err(ws_error)?;
                    wrote = true;
                }
                Err(TryRecvError::Empty) => break,
                Err(TryRecvError::Disconnected) => return Ok(()),
            }
        }
        if wrote {
            ws.flush().map_err(ws_error)?;
        }
        match ws.read() {
            Ok(Message::Text(text)) => {
                let _ = req_tx.send(text.as_str().to_string());
            }
            Ok(Message::Binary(bytes)) => {
                let _ = req_tx.send(String::from_utf8_lossy(&bytes).into_owned());
            }
            Ok(Message::Close(_)) => {
                log::info!("client closed: {peer:?}");
                return Ok(());
            }
            Ok(_) => {}
            Err(e) if would_block(&e) => {}
            Err(tungstenite::Error::ConnectionClosed | tungstenite::Error::AlreadyClosed) => return Ok(()),
            Err(e) => return Err(ws_error(e)),
        }
    }
}

fn ws_error(e: tungstenite::Error) -> ServeError {
    ServeError::WebSocket(e.to_string())
}
