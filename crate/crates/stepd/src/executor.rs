use std::collections::VecDeque;
use std::sync::mpsc::{Receiver, Sender};
use std::sync::Arc;
use std::thread::{self, JoinHandle};

use serde_json::{json, Value as Json};
use xuml_core::ingest::{model_json_compact, FusedModel};
use xuml_core::runtime::{start_session, ExecSession, SessionOptions, Status, StepOutcome};

use crate::protocol::{error_reply, event_frame, ok_reply, parse_request, Command, Request, MALFORMED};

/// Output side went away: the client is gone.
struct Disconnected;

/// Owns the single session and answers requests in arrival order.
pub struct Executor {
    fused: Arc<FusedModel>,
    options: SessionOptions,
    session: Option<ExecSession>,
    input: Receiver<String>,
    out: Sender<String>,
    pending: VecDeque<String>,
}

impl Executor {
    pub fn new(fused: Arc<FusedModel>, options: SessionOptions, input: Receiver<String>, out: Sender<String>) -> Self {
        Executor { fused, options, session: None, input, out, pending: VecDeque::new() }
    }

    /// Runs on its own thread until the input closes and every queued
    /// request is answered, or until the output closes.
    pub fn spawn(self) -> JoinHandle<()> {
        thread::Builder::new().name("stepd-executor".into()).spawn(move || self.run()).expect("spawn executor")
    }

    pub fn run(mut self) {
        loop {
            let line = match self.pending.pop_front() {
                Some(line) => line,
                None => match self.input.recv() {
                    Ok(line) => line,
                    Err(_) => break,
                },
            };
            if self.handle(&line).is_err() {
                log::debug!("client gone; discarding session");
                break;
            }
        }
    }

    fn send(&self, frame: String) -> Result<(), Disconnected> {
        self.out.send(frame).map_err(|_| Disconnected)
    }

    fn push_events(&mut self) -> Result<(), Disconnected> {
        let events = self.session.as_mut().map(ExecSession::drain_events).unwrap_or_default();
        for e in &events {
            self.send(event_frame(e))?;
        }
        Ok(())
    }

    fn handle(&mut self, line: &str) -> Result<(), Disconnected> {
        if line.trim().is_empty() {
            return Ok(());
        }
        match parse_request(line) {
            Ok(request) => self.dispatch(request),
            Err(bad) => self.send(error_reply(&bad.id, MALFORMED, &bad.message)),
        }
    }

    fn status_data(&self) -> String {
        let status = self.session.as_ref().map(|s| s.status().as_str()).unwrap_or("idle");
        json!({ "status": status }).to_string()
    }

    /// The session a stepping command may act on, or the error reply kind.
    fn live_session(&self) -> Result<(), (&'static str, &'static str)> {
        match &self.session {
            None => Err(("no-session", "no session; send start first")),
            Some(s) if s.status().is_terminal() => {
                Err(("session-finished", "the session has ended; send stop or start"))
            }
            Some(_) => Ok(()),
        }
    }

    fn dispatch(&mut self, req: Request) -> Result<(), Disconnected> {
        let id = req.id;
        match req.command {
            Command::Start { class, method, args } => {
                if self.session.as_ref().is_some_and(|s| !s.status().is_terminal()) {
                    return self.send(error_reply(&id, "session-already-active", "a session is already active"));
                }
                self.session = None;
                match start_session(Arc::clone(&self.fused), &class, &method, args, self.options) {
                    Ok(session) => {
                        self.session = Some(session);
                        self.push_events()?;
                        self.send(ok_reply(&id, &self.status_data()))
                    }
                    Err(e) => self.send(error_reply(&id, "bad-entry", &format!("{}: {e}", e.kind()))),
                }
            }
            Command::Step => {
                if let Err((kind, message)) = self.live_session() {
                    return self.send(error_reply(&id, kind, message));
                }
                self.session.as_mut().expect("live").step_command();
                self.push_events()?;
                self.send(ok_reply(&id, &self.status_data()))
            }
            Command::Continue => {
                if let Err((kind, message)) = self.live_session() {
                    return self.send(error_reply(&id, kind, message));
                }
                let pause = self.run_until_pause()?;
                self.send(ok_reply(&id, &self.status_data()))?;
                if let Some(pause_id) = pause {
                    self.send(ok_reply(&pause_id, &self.status_data()))?;
                }
                Ok(())
            }
            Command::Pause => match &self.session {
                None => self.send(error_reply(&id, "no-session", "no session to pause")),
                Some(_) => self.send(ok_reply(&id, &self.status_data())),
            },
            Command::State => match &self.session {
                None => self.send(error_reply(&id, "no-session", "no session; send start first")),
                Some(s) => self.send(ok_reply(&id, &s.snapshot().to_json())),
            },
            Command::Model => self.send(ok_reply(&id, &model_json_compact(&self.fused.model))),
            Command::Source => match &self.session {
                None => self.send(error_reply(&id, "no-session", "no session; send start first")),
                Some(s) => {
                    let data = match s.current_command() {
                        None => Json::Null,
                        Some((class, method, span)) => json!({
                            "class": class,
                            "method": method,
                            "code": self.fused.sources.get(&(class.clone(), method.clone())),
                            "line": span.line,
                            "col_start": span.col_start,
                            "col_end": span.col_end,
                        }),
                    };
                    self.send(ok_reply(&id, &data.to_string()))
                }
            },
            Command::Stop => match self.session.take() {
                None => self.send(error_reply(&id, "no-session", "no session to stop")),
                Some(_) => self.send(ok_reply(&id, &json!({ "status": "stopped" }).to_string())),
            },
        }
    }

    /// Steps until the run ends or a `pause` arrives; returns the pause's id.
    /// Other requests arriving meanwhile wait their turn.
    fn run_until_pause(&mut self) -> Result<Option<Json>, Disconnected> {
        loop {
            let session = self.session.as_mut().expect("live");
            session.set_running();
            let outcome = session.step_command();
            self.push_events()?;
            if !matches!(outcome, StepOutcome::Progressed) {
                return Ok(None);
            }
            while let Ok(line) = self.input.try_recv() {
                match parse_request(&line) {
                    Ok(Request { id, command: Command::Pause }) => {
                        debug_assert_eq!(self.session.as_ref().map(|s| s.status()), Some(Status::Paused));
                        return Ok(Some(id));
                    }
                    _ => self.pending.push_back(line),
                }
            }
        }
    }
}
