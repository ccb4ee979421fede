use std::collections::HashMap;
use std::sync::Arc;

use super::heap::{Deref, Heap, Link, Removal};
use super::lower::{lower, Code, Instr};
use super::ops;
use super::{ErrorKind, RuntimeError, Snapshot, StartError, Status, StepOutcome};
use crate::ingest::{FusedModel, MethodKey};
use crate::model::{multiplicity_upper, ClassModel, MethodDef, ValueType};
use crate::oal::{NavStep, SelectMode, SourceSpan};
use crate::trace::{EventKind, TraceEvent};
use crate::value::{InstanceId, Value};

pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;
pub const MAX_CALL_DEPTH: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionOptions {
    /// Maximum number of commands a session may execute.
    pub step_budget: u64,
}

impl Default for SessionOptions {
    fn default() -> Self {
        SessionOptions { step_budget: DEFAULT_STEP_BUDGET }
    }
}

struct ForState {
    items: Vec<InstanceId>,
    next: usize,
}

struct SelectState {
    candidates: Vec<InstanceId>,
    next: usize,
    current: Option<InstanceId>,
    matched: Vec<InstanceId>,
}

struct Frame {
    class: String,
    method: String,
    code: Arc<Code>,
    pc: usize,
    self_id: Option<InstanceId>,
    locals: HashMap<String, Value>,
    stack: Vec<Value>,
    loops: Vec<ForState>,
    selects: Vec<SelectState>,
}

impl Frame {
    fn pop(&mut self) -> Value {
        self.stack.pop().expect("operand stack underflow")
    }

    fn pop_n(&mut self, n: usize) -> Vec<Value> {
        let at = self.stack.len() - n;
        self.stack.split_off(at)
    }
}

/// One execution of a fused model from an entry method.
pub struct ExecSession {
    fused: Arc<FusedModel>,
    program: HashMap<MethodKey, Arc<Code>>,
    heap: Heap,
    frames: Vec<Frame>,
    events: Vec<TraceEvent>,
    drained: usize,
    status: Status,
    step_budget: u64,
    commands_run: u64,
    current: Option<(String, String, SourceSpan)>,
    return_value: Option<Value>,
    error: Option<RuntimeError>,
}

/// Starts a session on `class.method`. A non-static entry gets a fresh
/// instance of `class` as its receiver.
pub fn start_session(
    fused: Arc<FusedModel>,
    class: &str,
    method: &str,
    args: Vec<Value>,
    options: SessionOptions,
) -> Result<ExecSession, StartError> {
    let (owner, def) = check_entry(&fused, class, method, &args)?;

    let program = fused
        .bodies
        .iter()
        .filter_map(|((c, m), ast)| {
            let def = fused.model.class(c)?.method(m)?;
            Some(((c.clone(), m.clone()), Arc::new(lower(&fused.model, def, ast))))
        })
        .collect();
    let mut session = ExecSession {
        fused,
        program,
        heap: Heap::default(),
        frames: Vec::new(),
        events: Vec::new(),
        drained: 0,
        status: Status::Ready,
        step_budget: options.step_budget,
        commands_run: 0,
        current: None,
        return_value: None,
        error: None,
    };
    session.emit(EventKind::RunStarted);
    let self_id = if def.is_static {
        None
    } else {
        let model = Arc::clone(&session.fused);
        let id = session.heap.create(&model.model, class);
        session.emit(EventKind::InstanceCreated { id, class: class.to_string() });
        Some(id)
    };
    session.emit(EventKind::MethodCall {
        caller_id: None,
        callee_id: self_id,
        class: owner.clone(),
        method: method.to_string(),
        is_static: def.is_static,
    });
    let code = Arc::clone(&session.program[&(owner.clone(), method.to_string())]);
    let locals = def.params.iter().map(|p| p.name.clone()).zip(args).collect();
    session.frames.push(Frame {
        class: owner,
        method: method.to_string(),
        code,
        pc: 0,
        self_id,
        locals,
        stack: Vec::new(),
        loops: Vec::new(),
        selects: Vec::new(),
    });
    Ok(session)
}

/// Applies the entry gate: the method resolves, has at least one command,
/// and `args` fit its parameters.
pub(crate) fn check_entry(
    fused: &FusedModel,
    class: &str,
    method: &str,
    args: &[Value],
) -> Result<(String, MethodDef), StartError> {
    let unknown = || StartError::UnknownEntry { class: class.to_string(), method: method.to_string() };
    if fused.model.class(class).is_none() {
        return Err(unknown());
    }
    let (owner, def) = fused.model.resolve_method(class, method).ok_or_else(unknown)?;
    let (owner, def) = (owner.to_string(), def.clone());
    let has_commands = fused.body(&owner, method).is_some_and(|ast| !ast.statements.is_empty());
    if !has_commands {
        return Err(StartError::EmptyBodyEntry { class: owner, method: method.to_string() });
    }
    if args.len() != def.params.len() {
        return Err(StartError::ArityMismatch {
            class: owner,
            method: method.to_string(),
            expected: def.params.len(),
            given: args.len(),
        });
    }
    for (index, arg) in args.iter().enumerate() {
        let reason = match arg {
            Value::Handle(Some(_)) => "handles into a fresh heap must be none",
            Value::Set(ids) if !ids.is_empty() => "sets into a fresh heap must be empty",
            _ => continue,
        };
        return Err(StartError::BadArgument { index, reason: reason.to_string() });
    }

    Ok((owner, def))
}

/// Runs `class.method` to completion and returns the final snapshot and trace.
pub fn run(
    fused: Arc<FusedModel>,
    class: &str,
    method: &str,
    args: Vec<Value>,
    options: SessionOptions,
) -> Result<(Snapshot, Vec<TraceEvent>), StartError> {
    let mut session = start_session(fused, class, method, args, options)?;
    let snapshot = session.run_to_completion();
    Ok((snapshot, session.events))
}

enum Flow {
    Continue,
    /// The entry method returned.
    Done,
}

fn stale(id: Option<InstanceId>, what: &str) -> RuntimeError {
    match id {
        Some(id) => RuntimeError::new(ErrorKind::StaleHandle, format!("{what} uses deleted instance {id}")),
        None => RuntimeError::new(ErrorKind::NoneDereference, format!("{what} on none")),
    }
}

impl ExecSession {
    pub fn status(&self) -> Status {
        self.status
    }

    pub fn fused(&self) -> &Arc<FusedModel> {
        &self.fused
    }

    /// Every event emitted so far.
    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    /// Events emitted since the previous call.
    pub fn drain_events(&mut self) -> Vec<TraceEvent> {
        let new = self.events[self.drained..].to_vec();
        self.drained = self.events.len();
        new
    }

    pub fn error(&self) -> Option<&RuntimeError> {
        self.error.as_ref()
    }

    pub fn return_value(&self) -> Option<&Value> {
        self.return_value.as_ref()
    }

    pub fn commands_run(&self) -> u64 {
        self.commands_run
    }

    pub fn call_depth(&self) -> usize {
        self.frames.len()
    }

    /// (class, method, span) of the most recently started command.
    pub fn current_command(&self) -> Option<&(String, String, SourceSpan)> {
        self.current.as_ref()
    }

    /// Marks a free-running session, e.g. during a `continue`.
    pub fn set_running(&mut self) {
        if !self.status.is_terminal() {
            self.status = Status::Running;
        }
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            instances: self.heap.instances().cloned().collect(),
            links: self.heap.links().cloned().collect(),
            status: self.status,
            return_value: self.return_value.clone(),
        }
    }

    pub fn run_to_completion(&mut self) -> Snapshot {
        self.status = Status::Running;
        while let StepOutcome::Progressed = self.step_command() {
            self.status = Status::Running;
        }
        self.snapshot()
    }

    /// Executes one command and everything up to the next command boundary.
    /// On a finished or failed session it repeats the final outcome.
    pub fn step_command(&mut self) -> StepOutcome {
        match self.status {
            Status::Finished => return StepOutcome::Finished(self.return_value.clone()),
            Status::Failed => return StepOutcome::Failed(self.error.clone().expect("failed session has an error")),
            _ => {}
        }
        self.status = Status::Running;
        let mut started = false;
        loop {
            let frame = self.frames.last().expect("running session has a frame");
            let code = Arc::clone(&frame.code);
            let pc = frame.pc;
            let result = match code.instrs.get(pc) {
                Some(Instr::Command(span)) => {
                    if started {
                        self.status = Status::Paused;
                        return StepOutcome::Progressed;
                    }
                    started = true;
                    self.begin_command(*span)
                }
                Some(instr) => {
                    self.frames.last_mut().expect("frame").pc += 1;
                    self.exec(instr)
                }
                None => self.do_return(None),
            };
            match result {
                Ok(Flow::Continue) => {}
                Ok(Flow::Done) => {
                    self.status = Status::Finished;
                    self.emit(EventKind::RunFinished { status: Status::Finished.as_str().into() });
                    return StepOutcome::Finished(self.return_value.clone());
                }
                Err(err) => {
                    self.status = Status::Failed;
                    self.error = Some(err.clone());
                    self.emit(EventKind::Error {
                        kind: err.kind.as_str().into(),
                        message: err.message.clone(),
                        line: self.current.as_ref().map(|c| c.2.line),
                    });
                    return StepOutcome::Failed(err);
                }
            }
        }
    }

    fn begin_command(&mut self, span: SourceSpan) -> Result<Flow, RuntimeError> {
        if self.commands_run >= self.step_budget {
            return Err(RuntimeError::new(
                ErrorKind::StepBudgetExhausted,
                format!("step budget of {} commands exhausted", self.step_budget),
            ));
        }
        self.commands_run += 1;
        let frame = self.frames.last_mut().expect("frame");
        frame.pc += 1;
        let (class, method) = (frame.class.clone(), frame.method.clone());
        self.current = Some((class.clone(), method.clone(), span));
        self.emit(EventKind::Command { class, method, span });
        Ok(Flow::Continue)
    }

    fn emit(&mut self, kind: EventKind) {
        let seq = self.events.len() as u64 + 1;
        self.events.push(TraceEvent { seq, kind });
    }

    fn model(&self) -> &ClassModel {
        &self.fused.model
    }

    fn frame(&mut self) -> &mut Frame {
        self.frames.last_mut().expect("frame")
    }

    fn deref(&self, v: &Value, what: &str) -> Result<InstanceId, RuntimeError> {
        match v {
            Value::Handle(h) => self.heap.check(*h).map_err(|e| match e {
                Deref::None => stale(None, what),
                Deref::Stale => stale(*h, what),
            }),
            other => Err(RuntimeError::new(
                ErrorKind::TypeMismatch,
                format!("{what} needs an instance handle, found {}", other.type_name()),
            )),
        }
    }

    fn exec(&mut self, instr: &Instr) -> Result<Flow, RuntimeError> {
        match instr {
            Instr::Command(_) => unreachable!("handled by step_command"),
            Instr::Const(v) => self.frame().stack.push(v.clone()),
            Instr::Load(name) => {
                let frame = self.frame();
                let v = frame.locals.get(name).cloned().ok_or_else(|| {
                    RuntimeError::new(ErrorKind::UnknownVariable, format!("variable `{name}` is not bound"))
                })?;
                frame.stack.push(v);
            }
            Instr::LoadSelf => {
                let frame = self.frame();
                let v = Value::Handle(frame.self_id);
                frame.stack.push(v);
            }
            Instr::LoadSelected => {
                let frame = self.frame();
                let current = frame.selects.last().and_then(|s| s.current).ok_or_else(|| {
                    RuntimeError::new(ErrorKind::UnknownVariable, "`selected` outside a where clause")
                })?;
                frame.stack.push(Value::Handle(Some(current)));
            }
            Instr::GetAttr(attr) => {
                let recv = self.frame().pop();
                let id = self.deref(&recv, &format!("reading `{attr}`"))?;
                let obj = self.heap.get(id).expect("live");
                let v = obj.attrs.get(attr).cloned().ok_or_else(|| {
                    RuntimeError::new(ErrorKind::UnknownAttribute, format!("{} has no attribute `{attr}`", obj.class))
                })?;
                self.frame().stack.push(v);
            }
            Instr::Binary(op) => {
                let frame = self.frame();
                let r = frame.pop();
                let l = frame.pop();
                let v = ops::binary(*op, l, r)?;
                self.frame().stack.push(v);
            }
            Instr::Unary(op) => {
                let v = self.frame().pop();
                let v = ops::unary(*op, v)?;
                self.frame().stack.push(v);
            }
            Instr::ShortCircuit { is_and, target } => {
                let frame = self.frame();
                let b = expect_bool(frame.pop(), if *is_and { "and" } else { "or" })?;
                if b != *is_and {
                    frame.stack.push(Value::Boolean(b));
                    frame.pc = *target;
                }
            }
            Instr::CheckBool => {
                let frame = self.frame();
                let v = frame.pop();
                let b = expect_bool(v, "and/or")?;
                frame.stack.push(Value::Boolean(b));
            }
            Instr::JumpUnless(target) => {
                let frame = self.frame();
                if !expect_bool(frame.pop(), "condition")? {
                    frame.pc = *target;
                }
            }
            Instr::Jump(target) => self.frame().pc = *target,
            Instr::Pop => {
                self.frame().pop();
            }
            Instr::Store(name) => {
                let frame = self.frame();
                let v = frame.pop();
                frame.locals.insert(name.clone(), v);
            }
            Instr::SetAttr(attr) => {
                let frame = self.frame();
                let value = frame.pop();
                let recv = frame.pop();
                self.set_attr(&recv, attr, value)?;
            }
            Instr::CallMethod { method, argc } => {
                let frame = self.frame();
                let args = frame.pop_n(*argc);
                let recv = frame.pop();
                let id = self.deref(&recv, &format!("calling `{method}`"))?;
                let class = self.heap.get(id).expect("live").class.clone();
                return self.call(&class, Some(id), method, args);
            }
            Instr::CallStatic { class, method, argc } => {
                let args = self.frame().pop_n(*argc);
                return self.call(class, None, method, args);
            }
            Instr::Create(class) => {
                if self.model().class(class).is_none() {
                    return Err(RuntimeError::new(ErrorKind::UnknownClass, format!("unknown class {class}")));
                }
                let fused = Arc::clone(&self.fused);
                let id = self.heap.create(&fused.model, class);
                self.emit(EventKind::InstanceCreated { id, class: class.clone() });
                self.frame().stack.push(Value::Handle(Some(id)));
            }
            Instr::Delete => {
                let v = self.frame().pop();
                let id = self.deref(&v, "delete")?;
                let fused = Arc::clone(&self.fused);
                for removal in self.heap.delete(&fused.model, id) {
                    match removal {
                        Removal::Link(Link { rel, a, b }) => self.emit(EventKind::LinkRemoved { rel, a, b }),
                        Removal::Instance { id, cascaded } => self.emit(EventKind::InstanceDeleted { id, cascaded }),
                    }
                }
            }
            Instr::SelectAll { class, mode } => {
                self.require_class(class)?;
                let ids = self.heap.instances_of(self.model(), class);
                self.frame().stack.push(select_result(*mode, ids));
            }
            Instr::SelectBegin(class) => {
                self.require_class(class)?;
                let candidates = self.heap.instances_of(self.model(), class);
                self.frame().selects.push(SelectState { candidates, next: 0, current: None, matched: Vec::new() });
            }
            Instr::SelectNext { exit } => {
                let frame = self.frame();
                let state = frame.selects.last_mut().expect("select state");
                match state.candidates.get(state.next) {
                    Some(id) => {
                        state.current = Some(*id);
                        state.next += 1;
                    }
                    None => frame.pc = *exit,
                }
            }
            Instr::SelectTest { mode, exit } => {
                let frame = self.frame();
                let keep = expect_bool(frame.pop(), "where clause")?;
                let state = frame.selects.last_mut().expect("select state");
                if keep {
                    state.matched.push(state.current.expect("candidate"));
                    if *mode != SelectMode::Many {
                        frame.pc = *exit;
                    }
                }
            }
            Instr::SelectEnd(mode) => {
                let frame = self.frame();
                let state = frame.selects.pop().expect("select state");
                frame.stack.push(select_result(*mode, state.matched));
            }
            Instr::Navigate { mode, chain } => {
                let start = self.frame().pop();
                let ids = self.navigate(start, chain)?;
                self.frame().stack.push(select_result(*mode, ids));
            }
            Instr::Relate(rel) => {
                let frame = self.frame();
                let b = frame.pop();
                let a = frame.pop();
                self.relate(rel, &a, &b, true)?;
            }
            Instr::Unrelate(rel) => {
                let frame = self.frame();
                let b = frame.pop();
                let a = frame.pop();
                self.relate(rel, &a, &b, false)?;
            }
            Instr::ForBegin => {
                let frame = self.frame();
                match frame.pop() {
                    Value::Set(items) => frame.loops.push(ForState { items, next: 0 }),
                    other => {
                        return Err(RuntimeError::new(
                            ErrorKind::TypeMismatch,
                            format!("for each needs an instance set, found {}", other.type_name()),
                        ))
                    }
                }
            }
            Instr::ForNext { var, exit } => {
                let frame = self.frame();
                let state = frame.loops.last_mut().expect("loop state");
                match state.items.get(state.next) {
                    Some(id) => {
                        let v = Value::Handle(Some(*id));
                        state.next += 1;
                        frame.locals.insert(var.clone(), v);
                    }
                    None => {
                        frame.loops.pop();
                        frame.pc = *exit;
                    }
                }
            }
            Instr::Return { has_value } => {
                let value = if *has_value { Some(self.frame().pop()) } else { None };
                return self.do_return(value);
            }
        }
        Ok(Flow::Continue)
    }

    fn require_class(&self, class: &str) -> Result<(), RuntimeError> {
        match self.model().class(class) {
            Some(_) => Ok(()),
            None => Err(RuntimeError::new(ErrorKind::UnknownClass, format!("unknown class {class}"))),
        }
    }

    fn set_attr(&mut self, recv: &Value, attr: &str, value: Value) -> Result<(), RuntimeError> {
        let id = self.deref(recv, &format!("assigning `{attr}`"))?;
        let class = self.heap.get(id).expect("live").class.clone();
        let ty = self.model().attribute(&class, attr).map(|a| a.ty.clone()).ok_or_else(|| {
            RuntimeError::new(ErrorKind::UnknownAttribute, format!("{class} has no attribute `{attr}`"))
        })?;
        let value = self.coerce(&ty, value).map_err(|found| {
            RuntimeError::new(ErrorKind::TypeMismatch, format!("{class}.{attr} is {}, cannot hold {found}", ty.name()))
        })?;
        self.heap.get_mut(id).expect("live").attrs.insert(attr.to_string(), value.clone());
        self.emit(EventKind::AttributeSet { id, attr: attr.to_string(), value });
        Ok(())
    }

    /// Fits a value to an attribute type, promoting Integer to Real.
    /// On failure returns a description of the offending value.
    fn coerce(&self, ty: &ValueType, value: Value) -> Result<Value, String> {
        match (ty, value) {
            (ValueType::Integer, v @ Value::Integer(_)) => Ok(v),
            (ValueType::Real, v @ Value::Real(_)) => Ok(v),
            (ValueType::Real, Value::Integer(i)) => Ok(Value::Real(i as f64)),
            (ValueType::Boolean, v @ Value::Boolean(_)) => Ok(v),
            (ValueType::String, v @ Value::String(_)) => Ok(v),
            (ValueType::Handle(_), Value::Handle(None)) => Ok(Value::NONE),
            (ValueType::Handle(target), Value::Handle(Some(id))) => {
                let class = self.heap.class_of(id).unwrap_or_default();
                if self.model().is_a(class, target) {
                    Ok(Value::Handle(Some(id)))
                } else {
                    Err(format!("a {class} handle"))
                }
            }
            (_, v) => Err(v.type_name().to_string()),
        }
    }

    fn call(
        &mut self,
        class: &str,
        receiver: Option<InstanceId>,
        method: &str,
        args: Vec<Value>,
    ) -> Result<Flow, RuntimeError> {
        let fused = Arc::clone(&self.fused);
        let (owner, def) = fused
            .model
            .resolve_method(class, method)
            .ok_or_else(|| RuntimeError::new(ErrorKind::UnknownMethod, format!("{class} has no method `{method}`")))?;
        if receiver.is_none() && !def.is_static {
            return Err(RuntimeError::new(
                ErrorKind::TypeMismatch,
                format!("instance method {owner}.{method} called without a receiver"),
            ));
        }
        if args.len() != def.params.len() {
            return Err(RuntimeError::new(
                ErrorKind::ArityMismatch,
                format!("{owner}.{method} takes {} argument(s), {} given", def.params.len(), args.len()),
            ));
        }
        if self.frames.len() >= MAX_CALL_DEPTH {
            return Err(RuntimeError::new(
                ErrorKind::CallDepthExceeded,
                format!("call depth exceeds {MAX_CALL_DEPTH}"),
            ));
        }
        let self_id = if def.is_static { None } else { receiver };
        let caller = self.frames.last().and_then(|f| f.self_id).filter(|id| self.heap.is_live(*id));
        self.emit(EventKind::MethodCall {
            caller_id: caller,
            callee_id: self_id,
            class: owner.to_string(),
            method: method.to_string(),
            is_static: def.is_static,
        });
        let key = (owner.to_string(), method.to_string());
        match self.program.get(&key).filter(|c| !c.instrs.is_empty()) {
            Some(code) => {
                let code = Arc::clone(code);
                let locals = def.params.iter().map(|p| p.name.clone()).zip(args).collect();
                self.frames.push(Frame {
                    class: key.0,
                    method: key.1,
                    code,
                    pc: 0,
                    self_id,
                    locals,
                    stack: Vec::new(),
                    loops: Vec::new(),
                    selects: Vec::new(),
                });
            }
            None => {
                // Methods without a body are no-ops.
                self.emit(EventKind::MethodReturn { value: None });
                self.frame().stack.push(Value::NONE);
            }
        }
        Ok(Flow::Continue)
    }

    fn do_return(&mut self, value: Option<Value>) -> Result<Flow, RuntimeError> {
        self.frames.pop();
        self.emit(EventKind::MethodReturn { value: value.clone() });
        match self.frames.last_mut() {
            Some(caller) => {
                caller.stack.push(value.unwrap_or(Value::NONE));
                Ok(Flow::Continue)
            }
            None => {
                self.return_value = value;
                Ok(Flow::Done)
            }
        }
    }

    fn navigate(&self, start: Value, chain: &[NavStep]) -> Result<Vec<InstanceId>, RuntimeError> {
        let mut current = match &start {
            Value::Handle(None) => Vec::new(),
            Value::Handle(Some(_)) => vec![self.deref(&start, "navigation")?],
            Value::Set(ids) => {
                for id in ids {
                    self.deref(&Value::Handle(Some(*id)), "navigation")?;
                }
                ids.clone()
            }
            other => {
                return Err(RuntimeError::new(
                    ErrorKind::TypeMismatch,
                    format!("navigation starts from a handle or set, found {}", other.type_name()),
                ))
            }
        };
        for step in chain {
            if self.model().relation(&step.relation).is_none() {
                return Err(RuntimeError::new(
                    ErrorKind::UnknownRelation,
                    format!("unknown relation {}", step.relation),
                ));
            }
            self.require_class(&step.class)?;
            let mut next: Vec<InstanceId> = current
                .iter()
                .flat_map(|id| self.heap.partners(&step.relation, *id))
                .filter(|p| self.heap.class_of(*p).is_some_and(|c| self.model().is_a(c, &step.class)))
                .collect();
            next.sort_unstable();
            next.dedup();
            current = next;
        }
        Ok(current)
    }

    fn relate(&mut self, rel: &str, a: &Value, b: &Value, link: bool) -> Result<(), RuntimeError> {
        let verb = if link { "relate" } else { "unrelate" };
        let a = self.deref(a, verb)?;
        let b = self.deref(b, verb)?;
        let def = self
            .model()
            .relation(rel)
            .cloned()
            .ok_or_else(|| RuntimeError::new(ErrorKind::UnknownRelation, format!("unknown relation {rel}")))?;
        let class_a = self.heap.get(a).expect("live").class.clone();
        let class_b = self.heap.get(b).expect("live").class.clone();
        let model = self.model();
        let (a, b) = if model.is_a(&class_a, &def.from) && model.is_a(&class_b, &def.to) {
            (a, b)
        } else if model.is_a(&class_b, &def.from) && model.is_a(&class_a, &def.to) {
            (b, a)
        } else {
            return Err(RuntimeError::new(
                ErrorKind::TypeMismatch,
                format!("{rel} links {} and {}, not {class_a} and {class_b}", def.from, def.to),
            ));
        };
        let triple = Link { rel: rel.to_string(), a, b };
        if link {
            if self.heap.has_link(&triple) {
                return Ok(());
            }
            let over = |count: usize, mult: &str| multiplicity_upper(mult).is_some_and(|max| count + 1 > max);
            let warning =
                over(self.heap.count_from(rel, a), &def.to_mult) || over(self.heap.count_to(rel, b), &def.from_mult);
            self.heap.insert_link(triple);
            self.emit(EventKind::LinkCreated { rel: rel.to_string(), a, b, multiplicity_warning: warning });
        } else if self.heap.remove_link(&triple) {
            self.emit(EventKind::LinkRemoved { rel: rel.to_string(), a, b });
        }
        Ok(())
    }
}

fn expect_bool(v: Value, what: &str) -> Result<bool, RuntimeError> {
    match v {
        Value::Boolean(b) => Ok(b),
        other => Err(RuntimeError::new(
            ErrorKind::TypeMismatch,
            format!("{what} needs a Boolean, found {}", other.type_name()),
        )),
    }
}

/// `one`/`any` yield the smallest id (or none), `many` the sorted set.
fn select_result(mode: SelectMode, ids: Vec<InstanceId>) -> Value {
    match mode {
        SelectMode::Many => Value::set(ids),
        SelectMode::One | SelectMode::Any => Value::Handle(ids.into_iter().min()),
    }
}
