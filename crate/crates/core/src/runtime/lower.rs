//! Lowering of method ASTs to flat, steppable instruction lists.

use std::collections::BTreeSet;

use crate::model::{ClassModel, MethodDef};
use crate::oal::{
    BinaryOp, Call, Expr, ExprKind, LValue, MethodAst, NavStep, Receiver, SelectMode, SourceSpan, Stmt, StmtKind,
    UnaryOp,
};
use crate::value::Value;

#[derive(Debug, Clone)]
pub(crate) enum Instr {
    /// Start of a statement; steps end just before the next one.
    Command(SourceSpan),
    Const(Value),
    Load(String),
    LoadSelf,
    LoadSelected,
    GetAttr(String),
    Binary(BinaryOp),
    Unary(UnaryOp),
    /// Pops a Boolean. `and` jumps with `false` kept when it is false, `or`
    /// with `true` when it is true; otherwise the right operand follows.
    ShortCircuit {
        is_and: bool,
        target: usize,
    },
    /// The right operand of `and`/`or` must be a Boolean.
    CheckBool,
    /// Pops a Boolean condition and jumps when it is false.
    JumpUnless(usize),
    Jump(usize),
    Pop,
    Store(String),
    /// Stack: receiver, value.
    SetAttr(String),
    /// Stack: receiver, args.
    CallMethod {
        method: String,
        argc: usize,
    },
    /// Stack: args.
    CallStatic {
        class: String,
        method: String,
        argc: usize,
    },
    Create(String),
    /// Stack: handle.
    Delete,
    SelectAll {
        class: String,
        mode: SelectMode,
    },
    SelectBegin(String),
    SelectNext {
        exit: usize,
    },
    /// Pops the predicate value.
    SelectTest {
        mode: SelectMode,
        exit: usize,
    },
    SelectEnd(SelectMode),
    /// Stack: start handle or set.
    Navigate {
        mode: SelectMode,
        chain: Vec<NavStep>,
    },
    /// Stack: a, b.
    Relate(String),
    Unrelate(String),
    /// Pops the set to iterate.
    ForBegin,
    ForNext {
        var: String,
        exit: usize,
    },
    Return {
        has_value: bool,
    },
}

#[derive(Debug)]
pub(crate) struct Code {
    pub instrs: Vec<Instr>,
}

/// Names that are locals of a method: its parameters plus every name the
/// body binds by assignment, creation, selection or iteration.
pub(crate) fn bound_names(def: &MethodDef, ast: &MethodAst) -> BTreeSet<String> {
    fn walk(stmts: &[Stmt], out: &mut BTreeSet<String>) {
        for s in stmts {
            match &s.kind {
                StmtKind::Create { var, .. }
                | StmtKind::Assign { target: LValue::Var(var), .. }
                | StmtKind::SelectInstances { var, .. }
                | StmtKind::SelectRelated { var, .. } => {
                    out.insert(var.clone());
                }
                StmtKind::ForEach { var, body, .. } => {
                    out.insert(var.clone());
                    walk(body, out);
                }
                StmtKind::If { arms, else_body } => {
                    for arm in arms {
                        walk(&arm.body, out);
                    }
                    if let Some(body) = else_body {
                        walk(body, out);
                    }
                }
                StmtKind::While { body, .. } => walk(body, out),
                _ => {}
            }
        }
    }
    let mut out: BTreeSet<String> = def.params.iter().map(|p| p.name.clone()).collect();
    walk(&ast.statements, &mut out);
    out
}

/// How a call receiver written as a bare name is read: a local wins, then a
/// class (static call); anything else is a variable that fails at runtime.
pub(crate) fn is_static_receiver(model: &ClassModel, locals: &BTreeSet<String>, name: &str) -> bool {
    !locals.contains(name) && model.class(name).is_some()
}

pub(crate) fn lower(model: &ClassModel, def: &MethodDef, ast: &MethodAst) -> Code {
    let mut l = Lowerer { model, locals: bound_names(def, ast), out: Vec::new() };
    l.block(&ast.statements);
    Code { instrs: l.out }
}

struct Lowerer<'a> {
    model: &'a ClassModel,
    locals: BTreeSet<String>,
    out: Vec<Instr>,
}

impl Lowerer<'_> {
    fn emit(&mut self, i: Instr) -> usize {
        self.out.push(i);
        self.out.len() - 1
    }

    fn here(&self) -> usize {
        self.out.len()
    }

    fn patch(&mut self, at: usize, target: usize) {
        match &mut self.out[at] {
            Instr::Jump(t) | Instr::JumpUnless(t) => *t = target,
            Instr::ShortCircuit { target: t, .. } => *t = target,
            Instr::SelectNext { exit } | Instr::SelectTest { exit, .. } | Instr::ForNext { exit, .. } => *exit = target,
            other => unreachable!("not a jump: {other:?}"),
        }
    }

    fn block(&mut self, stmts: &[Stmt]) {
        for s in stmts {
            self.stmt(s);
        }
    }

    fn receiver(&mut self, r: &Receiver) {
        match r {
            Receiver::SelfRef => self.emit(Instr::LoadSelf),
            Receiver::Name(n) => self.emit(Instr::Load(n.clone())),
        };
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::While { cond, body } => {
                let top = self.emit(Instr::Command(s.span));
                self.expr(cond);
                let exit = self.emit(Instr::JumpUnless(0));
                self.block(body);
                self.emit(Instr::Jump(top));
                let end = self.here();
                self.patch(exit, end);
                return;
            }
            StmtKind::ForEach { var, set, body } => {
                // The header is a command on entry and before every further
                // element, including the check that ends the loop.
                self.emit(Instr::Command(s.span));
                self.emit(Instr::Load(set.clone()));
                self.emit(Instr::ForBegin);
                let skip = self.emit(Instr::Jump(0));
                let again = self.emit(Instr::Command(s.span));
                let next_at = self.here();
                self.patch(skip, next_at);
                let next = self.emit(Instr::ForNext { var: var.clone(), exit: 0 });
                self.block(body);
                self.emit(Instr::Jump(again));
                let end = self.here();
                self.patch(next, end);
                return;
            }
            _ => {}
        }
        self.emit(Instr::Command(s.span));
        match &s.kind {
            StmtKind::Create { var, class } => {
                self.emit(Instr::Create(class.clone()));
                self.emit(Instr::Store(var.clone()));
            }
            StmtKind::Delete { target } => {
                self.receiver(target);
                self.emit(Instr::Delete);
            }
            StmtKind::Assign { target: LValue::Var(var), value } => {
                self.expr(value);
                self.emit(Instr::Store(var.clone()));
            }
            StmtKind::Assign { target: LValue::Attr(recv, attr), value } => {
                self.receiver(recv);
                self.expr(value);
                self.emit(Instr::SetAttr(attr.clone()));
            }
            StmtKind::SelectInstances { mode, var, class, filter: None } => {
                self.emit(Instr::SelectAll { class: class.clone(), mode: *mode });
                self.emit(Instr::Store(var.clone()));
            }
            StmtKind::SelectInstances { mode, var, class, filter: Some(pred) } => {
                self.emit(Instr::SelectBegin(class.clone()));
                let top = self.emit(Instr::SelectNext { exit: 0 });
                self.expr(pred);
                let test = self.emit(Instr::SelectTest { mode: *mode, exit: 0 });
                self.emit(Instr::Jump(top));
                let end = self.emit(Instr::SelectEnd(*mode));
                self.patch(top, end);
                self.patch(test, end);
                self.emit(Instr::Store(var.clone()));
            }
            StmtKind::SelectRelated { mode, var, start, chain } => {
                self.receiver(start);
                self.emit(Instr::Navigate { mode: *mode, chain: chain.clone() });
                self.emit(Instr::Store(var.clone()));
            }
            StmtKind::Relate { a, b, relation } => {
                self.receiver(a);
                self.receiver(b);
                self.emit(Instr::Relate(relation.clone()));
            }
            StmtKind::Unrelate { a, b, relation } => {
                self.receiver(a);
                self.receiver(b);
                self.emit(Instr::Unrelate(relation.clone()));
            }
            StmtKind::If { arms, else_body } => {
                let mut to_end = Vec::new();
                for arm in arms {
                    self.expr(&arm.cond);
                    let skip = self.emit(Instr::JumpUnless(0));
                    self.block(&arm.body);
                    to_end.push(self.emit(Instr::Jump(0)));
                    let next = self.here();
                    self.patch(skip, next);
                }
                if let Some(body) = else_body {
                    self.block(body);
                }
                let end = self.here();
                for j in to_end {
                    self.patch(j, end);
                }
            }
            StmtKind::Return(value) => {
                if let Some(v) = value {
                    self.expr(v);
                }
                self.emit(Instr::Return { has_value: value.is_some() });
            }
            StmtKind::Call(call) => {
                self.call(call);
                self.emit(Instr::Pop);
            }
            StmtKind::While { .. } | StmtKind::ForEach { .. } => unreachable!(),
        }
    }

    fn call(&mut self, call: &Call) {
        let argc = call.args.len();
        match &call.receiver {
            Receiver::Name(n) if is_static_receiver(self.model, &self.locals, n) => {
                for a in &call.args {
                    self.expr(a);
                }
                self.emit(Instr::CallStatic { class: n.clone(), method: call.method.clone(), argc });
            }
            recv => {
                self.receiver(recv);
                for a in &call.args {
                    self.expr(a);
                }
                self.emit(Instr::CallMethod { method: call.method.clone(), argc });
            }
        }
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Int(i) => {
                self.emit(Instr::Const(Value::Integer(*i)));
            }
            ExprKind::Real(r) => {
                self.emit(Instr::Const(Value::Real(*r)));
            }
            ExprKind::Str(s) => {
                self.emit(Instr::Const(Value::String(s.clone())));
            }
            ExprKind::Bool(b) => {
                self.emit(Instr::Const(Value::Boolean(*b)));
            }
            ExprKind::NoneLit => {
                self.emit(Instr::Const(Value::NONE));
            }
            ExprKind::Var(n) => {
                self.emit(Instr::Load(n.clone()));
            }
            ExprKind::SelfRef => {
                self.emit(Instr::LoadSelf);
            }
            ExprKind::Selected => {
                self.emit(Instr::LoadSelected);
            }
            ExprKind::Attr(recv, attr) => {
                self.expr(recv);
                self.emit(Instr::GetAttr(attr.clone()));
            }
            ExprKind::Call(call) => self.call(call),
            ExprKind::Binary(op @ (BinaryOp::And | BinaryOp::Or), l, r) => {
                self.expr(l);
                let jump = self.emit(Instr::ShortCircuit { is_and: *op == BinaryOp::And, target: 0 });
                self.expr(r);
                self.emit(Instr::CheckBool);
                let end = self.here();
                self.patch(jump, end);
            }
            ExprKind::Binary(op, l, r) => {
                self.expr(l);
                self.expr(r);
                self.emit(Instr::Binary(*op));
            }
            ExprKind::Unary(op, operand) => {
                self.expr(operand);
                self.emit(Instr::Unary(*op));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ClassDef;
    use crate::oal::parse_method_body;

    fn lowered(src: &str) -> Vec<Instr> {
        let mut model = ClassModel::default();
        model.classes.push(ClassDef::new("Registry"));
        let ast = parse_method_body(src).unwrap();
        lower(&model, &MethodDef::new("m"), &ast).instrs
    }

    fn commands(instrs: &[Instr]) -> usize {
        instrs.iter().filter(|i| matches!(i, Instr::Command(_))).count()
    }

    #[test]
    fn every_statement_starts_with_a_command() {
        let code = lowered("x = 1; y = x + 2; return y;");
        assert_eq!(commands(&code), 3);
        assert!(matches!(code[0], Instr::Command(_)));
    }

    #[test]
    fn loops_have_a_header_command_per_iteration() {
        let code = lowered("for each o in os x = 1; end for;");
        // Entry header, re-check header, body.
        assert_eq!(commands(&code), 3);
    }

    #[test]
    fn receiver_rule() {
        let code = lowered("Registry.Count(); r = 1; x = q.Count();");
        assert!(matches!(&code[1], Instr::CallStatic { class, .. } if class == "Registry"));
        let code = lowered("Registry = 1; Registry.Count();");
        assert!(code.iter().any(|i| matches!(i, Instr::CallMethod { .. })));
    }
}
