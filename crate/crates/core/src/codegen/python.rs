use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{Entry, GenOptions, NameMap, PRELUDE};
use crate::ingest::FusedModel;
use crate::json;
use crate::model::{default_attribute_value, ClassDef, ClassModel, MethodDef, RelationKind};
use crate::oal::{BinaryOp, Call, Expr, ExprKind, LValue, NavStep, Receiver, SelectMode, Stmt, StmtKind};
use crate::runtime::{bound_names, is_static_receiver};
use crate::value::Value;

const INDENT: &str = "    ";

fn mode_name(mode: SelectMode) -> &'static str {
    match mode {
        SelectMode::One => "one",
        SelectMode::Any => "any",
        SelectMode::Many => "many",
    }
}

fn literal(v: &Value) -> String {
    match v {
        Value::Integer(i) if *i < 0 => format!("({i})"),
        Value::Integer(i) => i.to_string(),
        Value::Real(r) if r.is_sign_negative() => format!("({})", json::real(*r)),
        Value::Real(r) => json::real(*r),
        Value::Boolean(true) => "True".into(),
        Value::Boolean(false) => "False".into(),
        Value::String(s) => json::string(s),
        Value::Handle(_) => "None".into(),
        Value::Set(_) => "_OalSet([])".into(),
    }
}

/// Emitted method name, unique within its class. Leading `__` would be
/// mangled inside a class body, so such names get an `m` prefix.
fn method_names(class: &ClassDef) -> NameMap {
    let mut names = NameMap::default();
    for m in &class.methods {
        if m.name.starts_with("__") {
            names.insert_as(&m.name, &format!("m{}", m.name));
        } else {
            names.insert(&m.name);
        }
    }
    names
}

pub(super) fn emit(fused: &FusedModel, entry: Option<(&Entry, &str, bool)>, options: GenOptions) -> (String, NameMap) {
    let model = &fused.model;
    let mut class_names = NameMap::default();
    for c in &model.classes {
        class_names.insert(&c.name);
    }
    let methods: BTreeMap<&str, NameMap> = model.classes.iter().map(|c| (c.name.as_str(), method_names(c))).collect();

    let mut out = String::from(PRELUDE);
    let _ = writeln!(out, "\n\n_OAL_BUDGET = {}", options.step_budget);
    out.push_str("\n_oal_links = {");
    let rels: Vec<String> = model.relations.iter().map(|r| format!("{}: []", json::string(&r.id))).collect();
    out.push_str(&rels.join(", "));
    out.push_str("}\n");

    for name in super::topo_order_classes(model) {
        let class = model.class(&name).expect("topo order lists model classes");
        emit_class(fused, class, &class_names, &methods[name.as_str()], &mut out);
    }
    emit_tables(model, &class_names, &methods, &mut out);

    out.push_str("\n\n");
    match entry {
        Some((e, owner, is_static)) => {
            let target = format!(
                "{}.{}",
                class_names.get(owner).expect("class"),
                methods[owner].get(&e.method).expect("method")
            );
            let mut args: Vec<String> = e.args.iter().map(literal).collect();
            if !is_static {
                args.insert(0, format!("_oal_create({})", json::string(&e.class)));
            }
            let _ = writeln!(out, "def _oal_entry():\n{INDENT}return {target}({})\n\n", args.join(", "));
            out.push_str("if __name__ == \"__main__\":\n    _oal_main(_oal_entry)\n");
        }
        None => out.push_str("if __name__ == \"__main__\":\n    _oal_main(None)\n"),
    }
    (out, class_names)
}

fn emit_class(fused: &FusedModel, class: &ClassDef, class_names: &NameMap, methods: &NameMap, out: &mut String) {
    let model = &fused.model;
    let base = model.parent(&class.name).map_or("_OalObject", |p| class_names.get(p).expect("parent class"));
    let _ = writeln!(out, "\n\nclass {}({base}):", class_names.get(&class.name).expect("class"));
    let defaults: Vec<String> = model
        .all_attributes(&class.name)
        .into_iter()
        .map(|a| format!("{}: {}", json::string(&a.name), literal(&Value::from(default_attribute_value(&a.ty)))))
        .collect();
    let _ = writeln!(
        out,
        "{INDENT}def __init__(self):\n{INDENT}{INDENT}_oal_init(self, {}, {{{}}})",
        json::string(&class.name),
        defaults.join(", ")
    );
    for def in &class.methods {
        out.push('\n');
        let mut params: Vec<String> = def.params.iter().map(|p| format!("v_{}", p.name)).collect();
        if def.is_static {
            let _ = writeln!(out, "{INDENT}@staticmethod");
        } else {
            params.insert(0, "self".into());
        }
        let _ = writeln!(out, "{INDENT}def {}({}):", methods.get(&def.name).expect("method"), params.join(", "));
        match fused.body(&class.name, &def.name) {
            Some(ast) => {
                let mut body = Body {
                    model,
                    class: &class.name,
                    def,
                    locals: bound_names(def, ast),
                    out: String::new(),
                    depth: 2,
                };
                body.block(&ast.statements);
                if !matches!(ast.statements.last().map(|s| &s.kind), Some(StmtKind::Return(_))) {
                    body.line("return _oal_void");
                }
                out.push_str(&body.out);
            }
            None => {
                let _ = writeln!(out, "{INDENT}{INDENT}# no OAL code: no-op\n{INDENT}{INDENT}return _oal_void");
            }
        }
    }
}

fn emit_tables(model: &ClassModel, class_names: &NameMap, methods: &BTreeMap<&str, NameMap>, out: &mut String) {
    let emitted = |c: &str| class_names.get(c).expect("class").to_string();
    out.push_str("\n\n_OAL_CLASSES = {");
    let items: Vec<String> =
        model.classes.iter().map(|c| format!("{}: {}", json::string(&c.name), emitted(&c.name))).collect();
    out.push_str(&items.join(", "));
    out.push_str("}\n_OAL_LINEAGE = {");
    let items: Vec<String> = model
        .classes
        .iter()
        .map(|c| {
            let lineage: Vec<String> = model.lineage(&c.name).iter().map(|a| format!("{},", json::string(a))).collect();
            format!("{}: ({})", json::string(&c.name), lineage.join(" "))
        })
        .collect();
    out.push_str(&items.join(", "));
    out.push_str("}\n_OAL_ATTR_TYPES = {");
    let items: Vec<String> = model
        .classes
        .iter()
        .map(|c| {
            let attrs: Vec<String> = model
                .all_attributes(&c.name)
                .iter()
                .map(|a| format!("{}: {}", json::string(&a.name), json::string(a.ty.name())))
                .collect();
            format!("{}: {{{}}}", json::string(&c.name), attrs.join(", "))
        })
        .collect();
    out.push_str(&items.join(", "));
    out.push_str("}\n_OAL_RELATIONS = {");
    let items: Vec<String> = model
        .relations
        .iter()
        .map(|r| {
            let composite = if r.kind == RelationKind::Composition { "True" } else { "False" };
            format!("{}: ({}, {}, {composite})", json::string(&r.id), json::string(&r.from), json::string(&r.to))
        })
        .collect();
    out.push_str(&items.join(", "));
    out.push_str("}\n_OAL_METHODS = {");
    let items: Vec<String> = model
        .classes
        .iter()
        .map(|c| {
            let mut seen = BTreeSet::new();
            let mut entries = Vec::new();
            for owner in model.lineage(&c.name) {
                let Some(def) = model.class(owner) else { continue };
                for m in &def.methods {
                    if seen.insert(m.name.as_str()) {
                        entries.push(format!(
                            "{}: ({}.{}, {}, {})",
                            json::string(&m.name),
                            emitted(owner),
                            methods[owner].get(&m.name).expect("method"),
                            if m.is_static { "True" } else { "False" },
                            m.params.len()
                        ));
                    }
                }
            }
            format!("{}: {{{}}}", json::string(&c.name), entries.join(", "))
        })
        .collect();
    out.push_str(&items.join(",\n    "));
    out.push_str("}\n_OAL_REGISTRY = {");
    let items: Vec<String> = model.classes.iter().map(|c| format!("{}: []", json::string(&c.name))).collect();
    out.push_str(&items.join(", "));
    out.push_str("}\n");
}

/// Translator for one method body.
struct Body<'a> {
    model: &'a ClassModel,
    class: &'a str,
    def: &'a MethodDef,
    locals: BTreeSet<String>,
    out: String,
    depth: usize,
}

impl Body<'_> {
    fn line(&mut self, text: &str) {
        for _ in 0..self.depth {
            self.out.push_str(INDENT);
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn nested(&mut self, f: impl FnOnce(&mut Self)) {
        self.depth += 1;
        f(self);
        self.depth -= 1;
    }

    fn block(&mut self, stmts: &[Stmt]) {
        if stmts.is_empty() {
            self.line("pass");
        }
        for s in stmts {
            self.stmt(s);
        }
    }

    fn receiver(&self, r: &Receiver) -> String {
        match r {
            Receiver::SelfRef if self.def.is_static => "None".into(),
            Receiver::SelfRef => "self".into(),
            Receiver::Name(n) => format!("v_{n}"),
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        let comment = format!("# oal: {}.{}:{}", self.class, self.def.name, s.span.line);
        self.line(&comment);
        match &s.kind {
            StmtKind::While { cond, body } => {
                self.line("while True:");
                self.nested(|b| {
                    b.line("_oal_cmd()");
                    let cond = b.expr(cond, false);
                    b.line(&format!("if not _oal_bool({cond}):"));
                    b.nested(|b| b.line("break"));
                    for s in body {
                        b.stmt(s);
                    }
                });
                return;
            }
            StmtKind::ForEach { var, set, body } => {
                self.line("_oal_cmd()");
                self.line(&format!("for v_{var} in _oal_iter(v_{set}):"));
                self.nested(|b| {
                    for s in body {
                        b.stmt(s);
                    }
                    b.line("_oal_cmd()");
                });
                return;
            }
            _ => {}
        }
        self.line("_oal_cmd()");
        match &s.kind {
            StmtKind::Create { var, class } => {
                self.line(&format!("v_{var} = _oal_create({})", json::string(class)));
            }
            StmtKind::Delete { target } => {
                let t = self.receiver(target);
                self.line(&format!("_oal_delete({t})"));
            }
            StmtKind::Assign { target: LValue::Var(var), value } => {
                let v = self.expr(value, false);
                self.line(&format!("v_{var} = {v}"));
            }
            StmtKind::Assign { target: LValue::Attr(recv, attr), value } => {
                let r = self.receiver(recv);
                let v = self.expr(value, false);
                self.line(&format!("_oal_set({r}, {}, {v})", json::string(attr)));
            }
            StmtKind::SelectInstances { mode, var, class, filter: None } => {
                self.line(&format!("v_{var} = _oal_select({}, \"{}\")", json::string(class), mode_name(*mode)));
            }
            StmtKind::SelectInstances { mode, var, class, filter: Some(pred) } => {
                let pred = self.expr(pred, true);
                self.line("_oal_found = []");
                self.line(&format!("for _oal_sel in _oal_candidates({}):", json::string(class)));
                self.nested(|b| {
                    b.line(&format!("if _oal_bool({pred}):"));
                    b.nested(|b| {
                        b.line("_oal_found.append(_oal_sel)");
                        if *mode != SelectMode::Many {
                            b.line("break");
                        }
                    });
                });
                self.line(&format!("v_{var} = _oal_pick(\"{}\", _oal_found)", mode_name(*mode)));
            }
            StmtKind::SelectRelated { mode, var, start, chain } => {
                let start = self.receiver(start);
                self.line(&format!("v_{var} = _oal_nav({start}, \"{}\", {})", mode_name(*mode), chain_literal(chain)));
            }
            StmtKind::Relate { a, b, relation } | StmtKind::Unrelate { a, b, relation } => {
                let verb = if matches!(s.kind, StmtKind::Relate { .. }) { "relate" } else { "unrelate" };
                let (a, b) = (self.receiver(a), self.receiver(b));
                self.line(&format!("_oal_{verb}({a}, {b}, {})", json::string(relation)));
            }
            StmtKind::If { arms, else_body } => {
                for (i, arm) in arms.iter().enumerate() {
                    let cond = self.expr(&arm.cond, false);
                    self.line(&format!("{} _oal_bool({cond}):", if i == 0 { "if" } else { "elif" }));
                    self.nested(|b| b.block(&arm.body));
                }
                if let Some(body) = else_body {
                    self.line("else:");
                    self.nested(|b| b.block(body));
                }
            }
            StmtKind::Return(value) => {
                let v = value.as_ref().map_or_else(|| "_oal_void".to_string(), |v| self.expr(v, false));
                self.line(&format!("return {v}"));
            }
            StmtKind::Call(call) => {
                let c = self.call(call, false);
                self.line(&c);
            }
            StmtKind::While { .. } | StmtKind::ForEach { .. } => unreachable!(),
        }
    }

    fn call(&self, call: &Call, in_where: bool) -> String {
        let args: Vec<String> = call.args.iter().map(|a| self.expr(a, in_where)).collect();
        let method = json::string(&call.method);
        match &call.receiver {
            Receiver::Name(n) if is_static_receiver(self.model, &self.locals, n) => {
                format!("_oal_call_static({}, {method}, [{}])", json::string(n), args.join(", "))
            }
            recv => format!("_oal_call({}, {method}, [{}])", self.receiver(recv), args.join(", ")),
        }
    }

    /// `in_where` is set inside a select's where clause, where `selected`
    /// names the candidate.
    fn expr(&self, e: &Expr, in_where: bool) -> String {
        match &e.kind {
            ExprKind::Int(i) => literal(&Value::Integer(*i)),
            ExprKind::Real(r) => literal(&Value::Real(*r)),
            ExprKind::Str(s) => json::string(s),
            ExprKind::Bool(b) => literal(&Value::Boolean(*b)),
            ExprKind::NoneLit => "None".into(),
            ExprKind::Var(n) => format!("v_{n}"),
            ExprKind::SelfRef => self.receiver(&Receiver::SelfRef),
            ExprKind::Selected if in_where => "_oal_sel".into(),
            ExprKind::Selected => "_oal_no_selected()".into(),
            ExprKind::Attr(recv, attr) => format!("_oal_get({}, {})", self.expr(recv, in_where), json::string(attr)),
            ExprKind::Call(call) => self.call(call, in_where),
            ExprKind::Binary(op @ (BinaryOp::And | BinaryOp::Or), l, r) => format!(
                "(_oal_bool({}) {} _oal_bool({}))",
                self.expr(l, in_where),
                if *op == BinaryOp::And { "and" } else { "or" },
                self.expr(r, in_where)
            ),
            ExprKind::Binary(op, l, r) => {
                format!("_oal_bin(\"{}\", {}, {})", op.as_str(), self.expr(l, in_where), self.expr(r, in_where))
            }
            ExprKind::Unary(op, operand) => format!("_oal_un(\"{}\", {})", op.as_str(), self.expr(operand, in_where)),
        }
    }
}

fn chain_literal(chain: &[NavStep]) -> String {
    let steps: Vec<String> =
        chain.iter().map(|s| format!("({}, {}),", json::string(&s.class), json::string(&s.relation))).collect();
    format!("({})", steps.join(" "))
}
