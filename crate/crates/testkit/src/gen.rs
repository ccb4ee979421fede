//! Seeded random generators.
//!
//! [`random_program`] builds a small, mostly well-typed model with OAL
//! bodies (at most five classes, statement nesting at most three) for
//! end-to-end runs. [`random_ast`] builds syntactically varied method bodies
//! with no typing discipline, for parser round trips.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xuml_core::ingest::{fuse, FusedModel, MethodBundle, MethodEntry};
use xuml_core::model::{
    AttributeDef, ClassDef, ClassModel, Generalization, MethodDef, ParamDef, RelationDef, RelationKind, ValueType,
};
use xuml_core::oal::{
    pretty_print, BinaryOp, Call, Expr, ExprKind, IfArm, LValue, MethodAst, NavStep, Receiver, SelectMode, SourceSpan,
    Stmt, StmtKind, UnaryOp,
};
use xuml_core::value::Value;

pub const MAX_CLASSES: usize = 5;
pub const MAX_DEPTH: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedProgram {
    pub model: ClassModel,
    pub bundle: MethodBundle,
    pub entry: (String, String),
    pub args: Vec<Value>,
}

impl GeneratedProgram {
    pub fn fused(&self) -> Arc<FusedModel> {
        Arc::new(fuse(&self.model, &self.bundle))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Ty {
    Int,
    Real,
    Bool,
    Str,
    Obj(usize),
    Set(usize),
}

struct ClassInfo {
    name: String,
    parent: Option<usize>,
    attrs: Vec<(String, Ty)>,
    methods: Vec<MethodInfo>,
}

#[derive(Clone)]
struct MethodInfo {
    name: String,
    params: Vec<(String, Ty)>,
    is_static: bool,
    returns: Option<Ty>,
}

struct Relation {
    id: String,
    from: usize,
    to: usize,
}

struct Info {
    classes: Vec<ClassInfo>,
    relations: Vec<Relation>,
}

impl Info {
    fn is_a(&self, mut c: usize, ancestor: usize) -> bool {
        loop {
            if c == ancestor {
                return true;
            }
            match self.classes[c].parent {
                Some(p) => c = p,
                None => return false,
            }
        }
    }

    fn lineage(&self, c: usize) -> Vec<usize> {
        let mut out = vec![c];
        while let Some(p) = self.classes[*out.last().expect("non-empty")].parent {
            out.push(p);
        }
        out
    }

    fn attrs(&self, c: usize) -> Vec<(String, Ty)> {
        self.lineage(c).into_iter().flat_map(|k| self.classes[k].attrs.clone()).collect()
    }

    /// Methods callable on `c`, nearest definition first.
    fn methods(&self, c: usize) -> Vec<MethodInfo> {
        let mut out: Vec<MethodInfo> = Vec::new();
        for k in self.lineage(c) {
            for m in &self.classes[k].methods {
                if !out.iter().any(|o| o.name == m.name) {
                    out.push(m.clone());
                }
            }
        }
        out
    }

    fn value_type(&self, ty: Ty) -> ValueType {
        match ty {
            Ty::Int => ValueType::Integer,
            Ty::Real => ValueType::Real,
            Ty::Bool => ValueType::Boolean,
            Ty::Str => ValueType::String,
            Ty::Obj(c) | Ty::Set(c) => ValueType::Handle(self.classes[c].name.clone()),
        }
    }
}

fn span() -> SourceSpan {
    SourceSpan::new(0, 0, 0)
}

fn stmt(kind: StmtKind) -> Stmt {
    Stmt { kind, span: span() }
}

fn ex(kind: ExprKind) -> Expr {
    Expr::new(kind, span())
}

fn bin(op: BinaryOp, l: Expr, r: Expr) -> Expr {
    ex(ExprKind::Binary(op, Box::new(l), Box::new(r)))
}

fn un(op: UnaryOp, e: Expr) -> Expr {
    ex(ExprKind::Unary(op, Box::new(e)))
}

const WORDS: [&str; 6] = ["alpha", "beta", "x y", "q\"t", "back\\slash", "é☃"];

fn scalar_type(rng: &mut ChaCha8Rng) -> Ty {
    *[Ty::Int, Ty::Int, Ty::Real, Ty::Bool, Ty::Str].choose(rng).expect("non-empty")
}

/// A runnable model whose entry is `C0.main`.
pub fn random_program(seed: u64) -> GeneratedProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=MAX_CLASSES);
    let mut info = Info { classes: Vec::new(), relations: Vec::new() };
    for i in 0..n {
        let parent = (i > 0 && rng.gen_bool(0.3)).then(|| rng.gen_range(0..i));
        info.classes.push(ClassInfo { name: format!("C{i}"), parent, attrs: Vec::new(), methods: Vec::new() });
    }
    for i in 0..n {
        for j in 0..rng.gen_range(0..=3) {
            let ty = if rng.gen_bool(0.2) { Ty::Obj(rng.gen_range(0..n)) } else { scalar_type(&mut rng) };
            info.classes[i].attrs.push((format!("c{i}a{j}"), ty));
        }
    }
    for r in 0..rng.gen_range(0..=3) {
        let (from, to) = (rng.gen_range(0..n), rng.gen_range(0..n));
        info.relations.push(Relation { id: format!("R{}", r + 1), from, to });
    }
    let compositions: Vec<bool> = info.relations.iter().map(|_| rng.gen_bool(0.3)).collect();
    for i in 0..n {
        for j in 0..rng.gen_range(0..=2) {
            // Reusing a name lets subclasses override with the same signature.
            let inherited = info.classes[i].parent.map(|p| info.methods(p)).unwrap_or_default();
            let method = match inherited.choose(&mut rng) {
                Some(m) if rng.gen_bool(0.4) && !info.classes[i].methods.iter().any(|o| o.name == m.name) => m.clone(),
                _ => {
                    let params = (0..rng.gen_range(0..=2))
                        .map(|k| {
                            let ty =
                                if rng.gen_bool(0.25) { Ty::Obj(rng.gen_range(0..n)) } else { scalar_type(&mut rng) };
                            (format!("p{k}"), ty)
                        })
                        .collect();
                    let returns = rng.gen_bool(0.5).then(|| scalar_type(&mut rng));
                    MethodInfo { name: format!("m{i}{j}"), params, is_static: rng.gen_bool(0.3), returns }
                }
            };
            info.classes[i].methods.push(method);
        }
    }
    info.classes[0].methods.push(MethodInfo { name: "main".into(), params: vec![], is_static: false, returns: None });

    let mut entries = Vec::new();
    for c in 0..n {
        for m in info.classes[c].methods.clone() {
            let count = if m.name == "main" { rng.gen_range(3..=8) } else { rng.gen_range(0..=4) };
            if count == 0 && rng.gen_bool(0.5) {
                continue;
            }
            let mut body = BodyGen::new(&info, &mut rng, c, &m);
            let ast = body.body(count);
            entries.push(MethodEntry {
                class: info.classes[c].name.clone(),
                method: m.name.clone(),
                code: pretty_print(&ast),
            });
        }
    }

    let model = ClassModel {
        classes: info
            .classes
            .iter()
            .map(|c| ClassDef {
                name: c.name.clone(),
                attributes: c
                    .attrs
                    .iter()
                    .map(|(a, t)| AttributeDef { name: a.clone(), ty: info.value_type(*t) })
                    .collect(),
                methods: c
                    .methods
                    .iter()
                    .map(|m| MethodDef {
                        name: m.name.clone(),
                        is_static: m.is_static,
                        params: m
                            .params
                            .iter()
                            .map(|(p, t)| ParamDef { name: p.clone(), ty: info.value_type(*t) })
                            .collect(),
                        returns: m.returns.map(|t| info.value_type(t)),
                    })
                    .collect(),
            })
            .collect(),
        relations: info
            .relations
            .iter()
            .zip(compositions)
            .map(|(r, composite)| RelationDef {
                id: r.id.clone(),
                kind: if composite { RelationKind::Composition } else { RelationKind::Association },
                from: info.classes[r.from].name.clone(),
                to: info.classes[r.to].name.clone(),
                from_mult: "0..*".into(),
                to_mult: if composite { "0..*".into() } else { "0..1".into() },
            })
            .collect(),
        generalizations: info
            .classes
            .iter()
            .filter_map(|c| c.parent.map(|p| Generalization { sub: c.name.clone(), sup: info.classes[p].name.clone() }))
            .collect(),
    };
    GeneratedProgram { model, bundle: MethodBundle { entries }, entry: ("C0".into(), "main".into()), args: vec![] }
}

struct BodyGen<'a> {
    info: &'a Info,
    rng: &'a mut ChaCha8Rng,
    class: usize,
    is_static: bool,
    returns: Option<Ty>,
    vars: Vec<(String, Ty)>,
    next_var: usize,
}

impl<'a> BodyGen<'a> {
    fn new(info: &'a Info, rng: &'a mut ChaCha8Rng, class: usize, m: &MethodInfo) -> Self {
        BodyGen { info, rng, class, is_static: m.is_static, returns: m.returns, vars: m.params.clone(), next_var: 0 }
    }

    fn body(&mut self, count: usize) -> MethodAst {
        let mut statements = self.block(count, 0);
        if count > 0 && statements.is_empty() {
            let value = self.expr(Ty::Int, 1);
            statements.push(stmt(StmtKind::Assign { target: LValue::Var("v0".into()), value }));
        }
        if let Some(ty) = self.returns {
            if count > 0 {
                let e = self.expr(ty, 2);
                statements.push(stmt(StmtKind::Return(Some(e))));
            }
        }
        MethodAst { statements }
    }

    fn fresh(&mut self, prefix: &str) -> String {
        self.next_var += 1;
        format!("{prefix}{}", self.next_var)
    }

    fn block(&mut self, count: usize, depth: usize) -> Vec<Stmt> {
        let scope = self.vars.len();
        let mut out = Vec::new();
        for _ in 0..count {
            self.stmt(depth, &mut out);
        }
        self.vars.truncate(scope);
        out
    }

    fn vars_of(&self, pred: impl Fn(Ty) -> bool) -> Vec<String> {
        self.vars.iter().filter(|(_, t)| pred(*t)).map(|(n, _)| n.clone()).collect()
    }

    /// A receiver holding an instance of `class` (or a subclass).
    fn handle_of(&mut self, class: Option<usize>) -> Option<(Receiver, usize)> {
        let info = self.info;
        let mut options: Vec<(Receiver, usize)> = self
            .vars
            .iter()
            .filter_map(|(n, t)| match t {
                Ty::Obj(c) if class.is_none_or(|k| info.is_a(*c, k)) => Some((Receiver::Name(n.clone()), *c)),
                _ => None,
            })
            .collect();
        if !self.is_static && class.is_none_or(|k| info.is_a(self.class, k)) {
            options.push((Receiver::SelfRef, self.class));
        }
        options.choose(self.rng).cloned()
    }

    fn recv_expr(r: &Receiver) -> Expr {
        match r {
            Receiver::SelfRef => ex(ExprKind::SelfRef),
            Receiver::Name(n) => ex(ExprKind::Var(n.clone())),
        }
    }

    fn stmt(&mut self, depth: usize, out: &mut Vec<Stmt>) {
        let n = self.info.classes.len();
        let nested = depth < MAX_DEPTH - 1;
        match self.rng.gen_range(0..16) {
            0 | 1 => {
                let class = self.rng.gen_range(0..n);
                let var = self.fresh("o");
                out.push(stmt(StmtKind::Create { var: var.clone(), class: self.info.classes[class].name.clone() }));
                self.vars.push((var, Ty::Obj(class)));
            }
            2 | 3 => {
                let ty = scalar_type(self.rng);
                let value = self.expr(ty, 2);
                let reuse: Vec<String> = self.vars_of(|t| t == ty).into_iter().filter(|v| v.starts_with('v')).collect();
                let var = match reuse.choose(self.rng) {
                    Some(v) if self.rng.gen_bool(0.5) => v.clone(),
                    _ => self.fresh("v"),
                };
                out.push(stmt(StmtKind::Assign { target: LValue::Var(var.clone()), value }));
                self.vars.push((var, ty));
            }
            4 | 5 => {
                let Some((recv, class)) = self.handle_of(None) else { return };
                let attrs = self.info.attrs(class);
                let Some((attr, ty)) = attrs.choose(self.rng).cloned() else { return };
                let value = self.expr(ty, 2);
                out.push(stmt(StmtKind::Assign { target: LValue::Attr(recv, attr), value }));
            }
            6 => {
                let class = self.rng.gen_range(0..n);
                let many = self.rng.gen_bool(0.5);
                let var = self.fresh("s");
                let attrs = self.info.attrs(class);
                let filter = if self.rng.gen_bool(0.5) {
                    let cond = match attrs.iter().find(|(_, t)| *t == Ty::Int) {
                        Some((a, _)) => bin(
                            BinaryOp::Ge,
                            ex(ExprKind::Attr(Box::new(ex(ExprKind::Selected)), a.clone())),
                            ex(ExprKind::Int(self.rng.gen_range(-1..3))),
                        ),
                        None => self.expr(Ty::Bool, 1),
                    };
                    Some(cond)
                } else {
                    None
                };
                let mode = if many { SelectMode::Many } else { SelectMode::Any };
                out.push(stmt(StmtKind::SelectInstances {
                    mode,
                    var: var.clone(),
                    class: self.info.classes[class].name.clone(),
                    filter,
                }));
                self.vars.push((var, if many { Ty::Set(class) } else { Ty::Obj(class) }));
            }
            7 => {
                let Some((start, class)) = self.handle_of(None) else { return };
                let candidates: Vec<(String, usize)> = self
                    .info
                    .relations
                    .iter()
                    .filter_map(|r| {
                        if self.info.is_a(class, r.from) {
                            Some((r.id.clone(), r.to))
                        } else if self.info.is_a(class, r.to) {
                            Some((r.id.clone(), r.from))
                        } else {
                            None
                        }
                    })
                    .collect();
                let Some((rel, target)) = candidates.choose(self.rng).cloned() else { return };
                let many = self.rng.gen_bool(0.5);
                let var = self.fresh("n");
                out.push(stmt(StmtKind::SelectRelated {
                    mode: if many { SelectMode::Many } else { SelectMode::One },
                    var: var.clone(),
                    start,
                    chain: vec![NavStep { class: self.info.classes[target].name.clone(), relation: rel }],
                }));
                self.vars.push((var, if many { Ty::Set(target) } else { Ty::Obj(target) }));
            }
            8 => {
                let Some(r) = self.info.relations.choose(self.rng) else { return };
                let (id, from, to) = (r.id.clone(), r.from, r.to);
                let (Some((a, _)), Some((b, _))) = (self.handle_of(Some(from)), self.handle_of(Some(to))) else {
                    return;
                };
                let kind = if self.rng.gen_bool(0.8) {
                    StmtKind::Relate { a, b, relation: id }
                } else {
                    StmtKind::Unrelate { a, b, relation: id }
                };
                out.push(stmt(kind));
            }
            9 if nested => {
                let cond = self.expr(Ty::Bool, 2);
                let mut arms = vec![IfArm { cond, body: self.sub_block(depth) }];
                if self.rng.gen_bool(0.3) {
                    let cond = self.expr(Ty::Bool, 1);
                    arms.push(IfArm { cond, body: self.sub_block(depth) });
                }
                let else_body = self.rng.gen_bool(0.4).then(|| self.sub_block(depth));
                out.push(stmt(StmtKind::If { arms, else_body }));
            }
            10 if nested => {
                let counter = self.fresh("w");
                let limit = self.rng.gen_range(0..4);
                out.push(stmt(StmtKind::Assign { target: LValue::Var(counter.clone()), value: ex(ExprKind::Int(0)) }));
                self.vars.push((counter.clone(), Ty::Int));
                let mut body = self.sub_block(depth);
                body.push(stmt(StmtKind::Assign {
                    target: LValue::Var(counter.clone()),
                    value: bin(BinaryOp::Add, ex(ExprKind::Var(counter.clone())), ex(ExprKind::Int(1))),
                }));
                let cond = bin(BinaryOp::Lt, ex(ExprKind::Var(counter)), ex(ExprKind::Int(limit)));
                out.push(stmt(StmtKind::While { cond, body }));
            }
            11 if nested => {
                let sets: Vec<(String, Ty)> =
                    self.vars.iter().filter(|(_, t)| matches!(t, Ty::Set(_))).cloned().collect();
                let Some((set, Ty::Set(class))) = sets.choose(self.rng).cloned() else { return };
                let var = self.fresh("e");
                let scope = self.vars.len();
                self.vars.push((var.clone(), Ty::Obj(class)));
                let count = self.rng.gen_range(1..=2);
                let body = self.block(count, depth + 1);
                self.vars.truncate(scope);
                out.push(stmt(StmtKind::ForEach { var, set, body }));
            }
            12 | 13 => {
                if let Some(call) = self.call(None) {
                    out.push(stmt(StmtKind::Call(call)));
                }
            }
            14 => {
                let targets = self.vars_of(|t| matches!(t, Ty::Obj(_)));
                if let Some(t) = targets.choose(self.rng) {
                    out.push(stmt(StmtKind::Delete { target: Receiver::Name(t.clone()) }));
                }
            }
            _ => {
                // Occasionally ill-typed on purpose: runtime errors must trace cleanly too.
                let var = self.fresh("bad");
                let value = match self.rng.gen_range(0..4) {
                    0 => bin(BinaryOp::Div, ex(ExprKind::Int(1)), ex(ExprKind::Int(0))),
                    1 => bin(BinaryOp::Add, ex(ExprKind::Int(1)), ex(ExprKind::Str("x".into()))),
                    2 => ex(ExprKind::Attr(Box::new(ex(ExprKind::NoneLit)), "nope".into())),
                    _ => self.expr(Ty::Int, 1),
                };
                if self.rng.gen_bool(0.3) {
                    out.push(stmt(StmtKind::Assign { target: LValue::Var(var), value }));
                }
            }
        }
    }

    fn sub_block(&mut self, depth: usize) -> Vec<Stmt> {
        let count = self.rng.gen_range(1..=2);
        self.block(count, depth + 1)
    }

    /// A call to some method, optionally constrained to a return type.
    fn call(&mut self, returns: Option<Ty>) -> Option<Call> {
        let n = self.info.classes.len();
        let class = self.rng.gen_range(0..n);
        let methods: Vec<MethodInfo> = self
            .info
            .methods(class)
            .into_iter()
            .filter(|m| m.name != "main" && returns.is_none_or(|r| m.returns == Some(r)))
            .collect();
        let m = methods.choose(self.rng)?.clone();
        let receiver = if m.is_static && self.rng.gen_bool(0.7) {
            Receiver::Name(self.info.classes[class].name.clone())
        } else {
            self.handle_of(Some(class))?.0
        };
        let args = m.params.iter().map(|(_, t)| self.expr(*t, 1)).collect();
        Some(Call { receiver, method: m.name, args })
    }

    fn expr(&mut self, ty: Ty, depth: usize) -> Expr {
        let leaf = depth == 0 || self.rng.gen_bool(0.35);
        let vars = self.vars_of(|t| t == ty);
        if !vars.is_empty() && self.rng.gen_bool(0.3) {
            return ex(ExprKind::Var(vars.choose(self.rng).expect("non-empty").clone()));
        }
        if !leaf && self.rng.gen_bool(0.15) {
            if let Some(recv) = self.handle_of(None) {
                let attrs: Vec<String> =
                    self.info.attrs(recv.1).into_iter().filter(|(_, t)| *t == ty).map(|(a, _)| a).collect();
                if let Some(a) = attrs.choose(self.rng) {
                    return ex(ExprKind::Attr(Box::new(Self::recv_expr(&recv.0)), a.clone()));
                }
            }
        }
        if !leaf && self.rng.gen_bool(0.08) {
            if let Some(call) = self.call(Some(ty)) {
                return ex(ExprKind::Call(call));
            }
        }
        let d = depth.saturating_sub(1);
        match ty {
            Ty::Int if !leaf => match self.rng.gen_range(0..4) {
                0 => bin(BinaryOp::Add, self.expr(Ty::Int, d), self.expr(Ty::Int, d)),
                1 => bin(BinaryOp::Sub, self.expr(Ty::Int, d), self.expr(Ty::Int, d)),
                2 => bin(BinaryOp::Mul, self.expr(Ty::Int, d), self.expr(Ty::Int, d)),
                _ => match self.vars_of(|t| matches!(t, Ty::Set(_) | Ty::Obj(_))).choose(self.rng) {
                    Some(v) => un(UnaryOp::Cardinality, ex(ExprKind::Var(v.clone()))),
                    None => un(UnaryOp::Neg, self.expr(Ty::Int, d)),
                },
            },
            Ty::Int => ex(ExprKind::Int(self.rng.gen_range(0..10))),
            Ty::Real if !leaf => match self.rng.gen_range(0..3) {
                0 => bin(BinaryOp::Div, self.expr(Ty::Int, d), ex(ExprKind::Int(self.rng.gen_range(1..5)))),
                1 => bin(BinaryOp::Mul, self.expr(Ty::Real, d), self.expr(Ty::Int, d)),
                _ => bin(BinaryOp::Sub, self.expr(Ty::Real, d), self.expr(Ty::Real, d)),
            },
            Ty::Real => ex(ExprKind::Real(*[0.5, 0.1, 2.25, 1e-7, 3e17, 0.0].choose(self.rng).expect("non-empty"))),
            Ty::Bool if !leaf => match self.rng.gen_range(0..5) {
                0 => {
                    let op = *[BinaryOp::Lt, BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge, BinaryOp::Eq, BinaryOp::Ne]
                        .choose(self.rng)
                        .expect("non-empty");
                    let t = *[Ty::Int, Ty::Real, Ty::Str].choose(self.rng).expect("non-empty");
                    bin(op, self.expr(t, d), self.expr(t, d))
                }
                1 => bin(BinaryOp::And, self.expr(Ty::Bool, d), self.expr(Ty::Bool, d)),
                2 => bin(BinaryOp::Or, self.expr(Ty::Bool, d), self.expr(Ty::Bool, d)),
                3 => un(UnaryOp::Not, self.expr(Ty::Bool, d)),
                _ => match self.vars_of(|t| matches!(t, Ty::Set(_) | Ty::Obj(_))).choose(self.rng) {
                    Some(v) => {
                        let op = if self.rng.gen_bool(0.5) { UnaryOp::Empty } else { UnaryOp::NotEmpty };
                        un(op, ex(ExprKind::Var(v.clone())))
                    }
                    None => ex(ExprKind::Bool(self.rng.gen_bool(0.5))),
                },
            },
            Ty::Bool => ex(ExprKind::Bool(self.rng.gen_bool(0.5))),
            Ty::Str if !leaf => bin(BinaryOp::Add, self.expr(Ty::Str, d), self.expr(Ty::Str, d)),
            Ty::Str => ex(ExprKind::Str(WORDS.choose(self.rng).expect("non-empty").to_string())),
            Ty::Obj(c) => match self.handle_of(Some(c)) {
                Some((r, _)) if self.rng.gen_bool(0.8) => Self::recv_expr(&r),
                _ => ex(ExprKind::NoneLit),
            },
            Ty::Set(_) => ex(ExprKind::NoneLit),
        }
    }
}

/// Identifiers that lex as identifiers: no keywords, no relation ids.
const IDENTS: [&str; 8] = ["a", "b", "count", "Dog", "x_1", "_tmp", "Rx", "selectedItem"];
const CLASSES: [&str; 4] = ["Dog", "Park", "C0", "Ranger"];

/// A syntactically varied body of at most `depth` nesting levels.
pub fn random_ast(seed: u64, depth: usize) -> MethodAst {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(1..=5);
    MethodAst { statements: (0..count).map(|_| syn_stmt(&mut rng, depth)).collect() }
}

fn pick<'a>(rng: &mut ChaCha8Rng, items: &[&'a str]) -> &'a str {
    items.choose(rng).expect("non-empty")
}

fn syn_receiver(rng: &mut ChaCha8Rng) -> Receiver {
    if rng.gen_bool(0.2) {
        Receiver::SelfRef
    } else {
        Receiver::Name(pick(rng, &IDENTS).to_string())
    }
}

fn syn_block(rng: &mut ChaCha8Rng, depth: usize) -> Vec<Stmt> {
    let count = rng.gen_range(0..=3);
    (0..count).map(|_| syn_stmt(rng, depth - 1)).collect()
}

fn syn_stmt(rng: &mut ChaCha8Rng, depth: usize) -> Stmt {
    let top = if depth > 0 { 14 } else { 11 };
    let kind = match rng.gen_range(0..top) {
        0 => StmtKind::Create { var: pick(rng, &IDENTS).into(), class: pick(rng, &CLASSES).into() },
        1 => StmtKind::Delete { target: syn_receiver(rng) },
        2 | 3 => {
            let target = if rng.gen_bool(0.5) {
                LValue::Var(pick(rng, &IDENTS).into())
            } else {
                LValue::Attr(syn_receiver(rng), pick(rng, &IDENTS).into())
            };
            StmtKind::Assign { target, value: syn_expr(rng, 3) }
        }
        4 => StmtKind::SelectInstances {
            mode: if rng.gen_bool(0.5) { SelectMode::Any } else { SelectMode::Many },
            var: pick(rng, &IDENTS).into(),
            class: pick(rng, &CLASSES).into(),
            filter: rng.gen_bool(0.5).then(|| syn_expr(rng, 2)),
        },
        5 => StmtKind::SelectRelated {
            mode: *[SelectMode::One, SelectMode::Any, SelectMode::Many].choose(rng).expect("non-empty"),
            var: pick(rng, &IDENTS).into(),
            start: syn_receiver(rng),
            chain: (0..rng.gen_range(1..=3))
                .map(|_| NavStep { class: pick(rng, &CLASSES).into(), relation: format!("R{}", rng.gen_range(1..30)) })
                .collect(),
        },
        6 => StmtKind::Relate {
            a: syn_receiver(rng),
            b: syn_receiver(rng),
            relation: format!("R{}", rng.gen_range(1..9)),
        },
        7 => StmtKind::Unrelate {
            a: syn_receiver(rng),
            b: syn_receiver(rng),
            relation: format!("R{}", rng.gen_range(1..9)),
        },
        8 => StmtKind::Return(rng.gen_bool(0.6).then(|| syn_expr(rng, 3))),
        9 | 10 => StmtKind::Call(syn_call(rng, 2)),
        11 => {
            let arms = (0..rng.gen_range(1..=3))
                .map(|_| IfArm { cond: syn_expr(rng, 2), body: syn_block(rng, depth) })
                .collect();
            StmtKind::If { arms, else_body: rng.gen_bool(0.5).then(|| syn_block(rng, depth)) }
        }
        12 => StmtKind::While { cond: syn_expr(rng, 2), body: syn_block(rng, depth) },
        _ => StmtKind::ForEach {
            var: pick(rng, &IDENTS).into(),
            set: pick(rng, &IDENTS).into(),
            body: syn_block(rng, depth),
        },
    };
    stmt(kind)
}

fn syn_call(rng: &mut ChaCha8Rng, depth: usize) -> Call {
    let receiver = if rng.gen_bool(0.3) { Receiver::Name(pick(rng, &CLASSES).into()) } else { syn_receiver(rng) };
    let args = (0..rng.gen_range(0..=3)).map(|_| syn_expr(rng, depth)).collect();
    Call { receiver, method: pick(rng, &IDENTS).into(), args }
}

fn syn_expr(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.3) {
        return ex(match rng.gen_range(0..9) {
            0 => ExprKind::Int(rng.gen_range(0..i64::MAX)),
            1 => ExprKind::Int(rng.gen_range(0..100)),
            2 => {
                let r: f64 = rng.gen_range(0.0..1e6);
                ExprKind::Real(*[r, 0.0, 1e-9, 2.5e21, 0.1].choose(rng).expect("non-empty"))
            }
            3 => ExprKind::Str(pick(rng, &WORDS).into()),
            4 => ExprKind::Bool(rng.gen_bool(0.5)),
            5 => ExprKind::NoneLit,
            6 => ExprKind::SelfRef,
            7 => ExprKind::Selected,
            _ => ExprKind::Var(pick(rng, &IDENTS).into()),
        });
    }
    let d = depth - 1;
    match rng.gen_range(0..5) {
        0 | 1 => {
            let op = *[
                BinaryOp::Add,
                BinaryOp::Sub,
                BinaryOp::Mul,
                BinaryOp::Div,
                BinaryOp::Eq,
                BinaryOp::Ne,
                BinaryOp::Lt,
                BinaryOp::Le,
                BinaryOp::Gt,
                BinaryOp::Ge,
                BinaryOp::And,
                BinaryOp::Or,
            ]
            .choose(rng)
            .expect("non-empty");
            bin(op, syn_expr(rng, d), syn_expr(rng, d))
        }
        2 => {
            let op = *[UnaryOp::Neg, UnaryOp::Not, UnaryOp::Cardinality, UnaryOp::Empty, UnaryOp::NotEmpty]
                .choose(rng)
                .expect("non-empty");
            un(op, syn_expr(rng, d))
        }
        3 => ex(ExprKind::Attr(Box::new(syn_expr(rng, d)), pick(rng, &IDENTS).into())),
        _ => ex(ExprKind::Call(syn_call(rng, d))),
    }
}
