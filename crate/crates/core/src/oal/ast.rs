use super::token::SourceSpan;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MethodAst {
    pub statements: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: SourceSpan,
}

/// Receiver of a call or an attribute target: a named variable (or class,
/// for static calls) or `self`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Receiver {
    Name(String),
    SelfRef,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LValue {
    Var(String),
    Attr(Receiver, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectMode {
    One,
    Any,
    Many,
}

impl SelectMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SelectMode::One => "one",
            SelectMode::Any => "any",
            SelectMode::Many => "many",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NavStep {
    pub class: String,
    pub relation: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IfArm {
    pub cond: Expr,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Create { var: String, class: String },
    Delete { target: Receiver },
    Assign { target: LValue, value: Expr },
    SelectInstances { mode: SelectMode, var: String, class: String, filter: Option<Expr> },
    SelectRelated { mode: SelectMode, var: String, start: Receiver, chain: Vec<NavStep> },
    Relate { a: Receiver, b: Receiver, relation: String },
    Unrelate { a: Receiver, b: Receiver, relation: String },
    If { arms: Vec<IfArm>, else_body: Option<Vec<Stmt>> },
    While { cond: Expr, body: Vec<Stmt> },
    ForEach { var: String, set: String, body: Vec<Stmt> },
    Return(Option<Expr>),
    Call(Call),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Call {
    pub receiver: Receiver,
    pub method: String,
    pub args: Vec<Expr>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinaryOp {
    pub fn as_str(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::And => "and",
            BinaryOp::Or => "or",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::Ne | BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul | BinaryOp::Div => 6,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 4
    }
}

/// Precedence of `not`, between `and` and the comparisons.
pub const NOT_PRECEDENCE: u8 = 3;
/// Precedence of the prefix operators `-`, `cardinality`, `empty`, `not_empty`.
pub const PREFIX_PRECEDENCE: u8 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Not,
    Cardinality,
    Empty,
    NotEmpty,
}

impl UnaryOp {
    pub fn as_str(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Not => "not",
            UnaryOp::Cardinality => "cardinality",
            UnaryOp::Empty => "empty",
            UnaryOp::NotEmpty => "not_empty",
        }
    }

    pub fn precedence(self) -> u8 {
        match self {
            UnaryOp::Not => NOT_PRECEDENCE,
            _ => PREFIX_PRECEDENCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Int(i64),
    Real(f64),
    Str(String),
    Bool(bool),
    NoneLit,
    Var(String),
    SelfRef,
    Selected,
    Attr(Box<Expr>, String),
    Call(Call),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Unary(UnaryOp, Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: SourceSpan) -> Self {
        Expr { kind, span }
    }
}

impl MethodAst {
    /// Copy of the tree with every span zeroed, for structural comparison.
    pub fn without_spans(&self) -> MethodAst {
        MethodAst { statements: self.statements.iter().map(Stmt::without_spans).collect() }
    }

    /// Number of statements, counting nested ones.
    pub fn command_count(&self) -> usize {
        fn count(stmts: &[Stmt]) -> usize {
            stmts
                .iter()
                .map(|s| {
                    1 + match &s.kind {
                        StmtKind::If { arms, else_body } => {
                            arms.iter().map(|a| count(&a.body)).sum::<usize>() + else_body.as_deref().map_or(0, count)
                        }
                        StmtKind::While { body, .. } | StmtKind::ForEach { body, .. } => count(body),
                        _ => 0,
                    }
                })
                .sum()
        }
        count(&self.statements)
    }
}

fn strip_block(stmts: &[Stmt]) -> Vec<Stmt> {
    stmts.iter().map(Stmt::without_spans).collect()
}

impl Stmt {
    pub fn without_spans(&self) -> Stmt {
        let kind = match &self.kind {
            StmtKind::Assign { target, value } => {
                StmtKind::Assign { target: target.clone(), value: value.without_spans() }
            }
            StmtKind::SelectInstances { mode, var, class, filter } => StmtKind::SelectInstances {
                mode: *mode,
                var: var.clone(),
                class: class.clone(),
                filter: filter.as_ref().map(Expr::without_spans),
            },
            StmtKind::If { arms, else_body } => StmtKind::If {
                arms: arms.iter().map(|a| IfArm { cond: a.cond.without_spans(), body: strip_block(&a.body) }).collect(),
                else_body: else_body.as_deref().map(strip_block),
            },
            StmtKind::While { cond, body } => StmtKind::While { cond: cond.without_spans(), body: strip_block(body) },
            StmtKind::ForEach { var, set, body } => {
                StmtKind::ForEach { var: var.clone(), set: set.clone(), body: strip_block(body) }
            }
            StmtKind::Return(value) => StmtKind::Return(value.as_ref().map(Expr::without_spans)),
            StmtKind::Call(call) => StmtKind::Call(call.without_spans()),
            other => other.clone(),
        };
        Stmt { kind, span: SourceSpan::default() }
    }
}

impl Call {
    fn without_spans(&self) -> Call {
        Call {
            receiver: self.receiver.clone(),
            method: self.method.clone(),
            args: self.args.iter().map(Expr::without_spans).collect(),
        }
    }
}

impl Expr {
    pub fn without_spans(&self) -> Expr {
        let kind = match &self.kind {
            ExprKind::Attr(recv, attr) => ExprKind::Attr(Box::new(recv.without_spans()), attr.clone()),
            ExprKind::Call(call) => ExprKind::Call(call.without_spans()),
            ExprKind::Binary(op, l, r) => {
                ExprKind::Binary(*op, Box::new(l.without_spans()), Box::new(r.without_spans()))
            }
            ExprKind::Unary(op, e) => ExprKind::Unary(*op, Box::new(e.without_spans())),
            other => other.clone(),
        };
        Expr { kind, span: SourceSpan::default() }
    }
}
