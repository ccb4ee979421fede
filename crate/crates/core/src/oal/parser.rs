//! Recursive-descent parser for OAL method bodies.
//!
//! Expression precedence, loosest first: `or`, `and`, `not`, comparisons
//! (non-associative), `+ -`, `* /`, prefix `- cardinality empty not_empty`,
//! then postfix attribute access and primaries. A syntax error inside a
//! statement skips ahead to the next `;` and parsing resumes from there.

use super::ast::*;
use super::lexer::lex;
use super::token::{Keyword, SourceSpan, Token, TokenKind};
use super::Diagnostic;

const MAX_NESTING: usize = 64;

/// Parses a method body, returning every diagnostic found when it fails.
pub fn parse_method_body(source: &str) -> Result<MethodAst, Vec<Diagnostic>> {
    let (mut tokens, mut diags) = lex(source);
    let eof_span = match tokens.last() {
        Some(t) => SourceSpan::new(t.span.line, t.span.col_end, t.span.col_end),
        None => SourceSpan::new(1, 0, 0),
    };
    tokens.push(Token { kind: TokenKind::Eof, text: String::new(), span: eof_span });
    let mut parser = Parser { tokens, pos: 0, diags: Vec::new(), depth: 0 };
    let statements = parser.body();
    diags.append(&mut parser.diags);
    if diags.is_empty() {
        Ok(MethodAst { statements })
    } else {
        diags.sort_by_key(|d| (d.span.line, d.span.col_start));
        Err(diags)
    }
}

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn peek_at(&self, offset: usize) -> &TokenKind {
        let idx = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[idx].kind
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), TokenKind::Eof)
    }

    fn at_kw(&self, kw: Keyword) -> bool {
        matches!(self.peek(), TokenKind::Keyword(k) if *k == kw)
    }

    fn bump(&mut self) -> usize {
        let idx = self.pos;
        if !self.at_eof() {
            self.pos += 1;
        }
        idx
    }

    fn error_here(&self, expected: &str) -> Diagnostic {
        let tok = &self.tokens[self.pos];
        Diagnostic::error(format!("expected {expected}, found {}", tok.kind.describe()), tok.span)
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<usize> {
        if *self.peek() == kind {
            Ok(self.bump())
        } else {
            Err(self.error_here(&format!("`{}`", kind.symbol())))
        }
    }

    fn expect_kw(&mut self, kw: Keyword) -> PResult<usize> {
        if self.at_kw(kw) {
            Ok(self.bump())
        } else {
            Err(self.error_here(&format!("`{}`", kw.as_str())))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            TokenKind::Ident(name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.error_here("identifier")),
        }
    }

    fn relation_id(&mut self) -> PResult<String> {
        match self.peek().clone() {
            TokenKind::RelId(id) => {
                self.bump();
                Ok(id)
            }
            _ => Err(self.error_here("relation id")),
        }
    }

    fn receiver(&mut self) -> PResult<Receiver> {
        match self.peek().clone() {
            TokenKind::Ident(name) => {
                self.bump();
                Ok(Receiver::Name(name))
            }
            TokenKind::Keyword(Keyword::SelfKw) => {
                self.bump();
                Ok(Receiver::SelfRef)
            }
            _ => Err(self.error_here("identifier or `self`")),
        }
    }

    /// Span from token `first` through token `last`, clipped to the line of `first`.
    fn span(&self, first: usize, last: usize) -> SourceSpan {
        let start = self.tokens[first].span;
        let col_end = self.tokens[first..=last.max(first)]
            .iter()
            .filter(|t| t.span.line == start.line && !matches!(t.kind, TokenKind::Eof))
            .map(|t| t.span.col_end)
            .max()
            .unwrap_or(start.col_end);
        SourceSpan::new(start.line, start.col_start, col_end.max(start.col_start))
    }

    fn last(&self) -> usize {
        self.pos.saturating_sub(1)
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            Err(Diagnostic::error("nesting too deep", self.tokens[self.pos].span))
        } else {
            Ok(())
        }
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    /// Skips past the next `;`, always consuming at least one token when
    /// no progress was made since `start`.
    fn synchronize(&mut self, start: usize) {
        if self.pos == start {
            self.bump();
        }
        while !self.at_eof() {
            if matches!(self.peek(), TokenKind::Semicolon) {
                self.bump();
                return;
            }
            self.bump();
        }
    }

    fn body(&mut self) -> Vec<Stmt> {
        let mut stmts = Vec::new();
        while !self.at_eof() {
            stmts.extend(self.block());
            if !self.at_eof() {
                // A stray `end`, `elif` or `else` outside any block.
                let start = self.pos;
                let diag = self.error_here("statement");
                self.diags.push(diag);
                self.synchronize(start);
            }
        }
        stmts
    }

    /// Statements up to (not including) `end`, `elif`, `else` or end of input.
    fn block(&mut self) -> Vec<Stmt> {
        let mut stmts = Vec::new();
        loop {
            if self.at_eof() || self.at_kw(Keyword::End) || self.at_kw(Keyword::Elif) || self.at_kw(Keyword::Else) {
                return stmts;
            }
            let start = self.pos;
            let depth = self.depth;
            match self.stmt() {
                Ok(stmt) => stmts.push(stmt),
                Err(diag) => {
                    self.depth = depth;
                    self.diags.push(diag);
                    self.synchronize(start);
                }
            }
        }
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let first = self.pos;
        let kind = match self.peek().clone() {
            TokenKind::Keyword(Keyword::Create) => {
                self.bump();
                self.expect_kw(Keyword::Object)?;
                self.expect_kw(Keyword::Instance)?;
                let var = self.ident()?;
                self.expect_kw(Keyword::Of)?;
                let class = self.ident()?;
                self.expect(TokenKind::Semicolon)?;
                StmtKind::Create { var, class }
            }
            TokenKind::Keyword(Keyword::Delete) => {
                self.bump();
                self.expect_kw(Keyword::Object)?;
                self.expect_kw(Keyword::Instance)?;
                let target = self.receiver()?;
                self.expect(TokenKind::Semicolon)?;
                StmtKind::Delete { target }
            }
            TokenKind::Keyword(Keyword::Assign) => {
                self.bump();
                self.assignment()?
            }
            TokenKind::Keyword(Keyword::Select) => self.select()?,
            TokenKind::Keyword(kw @ (Keyword::Relate | Keyword::Unrelate)) => {
                self.bump();
                let a = self.receiver()?;
                if kw == Keyword::Relate {
                    self.expect_kw(Keyword::To)?;
                } else {
                    self.expect_kw(Keyword::From)?;
                }
                let b = self.receiver()?;
                self.expect_kw(Keyword::Across)?;
                let relation = self.relation_id()?;
                self.expect(TokenKind::Semicolon)?;
                if kw == Keyword::Relate {
                    StmtKind::Relate { a, b, relation }
                } else {
                    StmtKind::Unrelate { a, b, relation }
                }
            }
            TokenKind::Keyword(Keyword::If) => return self.if_stmt(),
            TokenKind::Keyword(Keyword::While) => {
                self.bump();
                let cond = self.paren_expr()?;
                let span = self.span(first, self.last());
                self.enter()?;
                let body = self.block();
                self.leave();
                self.block_end(Keyword::While)?;
                return Ok(Stmt { kind: StmtKind::While { cond, body }, span });
            }
            TokenKind::Keyword(Keyword::For) => {
                self.bump();
                self.expect_kw(Keyword::Each)?;
                let var = self.ident()?;
                self.expect_kw(Keyword::In)?;
                let set = self.ident()?;
                let span = self.span(first, self.last());
                self.enter()?;
                let body = self.block();
                self.leave();
                self.block_end(Keyword::For)?;
                return Ok(Stmt { kind: StmtKind::ForEach { var, set, body }, span });
            }
            TokenKind::Keyword(Keyword::Return) => {
                self.bump();
                let value = if matches!(self.peek(), TokenKind::Semicolon) { None } else { Some(self.expr()?) };
                self.expect(TokenKind::Semicolon)?;
                StmtKind::Return(value)
            }
            TokenKind::Ident(_) | TokenKind::Keyword(Keyword::SelfKw) => {
                let is_call = matches!(self.peek_at(1), TokenKind::Dot)
                    && matches!(self.peek_at(2), TokenKind::Ident(_))
                    && matches!(self.peek_at(3), TokenKind::LParen);
                if is_call {
                    let receiver = self.receiver()?;
                    let call = self.call_tail(receiver)?;
                    self.expect(TokenKind::Semicolon)?;
                    StmtKind::Call(call)
                } else {
                    self.assignment()?
                }
            }
            _ => return Err(self.error_here("statement")),
        };
        Ok(Stmt { kind, span: self.span(first, self.last()) })
    }

    fn assignment(&mut self) -> PResult<StmtKind> {
        let target = match self.receiver()? {
            Receiver::Name(name) if !matches!(self.peek(), TokenKind::Dot) => LValue::Var(name),
            recv => {
                self.expect(TokenKind::Dot)?;
                LValue::Attr(recv, self.ident()?)
            }
        };
        self.expect(TokenKind::Assign)?;
        let value = self.expr()?;
        self.expect(TokenKind::Semicolon)?;
        Ok(StmtKind::Assign { target, value })
    }

    fn select(&mut self) -> PResult<StmtKind> {
        self.expect_kw(Keyword::Select)?;
        let mode = match self.peek() {
            TokenKind::Keyword(Keyword::One) => SelectMode::One,
            TokenKind::Keyword(Keyword::Any) => SelectMode::Any,
            TokenKind::Keyword(Keyword::Many) => SelectMode::Many,
            _ => return Err(self.error_here("`one`, `any` or `many`")),
        };
        let mode_tok = self.bump();
        let var = self.ident()?;
        if self.at_kw(Keyword::From) {
            if mode == SelectMode::One {
                return Err(Diagnostic::error(
                    "`select one` needs `related by`; use `any` or `many` with `from instances of`",
                    self.tokens[mode_tok].span,
                ));
            }
            self.bump();
            self.expect_kw(Keyword::Instances)?;
            self.expect_kw(Keyword::Of)?;
            let class = self.ident()?;
            let filter = if self.at_kw(Keyword::Where) {
                self.bump();
                Some(self.paren_expr()?)
            } else {
                None
            };
            self.expect(TokenKind::Semicolon)?;
            Ok(StmtKind::SelectInstances { mode, var, class, filter })
        } else {
            self.expect_kw(Keyword::Related)?;
            self.expect_kw(Keyword::By)?;
            let start = self.receiver()?;
            let mut chain = Vec::new();
            loop {
                self.expect(TokenKind::Arrow)?;
                let class = self.ident()?;
                self.expect(TokenKind::LBracket)?;
                let relation = self.relation_id()?;
                self.expect(TokenKind::RBracket)?;
                chain.push(NavStep { class, relation });
                if !matches!(self.peek(), TokenKind::Arrow) {
                    break;
                }
            }
            self.expect(TokenKind::Semicolon)?;
            Ok(StmtKind::SelectRelated { mode, var, start, chain })
        }
    }

    fn if_stmt(&mut self) -> PResult<Stmt> {
        let first = self.expect_kw(Keyword::If)?;
        let cond = self.paren_expr()?;
        let span = self.span(first, self.last());
        self.enter()?;
        let mut arms = vec![IfArm { cond, body: self.block() }];
        let mut else_body = None;
        loop {
            if self.at_kw(Keyword::Elif) {
                self.bump();
                let cond = self.paren_expr()?;
                arms.push(IfArm { cond, body: self.block() });
            } else if self.at_kw(Keyword::Else) {
                self.bump();
                else_body = Some(self.block());
                break;
            } else {
                break;
            }
        }
        self.leave();
        self.block_end(Keyword::If)?;
        Ok(Stmt { kind: StmtKind::If { arms, else_body }, span })
    }

    fn block_end(&mut self, kw: Keyword) -> PResult<()> {
        self.expect_kw(Keyword::End)?;
        self.expect_kw(kw)?;
        self.expect(TokenKind::Semicolon)?;
        Ok(())
    }

    fn paren_expr(&mut self) -> PResult<Expr> {
        self.expect(TokenKind::LParen)?;
        let e = self.expr()?;
        self.expect(TokenKind::RParen)?;
        Ok(e)
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.enter()?;
        let e = self.or_expr();
        self.leave();
        e
    }

    fn binary(&self, op: BinaryOp, lhs: Expr, rhs: Expr, first: usize) -> Expr {
        Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), self.span(first, self.last()))
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        let first = self.pos;
        let mut lhs = self.and_expr()?;
        while self.at_kw(Keyword::Or) {
            self.bump();
            let rhs = self.and_expr()?;
            lhs = self.binary(BinaryOp::Or, lhs, rhs, first);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let first = self.pos;
        let mut lhs = self.not_expr()?;
        while self.at_kw(Keyword::And) {
            self.bump();
            let rhs = self.not_expr()?;
            lhs = self.binary(BinaryOp::And, lhs, rhs, first);
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if self.at_kw(Keyword::Not) {
            let first = self.bump();
            self.enter()?;
            let operand = self.not_expr();
            self.leave();
            let operand = operand?;
            return Ok(Expr::new(ExprKind::Unary(UnaryOp::Not, Box::new(operand)), self.span(first, self.last())));
        }
        self.comparison()
    }

    fn comparison_op(&self) -> Option<BinaryOp> {
        Some(match self.peek() {
            TokenKind::EqEq => BinaryOp::Eq,
            TokenKind::NotEq => BinaryOp::Ne,
            TokenKind::Lt => BinaryOp::Lt,
            TokenKind::Le => BinaryOp::Le,
            TokenKind::Gt => BinaryOp::Gt,
            TokenKind::Ge => BinaryOp::Ge,
            _ => return None,
        })
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let first = self.pos;
        let lhs = self.additive()?;
        let Some(op) = self.comparison_op() else {
            return Ok(lhs);
        };
        self.bump();
        let rhs = self.additive()?;
        if self.comparison_op().is_some() {
            return Err(Diagnostic::error(
                "comparison operators cannot be chained; add parentheses",
                self.tokens[self.pos].span,
            ));
        }
        Ok(self.binary(op, lhs, rhs, first))
    }

    fn additive(&mut self) -> PResult<Expr> {
        let first = self.pos;
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                TokenKind::Plus => BinaryOp::Add,
                TokenKind::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.multiplicative()?;
            lhs = self.binary(op, lhs, rhs, first);
        }
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        let first = self.pos;
        let mut lhs = self.prefix()?;
        loop {
            let op = match self.peek() {
                TokenKind::Star => BinaryOp::Mul,
                TokenKind::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.prefix()?;
            lhs = self.binary(op, lhs, rhs, first);
        }
    }

    fn prefix(&mut self) -> PResult<Expr> {
        let op = match self.peek() {
            TokenKind::Minus => UnaryOp::Neg,
            TokenKind::Keyword(Keyword::Cardinality) => UnaryOp::Cardinality,
            TokenKind::Keyword(Keyword::Empty) => UnaryOp::Empty,
            TokenKind::Keyword(Keyword::NotEmpty) => UnaryOp::NotEmpty,
            _ => return self.postfix(),
        };
        let first = self.bump();
        self.enter()?;
        let operand = self.prefix();
        self.leave();
        let operand = operand?;
        Ok(Expr::new(ExprKind::Unary(op, Box::new(operand)), self.span(first, self.last())))
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let first = self.pos;
        let mut e = self.primary()?;
        while matches!(self.peek(), TokenKind::Dot) {
            self.bump();
            let attr = self.ident()?;
            if matches!(self.peek(), TokenKind::LParen) {
                return Err(Diagnostic::error(
                    "method calls need a variable, class name or `self` as receiver",
                    self.tokens[self.pos].span,
                ));
            }
            e = Expr::new(ExprKind::Attr(Box::new(e), attr), self.span(first, self.last()));
        }
        Ok(e)
    }

    fn call_tail(&mut self, receiver: Receiver) -> PResult<Call> {
        self.expect(TokenKind::Dot)?;
        let method = self.ident()?;
        self.expect(TokenKind::LParen)?;
        let mut args = Vec::new();
        if !matches!(self.peek(), TokenKind::RParen) {
            loop {
                args.push(self.expr()?);
                if matches!(self.peek(), TokenKind::Comma) {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen)?;
        Ok(Call { receiver, method, args })
    }

    fn primary(&mut self) -> PResult<Expr> {
        let first = self.pos;
        let is_call = matches!(self.peek_at(1), TokenKind::Dot)
            && matches!(self.peek_at(2), TokenKind::Ident(_))
            && matches!(self.peek_at(3), TokenKind::LParen);
        let kind = match self.peek().clone() {
            TokenKind::Int(v) => {
                self.bump();
                ExprKind::Int(v)
            }
            TokenKind::Real(v) => {
                self.bump();
                ExprKind::Real(v)
            }
            TokenKind::Str(s) => {
                self.bump();
                ExprKind::Str(s)
            }
            TokenKind::Keyword(Keyword::True) => {
                self.bump();
                ExprKind::Bool(true)
            }
            TokenKind::Keyword(Keyword::False) => {
                self.bump();
                ExprKind::Bool(false)
            }
            TokenKind::Keyword(Keyword::None) => {
                self.bump();
                ExprKind::NoneLit
            }
            TokenKind::Keyword(Keyword::Selected) => {
                self.bump();
                ExprKind::Selected
            }
            TokenKind::Ident(_) | TokenKind::Keyword(Keyword::SelfKw) if is_call => {
                let receiver = self.receiver()?;
                ExprKind::Call(self.call_tail(receiver)?)
            }
            TokenKind::Ident(name) => {
                self.bump();
                ExprKind::Var(name)
            }
            TokenKind::Keyword(Keyword::SelfKw) => {
                self.bump();
                ExprKind::SelfRef
            }
            TokenKind::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(TokenKind::RParen)?;
                return Ok(inner);
            }
            _ => return Err(self.error_here("expression")),
        };
        Ok(Expr::new(kind, self.span(first, self.last())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> Vec<Stmt> {
        parse_method_body(src).unwrap_or_else(|d| panic!("{src}: {d:?}")).without_spans().statements
    }

    fn e(kind: ExprKind) -> Expr {
        Expr::new(kind, SourceSpan::default())
    }

    fn s(kind: StmtKind) -> Stmt {
        Stmt { kind, span: SourceSpan::default() }
    }

    fn var(name: &str) -> Expr {
        e(ExprKind::Var(name.into()))
    }

    fn bin(op: BinaryOp, l: Expr, r: Expr) -> Expr {
        e(ExprKind::Binary(op, Box::new(l), Box::new(r)))
    }

    #[test]
    fn create() {
        assert_eq!(
            parse("create object instance r of Ranger;"),
            vec![s(StmtKind::Create { var: "r".into(), class: "Ranger".into() })]
        );
    }

    #[test]
    fn if_with_assignment() {
        let expected = s(StmtKind::If {
            arms: vec![IfArm {
                cond: bin(BinaryOp::Lt, var("x"), e(ExprKind::Int(3))),
                body: vec![s(StmtKind::Assign {
                    target: LValue::Var("x".into()),
                    value: bin(BinaryOp::Add, var("x"), e(ExprKind::Int(1))),
                })],
            }],
            else_body: None,
        });
        assert_eq!(parse("if (x < 3) x = x + 1; end if;"), vec![expected]);
    }

    #[test]
    fn select_with_where() {
        let filter =
            bin(BinaryOp::Gt, e(ExprKind::Attr(Box::new(e(ExprKind::Selected)), "age".into())), e(ExprKind::Int(2)));
        assert_eq!(
            parse("select any d from instances of Dog where (selected.age > 2);"),
            vec![s(StmtKind::SelectInstances {
                mode: SelectMode::Any,
                var: "d".into(),
                class: "Dog".into(),
                filter: Some(filter),
            })]
        );
    }

    #[test]
    fn select_related_chain() {
        let stmts = parse("select many o related by self->Observer[R1]->Log[R2];");
        match &stmts[0].kind {
            StmtKind::SelectRelated { mode, start, chain, .. } => {
                assert_eq!(*mode, SelectMode::Many);
                assert_eq!(*start, Receiver::SelfRef);
                assert_eq!(chain.len(), 2);
                assert_eq!(chain[1].relation, "R2");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn precedence() {
        let stmts = parse("x = not a == b or c and d;");
        let StmtKind::Assign { value, .. } = &stmts[0].kind else { panic!() };
        let expected = bin(
            BinaryOp::Or,
            e(ExprKind::Unary(UnaryOp::Not, Box::new(bin(BinaryOp::Eq, var("a"), var("b"))))),
            bin(BinaryOp::And, var("c"), var("d")),
        );
        assert_eq!(*value, expected);

        let stmts = parse("x = -a * b - c / 2;");
        let StmtKind::Assign { value, .. } = &stmts[0].kind else { panic!() };
        let expected = bin(
            BinaryOp::Sub,
            bin(BinaryOp::Mul, e(ExprKind::Unary(UnaryOp::Neg, Box::new(var("a")))), var("b")),
            bin(BinaryOp::Div, var("c"), e(ExprKind::Int(2))),
        );
        assert_eq!(*value, expected);
    }

    #[test]
    fn comparisons_do_not_chain() {
        let diags = parse_method_body("x = a < b < c;").unwrap_err();
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("chained"));
    }

    #[test]
    fn calls_and_attribute_chains() {
        let stmts = parse("r.Notify(\"hi\", 2); n = Registry.Count(); v = o.Get().x; assign self.a = b.c.d;");
        assert!(matches!(&stmts[0].kind, StmtKind::Call(c) if c.method == "Notify" && c.args.len() == 2));
        let StmtKind::Assign { value, .. } = &stmts[2].kind else { panic!() };
        assert!(matches!(&value.kind, ExprKind::Attr(inner, a) if a == "x" && matches!(inner.kind, ExprKind::Call(_))));
        assert!(parse_method_body("x = o.a.Get();").is_err());
    }

    #[test]
    fn recovery_collects_multiple_errors() {
        let diags = parse_method_body("x = ;\ny = 2;\ncreate of;\nreturn;").unwrap_err();
        assert_eq!(diags.len(), 2, "{diags:?}");
        assert_eq!(diags[0].span.line, 1);
        assert_eq!(diags[1].span.line, 3);
    }

    #[test]
    fn create_of_reports_line_one() {
        let diags = parse_method_body("create of;").unwrap_err();
        assert_eq!(diags[0].span.line, 1);
        assert!(diags[0].message.contains("expected `object`"));
    }

    #[test]
    fn stray_end_is_an_error() {
        assert!(parse_method_body("end if;").is_err());
        assert!(parse_method_body("if (a) x = 1;").is_err());
    }

    #[test]
    fn statement_spans_cover_header_line() {
        let ast = parse_method_body("x = 1;\n  while (x < 3)\n    x = x + 1;\n  end while;").unwrap();
        assert_eq!(ast.statements[0].span, SourceSpan::new(1, 0, 6));
        assert_eq!(ast.statements[1].span, SourceSpan::new(2, 2, 15));
        let StmtKind::While { body, .. } = &ast.statements[1].kind else { panic!() };
        assert_eq!(body[0].span, SourceSpan::new(3, 4, 14));
    }

    #[test]
    fn deep_nesting_is_rejected_not_overflowed() {
        let src = format!("x = {}1{};", "(".repeat(5000), ")".repeat(5000));
        assert!(parse_method_body(&src).is_err());
        let src = "if (a) ".repeat(3000);
        assert!(parse_method_body(&src).is_err());
    }

    #[test]
    fn empty_body() {
        assert_eq!(parse("// nothing\n"), vec![]);
    }
}
