use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "    ";
const ATOM_PRECEDENCE: u8 = 8;

/// Formats a method body canonically: one statement per line, four-space
/// indentation per block, minimal parentheses. The output parses back to
/// the same tree.
pub fn pretty_print(ast: &MethodAst) -> String {
    let mut out = String::new();
    block(&mut out, &ast.statements, 0);
    out
}

fn block(out: &mut String, stmts: &[Stmt], depth: usize) {
    for s in stmts {
        stmt(out, s, depth);
    }
}

fn line(out: &mut String, depth: usize, text: &str) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
    out.push_str(text);
    out.push('\n');
}

fn receiver(r: &Receiver) -> &str {
    match r {
        Receiver::Name(name) => name,
        Receiver::SelfRef => "self",
    }
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    match &s.kind {
        StmtKind::Create { var, class } => line(out, depth, &format!("create object instance {var} of {class};")),
        StmtKind::Delete { target } => line(out, depth, &format!("delete object instance {};", receiver(target))),
        StmtKind::Assign { target, value } => {
            let lhs = match target {
                LValue::Var(name) => name.clone(),
                LValue::Attr(recv, attr) => format!("{}.{attr}", receiver(recv)),
            };
            line(out, depth, &format!("{lhs} = {};", expr(value)));
        }
        StmtKind::SelectInstances { mode, var, class, filter } => {
            let mut text = format!("select {} {var} from instances of {class}", mode.as_str());
            if let Some(f) = filter {
                let _ = write!(text, " where ({})", expr(f));
            }
            text.push(';');
            line(out, depth, &text);
        }
        StmtKind::SelectRelated { mode, var, start, chain } => {
            let mut text = format!("select {} {var} related by {}", mode.as_str(), receiver(start));
            for step in chain {
                let _ = write!(text, "->{}[{}]", step.class, step.relation);
            }
            text.push(';');
            line(out, depth, &text);
        }
        StmtKind::Relate { a, b, relation } => {
            line(out, depth, &format!("relate {} to {} across {relation};", receiver(a), receiver(b)))
        }
        StmtKind::Unrelate { a, b, relation } => {
            line(out, depth, &format!("unrelate {} from {} across {relation};", receiver(a), receiver(b)))
        }
        StmtKind::If { arms, else_body } => {
            for (i, arm) in arms.iter().enumerate() {
                let kw = if i == 0 { "if" } else { "elif" };
                line(out, depth, &format!("{kw} ({})", expr(&arm.cond)));
                block(out, &arm.body, depth + 1);
            }
            if let Some(body) = else_body {
                line(out, depth, "else");
                block(out, body, depth + 1);
            }
            line(out, depth, "end if;");
        }
        StmtKind::While { cond, body } => {
            line(out, depth, &format!("while ({})", expr(cond)));
            block(out, body, depth + 1);
            line(out, depth, "end while;");
        }
        StmtKind::ForEach { var, set, body } => {
            line(out, depth, &format!("for each {var} in {set}"));
            block(out, body, depth + 1);
            line(out, depth, "end for;");
        }
        StmtKind::Return(None) => line(out, depth, "return;"),
        StmtKind::Return(Some(value)) => line(out, depth, &format!("return {};", expr(value))),
        StmtKind::Call(c) => line(out, depth, &format!("{};", call(c))),
    }
}

fn call(c: &Call) -> String {
    let args: Vec<String> = c.args.iter().map(expr).collect();
    format!("{}.{}({})", receiver(&c.receiver), c.method, args.join(", "))
}

/// Renders a real so that the lexer reads back the same value: plain
/// decimal digits with at least one digit after the point.
pub(crate) fn real_literal(v: f64) -> String {
    let mut text = format!("{v}");
    if !text.contains('.') {
        text.push_str(".0");
    }
    text
}

pub(crate) fn string_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary(op, ..) => op.precedence(),
        ExprKind::Unary(op, _) => op.precedence(),
        _ => ATOM_PRECEDENCE,
    }
}

fn operand(e: &Expr, min: u8) -> String {
    if precedence(e) < min {
        format!("({})", expr(e))
    } else {
        expr(e)
    }
}

pub fn expr(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Int(v) => v.to_string(),
        ExprKind::Real(v) => real_literal(*v),
        ExprKind::Str(s) => string_literal(s),
        ExprKind::Bool(b) => b.to_string(),
        ExprKind::NoneLit => "none".into(),
        ExprKind::Var(name) => name.clone(),
        ExprKind::SelfRef => "self".into(),
        ExprKind::Selected => "selected".into(),
        ExprKind::Attr(recv, attr) => format!("{}.{attr}", operand(recv, ATOM_PRECEDENCE)),
        ExprKind::Call(c) => call(c),
        ExprKind::Binary(op, l, r) => {
            let p = op.precedence();
            let left_min = if op.is_comparison() { p + 1 } else { p };
            format!("{} {} {}", operand(l, left_min), op.as_str(), operand(r, p + 1))
        }
        ExprKind::Unary(op, inner) => match op {
            UnaryOp::Neg => format!("-{}", operand(inner, op.precedence())),
            _ => format!("{} {}", op.as_str(), operand(inner, op.precedence())),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oal::parse_method_body;

    fn roundtrip(src: &str) -> String {
        pretty_print(&parse_method_body(src).unwrap())
    }

    #[test]
    fn return_and_create() {
        assert_eq!(roundtrip("return;"), "return;\n");
        assert_eq!(roundtrip("create   object instance r of Ranger ;"), "create object instance r of Ranger;\n");
    }

    #[test]
    fn nested_blocks_indent() {
        let src = "while (i < 3) if (i == 1) x = 2; else x = 3; end if; i = i + 1; end while;";
        let expected = "\
while (i < 3)
    if (i == 1)
        x = 2;
    else
        x = 3;
    end if;
    i = i + 1;
end while;
";
        assert_eq!(roundtrip(src), expected);
    }

    #[test]
    fn parentheses_only_where_needed() {
        assert_eq!(roundtrip("x = (a + b) * c - (d - e);"), "x = (a + b) * c - (d - e);\n");
        assert_eq!(roundtrip("x = ((a)) + (b * c);"), "x = a + b * c;\n");
        assert_eq!(roundtrip("x = (a < b) == (c < d);"), "x = (a < b) == (c < d);\n");
        assert_eq!(roundtrip("x = not (a and b);"), "x = not (a and b);\n");
        assert_eq!(roundtrip("x = a == (not b);"), "x = a == (not b);\n");
        assert_eq!(roundtrip("x = -(-a) + cardinality s;"), "x = --a + cardinality s;\n");
        assert_eq!(roundtrip("x = (a + b).c;"), "x = (a + b).c;\n");
    }

    #[test]
    fn literals() {
        assert_eq!(roundtrip("x = \"q\\\"\\\\\"; y = 2.50; z = none;"), "x = \"q\\\"\\\\\";\ny = 2.5;\nz = none;\n");
        assert_eq!(real_literal(1e20), "100000000000000000000.0");
        assert_eq!(real_literal(1e-7), "0.0000001");
    }
}
