//! The customized Object Action Language subset: lexer, parser, AST and
//! canonical pretty-printer.

use std::fmt;

pub mod ast;
mod lexer;
mod parser;
mod pretty;
pub mod token;

pub use ast::*;
pub use lexer::tokenize;
pub use parser::parse_method_body;
pub use pretty::pretty_print;
pub use token::{Keyword, SourceSpan, Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: SourceSpan,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>, span: SourceSpan) -> Self {
        Diagnostic { severity: Severity::Error, message: message.into(), span }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {level}: {}", self.span.line, self.span.col_start, self.message)
    }
}
