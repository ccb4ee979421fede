use std::fmt;

/// Location of a token or node. Lines are 1-based, columns 0-based and
/// counted in characters; `col_end` is exclusive.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SourceSpan {
    pub line: u32,
    pub col_start: u32,
    pub col_end: u32,
}

impl SourceSpan {
    pub fn new(line: u32, col_start: u32, col_end: u32) -> Self {
        SourceSpan { line, col_start, col_end }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col_start)
    }
}

macro_rules! keywords {
    ($($variant:ident => $text:literal,)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum Keyword {
            $($variant,)*
        }

        impl Keyword {
            pub const ALL: &'static [Keyword] = &[$(Keyword::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(Keyword::$variant => $text,)*
                }
            }

            pub fn from_word(word: &str) -> Option<Keyword> {
                match word {
                    $($text => Some(Keyword::$variant),)*
                    _ => None,
                }
            }
        }
    };
}

keywords! {
    Create => "create",
    Object => "object",
    Instance => "instance",
    Of => "of",
    Delete => "delete",
    Assign => "assign",
    Select => "select",
    Any => "any",
    Many => "many",
    One => "one",
    From => "from",
    Instances => "instances",
    Where => "where",
    Related => "related",
    By => "by",
    Relate => "relate",
    Unrelate => "unrelate",
    To => "to",
    Across => "across",
    If => "if",
    Elif => "elif",
    Else => "else",
    End => "end",
    While => "while",
    For => "for",
    Each => "each",
    In => "in",
    Return => "return",
    SelfKw => "self",
    Selected => "selected",
    True => "true",
    False => "false",
    None => "none",
    And => "and",
    Or => "or",
    Not => "not",
    Cardinality => "cardinality",
    Empty => "empty",
    NotEmpty => "not_empty",
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    Int(i64),
    Real(f64),
    Str(String),
    RelId(String),
    Semicolon,
    Comma,
    Dot,
    Assign,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Keyword(k) => format!("`{}`", k.as_str()),
            TokenKind::Ident(name) => format!("identifier `{name}`"),
            TokenKind::Int(v) => format!("integer `{v}`"),
            TokenKind::Real(v) => format!("real `{v}`"),
            TokenKind::Str(_) => "string literal".to_string(),
            TokenKind::RelId(id) => format!("relation `{id}`"),
            TokenKind::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub(crate) fn symbol(&self) -> &'static str {
        match self {
            TokenKind::Semicolon => ";",
            TokenKind::Comma => ",",
            TokenKind::Dot => ".",
            TokenKind::Assign => "=",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::LBracket => "[",
            TokenKind::RBracket => "]",
            TokenKind::Arrow => "->",
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
            TokenKind::Star => "*",
            TokenKind::Slash => "/",
            TokenKind::EqEq => "==",
            TokenKind::NotEq => "!=",
            TokenKind::Lt => "<",
            TokenKind::Le => "<=",
            TokenKind::Gt => ">",
            TokenKind::Ge => ">=",
            _ => "?",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Raw source slice the token was read from.
    pub text: String,
    pub span: SourceSpan,
}
