use super::token::{Keyword, SourceSpan, Token, TokenKind};
use super::Diagnostic;
use crate::model::is_relation_id;

/// Tokenizes `source`, stopping at the first lexical error.
pub fn tokenize(source: &str) -> Result<Vec<Token>, Diagnostic> {
    let (tokens, mut errors) = lex(source);
    if errors.is_empty() {
        Ok(tokens)
    } else {
        Err(errors.remove(0))
    }
}

/// Tokenizes the whole input, skipping over bad characters and collecting
/// every lexical error. The returned stream has no end-of-input token.
pub(crate) fn lex(source: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut lexer = Lexer { chars: source.chars().collect(), pos: 0, line: 1, col: 0 };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    loop {
        lexer.skip_trivia();
        if lexer.at_end() {
            break;
        }
        match lexer.next_token() {
            Ok(tok) => tokens.push(tok),
            Err(diag) => errors.push(diag),
        }
    }
    (tokens, errors)
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
}

impl Lexer {
    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 0;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '/' && self.peek_at(1) == Some('/') {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn text(&self, start: usize) -> String {
        self.chars[start..self.pos].iter().collect()
    }

    fn next_token(&mut self) -> Result<Token, Diagnostic> {
        let start = self.pos;
        let line = self.line;
        let col = self.col;
        let c = self.bump().expect("caller checked for end of input");
        let kind = match c {
            ';' => TokenKind::Semicolon,
            ',' => TokenKind::Comma,
            '.' => TokenKind::Dot,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            '[' => TokenKind::LBracket,
            ']' => TokenKind::RBracket,
            '+' => TokenKind::Plus,
            '*' => TokenKind::Star,
            '/' => TokenKind::Slash,
            '-' => {
                if self.peek() == Some('>') {
                    self.bump();
                    TokenKind::Arrow
                } else {
                    TokenKind::Minus
                }
            }
            '=' => {
                if self.peek() == Some('=') {
                    self.bump();
                    TokenKind::EqEq
                } else {
                    TokenKind::Assign
                }
            }
            '!' if self.peek() == Some('=') => {
                self.bump();
                TokenKind::NotEq
            }
            '<' => {
                if self.peek() == Some('=') {
                    self.bump();
                    TokenKind::Le
                } else {
                    TokenKind::Lt
                }
            }
            '>' => {
                if self.peek() == Some('=') {
                    self.bump();
                    TokenKind::Ge
                } else {
                    TokenKind::Gt
                }
            }
            '"' => self.string(line, col)?,
            c if c.is_ascii_digit() => self.number(start, line, col)?,
            c if c.is_ascii_alphabetic() || c == '_' => {
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    self.bump();
                }
                let word = self.text(start);
                if let Some(kw) = Keyword::from_word(&word) {
                    TokenKind::Keyword(kw)
                } else if is_relation_id(&word) {
                    TokenKind::RelId(word)
                } else {
                    TokenKind::Ident(word)
                }
            }
            other => {
                return Err(Diagnostic::error(
                    format!("illegal character {other:?}"),
                    SourceSpan::new(line, col, col + 1),
                ));
            }
        };
        Ok(Token { kind, text: self.text(start), span: SourceSpan::new(line, col, self.col) })
    }

    fn string(&mut self, line: u32, col: u32) -> Result<TokenKind, Diagnostic> {
        let mut value = String::new();
        loop {
            match self.peek() {
                None | Some('\n') => {
                    return Err(Diagnostic::error(
                        "unterminated string",
                        SourceSpan::new(line, col, self.col.max(col + 1)),
                    ));
                }
                Some('"') => {
                    self.bump();
                    return Ok(TokenKind::Str(value));
                }
                Some('\\') => {
                    let esc_col = self.col;
                    self.bump();
                    match self.peek() {
                        Some(c @ ('"' | '\\')) => {
                            self.bump();
                            value.push(c);
                        }
                        _ => {
                            // Skip the rest of the literal so lexing resumes after it.
                            while !matches!(self.peek(), None | Some('\n') | Some('"')) {
                                self.bump();
                            }
                            if self.peek() == Some('"') {
                                self.bump();
                            }
                            return Err(Diagnostic::error(
                                "invalid escape sequence",
                                SourceSpan::new(line, esc_col, esc_col + 1),
                            ));
                        }
                    }
                }
                Some(c) => {
                    self.bump();
                    value.push(c);
                }
            }
        }
    }

    fn number(&mut self, start: usize, line: u32, col: u32) -> Result<TokenKind, Diagnostic> {
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        let is_real = self.peek() == Some('.') && matches!(self.peek_at(1), Some(c) if c.is_ascii_digit());
        if is_real {
            self.bump();
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
        }
        let text = self.text(start);
        let span = SourceSpan::new(line, col, self.col);
        if is_real {
            match text.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(TokenKind::Real(v)),
                _ => Err(Diagnostic::error("real literal out of range", span)),
            }
        } else {
            text.parse::<i64>().map(TokenKind::Int).map_err(|_| Diagnostic::error("integer literal out of range", span))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn create_statement_has_seven_tokens() {
        use Keyword::*;
        let toks = kinds("create object instance r of Ranger;");
        assert_eq!(
            toks,
            vec![
                TokenKind::Keyword(Create),
                TokenKind::Keyword(Object),
                TokenKind::Keyword(Instance),
                TokenKind::Ident("r".into()),
                TokenKind::Keyword(Of),
                TokenKind::Ident("Ranger".into()),
                TokenKind::Semicolon,
            ]
        );
    }

    #[test]
    fn string_escapes() {
        let toks = tokenize(r#"x = "a\"b";"#).unwrap();
        assert_eq!(toks[2].kind, TokenKind::Str("a\"b".into()));
        assert_eq!(toks[2].text, r#""a\"b""#);
        assert_eq!(kinds(r#""\\""#), vec![TokenKind::Str("\\".into())]);
    }

    #[test]
    fn illegal_character_position() {
        let diag = tokenize("@").unwrap_err();
        assert!(diag.message.contains("illegal character"));
        assert_eq!((diag.span.line, diag.span.col_start), (1, 0));
    }

    #[test]
    fn unterminated_string() {
        let diag = tokenize("x = \"abc\ny;").unwrap_err();
        assert_eq!(diag.message, "unterminated string");
        assert_eq!(diag.span.line, 1);
    }

    #[test]
    fn numbers_relids_and_longest_match() {
        assert_eq!(
            kinds("12 1.5 R3 R2D2 not_empty notx 1.x"),
            vec![
                TokenKind::Int(12),
                TokenKind::Real(1.5),
                TokenKind::RelId("R3".into()),
                TokenKind::Ident("R2D2".into()),
                TokenKind::Keyword(Keyword::NotEmpty),
                TokenKind::Ident("notx".into()),
                TokenKind::Int(1),
                TokenKind::Dot,
                TokenKind::Ident("x".into()),
            ]
        );
        assert!(tokenize("99999999999999999999").is_err());
    }

    #[test]
    fn operators_and_comments() {
        assert_eq!(
            kinds("a->b <= >= == != < > // trailing\n-"),
            vec![
                TokenKind::Ident("a".into()),
                TokenKind::Arrow,
                TokenKind::Ident("b".into()),
                TokenKind::Le,
                TokenKind::Ge,
                TokenKind::EqEq,
                TokenKind::NotEq,
                TokenKind::Lt,
                TokenKind::Gt,
                TokenKind::Minus,
            ]
        );
    }

    #[test]
    fn spans_are_ordered() {
        let toks = tokenize("x = 1;\n  y = x + 2;").unwrap();
        assert_eq!(toks[4].span, SourceSpan::new(2, 2, 3));
        for pair in toks.windows(2) {
            assert!((pair[0].span.line, pair[0].span.col_end) <= (pair[1].span.line, pair[1].span.col_start));
        }
    }
}
