//! Tokens with source positions. `#` starts a comment that runs to the end
//! of the line.

use crate::error::DslError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    Sym(char),
    Arrow,
    Newline,
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

impl Token {
    /// Ends where `next` begins, with no whitespace in between.
    pub fn touches(&self, next: &Token) -> bool {
        self.line == next.line && self.col + self.width() == next.col
    }

    fn width(&self) -> usize {
        match &self.tok {
            Tok::Ident(s) => s.chars().count(),
            Tok::Int(n) => n.to_string().len(),
            Tok::Arrow => 2,
            _ => 1,
        }
    }
}

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '.'
}

pub fn lex(text: &str) -> Result<Vec<Token>, DslError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let chars: Vec<char> = raw.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse().map_err(|_| DslError::syntax(line, col, format!("integer {s} is too large")))?;
                out.push(Token { tok: Tok::Int(n), line, col });
                continue;
            }
            if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && ident_char(chars[i]) {
                    i += 1;
                }
                out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line, col });
                continue;
            }
            if c == '-' && chars.get(i + 1) == Some(&'>') {
                out.push(Token { tok: Tok::Arrow, line, col });
                i += 2;
                continue;
            }
            if "(){}[],;:=+-*/^".contains(c) {
                out.push(Token { tok: Tok::Sym(c), line, col });
                i += 1;
                continue;
            }
            return Err(DslError::syntax(line, col, format!("unexpected character '{c}'")));
        }
        out.push(Token { tok: Tok::Newline, line, col: chars.len() + 1 });
    }
    let line = out.last().map_or(1, |t| t.line + 1);
    out.push(Token { tok: Tok::Eof, line, col: 1 });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let toks = lex("chart X dim 2 # plane\n  pair B on X {").unwrap();
        let kinds: Vec<&Tok> = toks.iter().map(|t| &t.tok).collect();
        assert_eq!(kinds[0], &Tok::Ident("chart".into()));
        assert_eq!(kinds[3], &Tok::Int(2));
        assert_eq!(kinds[4], &Tok::Newline);
        assert_eq!((toks[5].line, toks[5].col), (2, 3));
        assert_eq!(toks.last().unwrap().tok, Tok::Eof);
    }

    #[test]
    fn arrow_and_adjacency() {
        let toks = lex("A -> B\nadapted-sheaf").unwrap();
        assert_eq!(toks[1].tok, Tok::Arrow);
        assert!(toks[4].touches(&toks[5]) && toks[5].touches(&toks[6]));
        assert!(lex("a $ b").is_err());
    }
}
