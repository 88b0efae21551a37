//! Recursive-descent parser for the expression grammar in the module docs.

use super::{BinOp, Constant, Expr, Func, ParseError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number `{v:?}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
        }
    }
}

struct Lexer<'s> {
    src: &'s [u8],
    pos: usize,
}

impl<'s> Lexer<'s> {
    fn tokens(src: &'s str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lex = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        while let Some((tok, at)) = lex.next_token()? {
            out.push((tok, at));
        }
        Ok(out)
    }

    fn next_token(&mut self) -> Result<Option<(Tok, usize)>, ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let at = self.pos;
        let ch = self.src[self.pos];
        let tok = match ch {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' => return Ok(Some((self.lex_number()?, at))),
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos])
                    .expect("ascii slice")
                    .to_string();
                return Ok(Some((Tok::Ident(name), start)));
            }
            other => {
                return Err(ParseError::Syntax {
                    offset: at,
                    message: format!("unexpected character `{}`", other as char),
                    expected: vec!["number", "identifier", "operator", "`(`"],
                });
            }
        };
        self.pos += 1;
        Ok(Some((tok, at)))
    }

    fn lex_number(&mut self) -> Result<Tok, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
            {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                // not an exponent after all ("2*e" style): back off
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
            expected: vec!["number"],
        })?;
        Ok(Tok::Num(value))
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    end: usize,
}

/// Parse a source string into an expression tree.
pub fn parse(source: &str) -> Result<Expr, ParseError> {
    let trimmed = source.trim();
    if trimmed.is_empty() {
        return Err(ParseError::Syntax {
            offset: 0,
            message: "empty expression".to_string(),
            expected: vec!["number", "identifier", "`-`", "`(`"],
        });
    }
    let toks = Lexer::tokens(source)?;
    let mut p = Parser {
        idx: 0,
        end: source.len(),
        toks,
    };
    let e = p.expr()?;
    if let Some((tok, at)) = p.peek_at() {
        return Err(ParseError::Syntax {
            offset: at,
            message: format!("unexpected {}", tok.describe()),
            expected: vec!["`+`", "`-`", "`*`", "`/`", "`^`", "end of input"],
        });
    }
    Ok(e)
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn peek_at(&self) -> Option<(&Tok, usize)> {
        self.toks.get(self.idx).map(|(t, a)| (t, *a))
    }

    fn here(&self) -> usize {
        self.toks.get(self.idx).map(|(_, a)| *a).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, expected: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.idx += 1;
                Ok(())
            }
            other => Err(ParseError::Syntax {
                offset: self.here(),
                message: match other {
                    Some(t) => format!("unexpected {}", t.describe()),
                    None => "unexpected end of input".to_string(),
                },
                expected: vec![expected],
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => break,
            };
            self.idx += 1;
            let rhs = self.term()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => break,
            };
            self.idx += 1;
            let rhs = self.unary()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.idx += 1;
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.idx += 1;
            let exponent = self.unary()?;
            return Ok(Expr::bin(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.here();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => self.ident(name, at),
            other => Err(ParseError::Syntax {
                offset: at,
                message: match other {
                    Some(t) => format!("unexpected {}", t.describe()),
                    None => "unexpected end of input".to_string(),
                },
                expected: vec!["number", "`x`", "`pi`", "`e`", "function", "`(`"],
            }),
        }
    }

    fn ident(&mut self, name: String, at: usize) -> Result<Expr, ParseError> {
        match name.as_str() {
            "x" => Ok(Expr::Var),
            "pi" => Ok(Expr::Const(Constant::Pi)),
            "e" => Ok(Expr::Const(Constant::E)),
            "pow" => {
                self.expect(Tok::LParen, "`(`")?;
                let base = self.expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let exponent = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::bin(BinOp::Pow, base, exponent))
            }
            _ => {
                if let Some(f) = Func::from_name(&name) {
                    self.expect(Tok::LParen, "`(`")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Expr::call(f, arg))
                } else {
                    Err(ParseError::UnknownIdentifier { name, offset: at })
                }
            }
        }
    }
}
