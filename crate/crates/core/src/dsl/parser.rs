use super::ast::{BinOp, Expr, Func, SurfaceExpr};
use crate::error::{Error, Result};

/// Recursive-descent parser over raw bytes; error offsets are byte offsets
/// into the input.
struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

const BASE_EXPECTED: &str = "{number, u, v, func, '('}";

pub fn parse(text: &str) -> Result<SurfaceExpr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    p.expect(b'(', "'('")?;
    let mut components = vec![p.expr()?];
    p.skip_ws();
    while p.peek() == Some(b',') {
        p.pos += 1;
        components.push(p.expr()?);
        p.skip_ws();
    }
    p.expect(b')', "',' or ')'")?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(Error::Parse {
            offset: p.pos,
            expected: "end of input".into(),
        });
    }
    if components.len() < 3 {
        return Err(Error::Parse {
            offset: p.src.len(),
            expected: format!(
                "a surface with at least 3 components (got {})",
                components.len()
            ),
        });
    }
    Ok(SurfaceExpr { components })
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, byte: u8, expected: &str) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse {
                offset: self.pos,
                expected: expected.into(),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            self.skip_ws();
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            self.skip_ws();
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let n = self.integer()?;
            Ok(Expr::Pow(Box::new(base), n))
        } else {
            Ok(base)
        }
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        let mut negative = false;
        if self.peek() == Some(b'-') {
            negative = true;
            self.pos += 1;
        }
        let digits_start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(Error::Parse {
                offset: start,
                expected: "integer exponent".into(),
            });
        }
        let text = std::str::from_utf8(&self.src[digits_start..self.pos]).unwrap();
        let n: i64 = text.parse().map_err(|_| Error::Parse {
            offset: start,
            expected: "integer exponent".into(),
        })?;
        Ok(if negative { -n } else { n })
    }

    fn base(&mut self) -> Result<Expr> {
        self.skip_ws();
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.base()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')', "')'")?;
                Ok(inner)
            }
            Some(b'0'..=b'9' | b'.') => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            _ => Err(Error::Parse {
                offset: self.pos,
                expected: BASE_EXPECTED.into(),
            }),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while matches!(self.peek(), Some(b'0'..=b'9')) {
                self.pos += 1;
            }
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(b'0'..=b'9')) {
                while matches!(self.peek(), Some(b'0'..=b'9')) {
                    self.pos += 1;
                }
            } else {
                // not an exponent after all (e.g. `2e` before an identifier)
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let value: f64 = text.parse().map_err(|_| Error::Parse {
            offset: start,
            expected: "number".into(),
        })?;
        Ok(Expr::Num(value))
    }

    fn identifier(&mut self) -> Result<Expr> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match name {
            "u" => Ok(Expr::U),
            "v" => Ok(Expr::V),
            _ => {
                if let Some(func) = Func::from_name(name) {
                    self.expect(b'(', "'('")?;
                    let arg = self.expr()?;
                    self.expect(b')', "')'")?;
                    if func == Func::Neg {
                        Ok(Expr::Neg(Box::new(arg)))
                    } else {
                        Ok(Expr::Call(func, Box::new(arg)))
                    }
                } else {
                    Err(Error::UnknownIdentifier {
                        name: name.into(),
                        offset: start,
                    })
                }
            }
        }
    }
}
