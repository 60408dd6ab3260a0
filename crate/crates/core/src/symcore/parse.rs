//! Expression parser: integers, variables, `+ - * / ^` and parentheses.
//!
//! Expressions evaluate directly to reduced rational functions. `^` binds
//! tighter than unary minus, so `-x^2` is `-(x^2)`, and takes a non-negative
//! integer literal exponent.

use num_bigint::BigInt;

use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::scalar::Scalar;
use super::varset::VarSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Int(s.parse().unwrap()),
                line,
                col,
            });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line,
                col,
            });
        } else if "+-*/^()".contains(c) {
            out.push(Token {
                tok: Tok::Op(c),
                line,
                col,
            });
            i += 1;
        } else {
            return Err(Error::Syntax {
                line,
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push(Token {
        tok: Tok::End,
        line,
        col: col0 + chars.len(),
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    vars: &'a VarSet,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, tok: &Token, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            line: tok.line,
            column: tok.col,
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Op('+') => {
                    self.next();
                    acc = acc.add(&self.term()?);
                }
                Tok::Op('-') => {
                    self.next();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Op('*') => {
                    self.next();
                    acc = acc.mul(&self.unary()?);
                }
                Tok::Op('/') => {
                    let at = self.next();
                    let rhs = self.unary()?;
                    if rhs.is_zero() {
                        return self.err(&at, "division by zero");
                    }
                    acc = acc.div(&rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc> {
        match self.peek().tok {
            Tok::Op('-') => {
                self.next();
                Ok(self.unary()?.neg())
            }
            Tok::Op('+') => {
                self.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFunc> {
        let base = self.atom()?;
        if self.peek().tok == Tok::Op('^') {
            self.next();
            let t = self.next();
            let e = match &t.tok {
                Tok::Int(n) => match u32::try_from(n.clone()) {
                    Ok(e) => e,
                    Err(_) => return self.err(&t, "exponent too large"),
                },
                _ => return self.err(&t, "expected a non-negative integer exponent"),
            };
            if self.peek().tok == Tok::Op('^') {
                let t = self.peek().clone();
                return self.err(&t, "chained `^` needs parentheses");
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc> {
        let t = self.next();
        match &t.tok {
            Tok::Int(n) => Ok(RatFunc::constant(self.vars, Scalar::from(n.clone()))),
            Tok::Ident(name) => match self.vars.index_of(name) {
                Some(i) => Ok(RatFunc::from_poly(Poly::var(self.vars, i))),
                None => Err(Error::UnknownIdentifier {
                    name: name.clone(),
                    line: t.line,
                    column: t.col,
                }),
            },
            Tok::Op('(') => {
                if self.peek().tok == Tok::End {
                    return self.err(&t, "unclosed `(`");
                }
                let inner = self.expr()?;
                let close = self.next();
                if close.tok == Tok::End {
                    return self.err(&t, "unclosed `(`");
                }
                if close.tok != Tok::Op(')') {
                    return self.err(&close, "expected `)`");
                }
                Ok(inner)
            }
            Tok::End => self.err(&t, "unexpected end of expression"),
            Tok::Op(c) => self.err(&t, format!("unexpected `{c}`")),
        }
    }
}

/// Parses an expression located at `line`, starting at column `col`
/// (both 1-based), for error reporting inside larger documents.
pub fn parse_ratfunc_at(text: &str, vars: &VarSet, line: usize, col: usize) -> Result<RatFunc> {
    let toks = lex(text, line, col)?;
    let mut p = Parser { toks, pos: 0, vars };
    let v = p.expr()?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return p.err(&t, "unexpected trailing input");
    }
    Ok(v)
}

pub fn parse_ratfunc(text: &str, vars: &VarSet) -> Result<RatFunc> {
    parse_ratfunc_at(text, vars, 1, 1)
}

/// Parses an expression that must be a polynomial.
pub fn parse_poly(text: &str, vars: &VarSet) -> Result<Poly> {
    let r = parse_ratfunc(text, vars)?;
    if !r.is_poly() {
        return Err(Error::InvalidInput(format!("`{text}` is not a polynomial")));
    }
    Ok(r.into_parts().0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let v = VarSet::of(&["x", "y"]);
        let a = parse_poly("-x^2 + 2*x*y - (y)^2", &v).unwrap();
        let b = parse_poly("-(x-y)^2", &v).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn error_positions() {
        let v = VarSet::of(&["x"]);
        match parse_ratfunc("x/(", &v) {
            Err(Error::Syntax { line: 1, column, .. }) => assert_eq!(column, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_ratfunc("x + q", &v),
            Err(Error::UnknownIdentifier { column: 5, .. })
        ));
        assert!(parse_ratfunc("x/0", &v).is_err());
    }
}
