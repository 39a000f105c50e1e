//! Constant expressions for parameter files: `+ - * /`, parentheses,
//! `sqrt`, `exp`, `pi`, `i` and previously defined names.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::algebra::{parse_rational, ExactComplex};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(String),
    I,
    Pi,
    Var(String),
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
    Call(String, Box<Expr>),
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse(format!(
            "{msg} at offset {} in \"{}\"",
            self.pos,
            String::from_utf8_lossy(self.s)
        )))
    }

    fn skip(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
        self.s.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.product()?;
            lhs = Expr::Bin(c as char, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(c as char, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => self.err("unexpected end"),
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_digit() || self.s[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                // exponent
                if self.pos < self.s.len() && matches!(self.s[self.pos], b'e' | b'E') {
                    let save = self.pos;
                    self.pos += 1;
                    if self.pos < self.s.len() && matches!(self.s[self.pos], b'+' | b'-') {
                        self.pos += 1;
                    }
                    if self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                            self.pos += 1;
                        }
                    } else {
                        self.pos = save;
                    }
                }
                let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap().to_string();
                Ok(Expr::Num(txt))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap().to_string();
                if self.peek() == Some(b'(') {
                    self.pos += 1;
                    let arg = self.sum()?;
                    if self.peek() != Some(b')') {
                        return self.err("expected ')'");
                    }
                    self.pos += 1;
                    return match name.as_str() {
                        "sqrt" | "exp" | "conj" => Ok(Expr::Call(name, Box::new(arg))),
                        _ => self.err(&format!("unknown function {name}")),
                    };
                }
                Ok(match name.as_str() {
                    "i" => Expr::I,
                    "pi" => Expr::Pi,
                    _ => Expr::Var(name),
                })
            }
            Some(_) => self.err("unexpected character"),
        }
    }
}

pub fn parse_expr(s: &str) -> Result<Expr> {
    let mut p = Parser {
        s: s.as_bytes(),
        pos: 0,
    };
    let e = p.sum()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

impl Expr {
    pub fn vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Var(v) => out.push(v.clone()),
            Expr::Neg(a) | Expr::Call(_, a) => a.vars(out),
            Expr::Bin(_, a, b) => {
                a.vars(out);
                b.vars(out);
            }
            _ => {}
        }
    }

    pub fn eval_c64(&self, env: &BTreeMap<String, Complex64>) -> Result<Complex64> {
        Ok(match self {
            Expr::Num(t) => Complex64::new(
                t.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number {t}")))?,
                0.0,
            ),
            Expr::I => Complex64::i(),
            Expr::Pi => Complex64::new(std::f64::consts::PI, 0.0),
            Expr::Var(v) => *env
                .get(v)
                .ok_or_else(|| Error::Parse(format!("unknown name {v}")))?,
            Expr::Neg(a) => -a.eval_c64(env)?,
            Expr::Bin(op, a, b) => {
                let (x, y) = (a.eval_c64(env)?, b.eval_c64(env)?);
                match op {
                    '+' => x + y,
                    '-' => x - y,
                    '*' => x * y,
                    _ => {
                        if y == Complex64::new(0.0, 0.0) {
                            return Err(Error::Parse("division by zero".into()));
                        }
                        x / y
                    }
                }
            }
            Expr::Call(f, a) => {
                let x = a.eval_c64(env)?;
                match f.as_str() {
                    "sqrt" => x.sqrt(),
                    "exp" => x.exp(),
                    _ => x.conj(),
                }
            }
        })
    }

    /// Exact value when the expression avoids `sqrt`, `exp` and `pi`.
    pub fn eval_exact(&self, env: &BTreeMap<String, ExactComplex>) -> Option<ExactComplex> {
        Some(match self {
            Expr::Num(t) => ExactComplex::real(parse_rational(t).ok()?),
            Expr::I => ExactComplex::i(),
            Expr::Pi => return None,
            Expr::Var(v) => env.get(v)?.clone(),
            Expr::Neg(a) => -a.eval_exact(env)?,
            Expr::Bin(op, a, b) => {
                let (x, y) = (a.eval_exact(env)?, b.eval_exact(env)?);
                match op {
                    '+' => x + y,
                    '-' => x - y,
                    '*' => x * y,
                    _ => x * y.inv()?,
                }
            }
            Expr::Call(f, a) => match f.as_str() {
                "conj" => a.eval_exact(env)?.conj(),
                _ => return None,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Complex64 {
        parse_expr(s).unwrap().eval_c64(&BTreeMap::new()).unwrap()
    }

    #[test]
    fn evaluates_constants() {
        let z = c("exp(i*pi/6)");
        assert!((z - Complex64::new(3f64.sqrt() / 2.0, 0.5)).norm() < 1e-15);
        assert!((c("sqrt(13/2)") - Complex64::new(6.5f64.sqrt(), 0.0)).norm() < 1e-15);
        assert_eq!(c("-(2+3*i)*2"), Complex64::new(-4.0, -6.0));
        assert_eq!(c("1e-3"), Complex64::new(1e-3, 0.0));
        assert!(parse_expr("2*").is_err());
        assert!(parse_expr("foo(1)").is_err());
    }

    #[test]
    fn exact_when_possible() {
        let mut env = BTreeMap::new();
        env.insert("sigma".to_string(), ExactComplex::i());
        let e = parse_expr("-3/13*sigma").unwrap();
        assert_eq!(
            e.eval_exact(&env).unwrap(),
            ExactComplex::from_ints(0, -3) * ExactComplex::from_ratio(1, 13)
        );
        assert!(parse_expr("sqrt(2)").unwrap().eval_exact(&env).is_none());
        let mut v = Vec::new();
        e.vars(&mut v);
        assert_eq!(v, vec!["sigma".to_string()]);
    }
}
