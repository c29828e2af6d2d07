//! Arithmetic expressions over `x1`, `x2` and named parameters.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?          // right associative
//! primary := number | ident | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! so `-x^2` is `-(x^2)` and `2^3^2` is `2^(3^2)`. Functions are `log`
//! (natural), `exp`, `sin`, `cos`, `sqrt` and `abs`.

use std::collections::BTreeMap;
use std::fmt;

use crate::boundary::Guard;
use crate::error::{NesError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Log,
    Exp,
    Sin,
    Cos,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "log" => Func::Log,
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Log => "log",
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

/// Parsed expression tree. Parameters are bound to their values at parse
/// time but keep their names for printing.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X1,
    X2,
    Param { name: String, value: f64 },
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Evaluates the tree under the given boundary guard.
    pub fn eval_guarded(&self, x1: f64, x2: f64, guard: &Guard) -> Result<f64> {
        let at = (x1, x2);
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::X1 => x1,
            Expr::X2 => x2,
            Expr::Param { value, .. } => *value,
            Expr::Neg(e) => -e.eval_guarded(x1, x2, guard)?,
            Expr::Bin(op, a, b) => {
                let a = a.eval_guarded(x1, x2, guard)?;
                let b = b.eval_guarded(x1, x2, guard)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => guard.powf(a, b, at)?,
                }
            }
            Expr::Call(f, arg) => {
                let a = arg.eval_guarded(x1, x2, guard)?;
                match f {
                    Func::Log => guard.ln(a, at)?,
                    Func::Exp => a.exp(),
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Sqrt => guard.sqrt(a, at)?,
                    Func::Abs => a.abs(),
                }
            }
        })
    }

    /// True when the tree mentions `x2`.
    pub fn uses_x2(&self) -> bool {
        match self {
            Expr::X2 => true,
            Expr::Num(_) | Expr::X1 | Expr::Param { .. } => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.uses_x2(),
            Expr::Bin(_, a, b) => a.uses_x2() || b.uses_x2(),
        }
    }
}

/// Strict evaluation: any domain violation is an error.
pub fn eval_ast(ast: &Expr, x1: f64, x2: f64) -> Result<f64> {
    ast.eval_guarded(x1, x2, &Guard::default())
}

/// Fully parenthesised, re-parseable rendering.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::X1 => f.write_str("x1"),
            Expr::X2 => f.write_str("x2"),
            Expr::Param { name, .. } => f.write_str(name),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let v: f64 = lit.parse().map_err(|_| NesError::Syntax {
                pos: start,
                msg: format!("malformed number `{lit}`"),
            })?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                _ => {
                    return Err(NesError::Syntax {
                        pos: start,
                        msg: format!("unexpected character `{c}`"),
                    })
                }
            };
            out.push((tok, start));
            i += c.len_utf8();
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    params: &'a BTreeMap<String, f64>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(NesError::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let Some((tok, at)) = self.toks.get(self.pos).cloned() else {
            return self.syntax("unexpected end of expression");
        };
        match tok {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.syntax("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::LParen) {
                    let Some(func) = Func::from_name(&name) else {
                        return Err(NesError::UnknownIdentifier { name, pos: at });
                    };
                    self.pos += 1;
                    let mut args = Vec::new();
                    if self.peek() != Some(&Tok::RParen) {
                        args.push(self.expr()?);
                        while self.peek() == Some(&Tok::Comma) {
                            self.pos += 1;
                            args.push(self.expr()?);
                        }
                    }
                    if self.peek() != Some(&Tok::RParen) {
                        return self.syntax("expected `)` after function arguments");
                    }
                    self.pos += 1;
                    if args.len() != 1 {
                        return Err(NesError::Arity {
                            name,
                            expected: 1,
                            got: args.len(),
                        });
                    }
                    return Ok(Expr::Call(func, Box::new(args.pop().unwrap())));
                }
                match name.as_str() {
                    "x1" => Ok(Expr::X1),
                    "x2" => Ok(Expr::X2),
                    _ => match self.params.get(&name) {
                        Some(&value) => Ok(Expr::Param { name, value }),
                        None if Func::from_name(&name).is_some() => Err(NesError::Arity {
                            name,
                            expected: 1,
                            got: 0,
                        }),
                        None => Err(NesError::UnknownIdentifier { name, pos: at }),
                    },
                }
            }
            Tok::Op(c) => self.syntax(format!("unexpected operator `{c}`")),
            Tok::RParen => self.syntax("unexpected `)`"),
            Tok::Comma => self.syntax("unexpected `,`"),
        }
    }
}

/// Parses a cost expression. Identifiers other than `x1`, `x2`, the keys of
/// `params` and the supported function names are rejected.
pub fn parse_cost_expr(text: &str, params: &BTreeMap<String, f64>) -> Result<Expr> {
    if text.trim().is_empty() {
        return Err(NesError::Syntax {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        params,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.syntax("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_params() -> BTreeMap<String, f64> {
        BTreeMap::new()
    }

    fn eval(text: &str, x1: f64, x2: f64) -> Result<f64> {
        eval_ast(&parse_cost_expr(text, &no_params())?, x1, x2)
    }

    #[test]
    fn quadratic_leader_cost_by_hand() {
        assert_eq!(eval("0.5*x1^2 + 2*x1*x2", 1.0, 1.0).unwrap(), 2.5);
    }

    #[test]
    fn identity_and_sum() {
        assert_eq!(eval("x1", 0.0, 5.0).unwrap(), 0.0);
        assert_eq!(eval("x1+x2", 2.0, 3.0).unwrap(), 5.0);
    }

    #[test]
    fn log_of_negative_is_domain_violation() {
        let err = eval("log(x2)", 1.0, -1.0).unwrap_err();
        assert!(err.is_domain(), "{err:?}");
        assert!(eval("sqrt(x1)", -1.0, 0.0).unwrap_err().is_domain());
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("-2^2", 0.0, 0.0).unwrap(), -4.0);
        assert_eq!(eval("2^3^2", 0.0, 0.0).unwrap(), 512.0);
        assert_eq!(eval("8/4/2", 0.0, 0.0).unwrap(), 1.0);
        assert_eq!(eval("10-4-3", 0.0, 0.0).unwrap(), 3.0);
        assert_eq!(eval("1+2*3", 0.0, 0.0).unwrap(), 7.0);
        assert_eq!(eval("2^-1", 0.0, 0.0).unwrap(), 0.5);
        assert_eq!(eval("(1+2)*3", 0.0, 0.0).unwrap(), 9.0);
        assert_eq!(eval("1.5e-1*2E1", 0.0, 0.0).unwrap(), 3.0);
    }

    #[test]
    fn functions() {
        let v = eval("exp(0) + cos(0) + sin(0) + abs(-2) + sqrt(4) + log(1)", 0.0, 0.0).unwrap();
        assert_eq!(v, 6.0);
    }

    #[test]
    fn params_bind_by_name() {
        let mut params = BTreeMap::new();
        params.insert("a".to_string(), 3.0);
        let e = parse_cost_expr("a*x1", &params).unwrap();
        assert_eq!(eval_ast(&e, 2.0, 0.0).unwrap(), 6.0);
        assert_eq!(e.to_string(), "(a * x1)");
    }

    #[test]
    fn errors_carry_positions() {
        match parse_cost_expr("x1 + y", &no_params()) {
            Err(NesError::UnknownIdentifier { name, pos }) => {
                assert_eq!(name, "y");
                assert_eq!(pos, 5);
            }
            other => panic!("{other:?}"),
        }
        match parse_cost_expr("x1 + * 2", &no_params()) {
            Err(NesError::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_cost_expr("(x1", &no_params()),
            Err(NesError::Syntax { pos: 3, .. })
        ));
        assert!(matches!(
            parse_cost_expr("x1 $ 2", &no_params()),
            Err(NesError::Syntax { pos: 3, .. })
        ));
        assert!(matches!(
            parse_cost_expr("   ", &no_params()),
            Err(NesError::Syntax { .. })
        ));
        assert!(matches!(
            parse_cost_expr("x1 x2", &no_params()),
            Err(NesError::Syntax { .. })
        ));
    }

    #[test]
    fn arity_mismatch() {
        assert!(matches!(
            parse_cost_expr("log(x1, x2)", &no_params()),
            Err(NesError::Arity { expected: 1, got: 2, .. })
        ));
        assert!(matches!(
            parse_cost_expr("sin()", &no_params()),
            Err(NesError::Arity { got: 0, .. })
        ));
        assert!(matches!(
            parse_cost_expr("cos + 1", &no_params()),
            Err(NesError::Arity { got: 0, .. })
        ));
        assert!(matches!(
            parse_cost_expr("foo(x1)", &no_params()),
            Err(NesError::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn fish_war_constraint_negative_outside() {
        let mut params = BTreeMap::new();
        params.insert("x".to_string(), 1.259);
        let e = parse_cost_expr("x - x1 - x2^1.1", &params).unwrap();
        assert!(eval_ast(&e, 1.3, 0.1).unwrap() < 0.0);
        assert!(eval_ast(&e, 0.3, 0.9).unwrap() > 0.0);
    }
}
