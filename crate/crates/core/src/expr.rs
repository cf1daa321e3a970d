//! Expressions in one variable `t`: parsing, printing, symbolic
//! differentiation, and principal-branch complex evaluation.
//!
//! Grammar, loosest to tightest:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' exponent)?          right-associative
//! exponent:= ('-' | '+')* power            must fold to a real constant
//! atom    := number | 't' | 'i' | 'pi' | 'e' | func '(' sum ')' | '(' sum ')'
//! ```
//!
//! There is no implicit multiplication: `2t` is a syntax error.

use std::fmt;

use crate::error::{Error, Result};
use crate::multivalue::{self, Complex};

pub const MAX_DEPTH: usize = 64;
pub const MAX_LEN: usize = 4096;

// Parentheses nest without deepening the tree, so the parser's own recursion
// gets a looser cap than the tree.
const RECURSION_LIMIT: usize = 4 * MAX_DEPTH;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Power with a real constant exponent.
    Pow(Box<Expr>, f64),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn real(x: f64) -> Expr {
        Expr::Const(Complex::new(x, 0.0))
    }

    pub fn parse(text: &str) -> Result<Expr> {
        parse(text)
    }

    pub fn eval(&self, t: Complex) -> Result<Complex> {
        eval(self, t)
    }

    pub fn eval_real(&self, t: f64) -> Result<Complex> {
        eval(self, Complex::new(t, 0.0))
    }

    pub fn differentiate(&self) -> Expr {
        differentiate(self)
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var => 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.depth().max(b.depth())
            }
            Expr::Pow(a, _) | Expr::Neg(a) | Expr::Call(_, a) => 1 + a.depth(),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_constant() && b.is_constant()
            }
            Expr::Pow(a, _) | Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
        }
    }

    fn as_const(&self) -> Option<Complex> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }
}

// Smart constructors with light constant folding, used by `differentiate`.

fn is_zero(e: &Expr) -> bool {
    e.as_const().is_some_and(|c| c == Complex::new(0.0, 0.0))
}

fn is_one(e: &Expr) -> bool {
    e.as_const().is_some_and(|c| c == Complex::new(1.0, 0.0))
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        _ if is_zero(&a) => b,
        _ if is_zero(&b) => a,
        (Some(x), Some(y)) => Expr::Const(x + y),
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        _ if is_zero(&b) => a,
        _ if is_zero(&a) => neg(b),
        (Some(x), Some(y)) => Expr::Const(x - y),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        _ if is_zero(&a) || is_zero(&b) => Expr::real(0.0),
        _ if is_one(&a) => b,
        _ if is_one(&b) => a,
        (Some(x), Some(y)) => Expr::Const(x * y),
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        return Expr::real(0.0);
    }
    if is_one(&b) {
        return a;
    }
    Expr::Div(Box::new(a), Box::new(b))
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn pow(a: Expr, alpha: f64) -> Expr {
    if alpha == 0.0 {
        Expr::real(1.0)
    } else if alpha == 1.0 {
        a
    } else {
        Expr::Pow(Box::new(a), alpha)
    }
}

fn call(f: Func, a: Expr) -> Expr {
    Expr::Call(f, Box::new(a))
}

/// Symbolic derivative with respect to `t`.
pub fn differentiate(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) => Expr::real(0.0),
        Expr::Var => Expr::real(1.0),
        Expr::Add(a, b) => add(differentiate(a), differentiate(b)),
        Expr::Sub(a, b) => sub(differentiate(a), differentiate(b)),
        Expr::Mul(a, b) => add(
            mul(differentiate(a), (**b).clone()),
            mul((**a).clone(), differentiate(b)),
        ),
        Expr::Div(a, b) => {
            let num = sub(
                mul(differentiate(a), (**b).clone()),
                mul((**a).clone(), differentiate(b)),
            );
            div(num, pow((**b).clone(), 2.0))
        }
        Expr::Pow(a, alpha) => {
            let da = differentiate(a);
            if is_zero(&da) {
                return Expr::real(0.0);
            }
            mul(mul(Expr::real(*alpha), pow((**a).clone(), alpha - 1.0)), da)
        }
        Expr::Neg(a) => neg(differentiate(a)),
        Expr::Call(f, a) => {
            let da = differentiate(a);
            if is_zero(&da) {
                return Expr::real(0.0);
            }
            let inner = (**a).clone();
            let outer = match f {
                Func::Exp => call(Func::Exp, inner),
                Func::Log => return div(da, inner),
                Func::Sin => call(Func::Cos, inner),
                Func::Cos => neg(call(Func::Sin, inner)),
                Func::Sqrt => return div(da, mul(Expr::real(2.0), call(Func::Sqrt, inner))),
            };
            mul(outer, da)
        }
    }
}

/// Evaluate at a complex argument with principal branches throughout.
pub fn eval(e: &Expr, t: Complex) -> Result<Complex> {
    let v = match e {
        Expr::Const(c) => *c,
        Expr::Var => t,
        Expr::Add(a, b) => eval(a, t)? + eval(b, t)?,
        Expr::Sub(a, b) => eval(a, t)? - eval(b, t)?,
        Expr::Mul(a, b) => eval(a, t)? * eval(b, t)?,
        Expr::Div(a, b) => {
            let den = eval(b, t)?;
            if den.norm() == 0.0 {
                return Err(Error::EvalDomain(format!("division by zero at t = {t}")));
            }
            eval(a, t)? / den
        }
        Expr::Pow(a, alpha) => {
            let base = eval(a, t)?;
            if base.norm() == 0.0 {
                if *alpha > 0.0 {
                    Complex::new(0.0, 0.0)
                } else if *alpha == 0.0 {
                    Complex::new(1.0, 0.0)
                } else {
                    return Err(Error::EvalDomain(format!("zero to a negative power at t = {t}")));
                }
            } else {
                multivalue::pow_real(base, *alpha)?
            }
        }
        Expr::Neg(a) => -eval(a, t)?,
        Expr::Call(f, a) => {
            let x = eval(a, t)?;
            match f {
                Func::Exp => x.exp(),
                Func::Log => multivalue::principal_log(x)
                    .map_err(|_| Error::EvalDomain(format!("log of zero at t = {t}")))?,
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Sqrt => multivalue::principal_sqrt(x),
            }
        }
    };
    multivalue::finite(v)
}

/// Parse an expression in `t`.
pub fn parse(text: &str) -> Result<Expr> {
    if text.len() > MAX_LEN {
        return Err(Error::Syntax {
            offset: MAX_LEN,
            message: format!("input longer than {MAX_LEN} bytes"),
        });
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        depth: 0,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(p.error("empty expression"));
    }
    let e = p.sum()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error("unexpected trailing input"));
    }
    if e.depth() > MAX_DEPTH {
        return Err(Error::DepthExceeded { limit: MAX_DEPTH });
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > RECURSION_LIMIT {
            return Err(Error::DepthExceeded { limit: MAX_DEPTH });
        }
        Ok(())
    }

    fn sum(&mut self) -> Result<Expr> {
        self.enter()?;
        let mut lhs = self.product()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        self.enter()?;
        let e = if self.eat(b'-') {
            Expr::Neg(Box::new(self.unary()?))
        } else if self.eat(b'+') {
            self.unary()?
        } else {
            self.power()?
        };
        self.depth -= 1;
        Ok(e)
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        self.skip_ws();
        let at = self.pos;
        let exponent = self.exponent()?;
        if !exponent.is_constant() {
            return Err(Error::Syntax {
                offset: at,
                message: "exponent must be a real constant".into(),
            });
        }
        let value = eval(&exponent, Complex::new(0.0, 0.0)).map_err(|_| Error::Syntax {
            offset: at,
            message: "exponent does not evaluate".into(),
        })?;
        if value.im != 0.0 {
            return Err(Error::Syntax {
                offset: at,
                message: "exponent must be real".into(),
            });
        }
        Ok(Expr::Pow(Box::new(base), value.re))
    }

    fn exponent(&mut self) -> Result<Expr> {
        self.enter()?;
        let e = if self.eat(b'-') {
            Expr::Neg(Box::new(self.exponent()?))
        } else if self.eat(b'+') {
            self.exponent()?
        } else {
            self.power()?
        };
        self.depth -= 1;
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
                match name {
                    "t" => Ok(Expr::Var),
                    "i" => Ok(Expr::Const(multivalue::I)),
                    "pi" => Ok(Expr::real(std::f64::consts::PI)),
                    "e" => Ok(Expr::real(std::f64::consts::E)),
                    _ => {
                        let func = Func::from_name(name).ok_or_else(|| Error::UnknownFunction {
                            name: name.to_string(),
                            offset: start,
                        })?;
                        if !self.eat(b'(') {
                            return Err(self.error("expected `(` after function name"));
                        }
                        let arg = self.sum()?;
                        if !self.eat(b')') {
                            return Err(self.error("expected `)`"));
                        }
                        Ok(Expr::Call(func, Box::new(arg)))
                    }
                }
            }
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.peek().is_some_and(|c| c.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos > s
        };
        let int = digits(self);
        let mut frac = false;
        if self.peek() == Some(b'.') {
            self.pos += 1;
            frac = digits(self);
        }
        if !int && !frac {
            self.pos = start;
            return Err(self.error("malformed number"));
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if !digits(self) {
                // not an exponent; leave `e` for the caller (which will reject it)
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        let x: f64 = text.parse().map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })?;
        if !x.is_finite() {
            return Err(Error::Syntax {
                offset: start,
                message: format!("number out of range `{text}`"),
            });
        }
        Ok(Expr::real(x))
    }
}

fn fmt_real(x: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if x < 0.0 || (x == 0.0 && x.is_sign_negative()) {
        write!(f, "(-{})", -x)
    } else {
        write!(f, "{x}")
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized text that parses back to an equivalent tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.im == 0.0 {
                    fmt_real(c.re, f)
                } else if *c == Complex::new(0.0, 1.0) {
                    write!(f, "i")
                } else {
                    write!(f, "(")?;
                    fmt_real(c.re, f)?;
                    write!(f, "+")?;
                    fmt_real(c.im, f)?;
                    write!(f, "*i)")
                }
            }
            Expr::Var => write!(f, "t"),
            Expr::Add(a, b) => write!(f, "({a}+{b})"),
            Expr::Sub(a, b) => write!(f, "({a}-{b})"),
            Expr::Mul(a, b) => write!(f, "({a}*{b})"),
            Expr::Div(a, b) => write!(f, "({a}/{b})"),
            Expr::Pow(a, alpha) => {
                write!(f, "({a}^")?;
                fmt_real(*alpha, f)?;
                write!(f, ")")
            }
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
