//! A small expression language for functions `Rⁿ → [0, ∞]`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'inf' | var | ident '(' args? ')' | '(' expr ')'
//! var    := 'x' digits            (plain 'x' means x0 when dim = 1)
//! args   := expr (',' expr)*
//! ```
//!
//! Functions: `sqrt exp abs pos sin cos` (one argument), `min max` (two or
//! more), `norm` (no argument for the whole vector, or a list of terms).
//! Indicators take constant arguments and are `inf` inside the set, `0`
//! outside: `ball(r)`, `box(lo, hi)`, `halfspace(a0, .., a{n-1}, b)` for
//! `aᵀx ≤ b`.
//!
//! Arithmetic is plain IEEE. A result that is undefined (square root of a
//! negative, `inf - inf`) or negative is an error at the top level;
//! `pos(e)` maps both to `0`, which is how effective domains are written.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Abs,
    Pos,
    Sin,
    Cos,
    Min,
    Max,
    Norm,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "abs" => Func::Abs,
            "pos" => Func::Pos,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "min" => Func::Min,
            "max" => Func::Max,
            "norm" => Func::Norm,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Abs => "abs",
            Func::Pos => "pos",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Min => "min",
            Func::Max => "max",
            Func::Norm => "norm",
        }
    }
}

/// Indicator of a set with constant parameters: `inf` on the set, `0` off it.
#[derive(Debug, Clone, PartialEq)]
pub enum Indicator {
    Ball(f64),
    Box(f64, f64),
    Halfspace(Vec<f64>, f64),
}

impl Indicator {
    /// Signed slack: negative inside, zero on the boundary, positive outside.
    fn slack(&self, x: &[f64]) -> f64 {
        match self {
            Indicator::Ball(r) => x.iter().map(|c| c * c).sum::<f64>().sqrt() - r,
            Indicator::Box(lo, hi) => x
                .iter()
                .map(|&c| (lo - c).max(c - hi))
                .fold(f64::NEG_INFINITY, f64::max),
            Indicator::Halfspace(a, b) => a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>() - b,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.slack(x) <= 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Inf,
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    Indicator(Indicator),
}

impl Expr {
    pub fn parse(text: &str, dim: usize) -> Result<Expr> {
        Parser::new(text, dim)?.parse_all()
    }

    pub fn has_vars(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Inf => false,
            Expr::Var(_) => true,
            Expr::Neg(a) => a.has_vars(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.has_vars() || b.has_vars(),
            Expr::Call(Func::Norm, args) if args.is_empty() => true,
            Expr::Call(_, args) => args.iter().any(Expr::has_vars),
            Expr::Indicator(_) => true,
        }
    }

    /// Raw evaluation; NaN marks an undefined result.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Inf => f64::INFINITY,
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, b) => pow(a.eval(x), b.eval(x)),
            Expr::Call(f, args) => match f {
                Func::Sqrt => args[0].eval(x).sqrt(),
                Func::Exp => args[0].eval(x).exp(),
                Func::Abs => args[0].eval(x).abs(),
                Func::Pos => {
                    let v = args[0].eval(x);
                    if v > 0.0 {
                        v
                    } else {
                        0.0
                    }
                }
                Func::Sin => args[0].eval(x).sin(),
                Func::Cos => args[0].eval(x).cos(),
                Func::Min => fold_nan(args.iter().map(|a| a.eval(x)), f64::min),
                Func::Max => fold_nan(args.iter().map(|a| a.eval(x)), f64::max),
                Func::Norm if args.is_empty() => x.iter().map(|c| c * c).sum::<f64>().sqrt(),
                Func::Norm => args
                    .iter()
                    .map(|a| {
                        let v = a.eval(x);
                        v * v
                    })
                    .sum::<f64>()
                    .sqrt(),
            },
            Expr::Indicator(s) => {
                if s.contains(x) {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
        }
    }

    /// Value, gradient and Hessian by forward-mode second-order
    /// differentiation. `kink` is set when the point sits on a
    /// nondifferentiable branch point of some primitive.
    pub fn jet(&self, x: &[f64]) -> Jet {
        let n = x.len();
        match self {
            Expr::Num(v) => Jet::constant(*v, n),
            Expr::Inf => Jet::constant(f64::INFINITY, n),
            Expr::Var(i) => Jet::variable(x[*i], *i, n),
            Expr::Neg(a) => a.jet(x).scale(-1.0),
            Expr::Add(a, b) => a.jet(x).add(&b.jet(x), 1.0),
            Expr::Sub(a, b) => a.jet(x).add(&b.jet(x), -1.0),
            Expr::Mul(a, b) => a.jet(x).mul(&b.jet(x)),
            Expr::Div(a, b) => {
                let d = b.jet(x);
                let t = d.v;
                a.jet(x)
                    .mul(&d.chain(1.0 / t, -1.0 / (t * t), 2.0 / (t * t * t), false))
            }
            Expr::Pow(a, b) => {
                let base = a.jet(x);
                if !b.has_vars() {
                    let c = b.eval(x);
                    let t = base.v;
                    let kink = t == 0.0 && (c < 1.0 || (c < 2.0 && c.fract() != 0.0));
                    let d1 = if c == 0.0 { 0.0 } else { c * pow(t, c - 1.0) };
                    let d2 = if c == 0.0 || c == 1.0 {
                        0.0
                    } else {
                        c * (c - 1.0) * pow(t, c - 2.0)
                    };
                    base.chain(pow(t, c), d1, d2, kink)
                } else {
                    // a^b = exp(b ln a) for a > 0.
                    let t = base.v;
                    let ln = base.chain(t.ln(), 1.0 / t, -1.0 / (t * t), t <= 0.0);
                    let e = b.jet(x).mul(&ln);
                    let v = e.v.exp();
                    e.chain(v, v, v, false)
                }
            }
            Expr::Call(f, args) => match f {
                Func::Sqrt => {
                    let a = args[0].jet(x);
                    let s = a.v.sqrt();
                    a.chain(s, 0.5 / s, -0.25 / (s * s * s), a.v <= 0.0)
                }
                Func::Exp => {
                    let a = args[0].jet(x);
                    let e = a.v.exp();
                    a.chain(e, e, e, false)
                }
                Func::Abs => {
                    let a = args[0].jet(x);
                    let s = if a.v < 0.0 { -1.0 } else { 1.0 };
                    let kink = a.v == 0.0;
                    let mut r = a.scale(s);
                    r.kink |= kink;
                    r
                }
                Func::Pos => {
                    let a = args[0].jet(x);
                    if a.v > 0.0 {
                        a
                    } else {
                        let mut r = Jet::constant(0.0, n);
                        r.kink = a.v == 0.0 || a.kink;
                        r
                    }
                }
                Func::Sin => {
                    let a = args[0].jet(x);
                    let (s, c) = a.v.sin_cos();
                    a.chain(s, c, -s, false)
                }
                Func::Cos => {
                    let a = args[0].jet(x);
                    let (s, c) = a.v.sin_cos();
                    a.chain(c, -s, -c, false)
                }
                Func::Min | Func::Max => {
                    let jets: Vec<Jet> = args.iter().map(|a| a.jet(x)).collect();
                    let better = |a: f64, b: f64| if *f == Func::Min { a < b } else { a > b };
                    let mut best = 0;
                    for (i, j) in jets.iter().enumerate().skip(1) {
                        if better(j.v, jets[best].v) {
                            best = i;
                        }
                    }
                    let tie = jets
                        .iter()
                        .enumerate()
                        .any(|(i, j)| i != best && j.v == jets[best].v);
                    let mut r = jets[best].clone();
                    r.kink |= tie;
                    r
                }
                Func::Norm => {
                    let parts: Vec<Jet> = if args.is_empty() {
                        (0..n).map(|i| Jet::variable(x[i], i, n)).collect()
                    } else {
                        args.iter().map(|a| a.jet(x)).collect()
                    };
                    let mut sq = Jet::constant(0.0, n);
                    for p in &parts {
                        sq = sq.add(&p.mul(p), 1.0);
                    }
                    let s = sq.v.sqrt();
                    sq.chain(s, 0.5 / s, -0.25 / (s * s * s), sq.v <= 0.0)
                }
            },
            Expr::Indicator(s) => {
                let slack = s.slack(x);
                let mut r = Jet::constant(if slack <= 0.0 { f64::INFINITY } else { 0.0 }, n);
                r.kink = slack == 0.0;
                r
            }
        }
    }
}

fn fold_nan(mut it: impl Iterator<Item = f64>, op: fn(f64, f64) -> f64) -> f64 {
    let first = it.next().unwrap_or(f64::NAN);
    it.fold(first, |acc, v| {
        if acc.is_nan() || v.is_nan() {
            f64::NAN
        } else {
            op(acc, v)
        }
    })
}

fn pow(a: f64, b: f64) -> f64 {
    if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
        a.powi(b as i32)
    } else {
        a.powf(b)
    }
}

/// Value with gradient and row-major Hessian.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub kink: bool,
}

impl Jet {
    fn constant(v: f64, n: usize) -> Jet {
        Jet {
            v,
            g: vec![0.0; n],
            h: vec![0.0; n * n],
            kink: false,
        }
    }

    fn variable(v: f64, i: usize, n: usize) -> Jet {
        let mut j = Jet::constant(v, n);
        j.g[i] = 1.0;
        j
    }

    fn scale(mut self, s: f64) -> Jet {
        self.v *= s;
        self.g.iter_mut().for_each(|c| *c *= s);
        self.h.iter_mut().for_each(|c| *c *= s);
        self
    }

    fn add(mut self, o: &Jet, sign: f64) -> Jet {
        self.v += sign * o.v;
        self.g
            .iter_mut()
            .zip(&o.g)
            .for_each(|(a, b)| *a += sign * b);
        self.h
            .iter_mut()
            .zip(&o.h)
            .for_each(|(a, b)| *a += sign * b);
        self.kink |= o.kink;
        self
    }

    fn mul(&self, o: &Jet) -> Jet {
        let n = self.g.len();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                h[i * n + j] = self.h[i * n + j] * o.v
                    + self.v * o.h[i * n + j]
                    + self.g[i] * o.g[j]
                    + o.g[i] * self.g[j];
            }
        }
        Jet {
            v: self.v * o.v,
            g: self
                .g
                .iter()
                .zip(&o.g)
                .map(|(a, b)| a * o.v + self.v * b)
                .collect(),
            h,
            kink: self.kink || o.kink,
        }
    }

    /// Composes with a scalar map `φ` given `φ(v)`, `φ'(v)`, `φ''(v)`.
    fn chain(&self, f0: f64, f1: f64, f2: f64, kink: bool) -> Jet {
        let n = self.g.len();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                h[i * n + j] = f1 * self.h[i * n + j] + f2 * self.g[i] * self.g[j];
            }
        }
        Jet {
            v: f0,
            g: self.g.iter().map(|c| f1 * c).collect(),
            h,
            kink: self.kink || kink,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Inf => f.write_str("inf"),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Expr::Indicator(s) => match s {
                Indicator::Ball(r) => write!(f, "ball({r:?})"),
                Indicator::Box(lo, hi) => write!(f, "box({lo:?}, {hi:?})"),
                Indicator::Halfspace(a, b) => {
                    f.write_str("halfspace(")?;
                    for c in a {
                        write!(f, "{c:?}, ")?;
                    }
                    write!(f, "{b:?})")
                }
            },
        }
    }
}

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
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
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
                let s = &text[start..i];
                let v: f64 = s.parse().map_err(|_| Error::Parse {
                    offset: start,
                    message: format!("malformed number `{s}`"),
                })?;
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(Error::Parse {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    dim: usize,
}

impl Parser {
    fn new(text: &str, dim: usize) -> Result<Parser> {
        if text.trim().is_empty() {
            return Err(Error::Parse {
                offset: 0,
                message: "empty expression".into(),
            });
        }
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            dim,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn parse_all(mut self) -> Result<Expr> {
        let e = self.expr()?;
        if *self.peek() != Tok::End {
            return self.fail("unexpected trailing input");
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let offset = self.offset();
        match self.bump().0 {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let args = self.args()?;
                    self.call(name, args, offset)
                } else {
                    self.variable(name, offset)
                }
            }
            Tok::End => Err(Error::Parse {
                offset,
                message: "unexpected end of input".into(),
            }),
            other => Err(Error::Parse {
                offset,
                message: format!("unexpected token {other:?}"),
            }),
        }
    }

    fn args(&mut self) -> Result<Vec<Expr>> {
        let mut args = Vec::new();
        if *self.peek() == Tok::RParen {
            self.bump();
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RParen => {
                    self.bump();
                    return Ok(args);
                }
                _ => return self.fail("expected `,` or `)`"),
            }
        }
    }

    fn variable(&self, name: String, offset: usize) -> Result<Expr> {
        if name == "inf" {
            return Ok(Expr::Inf);
        }
        if name == "x" && self.dim == 1 {
            return Ok(Expr::Var(0));
        }
        if let Some(idx) = name.strip_prefix('x') {
            if !idx.is_empty() && idx.bytes().all(|b| b.is_ascii_digit()) {
                if let Ok(i) = idx.parse::<usize>() {
                    if i < self.dim {
                        return Ok(Expr::Var(i));
                    }
                }
            }
        }
        Err(Error::UnknownIdentifier { name, offset })
    }

    fn call(&self, name: String, args: Vec<Expr>, offset: usize) -> Result<Expr> {
        let arity = |expected: &str, ok: bool| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::Arity {
                    name: name.clone(),
                    expected: expected.to_string(),
                    found: args.len(),
                    offset,
                })
            }
        };
        if let Some(func) = Func::from_name(&name) {
            match func {
                Func::Min | Func::Max => arity("at least 2", args.len() >= 2)?,
                Func::Norm => {}
                _ => arity("1", args.len() == 1)?,
            }
            return Ok(Expr::Call(func, args));
        }
        let constants = || -> Result<Vec<f64>> {
            args.iter()
                .map(|a| {
                    if a.has_vars() {
                        Err(Error::Parse {
                            offset,
                            message: format!("arguments of `{name}` must be constants"),
                        })
                    } else {
                        Ok(a.eval(&[]))
                    }
                })
                .collect()
        };
        let ind = match name.as_str() {
            "ball" => {
                arity("1", args.len() == 1)?;
                Indicator::Ball(constants()?[0])
            }
            "box" => {
                arity("2", args.len() == 2)?;
                let c = constants()?;
                Indicator::Box(c[0], c[1])
            }
            "halfspace" => {
                arity(&(self.dim + 1).to_string(), args.len() == self.dim + 1)?;
                let mut c = constants()?;
                let b = c.pop().unwrap_or(0.0);
                Indicator::Halfspace(c, b)
            }
            _ => return Err(Error::UnknownIdentifier { name, offset }),
        };
        Ok(Expr::Indicator(ind))
    }
}
