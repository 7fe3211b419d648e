//! Coefficient expressions in the independent variable `t`.
//!
//! Expressions are parsed from a small infix grammar, printed back in a form
//! that re-parses to the same tree, and evaluated either as plain values or as
//! second-order jets (value, first and second derivative with respect to `t`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Named real parameters bound at evaluation time.
pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-finite result")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, ExprError>;

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

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Sgn,
}

impl Func {
    pub const ALL: [Func; 11] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Abs,
        Func::Sgn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Sgn => "sgn",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }

    /// Value and first two derivatives of the function at `x`.
    fn taylor(self, x: f64) -> Result<(f64, f64, f64)> {
        Ok(match self {
            Func::Sin => (x.sin(), x.cos(), -x.sin()),
            Func::Cos => (x.cos(), -x.sin(), -x.cos()),
            Func::Tan => {
                let t = x.tan();
                let sec2 = 1.0 + t * t;
                (t, sec2, 2.0 * t * sec2)
            }
            Func::Sinh => (x.sinh(), x.cosh(), x.sinh()),
            Func::Cosh => (x.cosh(), x.sinh(), x.cosh()),
            Func::Tanh => {
                let th = x.tanh();
                let sech2 = 1.0 - th * th;
                (th, sech2, -2.0 * th * sech2)
            }
            Func::Exp => {
                let e = x.exp();
                (e, e, e)
            }
            Func::Ln => {
                if x <= 0.0 {
                    return Err(ExprError::Domain(format!("ln of non-positive value {x}")));
                }
                (x.ln(), 1.0 / x, -1.0 / (x * x))
            }
            Func::Sqrt => {
                if x <= 0.0 {
                    return Err(ExprError::Domain(format!("sqrt of non-positive value {x}")));
                }
                let s = x.sqrt();
                (s, 0.5 / s, -0.25 / (s * x))
            }
            // abs and sgn have zero derivative contributions at exactly 0.
            Func::Abs => (x.abs(), sign(x), 0.0),
            Func::Sgn => (sign(x), 0.0, 0.0),
        })
    }

    fn value(self, x: f64) -> Result<f64> {
        Ok(match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Exp => x.exp(),
            Func::Abs => x.abs(),
            Func::Sgn => sign(x),
            Func::Ln | Func::Sqrt => self.taylor(x)?.0,
        })
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Expression tree over the independent variable `t`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Param(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn param(name: impl Into<String>) -> Expr {
        Expr::Param(name.into())
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    /// Parameter names referenced anywhere in the tree.
    pub fn free_params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) | Expr::Var => {}
            Expr::Param(name) => {
                out.insert(name.clone());
            }
            Expr::Neg(e) | Expr::Call(_, e) => e.collect_params(out),
            Expr::Binary(_, l, r) => {
                l.collect_params(out);
                r.collect_params(out);
            }
        }
    }

    pub fn depends_on_t(&self) -> bool {
        match self {
            Expr::Var => true,
            Expr::Num(_) | Expr::Param(_) => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.depends_on_t(),
            Expr::Binary(_, l, r) => l.depends_on_t() || r.depends_on_t(),
        }
    }

    /// Replaces parameter references by the given subtrees.
    pub fn substitute(&self, subs: &BTreeMap<String, Expr>) -> Expr {
        match self {
            Expr::Param(name) => subs.get(name).cloned().unwrap_or_else(|| self.clone()),
            Expr::Num(_) | Expr::Var => self.clone(),
            Expr::Neg(e) => Expr::Neg(Box::new(e.substitute(subs))),
            Expr::Call(f, e) => Expr::Call(*f, Box::new(e.substitute(subs))),
            Expr::Binary(op, l, r) => Expr::binary(*op, l.substitute(subs), r.substitute(subs)),
        }
    }

    /// Replaces every bound parameter by its numeric value.
    pub fn bind(&self, params: &Params) -> Expr {
        match self {
            Expr::Param(name) => match params.get(name) {
                Some(v) => Expr::Num(*v),
                None => self.clone(),
            },
            Expr::Num(_) | Expr::Var => self.clone(),
            Expr::Neg(e) => Expr::Neg(Box::new(e.bind(params))),
            Expr::Call(f, e) => Expr::Call(*f, Box::new(e.bind(params))),
            Expr::Binary(op, l, r) => Expr::binary(*op, l.bind(params), r.bind(params)),
        }
    }

    pub fn eval(&self, t: f64, params: &Params) -> Result<f64> {
        let v: f64 = self.walk(t, params)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ExprError::NonFinite)
        }
    }

    pub fn eval_jet(&self, t: f64, params: &Params) -> Result<Jet2> {
        let j: Jet2 = self.walk(t, params)?;
        if j.v.is_finite() && j.d1.is_finite() && j.d2.is_finite() {
            Ok(j)
        } else {
            Err(ExprError::NonFinite)
        }
    }

    /// Evaluates an expression that must not depend on `t`.
    pub fn eval_const(&self, params: &Params) -> Result<f64> {
        if self.depends_on_t() {
            return Err(ExprError::Domain("constant expected, found a function of t".into()));
        }
        self.eval(0.0, params)
    }

    fn walk<S: Scalar>(&self, t: f64, params: &Params) -> Result<S> {
        match self {
            Expr::Num(v) => Ok(S::constant(*v)),
            Expr::Var => Ok(S::variable(t)),
            Expr::Param(name) => params
                .get(name)
                .map(|v| S::constant(*v))
                .ok_or_else(|| ExprError::UnboundParameter(name.clone())),
            Expr::Neg(e) => Ok(-e.walk::<S>(t, params)?),
            Expr::Call(f, e) => e.walk::<S>(t, params)?.apply(*f),
            Expr::Binary(op, l, r) => {
                let a = l.walk::<S>(t, params)?;
                let b = r.walk::<S>(t, params)?;
                match op {
                    BinOp::Add => Ok(a + b),
                    BinOp::Sub => Ok(a - b),
                    BinOp::Mul => Ok(a * b),
                    BinOp::Div => a.checked_div(b),
                    BinOp::Pow => a.checked_pow(b),
                }
            }
        }
    }

    /// Derivative with respect to `t` as a new (unsimplified beyond trivial
    /// folding) expression tree. Used to emit closed-form pair coefficients.
    pub fn time_derivative(&self) -> Expr {
        match self {
            Expr::Num(_) | Expr::Param(_) => Expr::Num(0.0),
            Expr::Var => Expr::Num(1.0),
            Expr::Neg(e) => neg(e.time_derivative()),
            Expr::Binary(op, l, r) => {
                let (dl, dr) = (l.time_derivative(), r.time_derivative());
                let (l, r) = (l.as_ref().clone(), r.as_ref().clone());
                match op {
                    BinOp::Add => add(dl, dr),
                    BinOp::Sub => sub(dl, dr),
                    BinOp::Mul => add(mul(dl, r), mul(l, dr)),
                    BinOp::Div => {
                        let num = sub(mul(dl, r.clone()), mul(l, dr));
                        Expr::binary(BinOp::Div, num, Expr::binary(BinOp::Pow, r, Expr::Num(2.0)))
                    }
                    BinOp::Pow if !r.depends_on_t() => match r {
                        Expr::Num(n) if n == 0.0 => Expr::Num(0.0),
                        Expr::Num(n) if n == 1.0 => dl,
                        Expr::Num(n) => mul(mul(Expr::Num(n), Expr::binary(BinOp::Pow, l, Expr::Num(n - 1.0))), dl),
                        exponent => {
                            let reduced = Expr::binary(BinOp::Sub, exponent.clone(), Expr::Num(1.0));
                            mul(mul(exponent, Expr::binary(BinOp::Pow, l, reduced)), dl)
                        }
                    },
                    BinOp::Pow => {
                        // d(u^w) = u^w (w' ln u + w u'/u)
                        let whole = self.clone();
                        let log_term = mul(dr, Expr::call(Func::Ln, l.clone()));
                        let ratio = Expr::binary(BinOp::Div, mul(r, dl), l);
                        mul(whole, add(log_term, ratio))
                    }
                }
            }
            Expr::Call(f, e) => {
                let de = e.time_derivative();
                let u = e.as_ref().clone();
                let outer = match f {
                    Func::Sin => Expr::call(Func::Cos, u),
                    Func::Cos => neg(Expr::call(Func::Sin, u)),
                    Func::Tan => add(
                        Expr::Num(1.0),
                        Expr::binary(BinOp::Pow, Expr::call(Func::Tan, u), Expr::Num(2.0)),
                    ),
                    Func::Sinh => Expr::call(Func::Cosh, u),
                    Func::Cosh => Expr::call(Func::Sinh, u),
                    Func::Tanh => sub(
                        Expr::Num(1.0),
                        Expr::binary(BinOp::Pow, Expr::call(Func::Tanh, u), Expr::Num(2.0)),
                    ),
                    Func::Exp => Expr::call(Func::Exp, u),
                    Func::Ln => Expr::binary(BinOp::Div, Expr::Num(1.0), u),
                    Func::Sqrt => Expr::binary(
                        BinOp::Div,
                        Expr::Num(1.0),
                        Expr::binary(BinOp::Mul, Expr::Num(2.0), Expr::call(Func::Sqrt, u)),
                    ),
                    Func::Abs => Expr::call(Func::Sgn, u),
                    Func::Sgn => Expr::Num(0.0),
                };
                mul(outer, de)
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Num(v) if v.is_sign_negative() => 3,
            Expr::Num(_) | Expr::Var | Expr::Param(_) | Expr::Call(..) => 5,
            Expr::Neg(_) => 3,
            Expr::Binary(op, ..) => op.precedence(),
        }
    }
}

fn is_zero(e: &Expr) -> bool {
    matches!(e, Expr::Num(v) if *v == 0.0)
}

fn is_one(e: &Expr) -> bool {
    matches!(e, Expr::Num(v) if *v == 1.0)
}

fn add(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        b
    } else if is_zero(&b) {
        a
    } else {
        Expr::binary(BinOp::Add, a, b)
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    if is_zero(&b) {
        a
    } else if is_zero(&a) {
        neg(b)
    } else {
        Expr::binary(BinOp::Sub, a, b)
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        Expr::Num(0.0)
    } else if is_one(&a) {
        b
    } else if is_one(&b) {
        a
    } else {
        Expr::binary(BinOp::Mul, a, b)
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(v) if v == 0.0 => Expr::Num(0.0),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if v.is_sign_negative() => write!(f, "-{:?}", -v),
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var => f.write_str("t"),
            Expr::Param(name) => f.write_str(name),
            Expr::Neg(e) => {
                f.write_str("-")?;
                write_child(f, e, e.precedence() < 3)
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                let (lp, rp) = (l.precedence(), r.precedence());
                if *op == BinOp::Pow {
                    // base binds tighter than anything but atoms; exponent is a unary operand
                    write_child(f, l, lp <= p)?;
                    f.write_str("^")?;
                    write_child(f, r, rp < 3)
                } else {
                    write_child(f, l, lp < p)?;
                    write!(f, " {} ", op.symbol())?;
                    write_child(f, r, rp <= p)
                }
            }
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl std::str::FromStr for Expr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Expr> {
        parse_expr(s)
    }
}

/// Value, first and second derivative with respect to `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet2 {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Jet2 { v, d1, d2 }
    }

    pub const fn constant(c: f64) -> Self {
        Jet2 { v: c, d1: 0.0, d2: 0.0 }
    }

    pub const fn variable(t: f64) -> Self {
        Jet2 { v: t, d1: 1.0, d2: 0.0 }
    }

    /// Composes an outer function, given its value and derivatives at `self.v`.
    fn chain(self, f: f64, df: f64, ddf: f64) -> Jet2 {
        Jet2 {
            v: f,
            d1: df * self.d1,
            d2: ddf * self.d1 * self.d1 + df * self.d2,
        }
    }

    fn ln(self) -> Result<Jet2> {
        let (f, df, ddf) = Func::Ln.taylor(self.v)?;
        Ok(self.chain(f, df, ddf))
    }

    fn exp(self) -> Jet2 {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        )
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2::new(-self.v, -self.d1, -self.d2)
    }
}

/// Number types the tree walker can evaluate into.
trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    fn constant(c: f64) -> Self;
    fn variable(t: f64) -> Self;
    fn checked_div(self, rhs: Self) -> Result<Self>;
    fn checked_pow(self, rhs: Self) -> Result<Self>;
    fn apply(self, f: Func) -> Result<Self>;
}

fn integer_exponent(w: f64) -> Option<i32> {
    (w.fract() == 0.0 && w.abs() <= i32::MAX as f64).then_some(w as i32)
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }

    fn variable(t: f64) -> Self {
        t
    }

    fn checked_div(self, rhs: f64) -> Result<f64> {
        if rhs == 0.0 {
            return Err(ExprError::Domain("division by zero".into()));
        }
        Ok(self / rhs)
    }

    fn checked_pow(self, w: f64) -> Result<f64> {
        match integer_exponent(w) {
            Some(n) if n < 0 && self == 0.0 => Err(ExprError::Domain("0 raised to a negative power".into())),
            Some(n) => Ok(self.powi(n)),
            None if self <= 0.0 => Err(ExprError::Domain(format!(
                "non-integer power {w} of non-positive base {self}"
            ))),
            None => Ok(self.powf(w)),
        }
    }

    fn apply(self, f: Func) -> Result<f64> {
        f.value(self)
    }
}

impl Scalar for Jet2 {
    fn constant(c: f64) -> Self {
        Jet2::constant(c)
    }

    fn variable(t: f64) -> Self {
        Jet2::variable(t)
    }

    fn checked_div(self, w: Jet2) -> Result<Jet2> {
        if w.v == 0.0 {
            return Err(ExprError::Domain("division by zero".into()));
        }
        let q = self.v / w.v;
        let q1 = (self.d1 - q * w.d1) / w.v;
        let q2 = (self.d2 - 2.0 * q1 * w.d1 - q * w.d2) / w.v;
        Ok(Jet2::new(q, q1, q2))
    }

    fn checked_pow(self, w: Jet2) -> Result<Jet2> {
        let v = self.v;
        if w.d1 != 0.0 || w.d2 != 0.0 {
            if v <= 0.0 {
                return Err(ExprError::Domain(format!("variable power of non-positive base {v}")));
            }
            let mut j = (w * self.ln()?).exp();
            j.v = v.checked_pow(w.v)?;
            return Ok(j);
        }
        match integer_exponent(w.v) {
            Some(0) => Ok(Jet2::constant(1.0)),
            Some(n) if n < 0 && v == 0.0 => Err(ExprError::Domain("0 raised to a negative power".into())),
            Some(1) => Ok(self),
            Some(n) => {
                let nf = n as f64;
                let f = v.powi(n);
                let df = nf * v.powi(n - 1);
                let ddf = nf * (nf - 1.0) * v.powi(n - 2);
                Ok(self.chain(f, df, ddf))
            }
            None if v <= 0.0 => Err(ExprError::Domain(format!(
                "non-integer power {} of non-positive base {v}",
                w.v
            ))),
            None => {
                let p = w.v;
                Ok(self.chain(v.powf(p), p * v.powf(p - 1.0), p * (p - 1.0) * v.powf(p - 2.0)))
            }
        }
    }

    fn apply(self, f: Func) -> Result<Jet2> {
        let (fv, df, ddf) = f.taylor(self.v)?;
        Ok(self.chain(fv, df, ddf))
    }
}

/// Parses the infix coefficient grammar. `x` is accepted as an alias of `t`
/// and `pi` denotes the constant.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(ExprError::Empty);
    }
    let e = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error(format!("unexpected `{}`", p.peek_char())));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek_char(&self) -> char {
        std::str::from_utf8(&self.src[self.pos..])
            .ok()
            .and_then(|s| s.chars().next())
            .unwrap_or('?')
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn error(&self, message: String) -> ExprError {
        ExprError::Syntax {
            offset: self.pos,
            message,
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

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(b'+') {
                BinOp::Add
            } else if self.eat(b'-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat(b'*') {
                BinOp::Mul
            } else if self.eat(b'/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat(b'^') {
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error("unexpected end of input".into())),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`".into()));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(_) => Err(self.error(format!("unexpected `{}`", self.peek_char()))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while matches!(p.peek(), Some(c) if c.is_ascii_digit()) {
                p.pos += 1;
            }
        };
        digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                digits(self);
            } else {
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse::<f64>().map(Expr::Num).map_err(|_| ExprError::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })
    }

    fn identifier(&mut self) -> Result<Expr> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
        let after_name = self.pos;
        if self.eat(b'(') {
            let func = Func::from_name(name).ok_or_else(|| ExprError::UnknownFunction {
                name: name.to_string(),
                offset: start,
            })?;
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.error("expected `)` after function argument".into()));
            }
            return Ok(Expr::call(func, arg));
        }
        self.pos = after_name;
        Ok(match name {
            "t" | "x" => Expr::Var,
            "pi" => Expr::Num(std::f64::consts::PI),
            _ => Expr::Param(name.to_string()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn jet(src: &str, t: f64, params: &[(&str, f64)]) -> Jet2 {
        let p: Params = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        parse_expr(src).unwrap().eval_jet(t, &p).unwrap()
    }

    #[test]
    fn square_at_three() {
        let e = parse_expr("t^2").unwrap();
        assert_eq!(e.eval(3.0, &Params::new()).unwrap(), 9.0);
    }

    #[test]
    fn x_is_an_alias_for_t() {
        assert_eq!(parse_expr("x^2 + 1").unwrap(), parse_expr("t^2 + 1").unwrap());
    }

    #[test]
    fn system_a_damping_parses() {
        let e = parse_expr("2 + 2*sin(w0*t)").unwrap();
        let p = Params::from([("w0".to_string(), 1.0)]);
        let t = 0.3;
        assert_eq!(e.eval(t, &p).unwrap(), 2.0 + 2.0 * t.sin());
    }

    #[test]
    fn implicit_multiplication_is_rejected() {
        match parse_expr("2 sin(t)") {
            Err(ExprError::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_expr("   "), Err(ExprError::Empty));
        assert!(matches!(
            parse_expr("foo(t)"),
            Err(ExprError::UnknownFunction { offset: 0, .. })
        ));
        assert!(matches!(parse_expr("(t + 1"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("t +"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expr("t $ 2"), Err(ExprError::Syntax { offset: 2, .. })));
    }

    #[test]
    fn precedence_and_associativity() {
        let p = Params::new();
        let ev = |s: &str| parse_expr(s).unwrap().eval(2.0, &p).unwrap();
        assert_eq!(ev("-t^2"), -4.0);
        assert_eq!(ev("2^3^2"), 512.0);
        assert_eq!(ev("2^-1"), 0.5);
        assert_eq!(ev("1 - 2 - 3"), -4.0);
        assert_eq!(ev("8 / 2 / 2"), 2.0);
        assert_eq!(ev("1 + 2*3"), 7.0);
        assert_eq!(ev("-t*3"), -6.0);
        assert_eq!(ev("1.5e1 + .5"), 15.5);
    }

    #[test]
    fn unbound_parameter_is_an_evaluation_error() {
        let e = parse_expr("n^2").unwrap();
        assert_eq!(
            e.eval(0.0, &Params::new()),
            Err(ExprError::UnboundParameter("n".into()))
        );
    }

    #[test]
    fn domain_errors() {
        let p = Params::new();
        for src in ["sqrt(t)", "ln(t)", "1/t", "t^-1", "t^0.5"] {
            let e = parse_expr(src).unwrap();
            assert!(matches!(e.eval(0.0, &p), Err(ExprError::Domain(_))), "{src}");
            assert!(matches!(e.eval_jet(0.0, &p), Err(ExprError::Domain(_))), "{src}");
        }
        let e = parse_expr("(-t)^1.5").unwrap();
        assert!(e.eval(1.0, &p).is_err());
        assert_eq!(parse_expr("exp(t)").unwrap().eval(1e6, &p), Err(ExprError::NonFinite));
    }

    #[test]
    fn jets_of_simple_functions() {
        assert_eq!(jet("sin(t)", 0.0, &[]), Jet2::new(0.0, 1.0, 0.0));
        assert_eq!(jet("t^2 - 4", 3.0, &[]), Jet2::new(5.0, 6.0, 2.0));
        assert_eq!(jet("1 - t^2", 0.0, &[]), Jet2::new(1.0, 0.0, -2.0));
        assert_eq!(jet("t^1", 0.0, &[]), Jet2::new(0.0, 1.0, 0.0));
        assert_eq!(jet("t^0", 0.0, &[]), Jet2::new(1.0, 0.0, 0.0));
        assert_eq!(jet("(-t)^3", 2.0, &[]), Jet2::new(-8.0, -12.0, -12.0));
    }

    #[test]
    fn abs_and_sgn_conventions() {
        assert_eq!(jet("abs(t)", -2.0, &[]), Jet2::new(2.0, -1.0, 0.0));
        assert_eq!(jet("abs(t)", 0.0, &[]), Jet2::new(0.0, 0.0, 0.0));
        assert_eq!(jet("sgn(t)", 0.0, &[]), Jet2::new(0.0, 0.0, 0.0));
        assert_eq!(jet("sgn(t)", -0.1, &[]), Jet2::new(-1.0, 0.0, 0.0));
    }

    #[test]
    fn damping_derivative_matches_central_difference() {
        let e = parse_expr("2 + 2*sin(w0*t)").unwrap();
        let p = Params::from([("w0".to_string(), 1.0)]);
        let (t, h) = (0.7, 1e-5);
        let fd = (e.eval(t + h, &p).unwrap() - e.eval(t - h, &p).unwrap()) / (2.0 * h);
        assert!((e.eval_jet(t, &p).unwrap().d1 - fd).abs() <= 1e-8);
    }

    #[test]
    fn printing_negative_literals_reparses() {
        let e = Expr::binary(BinOp::Pow, Expr::Num(-2.0), Expr::Num(2.0));
        let back = parse_expr(&e.to_string()).unwrap();
        assert_eq!(back.eval(0.0, &Params::new()).unwrap(), 4.0);
        let e = Expr::binary(BinOp::Mul, Expr::Var, Expr::Num(-0.25));
        assert_eq!(e.to_string(), "t * -0.25");
        assert_eq!(
            parse_expr(&e.to_string()).unwrap().eval(2.0, &Params::new()).unwrap(),
            -0.5
        );
    }

    #[test]
    fn substitution_and_binding() {
        let e = parse_expr("a*t + b").unwrap();
        let subs = BTreeMap::from([("b".to_string(), parse_expr("-a").unwrap())]);
        let s = e.substitute(&subs);
        assert_eq!(s.free_params(), BTreeSet::from(["a".to_string()]));
        let p = Params::from([("a".to_string(), 2.0)]);
        assert_eq!(s.eval(3.0, &p).unwrap(), 4.0);
        assert_eq!(s.bind(&p).free_params().len(), 0);
    }

    fn fd_check(src: &str, t: f64) {
        let e = parse_expr(src).unwrap();
        let p = Params::new();
        let f = |x: f64| e.eval(x, &p).unwrap();
        let j = e.eval_jet(t, &p).unwrap();
        let (h1, h2) = (1e-5, 1e-4);
        let fd1 = (f(t + h1) - f(t - h1)) / (2.0 * h1);
        let fd2 = (f(t + h2) - 2.0 * f(t) + f(t - h2)) / (h2 * h2);
        assert_eq!(j.v, f(t));
        assert!(
            (j.d1 - fd1).abs() <= 1e-6 * (1.0 + j.d1.abs()),
            "{src} d1 {} vs {fd1} at {t}",
            j.d1
        );
        assert!(
            (j.d2 - fd2).abs() <= 1e-4 * (1.0 + j.d2.abs()),
            "{src} d2 {} vs {fd2} at {t}",
            j.d2
        );
    }

    #[test]
    fn time_derivative_agrees_with_jets() {
        let p = Params::from([("n".to_string(), 1.5)]);
        for src in [
            "(t - 6)*(t - 7)",
            "1 - t^2",
            "t*(1 - t)",
            "sqrt(1 - t^2)",
            "t^(2*n)",
            "t^t",
            "exp(0.3*t)/(1 + exp(0.3*t))^2",
            "tan(t) + tanh(t) - ln(t) + abs(t - 0.2) + sgn(t)",
            "sin(t)^2 * cosh(t) - sinh(t)/t",
        ] {
            let e = parse_expr(src).unwrap();
            let d = e.time_derivative();
            for &t in &[0.35, 0.61, 0.9] {
                let a = e.eval_jet(t, &p).unwrap().d1;
                let b = d.eval(t, &p).unwrap();
                assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{src} at {t}: {a} vs {b}");
            }
        }
    }

    proptest! {
        #[test]
        fn builtins_match_finite_differences(t in 0.15f64..1.3, which in 0usize..11) {
            let src = match which {
                0 => "sin(1.3*t)",
                1 => "cos(2*t + 0.1)",
                2 => "tan(t/2)",
                3 => "sinh(t)",
                4 => "cosh(0.7*t)",
                5 => "tanh(2*t - 1)",
                6 => "exp(-t)",
                7 => "ln(t + 0.5)",
                8 => "sqrt(t + 0.2)",
                9 => "abs(t - 0.1)*t",
                _ => "sgn(t) * t^2",
            };
            fd_check(src, t);
        }

        #[test]
        fn quotients_and_powers_match_finite_differences(t in 0.2f64..2.0) {
            fd_check("(t^2 + 1)/(t + 3)", t);
            fd_check("t^2.5 - t^-2", t);
            fd_check("t^sin(t)", t);
        }

        #[test]
        fn sum_and_product_rules(t in -2.0f64..2.0) {
            let p = Params::new();
            let e1 = parse_expr("sin(t) + t^3").unwrap();
            let e2 = parse_expr("exp(t/3)").unwrap();
            let j1 = e1.eval_jet(t, &p).unwrap();
            let j2 = e2.eval_jet(t, &p).unwrap();
            let sum = Expr::binary(BinOp::Add, e1.clone(), e2.clone()).eval_jet(t, &p).unwrap();
            prop_assert_eq!(sum, j1 + j2);
            let prod = Expr::binary(BinOp::Mul, e1, e2).eval_jet(t, &p).unwrap();
            let expect = j1 * j2;
            for (a, b) in [(prod.v, expect.v), (prod.d1, expect.d1), (prod.d2, expect.d2)] {
                prop_assert!((a - b).abs() <= 1e-15 * a.abs().max(b.abs()));
            }
        }

        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let printed = e.to_string();
            let back = parse_expr(&printed).unwrap();
            let p = Params::from([("k".to_string(), 0.75)]);
            for i in 0..100 {
                let t = -2.0 + 4.0 * i as f64 / 99.0;
                match (e.eval(t, &p), back.eval(t, &p)) {
                    (Ok(a), Ok(b)) => prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "{printed}: {a} vs {b}"),
                    (Err(_), Err(_)) => {}
                    (a, b) => prop_assert!(false, "{printed}: {a:?} vs {b:?}"),
                }
            }
        }
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (-5.0f64..5.0).prop_map(Expr::Num),
            Just(Expr::Var),
            Just(Expr::param("k")),
        ];
        leaf.prop_recursive(4, 32, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (0usize..11, inner.clone()).prop_map(|(i, e)| Expr::call(Func::ALL[i], e)),
                (0usize..5, inner.clone(), inner).prop_map(|(i, l, r)| {
                    let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow][i];
                    Expr::binary(op, l, r)
                }),
            ]
        })
    }
}
