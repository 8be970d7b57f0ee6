//! A tiny total expression language for `f` and `g`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     = product (('+' | '-') product)*
//! product = unary (('*' | '/') unary)*
//! unary   = '-' unary | power
//! power   = atom ('^' integer)*
//! atom    = number | 'x'k | name '(' args ')' | '(' sum ')'
//! ```
//!
//! Functions: `abs(a)`, `min(a, ...)`, `max(a, ...)`, `norm1(...)`, `norm2sq(...)`.
//! With no arguments, `norm1()` and `norm2sq()` act on the whole point.

use std::fmt;

use thiserror::Error;
use wos_core::nn::calculus::{affine, augment_to, compose, linear_combine, scale_output, stack};
use wos_core::nn::ReluNet;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Coordinate `x_{k+1}` (stored 0-based).
    Var(usize),
    Neg(Box<Expr>),
    Abs(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Min(Vec<Expr>),
    Max(Vec<Expr>),
    Norm1(Vec<Expr>),
    Norm2Sq(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier '{name}' at byte {pos}")]
    UnknownIdent { pos: usize, name: String },
    #[error("arity mismatch at byte {pos}: {name} {msg}")]
    Arity { pos: usize, name: String, msg: String },
}

pub fn parse_expr(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn syntax(&self, msg: &str) -> ExprError {
        ExprError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.product()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat(b'-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let mut base = self.atom()?;
        while self.eat(b'^') {
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.syntax("exponent must be a non-negative integer literal"));
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let k: u32 = text.parse().map_err(|_| ExprError::Syntax { pos: start, msg: "exponent too large".into() })?;
            base = Expr::Pow(Box::new(base), k);
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let s = self.src;
        let digits = |p: &mut usize| {
            let b = *p;
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
            *p > b
        };
        let mut p = self.pos;
        let mut any = digits(&mut p);
        if p < s.len() && s[p] == b'.' {
            p += 1;
            any |= digits(&mut p);
        }
        if !any {
            return Err(self.syntax("malformed number"));
        }
        if p < s.len() && (s[p] == b'e' || s[p] == b'E') {
            let mut q = p + 1;
            if q < s.len() && (s[q] == b'+' || s[q] == b'-') {
                q += 1;
            }
            if digits(&mut q) {
                p = q;
            }
        }
        self.pos = p;
        let text = std::str::from_utf8(&s[start..p]).unwrap();
        let v: f64 = text.parse().map_err(|_| ExprError::Syntax { pos: start, msg: "malformed number".into() })?;
        Ok(Expr::Num(v))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                if let Some(k) = name.strip_prefix('x').and_then(|t| t.parse::<usize>().ok()) {
                    if k == 0 || name[1..].starts_with('0') {
                        return Err(ExprError::UnknownIdent { pos: start, name });
                    }
                    return Ok(Expr::Var(k - 1));
                }
                if !matches!(name.as_str(), "abs" | "min" | "max" | "norm1" | "norm2sq") {
                    return Err(ExprError::UnknownIdent { pos: start, name });
                }
                if !self.eat(b'(') {
                    return Err(self.syntax("expected '(' after function name"));
                }
                let mut args = Vec::new();
                if !self.eat(b')') {
                    loop {
                        args.push(self.sum()?);
                        if self.eat(b')') {
                            break;
                        }
                        if !self.eat(b',') {
                            return Err(self.syntax("expected ',' or ')'"));
                        }
                    }
                }
                let arity = |msg: &str| ExprError::Arity { pos: start, name: name.clone(), msg: msg.to_string() };
                match name.as_str() {
                    "abs" if args.len() == 1 => Ok(Expr::Abs(Box::new(args.pop().unwrap()))),
                    "abs" => Err(arity(&format!("takes 1 argument, got {}", args.len()))),
                    "min" | "max" if args.is_empty() => Err(arity("needs at least 1 argument")),
                    "min" => Ok(Expr::Min(args)),
                    "max" => Ok(Expr::Max(args)),
                    "norm1" => Ok(Expr::Norm1(args)),
                    _ => Ok(Expr::Norm2Sq(args)),
                }
            }
            Some(_) => Err(self.syntax("unexpected character")),
        }
    }
}

// binding strength used by the printer
const P_SUM: u8 = 1;
const P_PROD: u8 = 2;
const P_UNARY: u8 = 3;
const P_POW: u8 = 4;
const P_ATOM: u8 = 5;

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => P_SUM,
            Expr::Mul(..) | Expr::Div(..) => P_PROD,
            Expr::Neg(_) => P_UNARY,
            Expr::Pow(..) => P_POW,
            _ => P_ATOM,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        let list = |f: &mut fmt::Formatter<'_>, name: &str, args: &[Expr]| -> fmt::Result {
            write!(f, "{name}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                a.write_at(f, 0)?;
            }
            write!(f, ")")
        };
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.write_at(f, P_UNARY)
            }
            Expr::Abs(a) => list(f, "abs", std::slice::from_ref(a)),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let (op, p) = match self {
                    Expr::Add(..) => (" + ", P_SUM),
                    Expr::Sub(..) => (" - ", P_SUM),
                    Expr::Mul(..) => (" * ", P_PROD),
                    _ => (" / ", P_PROD),
                };
                a.write_at(f, p)?;
                write!(f, "{op}")?;
                b.write_at(f, p + 1)
            }
            Expr::Pow(a, k) => {
                a.write_at(f, P_POW)?;
                write!(f, "^{k}")
            }
            Expr::Min(v) => list(f, "min", v),
            Expr::Max(v) => list(f, "max", v),
            Expr::Norm1(v) => list(f, "norm1", v),
            Expr::Norm2Sq(v) => list(f, "norm2sq", v),
        }
    }

    /// Number of coordinates referenced (`k` for the largest `x_k`).
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Abs(a) | Expr::Pow(a, _) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.max_var().max(b.max_var()),
            Expr::Min(v) | Expr::Max(v) | Expr::Norm1(v) | Expr::Norm2Sq(v) => v.iter().map(Expr::max_var).max().unwrap_or(0),
        }
    }

    /// True when the expression reads the whole point (`norm1()` or `norm2sq()`).
    pub fn uses_whole_point(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Var(_) => false,
            Expr::Neg(a) | Expr::Abs(a) | Expr::Pow(a, _) => a.uses_whole_point(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.uses_whole_point() || b.uses_whole_point(),
            Expr::Norm1(v) | Expr::Norm2Sq(v) if v.is_empty() => true,
            Expr::Min(v) | Expr::Max(v) | Expr::Norm1(v) | Expr::Norm2Sq(v) => v.iter().any(Expr::uses_whole_point),
        }
    }

    /// Value at `x`. Coordinates beyond `x.len()` must not be referenced.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval(x),
            Expr::Abs(a) => a.eval(x).abs(),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, k) => a.eval(x).powi(*k as i32),
            Expr::Min(v) => v.iter().map(|e| e.eval(x)).fold(f64::INFINITY, f64::min),
            Expr::Max(v) => v.iter().map(|e| e.eval(x)).fold(f64::NEG_INFINITY, f64::max),
            Expr::Norm1(v) if v.is_empty() => x.iter().map(|t| t.abs()).sum(),
            Expr::Norm2Sq(v) if v.is_empty() => x.iter().map(|t| t * t).sum(),
            Expr::Norm1(v) => v.iter().map(|e| e.eval(x).abs()).sum(),
            Expr::Norm2Sq(v) => v.iter().map(|e| e.eval(x).powi(2)).sum(),
        }
    }

    /// The value if the expression does not depend on `x`.
    pub fn constant_value(&self) -> Option<f64> {
        if self.max_var() == 0 && !self.uses_whole_point() {
            Some(self.eval(&[]))
        } else {
            None
        }
    }

    /// An exact ReLU network for piecewise-linear expressions: sums, scaling
    /// by constants, `abs`, `min`, `max`, `norm1`. Fails on genuine products
    /// and powers.
    pub fn to_relu_net(&self, d: usize) -> Result<ReluNet, String> {
        if self.max_var() > d {
            return Err(format!("expression uses x{} but the dimension is {d}", self.max_var()));
        }
        let e = |r: wos_core::Result<ReluNet>| r.map_err(|e| e.to_string());
        if let Some(c) = self.constant_value() {
            return e(affine(&[vec![0.0; d]], vec![c]));
        }
        match self {
            Expr::Var(i) => {
                let mut w = vec![0.0; d];
                w[*i] = 1.0;
                e(affine(&[w], vec![0.0]))
            }
            Expr::Neg(a) => Ok(scale_output(&a.to_relu_net(d)?, -1.0)),
            Expr::Add(a, b) => sum_nets(&[a.to_relu_net(d)?, b.to_relu_net(d)?], &[1.0, 1.0]),
            Expr::Sub(a, b) => sum_nets(&[a.to_relu_net(d)?, b.to_relu_net(d)?], &[1.0, -1.0]),
            Expr::Mul(a, b) => match (a.constant_value(), b.constant_value()) {
                (Some(c), _) => Ok(scale_output(&b.to_relu_net(d)?, c)),
                (_, Some(c)) => Ok(scale_output(&a.to_relu_net(d)?, c)),
                _ => Err("product of two non-constant terms is not piecewise linear".into()),
            },
            Expr::Div(a, b) => match b.constant_value() {
                Some(c) => Ok(scale_output(&a.to_relu_net(d)?, 1.0 / c)),
                None => Err("division by a non-constant term is not piecewise linear".into()),
            },
            Expr::Pow(a, 1) => a.to_relu_net(d),
            Expr::Pow(..) => Err("powers are not piecewise linear".into()),
            Expr::Abs(a) => abs_net(&a.to_relu_net(d)?),
            Expr::Max(v) => fold_max(v, d, 1.0),
            // min(a, b) = −max(−a, −b)
            Expr::Min(v) => Ok(scale_output(&fold_max(v, d, -1.0)?, -1.0)),
            Expr::Norm1(v) => {
                let parts = if v.is_empty() {
                    (0..d).map(|i| abs_net(&Expr::Var(i).to_relu_net(d)?)).collect::<Result<Vec<_>, _>>()?
                } else {
                    v.iter().map(|t| abs_net(&t.to_relu_net(d)?)).collect::<Result<Vec<_>, _>>()?
                };
                let ones = vec![1.0; parts.len()];
                sum_nets(&parts, &ones)
            }
            Expr::Norm2Sq(_) => Err("norm2sq is not piecewise linear".into()),
            Expr::Num(_) => unreachable!("constants handled above"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

fn sum_nets(nets: &[ReluNet], coeffs: &[f64]) -> Result<ReluNet, String> {
    let depth = nets.iter().map(ReluNet::depth).max().unwrap_or(1);
    let aligned = nets.iter().map(|n| augment_to(n, depth)).collect::<wos_core::Result<Vec<_>>>().map_err(|e| e.to_string())?;
    linear_combine(&aligned, coeffs).map_err(|e| e.to_string())
}

/// `|t| = ρ(t) + ρ(−t)`.
fn abs_net(inner: &ReluNet) -> Result<ReluNet, String> {
    let outer = two_layer(&[vec![1.0], vec![-1.0]], &[1.0, 1.0], 0.0)?;
    compose(&outer, inner).map_err(|e| e.to_string())
}

/// `max(a, b) = a + ρ(b − a)`, with `a = ρ(a) − ρ(−a)` carried through the hidden layer.
fn max2_net(inner: &ReluNet) -> Result<ReluNet, String> {
    let outer = two_layer(&[vec![1.0, 0.0], vec![-1.0, 0.0], vec![-1.0, 1.0]], &[1.0, -1.0, 1.0], 0.0)?;
    compose(&outer, inner).map_err(|e| e.to_string())
}

fn fold_max(v: &[Expr], d: usize, sign: f64) -> Result<ReluNet, String> {
    let mut acc = scale_output(&v[0].to_relu_net(d)?, sign);
    for t in &v[1..] {
        let next = scale_output(&t.to_relu_net(d)?, sign);
        let depth = acc.depth().max(next.depth());
        let pair = stack(&[augment_to(&acc, depth).map_err(|e| e.to_string())?, augment_to(&next, depth).map_err(|e| e.to_string())?])
            .map_err(|e| e.to_string())?;
        acc = max2_net(&pair)?;
    }
    Ok(acc)
}

fn two_layer(w1: &[Vec<f64>], w2: &[f64], b2: f64) -> Result<ReluNet, String> {
    use wos_core::nn::Layer;
    let l1 = Layer::from_dense(w1, vec![0.0; w1.len()]).map_err(|e| e.to_string())?;
    let l2 = Layer::from_dense(&[w2.to_vec()], vec![b2]).map_err(|e| e.to_string())?;
    ReluNet::new(vec![l1, l2]).map_err(|e| e.to_string())
}
