//! The eta-quotient expression language.
//!
//! Formulas are written the way the source lemmas read, e.g.
//! `f2^3*f9^2*f36/(f1^2*f4*f18^3)` or
//! `sum(k, -2, 2, k != -1, (-1)^k * q^((3*k^2+k)/2) * theta(-1, (75+(6*k+1)*5)/2, -1, (75-(6*k+1)*5)/2))`.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr     := ['-'] term (('+' | '-') term)*
//! term     := factor (('*' | '/') factor)*
//! factor   := base ['^' exponent]
//! exponent := INT | '-' INT | VAR | '(' intexpr ')'
//! base     := INT | 'q' ['^' exponent] | 'f' INT | 'phi' | 'psi'
//!           | 'theta' '(' intexpr ',' intexpr ',' intexpr ',' intexpr ')'
//!           | 'Bk' '(' intexpr ',' intexpr ')'
//!           | 'gf' '(' family-name (',' intexpr)* ')'
//!           | 'dissect' '(' expr ',' intexpr ',' intexpr ')'
//!           | 'subs' '(' expr ',' intexpr ')'
//!           | 'sum' '(' VAR ',' intexpr ',' intexpr [',' VAR '!=' intexpr] ',' expr ')'
//!           | '(' expr ')'
//! intexpr  := ['-'] intterm (('+' | '-') intterm)*
//! intterm  := intfactor (('*' | '/') intfactor)*
//! intfactor:= intatom ['^' intatom]
//! intatom  := INT | VAR | '(' intexpr ')'
//! ```
//!
//! Integer division inside `intexpr` must be exact; exponents and other
//! integer positions may reference the variable of an enclosing `sum`.
//! `Bk(p, k)` denotes the integral doubled form of the weighted theta
//! series from the p-dissection of `f_1^3` (see
//! [`crate::special::b_k_doubled`]); claims that use it are stated with a
//! doubled left-hand side so every intermediate stays in the integer ring.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::families::{family_gf, FamilyError, FamilySpec};
use crate::ring::CoefficientRing;
use crate::series::{SeriesError, TruncatedSeries};
use crate::special::{b_k_doubled, euler_f, phi, psi, theta_f, SpecialError, ThetaMonomialPair};

/// Bound variables of enclosing `sum` constructs during evaluation.
pub type Env = BTreeMap<String, i64>;

/// Hard cap on the span of a `sum` construct.
const MAX_SUM_SPAN: i64 = 10_000;

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

/// Integer-valued expression appearing in exponents and function arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntExpr {
    Lit(i64),
    Var(String),
    Add(Box<IntExpr>, Box<IntExpr>),
    Sub(Box<IntExpr>, Box<IntExpr>),
    Mul(Box<IntExpr>, Box<IntExpr>),
    /// Exact division; a remainder is an evaluation error.
    Div(Box<IntExpr>, Box<IntExpr>),
    Pow(Box<IntExpr>, Box<IntExpr>),
    Neg(Box<IntExpr>),
}

impl IntExpr {
    fn neg(e: IntExpr) -> Self {
        match e {
            IntExpr::Lit(v) => IntExpr::Lit(-v),
            other => IntExpr::Neg(Box::new(other)),
        }
    }

    pub fn eval(&self, env: &Env) -> Result<i64, EvalError> {
        match self {
            IntExpr::Lit(v) => Ok(*v),
            IntExpr::Var(name) => env
                .get(name)
                .copied()
                .ok_or_else(|| EvalError::UnboundVariable(name.clone())),
            IntExpr::Add(a, b) => a
                .eval(env)?
                .checked_add(b.eval(env)?)
                .ok_or(EvalError::IntegerOverflow),
            IntExpr::Sub(a, b) => a
                .eval(env)?
                .checked_sub(b.eval(env)?)
                .ok_or(EvalError::IntegerOverflow),
            IntExpr::Mul(a, b) => a
                .eval(env)?
                .checked_mul(b.eval(env)?)
                .ok_or(EvalError::IntegerOverflow),
            IntExpr::Div(a, b) => {
                let num = a.eval(env)?;
                let den = b.eval(env)?;
                if den == 0 {
                    return Err(EvalError::DivisionByZero);
                }
                if num % den != 0 {
                    return Err(EvalError::InexactDivision { num, den });
                }
                Ok(num / den)
            }
            IntExpr::Pow(a, b) => {
                let base = a.eval(env)?;
                let exp = b.eval(env)?;
                if exp < 0 {
                    return Err(EvalError::NegativeIntegerPower(exp));
                }
                let exp = u32::try_from(exp).map_err(|_| EvalError::IntegerOverflow)?;
                base.checked_pow(exp).ok_or(EvalError::IntegerOverflow)
            }
            IntExpr::Neg(a) => a.eval(env)?.checked_neg().ok_or(EvalError::IntegerOverflow),
        }
    }
}

/// Parsed form of a series-valued formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EtaExpression {
    Add(Box<EtaExpression>, Box<EtaExpression>),
    Sub(Box<EtaExpression>, Box<EtaExpression>),
    Mul(Box<EtaExpression>, Box<EtaExpression>),
    Div(Box<EtaExpression>, Box<EtaExpression>),
    Neg(Box<EtaExpression>),
    Pow(Box<EtaExpression>, IntExpr),
    /// Nonnegative integer literal; negatives appear as `Neg(Scalar(_))`.
    Scalar(u64),
    /// `q^e`.
    QPower(IntExpr),
    /// Euler product atom `f<k>`.
    Eta(u64),
    Phi,
    Psi,
    Theta {
        a_sign: IntExpr,
        a_exp: IntExpr,
        b_sign: IntExpr,
        b_exp: IntExpr,
    },
    /// Doubled weighted theta series `2 B_k(q)` for the prime `p`.
    BkDoubled { p: IntExpr, k: IntExpr },
    /// Family generating-function atom `gf(name, params...)`.
    Family { name: String, args: Vec<IntExpr> },
    /// `dissect(e, m, r)`: coefficient of `q^{m n + r}` becomes coefficient of `q^n`.
    Dissect {
        inner: Box<EtaExpression>,
        m: IntExpr,
        r: IntExpr,
    },
    /// `subs(e, k)`: substitute `q -> q^k`.
    Subst { inner: Box<EtaExpression>, k: IntExpr },
    /// Bounded sum with an optional excluded index.
    SumOver {
        var: String,
        lo: IntExpr,
        hi: IntExpr,
        exclude: Option<IntExpr>,
        body: Box<EtaExpression>,
    },
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}:{}: {}", self.line, self.col, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalError {
    Series(SeriesError),
    Special(SpecialError),
    Family(FamilyError),
    UnboundVariable(String),
    IntegerOverflow,
    DivisionByZero,
    InexactDivision { num: i64, den: i64 },
    NegativeIntegerPower(i64),
    NegativeQPower(i64),
    InvalidDissection { m: i64, r: i64 },
    InvalidSubstitution(i64),
    UnknownFamily(String),
    FamilyArity { name: String, expected: usize, got: usize },
    InvalidFamilyParam { name: String, value: i64 },
    SumSpanTooLarge { lo: i64, hi: i64 },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Series(e) => write!(f, "{}", e),
            EvalError::Special(e) => write!(f, "{}", e),
            EvalError::Family(e) => write!(f, "{}", e),
            EvalError::UnboundVariable(v) => write!(f, "unbound variable '{}'", v),
            EvalError::IntegerOverflow => write!(f, "integer overflow in exponent arithmetic"),
            EvalError::DivisionByZero => write!(f, "division by zero in exponent arithmetic"),
            EvalError::InexactDivision { num, den } => {
                write!(f, "inexact integer division {}/{}", num, den)
            }
            EvalError::NegativeIntegerPower(e) => write!(f, "negative integer power {}", e),
            EvalError::NegativeQPower(e) => write!(f, "negative q-power {}", e),
            EvalError::InvalidDissection { m, r } => {
                write!(f, "invalid dissection (m={}, r={}): need 0 <= r < m", m, r)
            }
            EvalError::InvalidSubstitution(k) => write!(f, "subs power must be >= 1, got {}", k),
            EvalError::UnknownFamily(name) => write!(f, "unknown family '{}'", name),
            EvalError::FamilyArity { name, expected, got } => {
                write!(f, "family '{}' takes {} parameter(s), got {}", name, expected, got)
            }
            EvalError::InvalidFamilyParam { name, value } => {
                write!(f, "family parameter {} = {} out of range", name, value)
            }
            EvalError::SumSpanTooLarge { lo, hi } => {
                write!(f, "sum range {}..{} too large", lo, hi)
            }
        }
    }
}

impl From<SeriesError> for EvalError {
    fn from(e: SeriesError) -> Self {
        EvalError::Series(e)
    }
}

impl From<SpecialError> for EvalError {
    fn from(e: SpecialError) -> Self {
        EvalError::Special(e)
    }
}

impl From<FamilyError> for EvalError {
    fn from(e: FamilyError) -> Self {
        EvalError::Family(e)
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

impl EtaExpression {
    /// Expand to `order` coefficients in `ring`.
    pub fn expand(&self, order: usize, ring: CoefficientRing) -> Result<TruncatedSeries, EvalError> {
        let mut env = Env::new();
        self.expand_in(order, ring, &mut env)
    }

    /// Expand with an environment binding `sum` variables.
    pub fn expand_in(
        &self,
        order: usize,
        ring: CoefficientRing,
        env: &mut Env,
    ) -> Result<TruncatedSeries, EvalError> {
        match self {
            EtaExpression::Add(a, b) => {
                let sa = a.expand_in(order, ring, env)?;
                let sb = b.expand_in(order, ring, env)?;
                Ok(sa.add(&sb)?)
            }
            EtaExpression::Sub(a, b) => {
                let sa = a.expand_in(order, ring, env)?;
                let sb = b.expand_in(order, ring, env)?;
                Ok(sa.sub(&sb)?)
            }
            EtaExpression::Mul(a, b) => {
                let sa = a.expand_in(order, ring, env)?;
                apply_factor(sa, b, order, ring, env, false)
            }
            EtaExpression::Div(a, b) => {
                let sa = a.expand_in(order, ring, env)?;
                apply_factor(sa, b, order, ring, env, true)
            }
            EtaExpression::Neg(a) => Ok(a.expand_in(order, ring, env)?.negate()),
            EtaExpression::Pow(base, e) => {
                let e = e.eval(env)?;
                if let EtaExpression::Eta(k) = **base {
                    return Ok(eta_power(ring, order, k, e));
                }
                let sb = base.expand_in(order, ring, env)?;
                Ok(sb.pow(e)?)
            }
            EtaExpression::Scalar(c) => Ok(TruncatedSeries::constant(
                ring,
                i64::try_from(*c).map_err(|_| EvalError::IntegerOverflow)?,
                order,
            )),
            EtaExpression::QPower(e) => {
                let e = e.eval(env)?;
                if e < 0 {
                    return Err(EvalError::NegativeQPower(e));
                }
                let mut coeffs = alloc::vec![0i64; order];
                if (e as u128) < order as u128 {
                    coeffs[e as usize] = 1;
                }
                Ok(TruncatedSeries::from_integers(ring, &coeffs)?)
            }
            EtaExpression::Eta(k) => Ok(euler_f(*k, order, ring)?),
            EtaExpression::Phi => Ok(phi(order, ring)?),
            EtaExpression::Psi => Ok(psi(order, ring)?),
            EtaExpression::Theta { a_sign, a_exp, b_sign, b_exp } => {
                let pair = ThetaMonomialPair::new(
                    a_sign.eval(env)?,
                    a_exp.eval(env)?,
                    b_sign.eval(env)?,
                    b_exp.eval(env)?,
                )?;
                Ok(theta_f(pair, order, ring)?)
            }
            EtaExpression::BkDoubled { p, k } => {
                let p = p.eval(env)?;
                let k = k.eval(env)?;
                let p = u64::try_from(p).map_err(|_| EvalError::IntegerOverflow)?;
                Ok(b_k_doubled(p, k, order, ring)?)
            }
            EtaExpression::Family { name, args } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(a.eval(env)?);
                }
                let spec = resolve_family(name, &vals)?;
                Ok(family_gf(spec, order, ring)?)
            }
            EtaExpression::Dissect { inner, m, r } => {
                let m = m.eval(env)?;
                let r = r.eval(env)?;
                if m < 1 || r < 0 || r >= m {
                    return Err(EvalError::InvalidDissection { m, r });
                }
                let (m, r) = (m as usize, r as usize);
                let inner_order = m
                    .checked_mul(order - 1)
                    .and_then(|v| v.checked_add(r + 1))
                    .ok_or(EvalError::IntegerOverflow)?;
                let s = inner.expand_in(inner_order, ring, env)?;
                Ok(s.extract_dissection(m as u64, r as u64)?.truncate(order))
            }
            EtaExpression::Subst { inner, k } => {
                let k = k.eval(env)?;
                if k < 1 {
                    return Err(EvalError::InvalidSubstitution(k));
                }
                let k = k as usize;
                let inner_order = order.div_ceil(k);
                let s = inner.expand_in(inner_order, ring, env)?;
                Ok(s.substitute_power(k as u64)?.truncate(order))
            }
            EtaExpression::SumOver { var, lo, hi, exclude, body } => {
                let lo = lo.eval(env)?;
                let hi = hi.eval(env)?;
                let excl = exclude.as_ref().map(|e| e.eval(env)).transpose()?;
                if hi.saturating_sub(lo) > MAX_SUM_SPAN {
                    return Err(EvalError::SumSpanTooLarge { lo, hi });
                }
                let mut acc = TruncatedSeries::zero(ring, order);
                let shadowed = env.get(var).copied();
                for v in lo..=hi {
                    if excl == Some(v) {
                        continue;
                    }
                    env.insert(var.clone(), v);
                    let t = body.expand_in(order, ring, env)?;
                    acc = acc.add(&t)?;
                }
                match shadowed {
                    Some(old) => {
                        env.insert(var.clone(), old);
                    }
                    None => {
                        env.remove(var);
                    }
                }
                Ok(acc)
            }
        }
    }
}

/// `f_k^e` as pentagonal passes over a constant-one series.
fn eta_power(ring: CoefficientRing, order: usize, k: u64, e: i64) -> TruncatedSeries {
    let mut acc = TruncatedSeries::one(ring, order);
    if e >= 0 {
        for _ in 0..e {
            acc = acc.mul_euler_factor(k);
        }
    } else {
        for _ in 0..(-e) {
            acc = acc.div_euler_factor(k);
        }
    }
    acc
}

/// Multiply (or divide, when `invert`) `acc` by the factor expression,
/// using single-pass forms for Euler atoms, scalars and q-powers.
fn apply_factor(
    acc: TruncatedSeries,
    factor: &EtaExpression,
    order: usize,
    ring: CoefficientRing,
    env: &mut Env,
    invert: bool,
) -> Result<TruncatedSeries, EvalError> {
    match factor {
        EtaExpression::Eta(k) => Ok(if invert {
            acc.div_euler_factor(*k)
        } else {
            acc.mul_euler_factor(*k)
        }),
        EtaExpression::Pow(base, e) => {
            if let EtaExpression::Eta(k) = **base {
                let mut e = e.eval(env)?;
                if invert {
                    e = -e;
                }
                let mut out = acc;
                if e >= 0 {
                    for _ in 0..e {
                        out = out.mul_euler_factor(k);
                    }
                } else {
                    for _ in 0..(-e) {
                        out = out.div_euler_factor(k);
                    }
                }
                return Ok(out);
            }
            let s = factor.expand_in(order, ring, env)?;
            combine(acc, s, invert)
        }
        EtaExpression::QPower(e) if !invert => {
            let e = e.eval(env)?;
            if e < 0 {
                return Err(EvalError::NegativeQPower(e));
            }
            if (e as u128) >= order as u128 {
                return Ok(TruncatedSeries::zero(ring, order));
            }
            Ok(acc.mul_qpower(e as usize).truncate(order))
        }
        EtaExpression::Scalar(c) if !invert => {
            let c = i64::try_from(*c).map_err(|_| EvalError::IntegerOverflow)?;
            Ok(acc.scalar_mul(c))
        }
        _ => {
            let s = factor.expand_in(order, ring, env)?;
            combine(acc, s, invert)
        }
    }
}

fn combine(
    acc: TruncatedSeries,
    factor: TruncatedSeries,
    invert: bool,
) -> Result<TruncatedSeries, EvalError> {
    if invert {
        Ok(acc.mul(&factor.invert()?)?)
    } else {
        Ok(acc.mul(&factor)?)
    }
}

fn resolve_family(name: &str, args: &[i64]) -> Result<FamilySpec, EvalError> {
    let arity_err = |expected: usize| EvalError::FamilyArity {
        name: name.to_string(),
        expected,
        got: args.len(),
    };
    let param = |label: &str, v: i64| -> Result<u64, EvalError> {
        u64::try_from(v).map_err(|_| EvalError::InvalidFamilyParam {
            name: label.to_string(),
            value: v,
        })
    };
    match name {
        "overpartition" => {
            if !args.is_empty() {
                return Err(arity_err(0));
            }
            Ok(FamilySpec::Overpartition)
        }
        "tschur" => {
            if args.len() != 1 {
                return Err(arity_err(1));
            }
            Ok(FamilySpec::t_schur(param("t", args[0])?)?)
        }
        "tschur-over" => {
            if args.len() != 1 {
                return Err(arity_err(1));
            }
            Ok(FamilySpec::t_schur_over(param("t", args[0])?)?)
        }
        "tschur-over-tuple" => {
            if args.len() != 2 {
                return Err(arity_err(2));
            }
            Ok(FamilySpec::t_schur_over_tuple(
                param("t", args[0])?,
                param("r", args[1])?,
            )?)
        }
        _ => Err(EvalError::UnknownFamily(name.to_string())),
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    NotEq,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(v) => write!(f, "{}", v),
            Tok::Ident(s) => write!(f, "{}", s),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Star => write!(f, "*"),
            Tok::Slash => write!(f, "/"),
            Tok::Caret => write!(f, "^"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::Comma => write!(f, ","),
            Tok::NotEq => write!(f, "!="),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: u32,
    col: u32,
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '0'..='9' => {
                let mut v: u64 = 0;
                while let Some(&d) = chars.peek() {
                    if let Some(dv) = d.to_digit(10) {
                        v = v
                            .checked_mul(10)
                            .and_then(|v| v.checked_add(dv as u64))
                            .ok_or(ParseError {
                                line: pos.line,
                                col: pos.col,
                                message: String::from("integer literal too large"),
                            })?;
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push((Tok::Int(v), pos));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(s), pos));
            }
            '!' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    out.push((Tok::NotEq, pos));
                } else {
                    return Err(ParseError {
                        line: pos.line,
                        col: pos.col,
                        message: String::from("expected '=' after '!'"),
                    });
                }
            }
            _ => {
                let tok = match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    other => {
                        return Err(ParseError {
                            line: pos.line,
                            col: pos.col,
                            message: format!("unexpected character '{}'", other),
                        })
                    }
                };
                chars.next();
                col += 1;
                out.push((tok, pos));
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<(Tok, Pos)>,
    idx: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.idx + 1).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.idx).map(|&(_, p)| p).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let p = self.pos();
        Err(ParseError {
            line: p.line,
            col: p.col,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.next();
                Ok(())
            }
            Some(t) => {
                let t = t.clone();
                self.err(format!("expected '{}', found '{}'", tok, t))
            }
            None => self.err(format!("expected '{}', found end of input", tok)),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.next();
            true
        } else {
            false
        }
    }

    // ---- series-level grammar ----

    fn expr(&mut self) -> Result<EtaExpression, ParseError> {
        let mut acc = if self.eat(&Tok::Minus) {
            EtaExpression::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            if self.eat(&Tok::Plus) {
                let rhs = self.term()?;
                acc = EtaExpression::Add(Box::new(acc), Box::new(rhs));
            } else if self.eat(&Tok::Minus) {
                let rhs = self.term()?;
                acc = EtaExpression::Sub(Box::new(acc), Box::new(rhs));
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<EtaExpression, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(&Tok::Star) {
                let rhs = self.factor()?;
                acc = EtaExpression::Mul(Box::new(acc), Box::new(rhs));
            } else if self.eat(&Tok::Slash) {
                let rhs = self.factor()?;
                acc = EtaExpression::Div(Box::new(acc), Box::new(rhs));
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<EtaExpression, ParseError> {
        let base = self.base()?;
        if self.eat(&Tok::Caret) {
            let e = self.exponent()?;
            return Ok(EtaExpression::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    /// `INT | '-' INT | VAR | '(' intexpr ')'`
    fn exponent(&mut self) -> Result<IntExpr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.next();
                self.literal(v)
            }
            Some(Tok::Minus) => {
                self.next();
                match self.next() {
                    Some(Tok::Int(v)) => Ok(IntExpr::neg(self.literal(v)?)),
                    _ => self.err("expected integer after '-' in exponent"),
                }
            }
            Some(Tok::Ident(name)) => {
                self.next();
                Ok(IntExpr::Var(name))
            }
            Some(Tok::LParen) => {
                self.next();
                let e = self.intexpr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => self.err("expected exponent"),
        }
    }

    fn literal(&self, v: u64) -> Result<IntExpr, ParseError> {
        match i64::try_from(v) {
            Ok(v) => Ok(IntExpr::Lit(v)),
            Err(_) => {
                let p = self.pos();
                Err(ParseError {
                    line: p.line,
                    col: p.col,
                    message: String::from("integer literal too large"),
                })
            }
        }
    }

    fn base(&mut self) -> Result<EtaExpression, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.next();
                Ok(EtaExpression::Scalar(v))
            }
            Some(Tok::LParen) => {
                self.next();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.next();
                self.atom(name)
            }
            Some(t) => self.err(format!("expected a value, found '{}'", t)),
            None => self.err("expected a value, found end of input"),
        }
    }

    fn atom(&mut self, name: String) -> Result<EtaExpression, ParseError> {
        match name.as_str() {
            "q" => {
                if self.eat(&Tok::Caret) {
                    let e = self.exponent()?;
                    Ok(EtaExpression::QPower(e))
                } else {
                    Ok(EtaExpression::QPower(IntExpr::Lit(1)))
                }
            }
            "phi" => Ok(EtaExpression::Phi),
            "psi" => Ok(EtaExpression::Psi),
            "theta" => {
                self.expect(Tok::LParen)?;
                let a_sign = self.intexpr()?;
                self.expect(Tok::Comma)?;
                let a_exp = self.intexpr()?;
                self.expect(Tok::Comma)?;
                let b_sign = self.intexpr()?;
                self.expect(Tok::Comma)?;
                let b_exp = self.intexpr()?;
                self.expect(Tok::RParen)?;
                Ok(EtaExpression::Theta { a_sign, a_exp, b_sign, b_exp })
            }
            "Bk" => {
                self.expect(Tok::LParen)?;
                let p = self.intexpr()?;
                self.expect(Tok::Comma)?;
                let k = self.intexpr()?;
                self.expect(Tok::RParen)?;
                Ok(EtaExpression::BkDoubled { p, k })
            }
            "gf" => {
                self.expect(Tok::LParen)?;
                let fam = self.family_name()?;
                let mut args = Vec::new();
                while self.eat(&Tok::Comma) {
                    args.push(self.intexpr()?);
                }
                self.expect(Tok::RParen)?;
                Ok(EtaExpression::Family { name: fam, args })
            }
            "dissect" => {
                self.expect(Tok::LParen)?;
                let inner = self.expr()?;
                self.expect(Tok::Comma)?;
                let m = self.intexpr()?;
                self.expect(Tok::Comma)?;
                let r = self.intexpr()?;
                self.expect(Tok::RParen)?;
                Ok(EtaExpression::Dissect { inner: Box::new(inner), m, r })
            }
            "subs" => {
                self.expect(Tok::LParen)?;
                let inner = self.expr()?;
                self.expect(Tok::Comma)?;
                let k = self.intexpr()?;
                self.expect(Tok::RParen)?;
                Ok(EtaExpression::Subst { inner: Box::new(inner), k })
            }
            "sum" => {
                self.expect(Tok::LParen)?;
                let var = match self.next() {
                    Some(Tok::Ident(v)) => v,
                    _ => return self.err("expected summation variable"),
                };
                if is_reserved(&var) {
                    return self.err(format!("'{}' cannot be a summation variable", var));
                }
                self.expect(Tok::Comma)?;
                let lo = self.intexpr()?;
                self.expect(Tok::Comma)?;
                let hi = self.intexpr()?;
                self.expect(Tok::Comma)?;
                // optional: `var != value ,`
                let mut exclude = None;
                if self.peek() == Some(&Tok::Ident(var.clone())) && self.peek2() == Some(&Tok::NotEq)
                {
                    self.next();
                    self.next();
                    exclude = Some(self.intexpr()?);
                    self.expect(Tok::Comma)?;
                }
                let body = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(EtaExpression::SumOver {
                    var,
                    lo,
                    hi,
                    exclude,
                    body: Box::new(body),
                })
            }
            other => {
                if let Some(rest) = other.strip_prefix('f') {
                    if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                        let k: u64 = match rest.parse() {
                            Ok(k) => k,
                            Err(_) => return self.err("eta subscript too large"),
                        };
                        if k == 0 {
                            return self.err("zero subscript in eta atom 'f0'");
                        }
                        return Ok(EtaExpression::Eta(k));
                    }
                }
                self.err(format!("unknown atom '{}'", other))
            }
        }
    }

    fn family_name(&mut self) -> Result<String, ParseError> {
        let mut name = match self.next() {
            Some(Tok::Ident(s)) => s,
            _ => return self.err("expected family name"),
        };
        // family names may contain '-', e.g. tschur-over-tuple
        while self.peek() == Some(&Tok::Minus) {
            if let Some(Tok::Ident(_)) = self.peek2() {
                self.next();
                if let Some(Tok::Ident(part)) = self.next() {
                    name.push('-');
                    name.push_str(&part);
                }
            } else {
                break;
            }
        }
        Ok(name)
    }

    // ---- integer-level grammar ----

    fn intexpr(&mut self) -> Result<IntExpr, ParseError> {
        let mut acc = if self.eat(&Tok::Minus) {
            IntExpr::neg(self.intterm()?)
        } else {
            self.intterm()?
        };
        loop {
            if self.eat(&Tok::Plus) {
                let rhs = self.intterm()?;
                acc = IntExpr::Add(Box::new(acc), Box::new(rhs));
            } else if self.eat(&Tok::Minus) {
                let rhs = self.intterm()?;
                acc = IntExpr::Sub(Box::new(acc), Box::new(rhs));
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn intterm(&mut self) -> Result<IntExpr, ParseError> {
        let mut acc = self.intfactor()?;
        loop {
            if self.eat(&Tok::Star) {
                let rhs = self.intfactor()?;
                acc = IntExpr::Mul(Box::new(acc), Box::new(rhs));
            } else if self.eat(&Tok::Slash) {
                let rhs = self.intfactor()?;
                acc = IntExpr::Div(Box::new(acc), Box::new(rhs));
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn intfactor(&mut self) -> Result<IntExpr, ParseError> {
        let base = self.intatom()?;
        if self.eat(&Tok::Caret) {
            let e = self.intatom()?;
            return Ok(IntExpr::Pow(Box::new(base), Box::new(e)));
        }
        Ok(base)
    }

    fn intatom(&mut self) -> Result<IntExpr, ParseError> {
        match self.next() {
            Some(Tok::Int(v)) => self.literal(v),
            Some(Tok::Ident(name)) => Ok(IntExpr::Var(name)),
            Some(Tok::LParen) => {
                let e = self.intexpr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(t) => self.err(format!("expected integer, found '{}'", t)),
            None => self.err("expected integer, found end of input"),
        }
    }
}

fn is_reserved(name: &str) -> bool {
    matches!(
        name,
        "q" | "phi" | "psi" | "theta" | "Bk" | "gf" | "dissect" | "subs" | "sum"
    ) || (name.len() > 1
        && name.starts_with('f')
        && name[1..].bytes().all(|b| b.is_ascii_digit()))
}

/// Parse a formula into its AST. Errors carry line and column.
pub fn parse_expression(text: &str) -> Result<EtaExpression, ParseError> {
    let toks = lex(text)?;
    let end = toks
        .last()
        .map(|&(_, p)| Pos { line: p.line, col: p.col + 1 })
        .unwrap_or(Pos { line: 1, col: 1 });
    let mut p = Parser { toks, idx: 0, end };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        let t = t.clone();
        return p.err(format!("unexpected trailing '{}'", t));
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// Pretty-printing (canonical form; reparses to an equal AST)
// ---------------------------------------------------------------------------

impl fmt::Display for IntExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0, false)
    }
}

impl IntExpr {
    /// `prec`: 0 = sum position, 1 = product position, 2 = power position.
    /// `right`: operand sits right of a same-precedence operator.
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8, right: bool) -> fmt::Result {
        match self {
            IntExpr::Lit(v) => {
                if *v < 0 && (prec > 0 || right) {
                    write!(f, "({})", v)
                } else {
                    write!(f, "{}", v)
                }
            }
            IntExpr::Var(v) => write!(f, "{}", v),
            IntExpr::Neg(a) => {
                if prec > 0 || right {
                    write!(f, "(-")?;
                    a.fmt_prec(f, 1, true)?;
                    write!(f, ")")
                } else {
                    write!(f, "-")?;
                    a.fmt_prec(f, 1, true)
                }
            }
            IntExpr::Add(a, b) => {
                let wrap = prec > 0 || right;
                if wrap {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 0, false)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 0, true)?;
                if wrap {
                    write!(f, ")")?;
                }
                Ok(())
            }
            IntExpr::Sub(a, b) => {
                let wrap = prec > 0 || right;
                if wrap {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 0, false)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 0, true)?;
                if wrap {
                    write!(f, ")")?;
                }
                Ok(())
            }
            IntExpr::Mul(a, b) => {
                let wrap = prec > 1 || (prec == 1 && right);
                if wrap {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1, false)?;
                write!(f, "*")?;
                b.fmt_prec(f, 1, true)?;
                if wrap {
                    write!(f, ")")?;
                }
                Ok(())
            }
            IntExpr::Div(a, b) => {
                let wrap = prec > 1 || (prec == 1 && right);
                if wrap {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1, false)?;
                write!(f, "/")?;
                b.fmt_prec(f, 1, true)?;
                if wrap {
                    write!(f, ")")?;
                }
                Ok(())
            }
            IntExpr::Pow(a, b) => {
                let wrap = prec > 2;
                if wrap {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 2, true)?;
                write!(f, "^")?;
                b.fmt_prec(f, 2, true)?;
                if wrap {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }

    /// Render in the restricted exponent position of the series grammar.
    fn fmt_exponent(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntExpr::Lit(_) | IntExpr::Var(_) => write!(f, "{}", self),
            other => write!(f, "({})", other),
        }
    }
}

impl fmt::Display for EtaExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0, false)
    }
}

impl EtaExpression {
    fn is_atomic(&self) -> bool {
        matches!(
            self,
            EtaExpression::Scalar(_)
                | EtaExpression::Eta(_)
                | EtaExpression::Phi
                | EtaExpression::Psi
                | EtaExpression::Theta { .. }
                | EtaExpression::BkDoubled { .. }
                | EtaExpression::Family { .. }
                | EtaExpression::Dissect { .. }
                | EtaExpression::Subst { .. }
                | EtaExpression::SumOver { .. }
        )
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8, right: bool) -> fmt::Result {
        match self {
            EtaExpression::Add(a, b) => {
                let wrap = prec > 0 || right;
                if wrap {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 0, false)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 0, true)?;
                if wrap {
                    write!(f, ")")?;
                }
                Ok(())
            }
            EtaExpression::Sub(a, b) => {
                let wrap = prec > 0 || right;
                if wrap {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 0, false)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 0, true)?;
                if wrap {
                    write!(f, ")")?;
                }
                Ok(())
            }
            EtaExpression::Mul(a, b) => {
                let wrap = prec > 1 || (prec == 1 && right);
                if wrap {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1, false)?;
                write!(f, "*")?;
                b.fmt_prec(f, 1, true)?;
                if wrap {
                    write!(f, ")")?;
                }
                Ok(())
            }
            EtaExpression::Div(a, b) => {
                let wrap = prec > 1 || (prec == 1 && right);
                if wrap {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1, false)?;
                write!(f, "/")?;
                b.fmt_prec(f, 1, true)?;
                if wrap {
                    write!(f, ")")?;
                }
                Ok(())
            }
            EtaExpression::Neg(a) => {
                let wrap = prec > 0 || right;
                if wrap {
                    write!(f, "(")?;
                }
                write!(f, "-")?;
                a.fmt_prec(f, 1, true)?;
                if wrap {
                    write!(f, ")")?;
                }
                Ok(())
            }
            EtaExpression::Pow(base, e) => {
                if base.is_atomic() {
                    base.fmt_prec(f, 2, false)?;
                } else {
                    write!(f, "(")?;
                    base.fmt_prec(f, 0, false)?;
                    write!(f, ")")?;
                }
                write!(f, "^")?;
                e.fmt_exponent(f)
            }
            EtaExpression::Scalar(v) => write!(f, "{}", v),
            EtaExpression::QPower(e) => {
                if *e == IntExpr::Lit(1) {
                    write!(f, "q")
                } else {
                    write!(f, "q^")?;
                    e.fmt_exponent(f)
                }
            }
            EtaExpression::Eta(k) => write!(f, "f{}", k),
            EtaExpression::Phi => write!(f, "phi"),
            EtaExpression::Psi => write!(f, "psi"),
            EtaExpression::Theta { a_sign, a_exp, b_sign, b_exp } => {
                write!(f, "theta({}, {}, {}, {})", a_sign, a_exp, b_sign, b_exp)
            }
            EtaExpression::BkDoubled { p, k } => write!(f, "Bk({}, {})", p, k),
            EtaExpression::Family { name, args } => {
                write!(f, "gf({}", name)?;
                for a in args {
                    write!(f, ", {}", a)?;
                }
                write!(f, ")")
            }
            EtaExpression::Dissect { inner, m, r } => {
                write!(f, "dissect({}, {}, {})", inner, m, r)
            }
            EtaExpression::Subst { inner, k } => write!(f, "subs({}, {})", inner, k),
            EtaExpression::SumOver { var, lo, hi, exclude, body } => {
                write!(f, "sum({}, {}, {}", var, lo, hi)?;
                if let Some(e) = exclude {
                    write!(f, ", {} != {}", var, e)?;
                }
                write!(f, ", {})", body)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    const EXACT: CoefficientRing = CoefficientRing::Exact;

    fn parse(s: &str) -> EtaExpression {
        parse_expression(s).unwrap()
    }

    #[test]
    fn parses_eta_quotient_with_six_atoms() {
        let e = parse("f2^3*f9^2*f36/(f1^2*f4*f18^3)");
        fn count_eta(e: &EtaExpression) -> usize {
            match e {
                EtaExpression::Eta(_) => 1,
                EtaExpression::Add(a, b)
                | EtaExpression::Sub(a, b)
                | EtaExpression::Mul(a, b)
                | EtaExpression::Div(a, b) => count_eta(a) + count_eta(b),
                EtaExpression::Neg(a) => count_eta(a),
                EtaExpression::Pow(a, _) => count_eta(a),
                _ => 0,
            }
        }
        assert_eq!(count_eta(&e), 6);
    }

    #[test]
    fn parses_scalar_qshift_quotient() {
        let e = parse("2*q*f6^3/f2");
        let s = e.expand(8, EXACT).unwrap();
        // 2q * f6^3/f2 = 2q(1 + q^2 + ...) at low order
        assert_eq!(s.coeff_bigint(0), BigInt::from(0));
        assert_eq!(s.coeff_bigint(1), BigInt::from(2));
    }

    #[test]
    fn rejects_zero_subscript() {
        let err = parse_expression("f0^2").unwrap_err();
        assert!(err.message.contains("zero subscript"));
    }

    #[test]
    fn rejects_unknown_atom() {
        let err = parse_expression("foo + 1").unwrap_err();
        assert!(err.message.contains("unknown atom"));
        assert_eq!(err.line, 1);
    }

    #[test]
    fn error_carries_position() {
        let err = parse_expression("f2 +\n @").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.col, 2);
    }

    #[test]
    fn expands_overpartition_family_atom() {
        let s = parse("gf(overpartition)").expand(6, EXACT).unwrap();
        let expected =
            TruncatedSeries::from_integers(EXACT, &[1, 2, 4, 8, 14, 24]).unwrap();
        assert_eq!(s, expected);
    }

    #[test]
    fn family_atom_validates_params() {
        assert!(matches!(
            parse("gf(tschur-over, 4)").expand(4, EXACT),
            Err(EvalError::Family(FamilyError::InvalidT(4)))
        ));
        assert!(matches!(
            parse("gf(tschur-over)").expand(4, EXACT),
            Err(EvalError::FamilyArity { .. })
        ));
    }

    #[test]
    fn one_expands_to_unit_series() {
        let s = parse("1").expand(4, EXACT).unwrap();
        assert_eq!(s, TruncatedSeries::from_integers(EXACT, &[1, 0, 0, 0]).unwrap());
    }

    #[test]
    fn dissect_atom_matches_series_op() {
        let via_expr = parse("dissect(gf(tschur-over, 9), 2, 1)").expand(30, EXACT).unwrap();
        let full = parse("gf(tschur-over, 9)").expand(61, EXACT).unwrap();
        let direct = full.extract_dissection(2, 1).unwrap();
        assert_eq!(via_expr, direct.truncate(30));
    }

    #[test]
    fn subs_matches_substitute_power() {
        let via_expr = parse("subs(psi, 3)").expand(40, EXACT).unwrap();
        let direct = crate::special::psi(14, EXACT)
            .unwrap()
            .substitute_power(3)
            .unwrap()
            .truncate(40);
        assert_eq!(via_expr, direct);
    }

    #[test]
    fn sum_construct_with_exclusion() {
        // sum over k in {-1, 0, 2} of q^k... using k+1 >= 0 exponents
        let e = parse("sum(k, -1, 2, k != 1, q^(k + 1))");
        let s = e.expand(6, EXACT).unwrap();
        assert_eq!(s, TruncatedSeries::from_integers(EXACT, &[1, 1, 0, 1, 0, 0]).unwrap());
    }

    #[test]
    fn signed_power_scalar() {
        let e = parse("sum(k, 0, 3, (-1)^k * q^k)");
        let s = e.expand(4, EXACT).unwrap();
        assert_eq!(s, TruncatedSeries::from_integers(EXACT, &[1, -1, 1, -1]).unwrap());
    }

    #[test]
    fn unbound_variable_is_an_error() {
        assert!(matches!(
            parse("q^k").expand(4, EXACT),
            Err(EvalError::UnboundVariable(_))
        ));
    }

    #[test]
    fn inexact_division_is_an_error() {
        assert!(matches!(
            parse("q^(3/2)").expand(4, EXACT),
            Err(EvalError::InexactDivision { .. })
        ));
    }

    #[test]
    fn division_by_non_unit_reports_series_error() {
        assert!(matches!(
            parse("1/q").expand(4, EXACT),
            Err(EvalError::Series(SeriesError::NonUnitConstantTerm(_)))
        ));
    }

    #[test]
    fn pretty_print_round_trips() {
        let samples = [
            "f2^3*f9^2*f36/(f1^2*f4*f18^3)",
            "2*q*f6^3/f2",
            "f1^2 - (f2*f8^5/(f4^2*f16^2) - 2*q*f2*f16^2/f8)",
            "gf(tschur-over-tuple, 3, 2)",
            "dissect(gf(tschur-over, 3), 12, 7)",
            "sum(k, -2, 2, k != -1, (-1)^k * q^((3*k^2 + k)/2) * theta(-1, (75 + (6*k + 1)*5)/2, -1, (75 - (6*k + 1)*5)/2))",
            "2*f1^3 - (sum(k, -2, 1, (-1)^k * q^((k^2 + k)/2) * subs(Bk(5, k), 5)) + 10*q^3*f25^3)",
            "-f1 + q^0 + (1 + f2)^2",
            "phi - psi^2/f4",
            "subs(Bk(3, -1), 3)",
        ];
        for s in samples {
            let ast = parse(s);
            let printed = format!("{}", ast);
            let reparsed = parse_expression(&printed)
                .unwrap_or_else(|e| panic!("reprint of '{}' failed: {} on '{}'", s, e, printed));
            assert_eq!(ast, reparsed, "round trip for '{}' via '{}'", s, printed);
        }
    }

    #[test]
    fn eta_fast_path_agrees_with_generic_pow() {
        let e1 = parse("f2^5/(f1^2*f4^2)").expand(50, EXACT).unwrap();
        // same expression forced through generic path with parens
        let e2 = parse("(f2)^5*((f1)^2*(f4)^2)^-1").expand(50, EXACT).unwrap();
        assert_eq!(e1, e2);
    }

    #[test]
    fn modular_expansion_matches_reduced_exact() {
        let text = "f2^3*f3^2*f12/(f1^2*f4*f6^3)";
        let exact = parse(text).expand(60, EXACT).unwrap();
        let modular = parse(text)
            .expand(60, CoefficientRing::Modular(8))
            .unwrap();
        assert_eq!(exact.reduce_mod(8).unwrap(), modular);
    }
}
