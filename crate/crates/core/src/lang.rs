//! A small expression language for series and Hecke operators.
//!
//! ```text
//! expr     := sum ;
//! sum      := prod (('+'|'-') prod)* ;
//! prod     := scalar '*' prefix | prefix ;
//! prefix   := 'U' '(' nat ')' prefix | 'V' '(' nat ')' prefix
//!           | 'euler' ('^' nat)? prefix | atom ;
//! atom     := 'pFq' '(' '[' scalars? ']' ',' '[' scalars? ']' (',' 'scale' '=' scalar)? ')'
//!           | 'x^' nat '*' atom | 'polylog' '(' int ')' | 'geom'
//!           | 'hadamard' '(' expr ',' expr ')' | '(' expr ')' ;
//! scalars  := scalar (',' scalar)* ;
//! ```
//!
//! Whitespace is insignificant between tokens; scalars use the syntax of
//! [`crate::arith`]. The lower list of a `pFq` literal is the textbook one:
//! the trailing `1` standing in for `k!` is appended by the parser.
//!
//! ```
//! use hecke::lang::{eval_series, parse};
//!
//! let e = parse("U(2) polylog(-2)").unwrap();
//! let s = eval_series(&e, 4).unwrap();
//! let coeffs: Vec<String> = s.dense().iter().map(|c| c.to_string()).collect();
//! assert_eq!(coeffs, ["0", "1/4", "1/16", "1/36"]);
//! ```

use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::GaussianRational;
use crate::hecke::{u_closed_form, TransformError};
use crate::hyper::{normalize, to_series_known_to, HyperError, HypergeometricTerm};
use crate::series::{
    add, euler_apply, hadamard, polylog_series, scale, shift_by, u_apply, v_apply, PowerSeries,
    SeriesError,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    /// `pFq` literal, possibly shifted by `x^j`; lower list validated.
    HypLit(HypergeometricTerm),
    /// `Σ_{k≥1} k^i x^k`.
    PolyLog(i64),
    /// `1/(1−x)`.
    Geom,
    UOp(u64, Box<Expr>),
    VOp(u64, Box<Expr>),
    Euler(u32, Box<Expr>),
    Hadamard(Box<Expr>, Box<Expr>),
    Sum(Box<Expr>, Box<Expr>),
    Scale(GaussianRational, Box<Expr>),
    /// `x^j * atom` for atoms other than `pFq` literals, which absorb the
    /// shift themselves.
    Shift(usize, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: expected {expected}, found {found}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("expression is not a closed-form hypergeometric term ({0} node)")]
    NotClosedForm(&'static str),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Hyper(#[from] HyperError),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn found(&self) -> String {
        let rest = self.rest();
        match rest.chars().next() {
            None => "end of input".to_string(),
            Some(c) if c.is_ascii_alphabetic() => {
                let word: String = rest
                    .chars()
                    .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
                    .collect();
                format!("`{word}`")
            }
            Some(c) => format!("`{c}`"),
        }
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.pos,
            expected: expected.to_string(),
            found: self.found(),
        })
    }

    fn peek_char(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, token: char) -> bool {
        if self.peek_char() == Some(token) {
            self.pos += token.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: char) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            self.fail(&format!("'{token}'"))
        }
    }

    /// Identifier at the cursor, without consuming it.
    fn peek_ident(&mut self) -> &'a str {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .bytes()
            .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
            .count();
        if rest.bytes().next().is_some_and(|b| b.is_ascii_alphabetic()) {
            &rest[..len]
        } else {
            ""
        }
    }

    fn eat_keyword(&mut self, word: &str) -> bool {
        if self.peek_ident() == word {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return self.fail("natural number");
        }
        match self.rest()[..digits].parse() {
            Ok(v) => {
                self.pos += digits;
                Ok(v)
            }
            Err(_) => self.fail("natural number that fits in 64 bits"),
        }
    }

    fn positive(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let n = self.nat()?;
        if n == 0 {
            self.pos = start;
            return self.fail("positive integer");
        }
        Ok(n)
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let negative = self.rest().starts_with('-');
        if negative {
            self.pos += 1;
        }
        let magnitude = self.nat().map_err(|mut e| {
            e.expected = "integer".to_string();
            e
        })?;
        let value = i64::try_from(magnitude)
            .ok()
            .map(|m| if negative { -m } else { m });
        match value {
            Some(v) => Ok(v),
            None => {
                self.pos = start;
                self.fail("integer that fits in 64 bits")
            }
        }
    }

    fn try_scalar(&mut self) -> Option<GaussianRational> {
        self.skip_ws();
        let len = GaussianRational::scan_prefix(self.rest())?;
        let value = self.rest()[..len].parse().ok()?;
        self.pos += len;
        Some(value)
    }

    fn scalar(&mut self) -> Result<GaussianRational, ParseError> {
        match self.try_scalar() {
            Some(v) => Ok(v),
            None => self.fail("scalar"),
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.prod()?;
        loop {
            if self.eat('+') {
                let rhs = self.prod()?;
                acc = Expr::Sum(Box::new(acc), Box::new(rhs));
            } else if self.eat('-') {
                let rhs = match self.prod()? {
                    Expr::Scale(c, inner) => Expr::Scale(-c, inner),
                    other => Expr::Scale(-GaussianRational::one(), Box::new(other)),
                };
                acc = Expr::Sum(Box::new(acc), Box::new(rhs));
            } else {
                return Ok(acc);
            }
        }
    }

    fn prod(&mut self) -> Result<Expr, ParseError> {
        match self.try_scalar() {
            Some(c) => {
                self.expect('*')?;
                Ok(Expr::Scale(c, Box::new(self.prefix()?)))
            }
            None => self.prefix(),
        }
    }

    fn prefix(&mut self) -> Result<Expr, ParseError> {
        for (word, is_u) in [("U", true), ("V", false)] {
            if self.eat_keyword(word) {
                self.expect('(')?;
                let n = self.positive()?;
                self.expect(')')?;
                let arg = Box::new(self.prefix()?);
                return Ok(if is_u {
                    Expr::UOp(n, arg)
                } else {
                    Expr::VOp(n, arg)
                });
            }
        }
        if self.eat_keyword("euler") {
            let count = if self.eat('^') {
                let start = self.pos;
                let c = self.nat()?;
                match u32::try_from(c) {
                    Ok(c) => c,
                    Err(_) => {
                        self.pos = start;
                        return self.fail("Euler power that fits in 32 bits");
                    }
                }
            } else {
                1
            };
            return Ok(Expr::Euler(count, Box::new(self.prefix()?)));
        }
        self.atom()
    }

    fn scalar_list(&mut self) -> Result<Vec<(usize, GaussianRational)>, ParseError> {
        self.expect('[')?;
        let mut items = Vec::new();
        if self.eat(']') {
            return Ok(items);
        }
        loop {
            self.skip_ws();
            let at = self.pos;
            items.push((at, self.scalar()?));
            if self.eat(']') {
                return Ok(items);
            }
            if !self.eat(',') {
                return self.fail("',' or ']'");
            }
        }
    }

    fn pfq(&mut self) -> Result<Expr, ParseError> {
        self.expect('(')?;
        let upper = self.scalar_list()?;
        self.expect(',')?;
        let lower = self.scalar_list()?;
        for (at, b) in &lower {
            if b.is_nonpositive_integer() {
                return Err(ParseError {
                    offset: *at,
                    expected: "lower parameter that is not a nonpositive integer".to_string(),
                    found: format!("`{b}`"),
                });
            }
        }
        let mut arg_scale = GaussianRational::one();
        if self.eat(',') {
            if !self.eat_keyword("scale") {
                return self.fail("`scale`");
            }
            self.expect('=')?;
            self.skip_ws();
            let at = self.pos;
            arg_scale = self.scalar()?;
            if arg_scale.is_zero() {
                self.pos = at;
                return self.fail("nonzero scale");
            }
        }
        self.expect(')')?;
        let strip = |v: Vec<(usize, GaussianRational)>| v.into_iter().map(|(_, x)| x).collect();
        let mut lower_full: Vec<GaussianRational> = strip(lower);
        lower_full.push(GaussianRational::one());
        let term = HypergeometricTerm::new(
            GaussianRational::one(),
            0,
            strip(upper),
            lower_full,
            arg_scale,
        )
        .expect("lower list validated above");
        Ok(Expr::HypLit(term))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek_ident() {
            "pFq" => {
                self.pos += 3;
                return self.pfq();
            }
            "x" => {
                self.pos += 1;
                self.expect('^')?;
                let j = self.nat()?;
                self.expect('*')?;
                let j = usize::try_from(j).expect("u64 fits in usize");
                return Ok(match self.atom()? {
                    Expr::HypLit(t) => Expr::HypLit(t.with_shift(t.shift() + j)),
                    Expr::Shift(k, inner) => Expr::Shift(k + j, inner),
                    other => Expr::Shift(j, Box::new(other)),
                });
            }
            "polylog" => {
                self.pos += 7;
                self.expect('(')?;
                let i = self.int()?;
                self.expect(')')?;
                return Ok(Expr::PolyLog(i));
            }
            "geom" => {
                self.pos += 4;
                return Ok(Expr::Geom);
            }
            "hadamard" => {
                self.pos += 8;
                self.expect('(')?;
                let left = self.sum()?;
                self.expect(',')?;
                let right = self.sum()?;
                self.expect(')')?;
                return Ok(Expr::Hadamard(Box::new(left), Box::new(right)));
            }
            _ => {}
        }
        if self.eat('(') {
            let inner = self.sum()?;
            self.expect(')')?;
            return Ok(inner);
        }
        self.fail("expression")
    }
}

/// Parses one expression; the whole input must be consumed.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut parser = Parser { src: text, pos: 0 };
    let expr = parser.sum()?;
    parser.skip_ws();
    if parser.pos != text.len() {
        return parser.fail("'+', '-' or end of input");
    }
    Ok(expr)
}

impl Expr {
    fn is_atom(&self) -> bool {
        match self {
            Expr::HypLit(t) => t.c0().is_one(),
            Expr::PolyLog(_) | Expr::Geom | Expr::Hadamard(..) | Expr::Shift(..) => true,
            _ => false,
        }
    }

    fn is_prefix(&self) -> bool {
        self.is_atom() || matches!(self, Expr::UOp(..) | Expr::VOp(..) | Expr::Euler(..))
    }

    fn node_name(&self) -> &'static str {
        match self {
            Expr::HypLit(_) => "HypLit",
            Expr::PolyLog(_) => "PolyLog",
            Expr::Geom => "Geom",
            Expr::UOp(..) => "UOp",
            Expr::VOp(..) => "VOp",
            Expr::Euler(..) => "Euler",
            Expr::Hadamard(..) => "Hadamard",
            Expr::Sum(..) => "Sum",
            Expr::Scale(..) => "Scale",
            Expr::Shift(..) => "Shift",
        }
    }
}

struct Wrapped<'a>(&'a Expr, fn(&Expr) -> bool);

impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if (self.1)(self.0) {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

fn join(params: &[GaussianRational]) -> String {
    params
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Canonical source text; parsing it back yields an equal AST.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::HypLit(t) => {
                if !t.c0().is_one() {
                    write!(f, "{}*", t.c0())?;
                }
                if t.shift() > 0 {
                    write!(f, "x^{}*", t.shift())?;
                }
                write!(
                    f,
                    "pFq([{}], [{}]",
                    join(t.upper()),
                    join(&t.lower_textbook())
                )?;
                if !t.arg_scale().is_one() {
                    write!(f, ", scale={}", t.arg_scale())?;
                }
                write!(f, ")")
            }
            Expr::PolyLog(i) => write!(f, "polylog({i})"),
            Expr::Geom => write!(f, "geom"),
            Expr::UOp(n, e) => write!(f, "U({n}) {}", Wrapped(e, Expr::is_prefix)),
            Expr::VOp(n, e) => write!(f, "V({n}) {}", Wrapped(e, Expr::is_prefix)),
            Expr::Euler(c, e) => write!(f, "euler^{c} {}", Wrapped(e, Expr::is_prefix)),
            Expr::Hadamard(a, b) => write!(f, "hadamard({a}, {b})"),
            Expr::Sum(a, b) => write!(f, "{a} + {}", Wrapped(b, |e| !matches!(e, Expr::Sum(..)))),
            Expr::Scale(c, e) => write!(f, "{c}*{}", Wrapped(e, Expr::is_prefix)),
            Expr::Shift(j, e) => {
                // A shifted literal would be re-absorbed into the literal.
                let atom =
                    |e: &Expr| e.is_atom() && !matches!(e, Expr::HypLit(_) | Expr::Shift(..));
                write!(f, "x^{j}*{}", Wrapped(e, atom))
            }
        }
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        map.serialize_entry("node", self.node_name())?;
        let text = |v: &[GaussianRational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        match self {
            Expr::HypLit(t) => {
                map.serialize_entry("c0", &t.c0().to_string())?;
                map.serialize_entry("j", &t.shift())?;
                map.serialize_entry("upper", &text(t.upper()))?;
                map.serialize_entry("lower", &text(&t.lower_textbook()))?;
                map.serialize_entry("arg_scale", &t.arg_scale().to_string())?;
            }
            Expr::PolyLog(i) => map.serialize_entry("i", i)?,
            Expr::Geom => {}
            Expr::UOp(n, e) | Expr::VOp(n, e) => {
                map.serialize_entry("n", n)?;
                map.serialize_entry("arg", e)?;
            }
            Expr::Euler(c, e) => {
                map.serialize_entry("count", c)?;
                map.serialize_entry("arg", e)?;
            }
            Expr::Hadamard(a, b) | Expr::Sum(a, b) => {
                map.serialize_entry("left", a)?;
                map.serialize_entry("right", b)?;
            }
            Expr::Scale(c, e) => {
                map.serialize_entry("scalar", &c.to_string())?;
                map.serialize_entry("arg", e)?;
            }
            Expr::Shift(j, e) => {
                map.serialize_entry("j", j)?;
                map.serialize_entry("arg", e)?;
            }
        }
        map.end()
    }
}

/// Expands `e` exactly, known up to exponent `order`.
///
/// Children are evaluated as deep as their parent needs: `U(n)` asks its
/// argument for `n·order` exponents.
pub fn eval_series(e: &Expr, order: usize) -> Result<PowerSeries, LangError> {
    let series = match e {
        Expr::HypLit(t) => to_series_known_to(t, order),
        Expr::PolyLog(i) => polylog_series(*i, order),
        Expr::Geom => PowerSeries::from_fn(0, order, |_| GaussianRational::one()),
        Expr::UOp(n, inner) => {
            let depth = usize::try_from(*n)
                .ok()
                .and_then(|n| n.checked_mul(order))
                .ok_or(SeriesError::InvalidOperator(*n))?;
            u_apply(*n, &eval_series(inner, depth)?)?
        }
        Expr::VOp(n, inner) => {
            let step = usize::try_from(*n).map_err(|_| SeriesError::InvalidOperator(*n))?;
            let depth = if order == 0 {
                0
            } else {
                (order - 1).div_ceil(step) + 1
            };
            v_apply(*n, &eval_series(inner, depth)?)?
        }
        Expr::Euler(count, inner) => {
            let mut s = eval_series(inner, order)?;
            for _ in 0..*count {
                s = euler_apply(&s);
            }
            s
        }
        Expr::Hadamard(a, b) => hadamard(&eval_series(a, order)?, &eval_series(b, order)?),
        Expr::Sum(a, b) => add(&eval_series(a, order)?, &eval_series(b, order)?),
        Expr::Scale(c, inner) => scale(c, &eval_series(inner, order)?),
        Expr::Shift(j, inner) => shift_by(*j, &eval_series(inner, order.saturating_sub(*j))?),
    };
    Ok(series.truncate(order))
}

/// Closed form of `e` as a single hypergeometric term, when one exists.
///
/// `U(n)` is applied through [`u_closed_form`] and normalized; sums,
/// Hadamard products, `V(n)` and Euler powers give
/// [`LangError::NotClosedForm`].
pub fn eval_symbolic(e: &Expr) -> Result<HypergeometricTerm, LangError> {
    match e {
        Expr::HypLit(t) => Ok(t.clone()),
        Expr::PolyLog(i) => Ok(HypergeometricTerm::polylog(*i)),
        Expr::Geom => Ok(HypergeometricTerm::geometric()),
        Expr::UOp(n, inner) => Ok(normalize(
            &u_closed_form(*n, &eval_symbolic(inner)?)?.output,
        )),
        Expr::Scale(c, inner) => {
            let t = eval_symbolic(inner)?;
            Ok(t.with_c0(c * t.c0()))
        }
        Expr::Shift(j, inner) => {
            let t = eval_symbolic(inner)?;
            Ok(t.with_shift(t.shift() + j))
        }
        other => Err(LangError::NotClosedForm(other.node_name())),
    }
}
