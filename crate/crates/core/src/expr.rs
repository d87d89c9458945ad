//! The ring and element expression language.
//!
//! ```text
//! ring     := product
//! product  := postfix { "x" postfix }
//! postfix  := atom { "[" group "]" | "[" var "]" [ "/(" poly ")" ] }
//! atom     := "Z/" nat | "M" nat "(" ring ")" | "GR(" nat "," nat "," poly ")"
//!           | "(" ring ")"
//! group    := "C" nat { "x" "C" nat }
//! poly     := [sign] term { sign term } ; term := [nat] [var ["^" nat]]
//! ```
//!
//! Elements use integers for `Z/n`, polynomials in the ring variable for
//! polynomial quotients, and `[e1,e2,...]` for matrix (row-major), group ring
//! and product elements, each entry in the syntax of its component ring.

use std::collections::BTreeSet;
use std::fmt;

use crate::constructions::galois_ring;
use crate::error::{Error, Result};
use crate::group::GroupDescriptor;
use crate::ideal::Ideal;
use crate::ring::{Coords, Ring, RingElement, RingKind};

/// A polynomial with integer coefficients, constant term first, trailing
/// zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub var: Option<String>,
    pub coeffs: Vec<i64>,
}

impl Poly {
    fn new(var: Option<String>, mut coeffs: Vec<i64>) -> Poly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        let var = if coeffs.len() > 1 { var } else { None };
        Poly { var, coeffs }
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = self.var.as_deref().unwrap_or("x");
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if c < 0 {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            first = false;
            let a = c.unsigned_abs();
            if a != 1 || i == 0 {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "{var}")?,
                _ => write!(f, "{var}^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingAst {
    ModInt(u64),
    PolyQuot {
        base: Box<RingAst>,
        var: String,
        poly: Poly,
    },
    Polynomial {
        base: Box<RingAst>,
        var: String,
    },
    Matrix {
        size: usize,
        base: Box<RingAst>,
    },
    GroupRing {
        base: Box<RingAst>,
        group: Vec<u64>,
    },
    Product(Vec<RingAst>),
    Galois {
        p: u64,
        k: u32,
        poly: Poly,
    },
}

/// Writes `a` so that a postfix suffix can follow it.
fn operand(f: &mut fmt::Formatter<'_>, a: &RingAst) -> fmt::Result {
    match a {
        RingAst::Product(_) => write!(f, "({a})"),
        _ => write!(f, "{a}"),
    }
}

impl fmt::Display for RingAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingAst::ModInt(n) => write!(f, "Z/{n}"),
            RingAst::PolyQuot { base, var, poly } => {
                operand(f, base)?;
                write!(f, "[{var}]/({poly})")
            }
            RingAst::Polynomial { base, var } => {
                operand(f, base)?;
                write!(f, "[{var}]")
            }
            RingAst::Matrix { size, base } => write!(f, "M{size}({base})"),
            RingAst::GroupRing { base, group } => {
                operand(f, base)?;
                let g: Vec<String> = group.iter().map(|m| format!("C{m}")).collect();
                write!(f, "[{}]", g.join("x"))
            }
            RingAst::Product(items) => {
                for (i, r) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " x ")?;
                    }
                    operand(f, r)?;
                }
                Ok(())
            }
            RingAst::Galois { p, k, poly } => write!(f, "GR({p},{k},{poly})"),
        }
    }
}

/// A parsed ring expression together with its source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingExpr {
    pub source: String,
    pub ast: RingAst,
}

impl RingExpr {
    /// Builds the ring with the given enumeration cap.
    pub fn build(&self, cap: u64) -> Result<Ring> {
        Ok(build(&self.ast)?.with_cap(cap))
    }
}

impl fmt::Display for RingExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ast)
    }
}

/// Canonical text of a parsed expression.
pub fn print_ring_expr(expr: &RingExpr) -> String {
    expr.ast.to_string()
}

fn build(ast: &RingAst) -> Result<Ring> {
    match ast {
        RingAst::ModInt(n) => Ring::modular(*n),
        RingAst::PolyQuot { base, var, poly } => {
            Ring::poly_quotient(&build(base)?, var, &poly.coeffs)
        }
        RingAst::Polynomial { base, var } => Ring::polynomial(&build(base)?, var),
        RingAst::Matrix { size, base } => Ring::matrix(&build(base)?, *size),
        RingAst::GroupRing { base, group } => {
            Ring::group_ring(&build(base)?, GroupDescriptor::new(group.clone())?)
        }
        RingAst::Product(items) => {
            let rings = items.iter().map(build).collect::<Result<Vec<_>>>()?;
            Ring::direct_product(&rings)
        }
        RingAst::Galois { p, k, poly } => Ok(galois_ring(*p, *k, &poly.coeffs)?.ring),
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    /// Offset of `src` inside the text reported in errors.
    base: usize,
    expected: BTreeSet<&'static str>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, base: usize) -> Self {
        Parser {
            src,
            pos: 0,
            base,
            expected: BTreeSet::new(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    /// Consumes `token` after optional whitespace.
    fn eat(&mut self, token: &'static str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            self.expected.clear();
            true
        } else {
            self.expected.insert(token);
            false
        }
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> Error {
        let expected: Vec<&str> = self.expected.iter().copied().collect();
        Error::Parse {
            position: self.base + pos,
            message: message.into(),
            expected: if expected.is_empty() {
                "nothing".into()
            } else {
                expected.join(" | ")
            },
        }
    }

    fn fail<T>(&self, message: &str) -> Result<T> {
        let found = match self.peek() {
            Some(c) => format!("{message}, found '{c}'"),
            None => format!("{message}, found end of input"),
        };
        Err(self.error_at(self.pos, found))
    }

    fn expect(&mut self, token: &'static str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            self.fail(&format!("expected '{token}'"))
        }
    }

    fn nat(&mut self) -> Result<u64> {
        self.skip_ws();
        let digits: &str = {
            let r = self.rest();
            let n = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
            &r[..n]
        };
        if digits.is_empty() {
            self.expected.insert("number");
            return self.fail("expected a number");
        }
        let start = self.pos;
        self.pos += digits.len();
        self.expected.clear();
        digits
            .parse()
            .map_err(|_| self.error_at(start, format!("number {digits} is too large")))
    }

    fn var(&mut self) -> Result<String> {
        self.skip_ws();
        let r = self.rest();
        let n = r.find(|c: char| !c.is_ascii_lowercase()).unwrap_or(r.len());
        if n == 0 {
            self.expected.insert("variable");
            return self.fail("expected a variable");
        }
        self.pos += n;
        self.expected.clear();
        Ok(r[..n].to_string())
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        if self.pos == self.src.len() {
            true
        } else {
            self.expected.insert("end of input");
            false
        }
    }

    fn ring(&mut self) -> Result<RingAst> {
        let mut items = vec![self.postfix()?];
        while self.eat("x") {
            items.push(self.postfix()?);
        }
        Ok(if items.len() == 1 {
            items.pop().expect("one item")
        } else {
            RingAst::Product(items)
        })
    }

    fn postfix(&mut self) -> Result<RingAst> {
        let mut ring = self.atom()?;
        while self.eat("[") {
            self.skip_ws();
            if self.peek() == Some('C') {
                let group = self.group()?;
                self.expect("]")?;
                ring = RingAst::GroupRing {
                    base: Box::new(ring),
                    group,
                };
                continue;
            }
            self.expected.insert("C");
            let var = self.var()?;
            self.expect("]")?;
            if self.eat("/") {
                self.expect("(")?;
                let poly_start = self.pos;
                let poly = self.poly(Some(&var))?;
                self.expect(")")?;
                if poly.degree().unwrap_or(0) == 0 {
                    return Err(self.error_at(poly_start, "modulus must have positive degree"));
                }
                ring = RingAst::PolyQuot {
                    base: Box::new(ring),
                    var,
                    poly,
                };
            } else {
                ring = RingAst::Polynomial {
                    base: Box::new(ring),
                    var,
                };
            }
        }
        Ok(ring)
    }

    fn atom(&mut self) -> Result<RingAst> {
        if self.eat("Z/") {
            return Ok(RingAst::ModInt(self.nat()?));
        }
        if self.eat("GR(") {
            let p = self.nat()?;
            self.expect(",")?;
            let k_start = self.pos;
            let k = self.nat()?;
            let k = u32::try_from(k).map_err(|_| self.error_at(k_start, "k is too large"))?;
            self.expect(",")?;
            let poly = self.poly(Some("x"))?;
            self.expect(")")?;
            return Ok(RingAst::Galois { p, k, poly });
        }
        if self.eat("M") {
            let n_start = self.pos;
            let size = self.nat()?;
            let size =
                usize::try_from(size).map_err(|_| self.error_at(n_start, "size is too large"))?;
            self.expect("(")?;
            let base = self.ring()?;
            self.expect(")")?;
            return Ok(RingAst::Matrix {
                size,
                base: Box::new(base),
            });
        }
        if self.eat("(") {
            let inner = self.ring()?;
            self.expect(")")?;
            return Ok(inner);
        }
        self.fail("expected a ring")
    }

    fn group(&mut self) -> Result<Vec<u64>> {
        let mut factors = Vec::new();
        loop {
            self.expect("C")?;
            factors.push(self.nat()?);
            if !self.eat("x") {
                return Ok(factors);
            }
        }
    }

    /// Polynomial whose variable, if any, must equal `var` (any lowercase
    /// name is accepted when `var` is `None`).
    fn poly(&mut self, var: Option<&str>) -> Result<Poly> {
        let mut coeffs: Vec<i64> = Vec::new();
        let mut seen_var: Option<String> = var.map(str::to_string);
        let mut first = true;
        loop {
            let sign: i64 = if self.eat("-") {
                -1
            } else if first || self.eat("+") {
                1
            } else {
                break;
            };
            first = false;
            self.skip_ws();
            let term_start = self.pos;
            let has_coef = self.peek().is_some_and(|c| c.is_ascii_digit());
            let coef = if has_coef { self.nat()? } else { 1 };
            let coef = i64::try_from(coef)
                .map_err(|_| self.error_at(term_start, "coefficient is too large"))?;
            self.skip_ws();
            let has_var = self.peek().is_some_and(|c| c.is_ascii_lowercase());
            let exp = if has_var {
                let vstart = self.pos;
                let v = self.var()?;
                match &seen_var {
                    Some(s) if *s != v => {
                        return Err(self
                            .error_at(vstart, format!("unknown variable '{v}', expected '{s}'")));
                    }
                    _ => seen_var = Some(v),
                }
                if self.eat("^") {
                    let e_start = self.pos;
                    let e = self.nat()?;
                    usize::try_from(e)
                        .ok()
                        .filter(|&e| e <= 4096)
                        .ok_or_else(|| self.error_at(e_start, "exponent is too large"))?
                } else {
                    1
                }
            } else if has_coef {
                0
            } else {
                self.expected.insert("number");
                self.expected.insert("variable");
                return self.fail("expected a term");
            };
            if coeffs.len() <= exp {
                coeffs.resize(exp + 1, 0);
            }
            coeffs[exp] = coef
                .checked_mul(sign)
                .and_then(|c| coeffs[exp].checked_add(c))
                .ok_or_else(|| self.error_at(term_start, "coefficient overflow"))?;
        }
        Ok(Poly::new(seen_var, coeffs))
    }
}

/// Parses a ring expression.
pub fn parse_ring_expr(text: &str) -> Result<RingExpr> {
    let mut p = Parser::new(text, 0);
    let ast = p.ring()?;
    if !p.at_end() {
        return p.fail("unexpected input");
    }
    Ok(RingExpr {
        source: text.to_string(),
        ast,
    })
}

/// Parses and builds a ring with the given enumeration cap.
pub fn parse_ring(text: &str, cap: u64) -> Result<Ring> {
    parse_ring_expr(text)?.build(cap)
}

/// Splits `text` at top-level occurrences of `sep`, returning each piece
/// with its byte offset.
fn split_top(text: &str, sep: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push((start, &text[start..i]));
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push((start, &text[start..]));
    out
}

fn element_at(ring: &Ring, text: &str, offset: usize) -> Result<RingElement> {
    let mut p = Parser::new(text, offset);
    let e = element_in(ring, &mut p)?;
    if !p.at_end() {
        return p.fail("unexpected input");
    }
    Ok(e)
}

fn element_in(ring: &Ring, p: &mut Parser<'_>) -> Result<RingElement> {
    match ring.kind() {
        RingKind::ModularInt { .. } => {
            let poly = p.poly(None)?;
            if poly.degree().unwrap_or(0) > 0 {
                return Err(p.error_at(0, format!("{ring} has no variable")));
            }
            ring.element(&[poly.coeffs.first().copied().unwrap_or(0)])
        }
        RingKind::PolyQuotient { var, .. } | RingKind::PolynomialRing { var, .. } => {
            let poly = p.poly(Some(var))?;
            let coeffs = if poly.coeffs.is_empty() {
                vec![0]
            } else {
                poly.coeffs
            };
            ring.element(&coeffs)
        }
        RingKind::QuotientRing { base, .. } => {
            let x = element_in(base, p)?;
            ring.project(&x)
        }
        RingKind::MatrixRing { base, size } => {
            block_element(ring, &vec![base.clone(); size * size], p)
        }
        RingKind::GroupRing { base, group } => {
            block_element(ring, &vec![base.clone(); group.order()], p)
        }
        RingKind::DirectProduct { factors } => block_element(ring, factors, p),
    }
}

fn block_element(ring: &Ring, parts: &[Ring], p: &mut Parser<'_>) -> Result<RingElement> {
    p.expect("[")?;
    let mut coords: Coords = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        if i > 0 {
            p.expect(",")?;
        }
        coords.extend_from_slice(element_in(part, p)?.coords());
    }
    if !p.eat("]") {
        return p.fail(&format!("{ring} elements have {} entries", parts.len()));
    }
    ring.element_from_coords(coords)
}

/// Parses one element of `ring`.
pub fn parse_element(ring: &Ring, text: &str) -> Result<RingElement> {
    element_at(ring, text, 0)
}

/// Parses a comma-separated generator list. An empty list is allowed.
pub fn parse_generators(ring: &Ring, text: &str) -> Result<Vec<RingElement>> {
    parse_generators_at(ring, text, 0)
}

fn parse_generators_at(ring: &Ring, text: &str, offset: usize) -> Result<Vec<RingElement>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    split_top(text, ',')
        .into_iter()
        .map(|(at, piece)| element_at(ring, piece, offset + at))
        .collect()
}

/// Parses `"g1,g2;g3;..."` into the ideals they generate, appending the
/// zero ideal unless the last listed ideal is already zero.
pub fn parse_chain(ring: &Ring, text: &str) -> Result<Vec<Ideal>> {
    let mut ideals = Vec::new();
    if !text.trim().is_empty() {
        for (at, piece) in split_top(text, ';') {
            let gens = parse_generators_at(ring, piece, at)?;
            ideals.push(Ideal::generated(ring, &gens)?);
        }
    }
    if ideals.last().is_none_or(|i| !i.is_zero()) {
        ideals.push(Ideal::zero(ring));
    }
    Ok(ideals)
}
