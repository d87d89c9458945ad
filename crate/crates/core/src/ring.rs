//! Ring descriptors, canonical elements and exact arithmetic.
//!
//! Every element, whatever the construction, is stored as a flat vector of
//! coordinates over the modular integer rings at the bottom of the
//! descriptor tree. Composite rings (polynomial quotients, matrices, group
//! rings, products) lay the coordinates of their components side by side;
//! quotient rings keep the coordinates of the least representative of each
//! coset.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::group::GroupDescriptor;
use crate::ideal::Ideal;

/// Canonical coordinate vector of an element.
pub type Coords = Vec<u64>;

/// Default enumeration cap (2^20 elements).
pub const DEFAULT_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Cardinality {
    /// Exact size; saturates at `u128::MAX` for absurdly large descriptors.
    Finite(u128),
    Infinite,
}

impl Cardinality {
    pub fn finite(self) -> Option<u128> {
        match self {
            Cardinality::Finite(n) => Some(n),
            Cardinality::Infinite => None,
        }
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Finite(n) => write!(f, "{n}"),
            Cardinality::Infinite => write!(f, "infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RingKind {
    ModularInt {
        modulus: u64,
    },
    /// `base[var]/(modulus)`; `modulus` holds ascending coefficients and is monic.
    PolyQuotient {
        base: Ring,
        var: String,
        modulus: Vec<u64>,
    },
    MatrixRing {
        base: Ring,
        size: usize,
    },
    GroupRing {
        base: Ring,
        group: GroupDescriptor,
    },
    DirectProduct {
        factors: Vec<Ring>,
    },
    QuotientRing {
        base: Ring,
        ideal: Ideal,
    },
    /// `base[var]`, only usable for sampling.
    PolynomialRing {
        base: Ring,
        var: String,
    },
}

struct RingData {
    kind: RingKind,
    cap: u64,
    width: Option<usize>,
    group_table: Option<Vec<Vec<usize>>>,
    elements: OnceLock<Vec<Coords>>,
    units: OnceLock<UnitTable>,
    reps: OnceLock<HashMap<Coords, Coords>>,
    additive_generators: OnceLock<Vec<Coords>>,
}

struct UnitTable {
    units: Vec<Coords>,
    inverse: HashMap<Coords, Coords>,
}

/// Shared, immutable ring descriptor. Clones share memoized tables.
#[derive(Clone)]
pub struct Ring(Arc<RingData>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.kind == other.0.kind
    }
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({self})")
    }
}

impl Ring {
    fn build(kind: RingKind, cap: u64) -> Ring {
        let width = match &kind {
            RingKind::ModularInt { .. } => Some(1),
            RingKind::PolyQuotient { modulus, .. } => Some(modulus.len() - 1),
            RingKind::MatrixRing { base, size } => base.width().map(|w| w * size * size),
            RingKind::GroupRing { base, group } => base.width().map(|w| w * group.order()),
            RingKind::DirectProduct { factors } => {
                factors.iter().map(|r| r.width()).sum::<Option<usize>>()
            }
            RingKind::QuotientRing { base, .. } => base.width(),
            RingKind::PolynomialRing { .. } => None,
        };
        let group_table = match &kind {
            RingKind::GroupRing { group, .. } => Some(group.table()),
            _ => None,
        };
        Ring(Arc::new(RingData {
            kind,
            cap,
            width,
            group_table,
            elements: OnceLock::new(),
            units: OnceLock::new(),
            reps: OnceLock::new(),
            additive_generators: OnceLock::new(),
        }))
    }

    /// `Z/n`, for `n >= 2`.
    pub fn modular(n: u64) -> Result<Ring> {
        if n < 2 {
            return Err(Error::InvalidDescriptor(format!("Z/{n} needs n >= 2")));
        }
        Ok(Ring::build(
            RingKind::ModularInt { modulus: n },
            DEFAULT_CAP,
        ))
    }

    /// `base[var]/(modulus)` where `modulus` lists coefficients from the
    /// constant term up. The base must be a modular integer ring and the
    /// modulus must be monic of degree at least 1.
    pub fn poly_quotient(base: &Ring, var: &str, modulus: &[i64]) -> Result<Ring> {
        let n = match base.kind() {
            RingKind::ModularInt { modulus } => *modulus,
            _ => {
                return Err(Error::InvalidDescriptor(
                    "polynomial quotients need a Z/n base".into(),
                ))
            }
        };
        let mut coeffs: Vec<u64> = modulus.iter().map(|&c| reduce_signed(c, n)).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::InvalidDescriptor(
                "modulus must have degree >= 1".into(),
            ));
        }
        if coeffs.last() != Some(&1) {
            return Err(Error::InvalidDescriptor("modulus must be monic".into()));
        }
        Ok(Ring::build(
            RingKind::PolyQuotient {
                base: base.clone(),
                var: var.to_string(),
                modulus: coeffs,
            },
            base.cap(),
        ))
    }

    pub fn matrix(base: &Ring, size: usize) -> Result<Ring> {
        if size == 0 {
            return Err(Error::InvalidDescriptor("matrix size must be >= 1".into()));
        }
        base.require_fixed_width()?;
        Ok(Ring::build(
            RingKind::MatrixRing {
                base: base.clone(),
                size,
            },
            base.cap(),
        ))
    }

    pub fn group_ring(base: &Ring, group: GroupDescriptor) -> Result<Ring> {
        base.require_fixed_width()?;
        Ok(Ring::build(
            RingKind::GroupRing {
                base: base.clone(),
                group,
            },
            base.cap(),
        ))
    }

    pub fn direct_product(factors: &[Ring]) -> Result<Ring> {
        if factors.is_empty() {
            return Err(Error::InvalidDescriptor(
                "direct product needs a factor".into(),
            ));
        }
        for f in factors {
            f.require_fixed_width()?;
        }
        let cap = factors.iter().map(Ring::cap).max().unwrap_or(DEFAULT_CAP);
        Ok(Ring::build(
            RingKind::DirectProduct {
                factors: factors.to_vec(),
            },
            cap,
        ))
    }

    /// `base/ideal`; elements are the least representatives of the cosets.
    pub fn quotient(base: &Ring, ideal: &Ideal) -> Result<Ring> {
        if ideal.owner() != base {
            return Err(Error::DescriptorMismatch {
                left: base.to_string(),
                right: ideal.owner().to_string(),
            });
        }
        Ok(Ring::build(
            RingKind::QuotientRing {
                base: base.clone(),
                ideal: ideal.clone(),
            },
            base.cap(),
        ))
    }

    /// `base[var]` over a modular integer ring.
    pub fn polynomial(base: &Ring, var: &str) -> Result<Ring> {
        if !matches!(base.kind(), RingKind::ModularInt { .. }) {
            return Err(Error::InvalidDescriptor(
                "polynomial rings need a Z/n base".into(),
            ));
        }
        Ok(Ring::build(
            RingKind::PolynomialRing {
                base: base.clone(),
                var: var.to_string(),
            },
            base.cap(),
        ))
    }

    /// Same descriptor with a different enumeration cap, applied recursively.
    pub fn with_cap(&self, cap: u64) -> Ring {
        let kind = match self.kind() {
            RingKind::ModularInt { modulus } => RingKind::ModularInt { modulus: *modulus },
            RingKind::PolyQuotient { base, var, modulus } => RingKind::PolyQuotient {
                base: base.with_cap(cap),
                var: var.clone(),
                modulus: modulus.clone(),
            },
            RingKind::MatrixRing { base, size } => RingKind::MatrixRing {
                base: base.with_cap(cap),
                size: *size,
            },
            RingKind::GroupRing { base, group } => RingKind::GroupRing {
                base: base.with_cap(cap),
                group: group.clone(),
            },
            RingKind::DirectProduct { factors } => RingKind::DirectProduct {
                factors: factors.iter().map(|f| f.with_cap(cap)).collect(),
            },
            RingKind::QuotientRing { base, ideal } => {
                let base = base.with_cap(cap);
                RingKind::QuotientRing {
                    ideal: ideal.rehome(&base),
                    base,
                }
            }
            RingKind::PolynomialRing { base, var } => RingKind::PolynomialRing {
                base: base.with_cap(cap),
                var: var.clone(),
            },
        };
        Ring::build(kind, cap)
    }

    pub fn kind(&self) -> &RingKind {
        &self.0.kind
    }

    pub fn cap(&self) -> u64 {
        self.0.cap
    }

    /// Number of coordinates per element; `None` for polynomial rings.
    pub fn width(&self) -> Option<usize> {
        self.0.width
    }

    fn require_fixed_width(&self) -> Result<()> {
        match self.width() {
            Some(_) => Ok(()),
            None => Err(Error::InfiniteRing(self.to_string())),
        }
    }

    pub fn cardinality(&self) -> Cardinality {
        use Cardinality::*;
        let pow = |c: Cardinality, e: usize| match c {
            Finite(n) => Finite(
                u32::try_from(e)
                    .ok()
                    .and_then(|e| n.checked_pow(e))
                    .unwrap_or(u128::MAX),
            ),
            Infinite => Infinite,
        };
        match self.kind() {
            RingKind::ModularInt { modulus } => Finite(*modulus as u128),
            RingKind::PolyQuotient { base, modulus, .. } => {
                pow(base.cardinality(), modulus.len() - 1)
            }
            RingKind::MatrixRing { base, size } => pow(base.cardinality(), size * size),
            RingKind::GroupRing { base, group } => pow(base.cardinality(), group.order()),
            RingKind::DirectProduct { factors } => {
                factors
                    .iter()
                    .fold(Finite(1), |acc, f| match (acc, f.cardinality()) {
                        (Finite(a), Finite(b)) => Finite(a.saturating_mul(b)),
                        _ => Infinite,
                    })
            }
            RingKind::QuotientRing { base, ideal } => match base.cardinality() {
                Finite(n) => Finite(n / ideal.len() as u128),
                Infinite => Infinite,
            },
            RingKind::PolynomialRing { .. } => Infinite,
        }
    }

    /// Whether the multiplication is known to be commutative.
    pub fn is_commutative(&self) -> bool {
        match self.kind() {
            RingKind::ModularInt { .. } => true,
            RingKind::PolyQuotient { .. } | RingKind::PolynomialRing { .. } => true,
            RingKind::MatrixRing { base, size } => *size == 1 && base.is_commutative(),
            RingKind::GroupRing { base, .. } => base.is_commutative(),
            RingKind::DirectProduct { factors } => factors.iter().all(Ring::is_commutative),
            RingKind::QuotientRing { base, .. } => base.is_commutative(),
        }
    }

    // ---------------------------------------------------------------
    // Coordinate level arithmetic. Inputs are assumed canonical.
    // ---------------------------------------------------------------

    pub(crate) fn zero_coords(&self) -> Coords {
        match self.width() {
            Some(w) => vec![0; w],
            None => Vec::new(),
        }
    }

    pub(crate) fn one_coords(&self) -> Coords {
        match self.kind() {
            RingKind::ModularInt { .. } => vec![1],
            RingKind::PolyQuotient { modulus, .. } => {
                let mut c = vec![0; modulus.len() - 1];
                c[0] = 1;
                c
            }
            RingKind::MatrixRing { base, size } => {
                let bw = base.width().unwrap_or(0);
                let mut c = vec![0; bw * size * size];
                let one = base.one_coords();
                for i in 0..*size {
                    let off = (i * size + i) * bw;
                    c[off..off + bw].copy_from_slice(&one);
                }
                c
            }
            RingKind::GroupRing { base, .. } => {
                let mut c = self.zero_coords();
                let one = base.one_coords();
                c[..one.len()].copy_from_slice(&one);
                c
            }
            RingKind::DirectProduct { factors } => {
                factors.iter().flat_map(|f| f.one_coords()).collect()
            }
            RingKind::QuotientRing { base, .. } => self.normalize(&base.one_coords()),
            RingKind::PolynomialRing { .. } => vec![1],
        }
    }

    fn modulus_of_leaf(&self) -> u64 {
        match self.kind() {
            RingKind::ModularInt { modulus } => *modulus,
            RingKind::PolyQuotient { base, .. } | RingKind::PolynomialRing { base, .. } => {
                base.modulus_of_leaf()
            }
            _ => unreachable!("no single coordinate modulus"),
        }
    }

    /// The component rings whose coordinates are laid side by side.
    fn blocks(&self) -> Vec<&Ring> {
        match self.kind() {
            RingKind::MatrixRing { base, size } => vec![base; size * size],
            RingKind::GroupRing { base, group } => vec![base; group.order()],
            RingKind::DirectProduct { factors } => factors.iter().collect(),
            _ => Vec::new(),
        }
    }

    pub(crate) fn add_coords(&self, a: &[u64], b: &[u64]) -> Coords {
        match self.kind() {
            RingKind::ModularInt { modulus } => vec![add_mod(a[0], b[0], *modulus)],
            RingKind::PolyQuotient { .. } => {
                let n = self.modulus_of_leaf();
                a.iter().zip(b).map(|(&x, &y)| add_mod(x, y, n)).collect()
            }
            RingKind::PolynomialRing { .. } => {
                let n = self.modulus_of_leaf();
                let len = a.len().max(b.len());
                let mut out: Coords = (0..len)
                    .map(|i| add_mod(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0), n))
                    .collect();
                trim(&mut out);
                out
            }
            RingKind::QuotientRing { base, .. } => self.normalize(&base.add_coords(a, b)),
            _ => self.blockwise(a, b, |r, x, y| r.add_coords(x, y)),
        }
    }

    pub(crate) fn neg_coords(&self, a: &[u64]) -> Coords {
        match self.kind() {
            RingKind::ModularInt { .. }
            | RingKind::PolyQuotient { .. }
            | RingKind::PolynomialRing { .. } => {
                let n = self.modulus_of_leaf();
                a.iter().map(|&x| if x == 0 { 0 } else { n - x }).collect()
            }
            RingKind::QuotientRing { base, .. } => self.normalize(&base.neg_coords(a)),
            _ => {
                let mut out = Vec::with_capacity(a.len());
                let mut off = 0;
                for r in self.blocks() {
                    let w = r.width().unwrap_or(0);
                    out.extend(r.neg_coords(&a[off..off + w]));
                    off += w;
                }
                out
            }
        }
    }

    pub(crate) fn sub_coords(&self, a: &[u64], b: &[u64]) -> Coords {
        self.add_coords(a, &self.neg_coords(b))
    }

    fn blockwise(
        &self,
        a: &[u64],
        b: &[u64],
        op: impl Fn(&Ring, &[u64], &[u64]) -> Coords,
    ) -> Coords {
        let mut out = Vec::with_capacity(a.len());
        let mut off = 0;
        for r in self.blocks() {
            let w = r.width().unwrap_or(0);
            out.extend(op(r, &a[off..off + w], &b[off..off + w]));
            off += w;
        }
        out
    }

    pub(crate) fn mul_coords(&self, a: &[u64], b: &[u64]) -> Coords {
        match self.kind() {
            RingKind::ModularInt { modulus } => vec![mul_mod(a[0], b[0], *modulus)],
            RingKind::PolyQuotient { modulus, .. } => {
                let n = self.modulus_of_leaf();
                let d = modulus.len() - 1;
                let mut prod = convolve(a, b, n);
                for i in (d..prod.len()).rev() {
                    let c = prod[i];
                    if c == 0 {
                        continue;
                    }
                    prod[i] = 0;
                    for j in 0..d {
                        let t = mul_mod(c, modulus[j], n);
                        prod[i - d + j] = sub_mod(prod[i - d + j], t, n);
                    }
                }
                prod.resize(d, 0);
                prod
            }
            RingKind::PolynomialRing { .. } => {
                let mut out = convolve(a, b, self.modulus_of_leaf());
                trim(&mut out);
                out
            }
            RingKind::MatrixRing { base, size } => {
                let n = *size;
                let bw = base.width().unwrap_or(0);
                let entry = |m: &[u64], i: usize, j: usize| -> Vec<u64> {
                    let off = (i * n + j) * bw;
                    m[off..off + bw].to_vec()
                };
                let mut out = Vec::with_capacity(a.len());
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = base.zero_coords();
                        for l in 0..n {
                            let p = base.mul_coords(&entry(a, i, l), &entry(b, l, j));
                            acc = base.add_coords(&acc, &p);
                        }
                        out.extend(acc);
                    }
                }
                out
            }
            RingKind::GroupRing { base, group } => {
                let bw = base.width().unwrap_or(0);
                let table = self.0.group_table.as_ref().expect("group table");
                let order = group.order();
                let mut acc: Vec<Coords> = vec![base.zero_coords(); order];
                for g in 0..order {
                    let ag = &a[g * bw..(g + 1) * bw];
                    if ag.iter().all(|&c| c == 0) {
                        continue;
                    }
                    for h in 0..order {
                        let bh = &b[h * bw..(h + 1) * bw];
                        if bh.iter().all(|&c| c == 0) {
                            continue;
                        }
                        let gh = table[g][h];
                        let p = base.mul_coords(ag, bh);
                        acc[gh] = base.add_coords(&acc[gh], &p);
                    }
                }
                acc.concat()
            }
            RingKind::DirectProduct { .. } => self.blockwise(a, b, |r, x, y| r.mul_coords(x, y)),
            RingKind::QuotientRing { base, .. } => self.normalize(&base.mul_coords(a, b)),
        }
    }

    pub(crate) fn pow_coords(&self, a: &[u64], mut m: u128) -> Coords {
        let mut result = self.one_coords();
        let mut base = a.to_vec();
        while m > 0 {
            if m & 1 == 1 {
                result = self.mul_coords(&result, &base);
            }
            m >>= 1;
            if m > 0 {
                base = self.mul_coords(&base, &base);
            }
        }
        result
    }

    /// `k * a` for an integer `k` (repeated addition by doubling).
    pub(crate) fn scale_coords(&self, a: &[u64], mut k: u128) -> Coords {
        let mut result = self.zero_coords();
        let mut base = a.to_vec();
        while k > 0 {
            if k & 1 == 1 {
                result = self.add_coords(&result, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.add_coords(&base, &base);
            }
        }
        result
    }

    /// Least coset representative, for quotient rings; identity otherwise.
    pub(crate) fn normalize(&self, c: &[u64]) -> Coords {
        let RingKind::QuotientRing { base, ideal } = self.kind() else {
            return c.to_vec();
        };
        if let Some(reps) = self.rep_table() {
            if let Some(r) = reps.get(c) {
                return r.clone();
            }
        }
        ideal
            .coords()
            .map(|i| base.add_coords(c, i))
            .min()
            .expect("ideal contains zero")
    }

    fn rep_table(&self) -> Option<&HashMap<Coords, Coords>> {
        let RingKind::QuotientRing { base, ideal } = self.kind() else {
            return None;
        };
        if let Some(t) = self.0.reps.get() {
            return Some(t);
        }
        let elements = base.element_coords().ok()?;
        let table = self.0.reps.get_or_init(|| {
            let mut reps: HashMap<Coords, Coords> = HashMap::with_capacity(elements.len());
            for x in elements {
                if reps.contains_key(x) {
                    continue;
                }
                for i in ideal.coords() {
                    reps.insert(base.add_coords(x, i), x.clone());
                }
            }
            reps
        });
        Some(table)
    }

    pub(crate) fn is_canonical(&self, c: &[u64]) -> bool {
        match self.kind() {
            RingKind::ModularInt { modulus } => c.len() == 1 && c[0] < *modulus,
            RingKind::PolyQuotient { modulus, .. } => {
                let n = self.modulus_of_leaf();
                c.len() == modulus.len() - 1 && c.iter().all(|&x| x < n)
            }
            RingKind::PolynomialRing { .. } => {
                let n = self.modulus_of_leaf();
                c.last() != Some(&0) && c.iter().all(|&x| x < n)
            }
            RingKind::QuotientRing { base, .. } => base.is_canonical(c) && self.normalize(c) == c,
            _ => {
                if Some(c.len()) != self.width() {
                    return false;
                }
                let mut off = 0;
                for r in self.blocks() {
                    let w = r.width().unwrap_or(0);
                    if !r.is_canonical(&c[off..off + w]) {
                        return false;
                    }
                    off += w;
                }
                true
            }
        }
    }

    /// Reduces raw integer coordinates into canonical form.
    pub(crate) fn reduce_coords(&self, raw: &[i64]) -> Result<Coords> {
        match self.kind() {
            RingKind::ModularInt { .. } if raw.len() != 1 => Err(Error::InvalidDescriptor(
                format!("{self} expects 1 coordinate, got {}", raw.len()),
            )),
            RingKind::ModularInt { .. } | RingKind::PolyQuotient { .. } => {
                let n = self.modulus_of_leaf();
                let w = self.width().unwrap_or(1);
                if raw.len() > w {
                    // Higher powers are reduced through the modulus.
                    let mut acc = self.zero_coords();
                    let x = self.var_coords();
                    for (i, &c) in raw.iter().enumerate() {
                        let mut term = self.pow_coords(&x, i as u128);
                        term = self.scale_coords(&term, reduce_signed(c, n) as u128);
                        acc = self.add_coords(&acc, &term);
                    }
                    return Ok(acc);
                }
                let mut c: Coords = raw.iter().map(|&v| reduce_signed(v, n)).collect();
                c.resize(w, 0);
                Ok(c)
            }
            RingKind::PolynomialRing { .. } => {
                let n = self.modulus_of_leaf();
                let mut c: Coords = raw.iter().map(|&v| reduce_signed(v, n)).collect();
                trim(&mut c);
                Ok(c)
            }
            RingKind::QuotientRing { base, .. } => Ok(self.normalize(&base.reduce_coords(raw)?)),
            _ => {
                if Some(raw.len()) != self.width() {
                    return Err(Error::InvalidDescriptor(format!(
                        "{} expects {} coordinates, got {}",
                        self,
                        self.width().unwrap_or(0),
                        raw.len()
                    )));
                }
                let mut out = Vec::with_capacity(raw.len());
                let mut off = 0;
                for r in self.blocks() {
                    let w = r.width().unwrap_or(0);
                    out.extend(r.reduce_coords(&raw[off..off + w])?);
                    off += w;
                }
                Ok(out)
            }
        }
    }

    /// Coordinates of the adjoined variable of a polynomial quotient.
    fn var_coords(&self) -> Coords {
        match self.kind() {
            RingKind::PolyQuotient { modulus, .. } => {
                let d = modulus.len() - 1;
                if d == 1 {
                    // x = -modulus[0] in a degree one quotient.
                    let n = self.modulus_of_leaf();
                    vec![if modulus[0] == 0 { 0 } else { n - modulus[0] }]
                } else {
                    let mut c = vec![0; d];
                    c[1] = 1;
                    c
                }
            }
            _ => self.one_coords(),
        }
    }

    // ---------------------------------------------------------------
    // Enumeration and unit tables.
    // ---------------------------------------------------------------

    fn check_cap(&self) -> Result<u128> {
        match self.cardinality() {
            Cardinality::Infinite => Err(Error::InfiniteRing(self.to_string())),
            Cardinality::Finite(n) if n > self.cap() as u128 => Err(Error::CapExceeded {
                what: self.to_string(),
                needed: if n == u128::MAX {
                    "more than 2^128".into()
                } else {
                    n.to_string()
                },
                cap: self.cap(),
            }),
            Cardinality::Finite(n) => Ok(n),
        }
    }

    pub(crate) fn element_coords(&self) -> Result<&[Coords]> {
        if let Some(e) = self.0.elements.get() {
            return Ok(e);
        }
        self.check_cap()?;
        let list = match self.kind() {
            RingKind::ModularInt { modulus } => (0..*modulus).map(|x| vec![x]).collect(),
            RingKind::PolyQuotient { modulus, .. } => {
                let n = self.modulus_of_leaf();
                let leaf: Vec<Coords> = (0..n).map(|x| vec![x]).collect();
                cartesian(&vec![leaf.as_slice(); modulus.len() - 1])
            }
            RingKind::QuotientRing { base, .. } => {
                let reps = self.rep_table().ok_or_else(|| Error::CapExceeded {
                    what: base.to_string(),
                    needed: base.cardinality().to_string(),
                    cap: base.cap(),
                })?;
                base.element_coords()?
                    .iter()
                    .filter(|x| reps.get(*x) == Some(*x))
                    .cloned()
                    .collect()
            }
            RingKind::PolynomialRing { .. } => unreachable!("rejected by check_cap"),
            _ => {
                let mut lists = Vec::new();
                for r in self.blocks() {
                    lists.push(r.element_coords()?);
                }
                cartesian(&lists)
            }
        };
        Ok(self.0.elements.get_or_init(|| list))
    }

    fn unit_table(&self) -> Result<&UnitTable> {
        if let Some(t) = self.0.units.get() {
            return Ok(t);
        }
        let elements = self.element_coords()?;
        let one = self.one_coords();
        let mut inverse: HashMap<Coords, Coords> = HashMap::new();
        let mut non_units: HashSet<Coords> = HashSet::new();
        for x in elements {
            if inverse.contains_key(x) || non_units.contains(x) {
                continue;
            }
            // Walk x, x^2, ... ; in a finite ring x is a unit iff the walk
            // returns to 1, and then x^(m-1) is its two-sided inverse.
            let mut seen: HashSet<Coords> = HashSet::new();
            let mut prev = one.clone();
            let mut p = x.clone();
            loop {
                if p == one {
                    inverse.insert(x.clone(), prev.clone());
                    inverse.insert(prev, x.clone());
                    break;
                }
                if !seen.insert(p.clone()) {
                    non_units.insert(x.clone());
                    break;
                }
                prev = p.clone();
                p = self.mul_coords(&p, x);
            }
        }
        let units = elements
            .iter()
            .filter(|x| inverse.contains_key(*x))
            .cloned()
            .collect();
        Ok(self.0.units.get_or_init(|| UnitTable { units, inverse }))
    }

    /// Additive generators of the ring, built from the structure (no enumeration).
    pub(crate) fn additive_generator_coords(&self) -> Result<&[Coords]> {
        if let Some(g) = self.0.additive_generators.get() {
            return Ok(g);
        }
        let gens = match self.kind() {
            RingKind::ModularInt { .. } => vec![vec![1]],
            RingKind::PolyQuotient { modulus, .. } => {
                let d = modulus.len() - 1;
                (0..d)
                    .map(|i| {
                        let mut c = vec![0; d];
                        c[i] = 1;
                        c
                    })
                    .collect()
            }
            RingKind::PolynomialRing { .. } => return Err(Error::InfiniteRing(self.to_string())),
            RingKind::QuotientRing { base, .. } => {
                let mut out: Vec<Coords> = Vec::new();
                for g in base.additive_generator_coords()? {
                    let n = self.normalize(g);
                    if n.iter().any(|&c| c != 0) && !out.contains(&n) {
                        out.push(n);
                    }
                }
                out
            }
            _ => {
                let width = self.width().unwrap_or(0);
                let mut out = Vec::new();
                let mut off = 0;
                for r in self.blocks() {
                    let w = r.width().unwrap_or(0);
                    for g in r.additive_generator_coords()? {
                        let mut c = vec![0; width];
                        c[off..off + w].copy_from_slice(g);
                        out.push(c);
                    }
                    off += w;
                }
                out
            }
        };
        Ok(self.0.additive_generators.get_or_init(|| gens))
    }

    // ---------------------------------------------------------------
    // Element level API.
    // ---------------------------------------------------------------

    pub(crate) fn wrap(&self, coords: Coords) -> RingElement {
        RingElement {
            ring: self.clone(),
            coords,
        }
    }

    pub fn zero(&self) -> RingElement {
        self.wrap(self.zero_coords())
    }

    pub fn one(&self) -> RingElement {
        self.wrap(self.one_coords())
    }

    /// Builds an element from integer coordinates, reducing them into
    /// canonical range (and to the coset representative in quotients).
    pub fn element(&self, raw: &[i64]) -> Result<RingElement> {
        Ok(self.wrap(self.reduce_coords(raw)?))
    }

    /// Builds an element from coordinates that must already be canonical.
    pub fn element_from_coords(&self, coords: Coords) -> Result<RingElement> {
        if !self.is_canonical(&coords) {
            return Err(Error::InvalidDescriptor(format!(
                "{coords:?} is not a canonical element of {self}"
            )));
        }
        Ok(self.wrap(coords))
    }

    /// Every element exactly once, in lexicographic coordinate order.
    pub fn elements(&self) -> Result<Vec<RingElement>> {
        Ok(self
            .element_coords()?
            .iter()
            .map(|c| self.wrap(c.clone()))
            .collect())
    }

    /// The unit group, in enumeration order.
    pub fn units(&self) -> Result<Vec<RingElement>> {
        Ok(self
            .unit_table()?
            .units
            .iter()
            .map(|c| self.wrap(c.clone()))
            .collect())
    }

    /// `|R*|`.
    pub fn unit_count(&self) -> Result<u128> {
        Ok(self.unit_table()?.units.len() as u128)
    }

    pub fn additive_generators(&self) -> Result<Vec<RingElement>> {
        Ok(self
            .additive_generator_coords()?
            .iter()
            .map(|c| self.wrap(c.clone()))
            .collect())
    }

    /// Image of `x` under the canonical projection onto this quotient ring.
    pub fn project(&self, x: &RingElement) -> Result<RingElement> {
        match self.kind() {
            RingKind::QuotientRing { base, .. } if base == x.ring() => {
                Ok(self.wrap(self.normalize(&x.coords)))
            }
            _ => Err(Error::DescriptorMismatch {
                left: self.to_string(),
                right: x.ring().to_string(),
            }),
        }
    }

    /// Lifts a quotient element to its representative in the base ring.
    pub fn lift(&self, x: &RingElement) -> Result<RingElement> {
        self.check_owner(x)?;
        match self.kind() {
            RingKind::QuotientRing { base, .. } => Ok(base.wrap(x.coords.clone())),
            _ => Err(Error::InvalidDescriptor(format!(
                "{self} is not a quotient ring"
            ))),
        }
    }

    fn check_owner(&self, x: &RingElement) -> Result<()> {
        if &x.ring != self {
            return Err(Error::DescriptorMismatch {
                left: self.to_string(),
                right: x.ring.to_string(),
            });
        }
        Ok(())
    }
}

/// An element of a ring, stored as canonical coordinates.
#[derive(Clone)]
pub struct RingElement {
    ring: Ring,
    coords: Coords,
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && self.ring == other.ring
    }
}

impl Eq for RingElement {}

impl std::hash::Hash for RingElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} in {}", self.ring)
    }
}

impl RingElement {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    fn same_ring(&self, other: &RingElement) -> Result<()> {
        self.ring.check_owner(other)
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement> {
        self.same_ring(other)?;
        Ok(self
            .ring
            .wrap(self.ring.add_coords(&self.coords, &other.coords)))
    }

    pub fn sub(&self, other: &RingElement) -> Result<RingElement> {
        self.same_ring(other)?;
        Ok(self
            .ring
            .wrap(self.ring.sub_coords(&self.coords, &other.coords)))
    }

    pub fn mul(&self, other: &RingElement) -> Result<RingElement> {
        self.same_ring(other)?;
        Ok(self
            .ring
            .wrap(self.ring.mul_coords(&self.coords, &other.coords)))
    }

    pub fn neg(&self) -> RingElement {
        self.ring.wrap(self.ring.neg_coords(&self.coords))
    }

    /// Integer multiple `k * self`.
    pub fn scale(&self, k: u128) -> RingElement {
        self.ring.wrap(self.ring.scale_coords(&self.coords, k))
    }

    /// `self^m` by square and multiply; `x^0 = 1`.
    pub fn pow(&self, m: u128) -> RingElement {
        self.ring.wrap(self.ring.pow_coords(&self.coords, m))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coords == self.ring.one_coords()
    }

    /// Two-sided inverse, if `self` is a unit.
    pub fn inverse(&self) -> Result<Option<RingElement>> {
        let table = self.ring.unit_table()?;
        Ok(table
            .inverse
            .get(&self.coords)
            .map(|c| self.ring.wrap(c.clone())))
    }

    pub fn is_unit(&self) -> Result<bool> {
        Ok(self.inverse()?.is_some())
    }

    /// Least `m >= 1` with `self^m = 1`, or `None` for non-units.
    ///
    /// The zero element has order 0 by the usual convention; here every
    /// non-unit, zero included, reports `None`.
    pub fn mult_order(&self) -> Result<Option<u128>> {
        if !self.is_unit()? {
            return Ok(None);
        }
        let unit_count = self.ring.unit_count()?;
        Ok(arith::divisors(unit_count)
            .into_iter()
            .find(|&d| self.pow(d).is_one()))
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_element(f, &self.ring, &self.coords)
    }
}

fn write_element(f: &mut fmt::Formatter<'_>, ring: &Ring, c: &[u64]) -> fmt::Result {
    match ring.kind() {
        RingKind::ModularInt { .. } => write!(f, "{}", c[0]),
        RingKind::PolyQuotient { var, .. } | RingKind::PolynomialRing { var, .. } => {
            write!(f, "{}", format_poly_ascending(c, var))
        }
        RingKind::QuotientRing { base, .. } => write_element(f, base, c),
        _ => {
            write!(f, "[")?;
            let mut off = 0;
            for (i, r) in ring.blocks().into_iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                let w = r.width().unwrap_or(0);
                write_element(f, r, &c[off..off + w])?;
                off += w;
            }
            write!(f, "]")
        }
    }
}

/// `a+bu+cu^2` style, constant term first.
pub fn format_poly_ascending(c: &[u64], var: &str) -> String {
    let mut terms = Vec::new();
    for (i, &coef) in c.iter().enumerate() {
        if coef == 0 {
            continue;
        }
        terms.push(monomial(coef, i, var));
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

/// `x^2+x+1` style, leading term first.
pub fn format_poly_descending(c: &[u64], var: &str) -> String {
    let mut terms = Vec::new();
    for (i, &coef) in c.iter().enumerate().rev() {
        if coef == 0 {
            continue;
        }
        terms.push(monomial(coef, i, var));
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

fn monomial(coef: u64, exp: usize, var: &str) -> String {
    let c = if coef == 1 && exp > 0 {
        String::new()
    } else {
        coef.to_string()
    };
    match exp {
        0 => c,
        1 => format!("{c}{var}"),
        _ => format!("{c}{var}^{exp}"),
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Products bind loosest, so they are parenthesised as operands.
        let operand = |r: &Ring| {
            if matches!(r.kind(), RingKind::DirectProduct { .. }) {
                format!("({r})")
            } else {
                r.to_string()
            }
        };
        match self.kind() {
            RingKind::ModularInt { modulus } => write!(f, "Z/{modulus}"),
            RingKind::PolyQuotient { base, var, modulus } => write!(
                f,
                "{}[{var}]/({})",
                operand(base),
                format_poly_descending(modulus, var)
            ),
            RingKind::MatrixRing { base, size } => write!(f, "M{size}({base})"),
            RingKind::GroupRing { base, group } => write!(f, "{}[{group}]", operand(base)),
            RingKind::DirectProduct { factors } => {
                let parts: Vec<String> = factors.iter().map(operand).collect();
                write!(f, "{}", parts.join(" x "))
            }
            RingKind::QuotientRing { base, ideal } => write!(f, "({base})/{ideal}"),
            RingKind::PolynomialRing { base, var } => write!(f, "{}[{var}]", operand(base)),
        }
    }
}

// -------------------------------------------------------------------
// Small helpers.
// -------------------------------------------------------------------

pub(crate) fn reduce_signed(v: i64, n: u64) -> u64 {
    (v as i128).rem_euclid(n as i128) as u64
}

fn add_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 + b as u128) % n as u128) as u64
}

fn sub_mod(a: u64, b: u64, n: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        n - (b - a)
    }
}

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn convolve(a: &[u64], b: &[u64], n: u64) -> Coords {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add_mod(out[i + j], mul_mod(x, y, n), n);
        }
    }
    out
}

fn trim(c: &mut Coords) {
    while c.last() == Some(&0) {
        c.pop();
    }
}

/// Cartesian product of coordinate lists, concatenated, first list slowest.
fn cartesian(lists: &[&[Coords]]) -> Vec<Coords> {
    let mut out: Vec<Coords> = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for prefix in &out {
            for item in list.iter() {
                let mut c = prefix.clone();
                c.extend_from_slice(item);
                next.push(c);
            }
        }
        out = next;
    }
    out
}

/// Brute-force two-sided inverse search over all elements. Independent of
/// the unit table; used to cross-check it.
pub fn find_inverse_exhaustive(x: &RingElement) -> Result<Option<RingElement>> {
    let ring = x.ring();
    let one = ring.one_coords();
    for y in ring.element_coords()? {
        if ring.mul_coords(x.coords(), y) == one && ring.mul_coords(y, x.coords()) == one {
            return Ok(Some(ring.wrap(y.clone())));
        }
    }
    Ok(None)
}
