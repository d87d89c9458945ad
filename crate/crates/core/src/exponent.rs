//! Ring exponents and the Fermat-Euler bounds derived from a CNC chain.
//!
//! Two sides are kept apart here. The oracle side enumerates units and their
//! orders (`ring_order`, `exponent_member`). The bound side reads only the
//! chain parameters and the first quotient `R/N_1`. Every bound is then
//! confirmed against the oracle when `R` is small enough to enumerate.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::arith;
use crate::cnc::{nilpotency_index_in, CncChain};
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::ring::{Ring, RingElement};

/// `o(R)`: lcm of the multiplicative orders of all units.
pub fn ring_order(ring: &Ring) -> Result<u128> {
    let mut acc = 1u128;
    for u in ring.units()? {
        let o = u.mult_order()?.expect("units have finite order");
        acc = arith::lcm(acc, o);
    }
    Ok(acc)
}

/// Whether `x^m = 1` for every unit `x`, i.e. `m` lies in `E(R)`.
pub fn exponent_member(ring: &Ring, m: u128) -> Result<bool> {
    if m == 0 {
        return Err(Error::PreconditionFailed("exponent must be >= 1".into()));
    }
    Ok(ring.units()?.iter().all(|u| u.pow(m).is_one()))
}

/// Which quantity of `R/N_1` plays the role of `w` in `M1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WMode {
    /// `w = o(R/N_1)`, the sharpest choice.
    #[default]
    RingOrder,
    /// `w = |(R/N_1)*|`.
    UnitCount,
}

impl fmt::Display for WMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WMode::RingOrder => "ring_order",
            WMode::UnitCount => "unit_count",
        })
    }
}

impl std::str::FromStr for WMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ring_order" => Ok(WMode::RingOrder),
            "unit_count" => Ok(WMode::UnitCount),
            other => Err(Error::PreconditionFailed(format!(
                "unknown w mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Failed,
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Verified => "verified",
            Verdict::Failed => "failed",
            Verdict::Skipped => "skipped",
        })
    }
}

/// Bounds `M1`, `M2`, `M3` for a ring with a verified chain, with oracle verdicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentReport {
    pub ring: String,
    pub unit_count: Option<u128>,
    pub ring_order: Option<u128>,
    pub w: u128,
    pub w_mode: WMode,
    #[serde(rename = "M1")]
    pub m1: Option<u128>,
    #[serde(rename = "M2")]
    pub m2: Option<u128>,
    #[serde(rename = "M3")]
    pub m3: Option<u128>,
    pub verdicts: BTreeMap<String, Verdict>,
    /// `|(R/N_1)*|`.
    #[serde(skip)]
    pub quotient_unit_count: u128,
    /// `|N_1|`.
    #[serde(skip)]
    pub first_ideal_size: u128,
    /// `s_1 ... s_{k-1}`.
    #[serde(skip)]
    pub characteristic_product: u128,
}

impl ExponentReport {
    /// `M1 <= M2 <= M3`, when all three are defined.
    pub fn is_ordered(&self) -> Option<bool> {
        match (self.m1, self.m2, self.m3) {
            (Some(a), Some(b), Some(c)) => Some(a <= b && b <= c),
            _ => None,
        }
    }

    /// Whether `M1` divides `M2`. Reported, not required.
    pub fn m1_divides_m2(&self) -> Option<bool> {
        match (self.m1, self.m2) {
            (Some(a), Some(b)) => Some(b % a == 0),
            _ => None,
        }
    }

    pub fn all_verified(&self) -> bool {
        self.verdicts.values().all(|v| *v == Verdict::Verified)
    }

    pub fn any_failed(&self) -> bool {
        self.verdicts.values().any(|v| *v == Verdict::Failed)
    }
}

/// Computes `M1 = w s_1...s_{k-1}`, `M2 = |(R/N_1)*| s_1...s_{k-1}` and
/// `M3 = |(R/N_1)*| |N_1|`, and checks each against the unit group of `R`.
pub fn fermat_bounds(ring: &Ring, chain: &CncChain, w_mode: WMode) -> Result<ExponentReport> {
    if !chain.is_verified() {
        return Err(Error::UnverifiedChain);
    }
    if chain.ring() != ring {
        return Err(Error::DescriptorMismatch {
            left: ring.to_string(),
            right: chain.ring().to_string(),
        });
    }
    let first = chain.first();
    let quotient = first.quotient_ring()?;
    let q_units = quotient.unit_count()?;
    let w = match w_mode {
        WMode::RingOrder => ring_order(&quotient)?,
        WMode::UnitCount => q_units,
    };
    let s = chain.characteristic_product();
    let n1 = first.len() as u128;
    let m1 = w.checked_mul(s);
    let m2 = q_units.checked_mul(s);
    let m3 = q_units.checked_mul(n1);

    // The oracle side is optional: rings beyond the cap keep their bounds
    // but the verdicts are skipped.
    let (unit_count, order) = match (ring.unit_count(), ring_order(ring)) {
        (Ok(u), Ok(o)) => (Some(u), Some(o)),
        (Err(Error::CapExceeded { .. }), _) | (_, Err(Error::CapExceeded { .. })) => (None, None),
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let mut verdicts = BTreeMap::new();
    for (name, bound) in [("M1", m1), ("M2", m2), ("M3", m3)] {
        let verdict = match (bound, unit_count) {
            (Some(m), Some(_)) => {
                if exponent_member(ring, m)? {
                    Verdict::Verified
                } else {
                    Verdict::Failed
                }
            }
            _ => Verdict::Skipped,
        };
        verdicts.insert(name.to_string(), verdict);
    }
    Ok(ExponentReport {
        ring: ring.to_string(),
        unit_count,
        ring_order: order,
        w,
        w_mode,
        m1,
        m2,
        m3,
        verdicts,
        quotient_unit_count: q_units,
        first_ideal_size: n1,
        characteristic_product: s,
    })
}

/// Result of the exponent bound over a direct product.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerReport {
    pub rings: Vec<String>,
    /// `m_i = |(R_i/N_i1)*| s_i1 ... s_i(k_i - 1)`.
    pub parts: Vec<u128>,
    #[serde(rename = "M")]
    pub m: u128,
    /// `m_1 m_2 ... m_j`, a multiple of `M` and hence also an exponent.
    pub product: u128,
    pub product_ring: String,
    pub unit_tuples: Option<u128>,
    pub verdict: Verdict,
}

/// `M = lcm(m_1, ..., m_j)`, checked against the units of `R_1 x ... x R_j`.
pub fn euler_lcm(entries: &[(Ring, CncChain)]) -> Result<EulerReport> {
    if entries.is_empty() {
        return Err(Error::PreconditionFailed("need at least one ring".into()));
    }
    let mut parts = Vec::with_capacity(entries.len());
    for (ring, chain) in entries {
        if !chain.is_verified() {
            return Err(Error::UnverifiedChain);
        }
        if chain.ring() != ring {
            return Err(Error::DescriptorMismatch {
                left: ring.to_string(),
                right: chain.ring().to_string(),
            });
        }
        let q = chain.first().quotient_ring()?;
        parts.push(q.unit_count()? * chain.characteristic_product());
    }
    let m = parts.iter().copied().fold(1, arith::lcm);
    let rings: Vec<Ring> = entries.iter().map(|(r, _)| r.clone()).collect();
    let product = Ring::direct_product(&rings)?;
    let (unit_tuples, verdict) = match product.unit_count() {
        Ok(n) => {
            let ok = exponent_member(&product, m)?;
            (
                Some(n),
                if ok {
                    Verdict::Verified
                } else {
                    Verdict::Failed
                },
            )
        }
        Err(Error::CapExceeded { .. }) => (None, Verdict::Skipped),
        Err(e) => return Err(e),
    };
    Ok(EulerReport {
        rings: rings.iter().map(Ring::to_string).collect(),
        product: parts.iter().product(),
        parts,
        m,
        product_ring: product.to_string(),
        unit_tuples,
        verdict,
    })
}

/// Checks `(1+n)^p - 1` lies in `{p n r : r in R}` by scanning `r`.
///
/// Requires `p` prime, `N` nilpotent of index at most `p`, and `n` in `N`.
pub fn check_lifting_identity(
    ring: &Ring,
    ideal: &Ideal,
    p: u128,
    n: &RingElement,
) -> Result<bool> {
    if !arith::is_prime(p) {
        return Err(Error::PreconditionFailed(format!("{p} is not prime")));
    }
    if ideal.owner() != ring || n.ring() != ring {
        return Err(Error::DescriptorMismatch {
            left: ring.to_string(),
            right: ideal.owner().to_string(),
        });
    }
    if !ideal.contains(n) {
        return Err(Error::PreconditionFailed(format!("{n} is not in {ideal}")));
    }
    let t = match nilpotency_index_in(ideal, &Ideal::zero(ring))? {
        Some(t) => t,
        None if ideal.is_zero() => 2,
        None => return Err(Error::NotNilpotent(ideal.to_string())),
    };
    if t as u128 > p {
        return Err(Error::PreconditionFailed(format!(
            "nilpotency index {t} exceeds p = {p}"
        )));
    }
    let one = ring.one();
    let lhs = one.add(n)?.pow(p).sub(&one)?;
    let pn = n.scale(p);
    for r in ring.elements()? {
        if pn.mul(&r)? == lhs {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Orders of the members of a coset `f + N_1` against the exponent
/// `w s_1 ... s_{k-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosetReport {
    pub exponent: u128,
    /// Order of `f + N_1` in `R/N_1`.
    pub class_order: u128,
    /// Each member with its multiplicative order (`None` for non-units).
    pub members: Vec<(RingElement, Option<u128>)>,
    /// Every member satisfies `x^exponent = 1`.
    pub all_satisfy: bool,
    /// When `w` is the class order: every member order divides the exponent.
    pub orders_divide: Option<bool>,
}

impl CosetReport {
    pub fn orders(&self) -> Vec<u128> {
        let mut v: Vec<u128> = self.members.iter().filter_map(|(_, o)| *o).collect();
        v.sort_unstable();
        v
    }
}

/// Enumerates `f + N_1` and checks `x^(w s_1...s_{k-1}) = 1` for each member.
pub fn residue_class_exponent(
    ring: &Ring,
    chain: &CncChain,
    f: &RingElement,
    w: u128,
) -> Result<CosetReport> {
    if !chain.is_verified() {
        return Err(Error::UnverifiedChain);
    }
    if chain.ring() != ring || f.ring() != ring {
        return Err(Error::DescriptorMismatch {
            left: ring.to_string(),
            right: f.ring().to_string(),
        });
    }
    let first = chain.first();
    let one = ring.one();
    if !first.contains(&f.pow(w).sub(&one)?) {
        return Err(Error::PreconditionFailed(format!(
            "({f} + N_1)^{w} is not 1 + N_1"
        )));
    }
    let quotient = first.quotient_ring()?;
    let class = quotient.project(f)?;
    let class_order = class
        .mult_order()?
        .ok_or_else(|| Error::PreconditionFailed(format!("{f} + N_1 is not a unit")))?;
    let exponent = w * chain.characteristic_product();
    let mut members = Vec::with_capacity(first.len());
    let mut all_satisfy = true;
    for n in first.elements() {
        let x = f.add(&n)?;
        all_satisfy &= x.pow(exponent).is_one();
        let order = x.mult_order()?;
        members.push((x, order));
    }
    members.sort_by(|a, b| a.0.coords().cmp(b.0.coords()));
    let orders_divide = (w == class_order).then(|| {
        members
            .iter()
            .all(|(_, o)| o.is_some_and(|o| exponent.is_multiple_of(o)))
    });
    Ok(CosetReport {
        exponent,
        class_order,
        members,
        all_satisfy,
        orders_divide,
    })
}
