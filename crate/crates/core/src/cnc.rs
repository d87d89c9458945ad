//! Descending ideal chains with nilpotency and characteristic conditions.
//!
//! A chain `N_1 > N_2 > ... > N_k = {0}` of ideals of `R` qualifies when
//! every inclusion is strict, `N_i^t_i` lies in `N_{i+1}` for some `t_i >= 2`,
//! and `s_i N_i` lies in `N_{i+1}` for some `s_i >= 1` whose prime factors
//! are all at least `t_i`. The minimal such `t_i` and `s_i` are recorded.

use std::fmt;

use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::ring::{Ring, RingElement};

/// Least `t >= 2` with `inner^t` contained in `outer`, or `None`.
///
/// Powers of an ideal decrease weakly, so the search stops as soon as two
/// consecutive powers agree.
pub fn nilpotency_index_in(inner: &Ideal, outer: &Ideal) -> Result<Option<u32>> {
    Ok(nilpotency_search(inner, outer)?.ok())
}

/// `Ok(t)` on success, `Err((stable_power, exponent))` when the powers of
/// `inner` stall outside `outer`.
fn nilpotency_search(
    inner: &Ideal,
    outer: &Ideal,
) -> Result<std::result::Result<u32, (Ideal, u32)>> {
    let mut prev = inner.clone();
    let mut t = 2u32;
    loop {
        let power = prev.product(inner)?;
        if power.is_subset(outer) {
            return Ok(Ok(t));
        }
        if power == prev {
            return Ok(Err((power, t - 1)));
        }
        prev = power;
        t += 1;
    }
}

/// Additive order of `x` modulo `outer`: least `m >= 1` with `m x` in `outer`.
fn relative_order(x: &RingElement, outer: &Ideal) -> u128 {
    let mut m = 1u128;
    let mut acc = x.clone();
    while !outer.contains(&acc) {
        acc = acc.add(x).expect("same ring");
        m += 1;
    }
    m
}

/// Least `s` with `s * inner` inside `outer`, ignoring the prime condition.
fn annihilator_generator(inner: &Ideal, outer: &Ideal) -> u128 {
    inner
        .additive_basis()
        .iter()
        .map(|b| relative_order(b, outer))
        .fold(1, arith::lcm)
}

/// Least `s >= 1` with `s * inner` inside `outer` and every prime factor of
/// `s` at least `t`. The integers killing `inner` modulo `outer` are the
/// multiples of one generator, so the answer is that generator or nothing.
pub fn characteristic_in(inner: &Ideal, outer: &Ideal, t: u32) -> Result<Option<u128>> {
    if inner.owner() != outer.owner() {
        return Err(Error::DescriptorMismatch {
            left: inner.owner().to_string(),
            right: outer.owner().to_string(),
        });
    }
    let s = annihilator_generator(inner, outer);
    let ok = arith::prime_factors(s).iter().all(|&q| q >= t as u128);
    Ok(ok.then_some(s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CncCondition {
    Chain,
    Nilpotency,
    Characteristic,
}

impl fmt::Display for CncCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CncCondition::Chain => "chain",
            CncCondition::Nilpotency => "nilpotency",
            CncCondition::Characteristic => "characteristic",
        })
    }
}

/// Evidence for a failed condition.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// `N_1` contains the identity, so it is the whole ring.
    WholeRing { element: RingElement },
    /// `element` lies in `N_{i+1}` but not in `N_i`.
    NotContained { element: RingElement },
    /// `N_i = N_{i+1}`.
    EqualIdeals,
    /// The last ideal has a nonzero element.
    NonZeroTerminal { element: RingElement },
    /// `N_i^power = N_i^(power+1)` and `element` of that power is not in `N_{i+1}`.
    PowerStalls { power: u32, element: RingElement },
    /// The additive order of `element` modulo `N_{i+1}` is `order`, which is
    /// divisible by `prime < t`; every admissible `s` would be too.
    SmallPrime {
        element: RingElement,
        order: u128,
        prime: u128,
        nilpotency_index: u32,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::WholeRing { element } => write!(f, "{element} is in the first ideal"),
            Witness::NotContained { element } => {
                write!(f, "{element} is in the next ideal but not this one")
            }
            Witness::EqualIdeals => write!(f, "consecutive ideals are equal"),
            Witness::NonZeroTerminal { element } => {
                write!(f, "last ideal contains nonzero {element}")
            }
            Witness::PowerStalls { power, element } => write!(
                f,
                "powers stabilise at exponent {power}; {element} stays outside the next ideal"
            ),
            Witness::SmallPrime {
                element,
                order,
                prime,
                nilpotency_index,
            } => write!(
                f,
                "{element} has additive order {order} modulo the next ideal; prime {prime} < t = {nilpotency_index}"
            ),
        }
    }
}

/// First violated condition of a candidate chain.
#[derive(Debug, Clone, PartialEq)]
pub struct CncFailure {
    pub condition: CncCondition,
    /// 1-based index `i` of the step `N_i -> N_{i+1}` (or of `N_k` itself).
    pub step: usize,
    pub witness: Witness,
}

impl CncFailure {
    /// Independently confirms that the witness shows a real violation.
    pub fn recheck(&self, ideals: &[Ideal]) -> Result<bool> {
        let i = self.step;
        let at = |j: usize| ideals.get(j.wrapping_sub(1));
        Ok(match &self.witness {
            Witness::WholeRing { element } => {
                element.is_one() && at(1).is_some_and(|n| n.contains(element))
            }
            Witness::NotContained { element } => match (at(i), at(i + 1)) {
                (Some(a), Some(b)) => b.contains(element) && !a.contains(element),
                _ => false,
            },
            Witness::EqualIdeals => match (at(i), at(i + 1)) {
                (Some(a), Some(b)) => a == b,
                _ => false,
            },
            Witness::NonZeroTerminal { element } => {
                !element.is_zero() && at(i).is_some_and(|n| n.contains(element))
            }
            Witness::PowerStalls { power, element } => match (at(i), at(i + 1)) {
                (Some(a), Some(b)) => {
                    let p = a.power(*power)?;
                    let next = p.product(a)?;
                    p == next && p.contains(element) && !b.contains(element)
                }
                _ => false,
            },
            Witness::SmallPrime {
                element,
                order,
                prime,
                nilpotency_index,
            } => match (at(i), at(i + 1)) {
                (Some(a), Some(b)) => {
                    let t_ok = nilpotency_index_in(a, b)? == Some(*nilpotency_index);
                    a.contains(element)
                        && t_ok
                        && *prime < *nilpotency_index as u128
                        && arith::is_prime(*prime)
                        && order % prime == 0
                        && b.contains(&element.scale(*order))
                        && !b.contains(&element.scale(order / prime))
                }
                _ => false,
            },
        })
    }
}

impl fmt::Display for CncFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} condition fails at step {}: {}",
            self.condition, self.step, self.witness
        )
    }
}

/// A chain of ideals together with its nilpotency indexes and characteristics.
#[derive(Debug, Clone, PartialEq)]
pub struct CncChain {
    ring: Ring,
    ideals: Vec<Ideal>,
    nilpotency_indexes: Vec<u32>,
    characteristics: Vec<u128>,
    verified: bool,
}

impl CncChain {
    /// A chain that has not been through [`verify_cnc`].
    pub fn unverified(ring: &Ring, ideals: Vec<Ideal>) -> CncChain {
        CncChain {
            ring: ring.clone(),
            ideals,
            nilpotency_indexes: Vec::new(),
            characteristics: Vec::new(),
            verified: false,
        }
    }

    /// The length-one chain `({0})`, used for rings with no nilpotent part.
    pub fn trivial(ring: &Ring) -> CncChain {
        CncChain {
            ring: ring.clone(),
            ideals: vec![Ideal::zero(ring)],
            nilpotency_indexes: Vec::new(),
            characteristics: Vec::new(),
            verified: true,
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn ideals(&self) -> &[Ideal] {
        &self.ideals
    }

    pub fn first(&self) -> &Ideal {
        &self.ideals[0]
    }

    /// Number of ideals `k`, the zero ideal included.
    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    pub fn nilpotency_indexes(&self) -> &[u32] {
        &self.nilpotency_indexes
    }

    pub fn characteristics(&self) -> &[u128] {
        &self.characteristics
    }

    /// `s_1 s_2 ... s_{k-1}`; 1 for the length-one chain.
    pub fn characteristic_product(&self) -> u128 {
        self.characteristics.iter().product()
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }
}

/// Outcome of checking a candidate chain.
#[derive(Debug, Clone, PartialEq)]
pub enum CncVerdict {
    Verified(CncChain),
    Failed(CncFailure),
}

impl CncVerdict {
    pub fn chain(&self) -> Option<&CncChain> {
        match self {
            CncVerdict::Verified(c) => Some(c),
            CncVerdict::Failed(_) => None,
        }
    }

    pub fn failure(&self) -> Option<&CncFailure> {
        match self {
            CncVerdict::Verified(_) => None,
            CncVerdict::Failed(f) => Some(f),
        }
    }

    /// The verified chain, or `PreconditionFailed` carrying the failure.
    pub fn into_chain(self) -> Result<CncChain> {
        match self {
            CncVerdict::Verified(c) => Ok(c),
            CncVerdict::Failed(f) => Err(Error::PreconditionFailed(f.to_string())),
        }
    }
}

/// Checks the chain, nilpotency and characteristic conditions in that order
/// and returns the first violation, or the verified chain.
pub fn verify_cnc(ring: &Ring, ideals: &[Ideal]) -> Result<CncVerdict> {
    if ideals.is_empty() {
        return Err(Error::PreconditionFailed(
            "chain needs at least one ideal".into(),
        ));
    }
    for n in ideals {
        if n.owner() != ring {
            return Err(Error::DescriptorMismatch {
                left: ring.to_string(),
                right: n.owner().to_string(),
            });
        }
    }
    let fail = |condition, step, witness| {
        Ok(CncVerdict::Failed(CncFailure {
            condition,
            step,
            witness,
        }))
    };

    let one = ring.one();
    if ideals[0].contains(&one) {
        return fail(CncCondition::Chain, 1, Witness::WholeRing { element: one });
    }
    for (i, pair) in ideals.windows(2).enumerate() {
        if let Some(x) = pair[1].first_outside(&pair[0]) {
            return fail(
                CncCondition::Chain,
                i + 1,
                Witness::NotContained { element: x },
            );
        }
        if pair[0] == pair[1] {
            return fail(CncCondition::Chain, i + 1, Witness::EqualIdeals);
        }
    }
    let last = ideals.last().expect("nonempty");
    if !last.is_zero() {
        let x = last.first_outside(&Ideal::zero(ring)).expect("nonzero");
        return fail(
            CncCondition::Chain,
            ideals.len(),
            Witness::NonZeroTerminal { element: x },
        );
    }

    let mut ts = Vec::new();
    let mut ss = Vec::new();
    for (i, pair) in ideals.windows(2).enumerate() {
        let t = match nilpotency_search(&pair[0], &pair[1])? {
            Ok(t) => t,
            Err((stable, power)) => {
                let x = stable.first_outside(&pair[1]).expect("not contained");
                return fail(
                    CncCondition::Nilpotency,
                    i + 1,
                    Witness::PowerStalls { power, element: x },
                );
            }
        };
        match characteristic_in(&pair[0], &pair[1], t)? {
            Some(s) => {
                ts.push(t);
                ss.push(s);
            }
            None => {
                let witness = small_prime_witness(&pair[0], &pair[1], t);
                return fail(CncCondition::Characteristic, i + 1, witness);
            }
        }
    }
    Ok(CncVerdict::Verified(CncChain {
        ring: ring.clone(),
        ideals: ideals.to_vec(),
        nilpotency_indexes: ts,
        characteristics: ss,
        verified: true,
    }))
}

fn small_prime_witness(inner: &Ideal, outer: &Ideal, t: u32) -> Witness {
    for b in inner.additive_basis() {
        let order = relative_order(&b, outer);
        if let Some(&q) = arith::prime_factors(order).iter().find(|&&q| q < t as u128) {
            return Witness::SmallPrime {
                element: b,
                order,
                prime: q,
                nilpotency_index: t,
            };
        }
    }
    unreachable!("characteristic_in rejected the step, so some generator has a small prime")
}

/// Builds `N > N^2 > ... > N^k = {0}` for `N` generated by `gens` and
/// verifies it.
pub fn power_chain(ring: &Ring, gens: &[RingElement]) -> Result<CncVerdict> {
    let n = Ideal::generated(ring, gens)?;
    let mut ideals = vec![n.clone()];
    let mut current = n.clone();
    while !current.is_zero() {
        let next = current.product(&n)?;
        if next == current {
            return Err(Error::NotNilpotent(n.to_string()));
        }
        ideals.push(next.clone());
        current = next;
    }
    verify_cnc(ring, &ideals)
}

/// `R / I` as a quotient ring descriptor.
pub fn quotient_ring(ring: &Ring, ideal: &Ideal) -> Result<Ring> {
    Ring::quotient(ring, ideal)
}
