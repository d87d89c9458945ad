//! Rings built from smaller ones, and chains lifted along the construction.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith;
use crate::cnc::{power_chain, verify_cnc, CncChain};
use crate::error::{Error, Result};
use crate::group::GroupDescriptor;
use crate::ideal::Ideal;
use crate::ring::{Coords, Ring, RingElement, RingKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Matrix(usize),
    Group(String),
    Polynomial,
}

/// A chain over a base ring together with its image over a constructed ring.
#[derive(Debug, Clone)]
pub struct LiftedChain {
    pub base_chain: CncChain,
    pub lifted: CncChain,
    pub construction: Construction,
}

impl LiftedChain {
    /// Lifted `t_i` and `s_i` equal the base ones, step for step.
    pub fn parameters_match(&self) -> bool {
        self.base_chain.nilpotency_indexes() == self.lifted.nilpotency_indexes()
            && self.base_chain.characteristics() == self.lifted.characteristics()
    }
}

/// Ideal of a block ring whose every block lies in `ideal`.
fn blockwise_ideal(ring: &Ring, ideal: &Ideal, blocks: usize) -> Result<Ideal> {
    let size = (ideal.len() as u128).checked_pow(blocks as u32);
    match size {
        Some(n) if n <= ring.cap() as u128 => {}
        _ => {
            return Err(Error::CapExceeded {
                what: format!("lift of {ideal} to {ring}"),
                needed: size.map_or("more than 2^128".into(), |n| n.to_string()),
                cap: ring.cap(),
            })
        }
    }
    let parts: Vec<Coords> = ideal
        .elements()
        .iter()
        .map(|e| e.coords().to_vec())
        .collect();
    let mut acc: Vec<Coords> = vec![Vec::new()];
    for _ in 0..blocks {
        acc = acc
            .iter()
            .flat_map(|prefix| {
                parts.iter().map(move |p| {
                    let mut c = prefix.clone();
                    c.extend_from_slice(p);
                    c
                })
            })
            .collect();
    }
    let set: BTreeSet<Coords> = acc.into_iter().collect();
    Ok(Ideal::from_closed_set(ring, set))
}

fn lift(
    chain: &CncChain,
    target: Ring,
    blocks: usize,
    construction: Construction,
) -> Result<LiftedChain> {
    if !chain.is_verified() {
        return Err(Error::UnverifiedChain);
    }
    let ideals = chain
        .ideals()
        .iter()
        .map(|n| blockwise_ideal(&target, n, blocks))
        .collect::<Result<Vec<_>>>()?;
    let lifted = verify_cnc(&target, &ideals)?.into_chain()?;
    Ok(LiftedChain {
        base_chain: chain.clone(),
        lifted,
        construction,
    })
}

/// `{M_n(N_1), ..., M_n(N_k)}` over `M_n(R)`, re-verified.
pub fn lift_chain_matrix(chain: &CncChain, n: usize) -> Result<LiftedChain> {
    let target = Ring::matrix(chain.ring(), n)?;
    lift(chain, target, n * n, Construction::Matrix(n))
}

/// `{N_1 G, ..., N_k G}` over `RG`, re-verified.
pub fn lift_chain_group(chain: &CncChain, group: &GroupDescriptor) -> Result<LiftedChain> {
    let target = Ring::group_ring(chain.ring(), group.clone())?;
    lift(
        chain,
        target,
        group.order(),
        Construction::Group(group.to_string()),
    )
}

/// `R_1 x ... x R_j` with componentwise arithmetic.
pub fn direct_product(factors: &[Ring]) -> Result<Ring> {
    Ring::direct_product(factors)
}

/// A Galois ring `Z/p^k[x]/(q)` with its chain `pR > p^2 R > ... > 0`.
#[derive(Debug, Clone)]
pub struct GaloisRing {
    pub ring: Ring,
    pub chain: CncChain,
    pub p: u64,
    pub k: u32,
    /// Degree `r` of `q`.
    pub degree: usize,
    /// `p^r`.
    pub residue_field_size: u128,
    /// `(p^r - 1) p^(k-1)`.
    pub exponent_bound: u128,
}

/// Builds `Z/p^k[x]/(q)`; `q` lists coefficients from the constant term up
/// and must be monic and irreducible modulo `p`.
pub fn galois_ring(p: u64, k: u32, q: &[i64]) -> Result<GaloisRing> {
    if !arith::is_prime(p as u128) {
        return Err(Error::InvalidDescriptor(format!("{p} is not prime")));
    }
    if k == 0 {
        return Err(Error::InvalidDescriptor("k must be >= 1".into()));
    }
    let modulus = p
        .checked_pow(k)
        .ok_or_else(|| Error::InvalidDescriptor(format!("{p}^{k} overflows")))?;
    let base = Ring::modular(modulus)?;
    let ring = Ring::poly_quotient(&base, "x", q)?;
    let RingKind::PolyQuotient { modulus: q_red, .. } = ring.kind() else {
        unreachable!()
    };
    let q_mod_p: Vec<u64> = q_red.iter().map(|&c| c % p).collect();
    if !is_irreducible_mod_p(&q_mod_p, p) {
        return Err(Error::ReducibleModulus(
            crate::ring::format_poly_descending(&q_mod_p, "x"),
            p,
        ));
    }
    let degree = q_red.len() - 1;
    let chain = power_chain(&ring, &[ring.element(&[p as i64])?])?.into_chain()?;
    let residue_field_size = (p as u128).pow(degree as u32);
    Ok(GaloisRing {
        ring,
        chain,
        p,
        k,
        degree,
        residue_field_size,
        exponent_bound: (residue_field_size - 1) * (p as u128).pow(k - 1),
    })
}

/// Remainder of `a` modulo the monic `b` over `F_p` (ascending coefficients).
fn poly_rem_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let d = b.len() - 1;
    while r.len() > d {
        let lead = r.pop().expect("nonempty") % p;
        if lead == 0 {
            continue;
        }
        let off = r.len() - d;
        for (j, &bj) in b[..d].iter().enumerate() {
            r[off + j] = (r[off + j] + p - lead * bj % p) % p;
        }
    }
    r
}

/// Exhaustive check over every monic divisor candidate of degree at most
/// `deg(q)/2`.
pub fn is_irreducible_mod_p(q: &[u64], p: u64) -> bool {
    let mut q: Vec<u64> = q.iter().map(|&c| c % p).collect();
    while q.last() == Some(&0) {
        q.pop();
    }
    let r = q.len().saturating_sub(1);
    if r == 0 {
        return false;
    }
    if q[r] != 1 {
        let inv = (1..p).find(|&i| q[r] * i % p == 1).expect("field");
        q.iter_mut().for_each(|c| *c = *c * inv % p);
    }
    for d in 1..=r / 2 {
        let count = (p as u128).pow(d as u32);
        for idx in 0..count {
            let mut cand = Vec::with_capacity(d + 1);
            let mut v = idx;
            for _ in 0..d {
                cand.push((v % p as u128) as u64);
                v /= p as u128;
            }
            cand.push(1);
            if poly_rem_mod_p(&q, &cand, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Outcome of checking random units of `Z/p^k[x]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleReport {
    pub p: u64,
    pub k: u32,
    pub degree_bound: usize,
    pub sample_count: usize,
    pub seed: u64,
    pub exponent: u128,
    /// FNV-1a digest of the sampled coefficient vectors.
    pub digest: String,
    /// Samples with `g^exponent != 1` (or without an inverse).
    pub failures: Vec<String>,
}

fn fnv1a(data: impl IntoIterator<Item = u64>) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for word in data {
        for byte in word.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

/// Draws units `u + p h(x)` of `Z/p^k[x]` and checks `g^((p-1) p^(k-1)) = 1`.
pub fn sample_polynomial_units(
    p: u64,
    k: u32,
    degree_bound: usize,
    count: usize,
    seed: u64,
) -> Result<SampleReport> {
    if !arith::is_prime(p as u128) || k == 0 {
        return Err(Error::InvalidDescriptor(format!(
            "need p prime and k >= 1, got p={p} k={k}"
        )));
    }
    let modulus = p
        .checked_pow(k)
        .ok_or_else(|| Error::InvalidDescriptor(format!("{p}^{k} overflows")))?;
    let base = Ring::modular(modulus)?;
    let poly = Ring::polynomial(&base, "x")?;
    let nilradical = Ideal::generated(&base, &[base.element(&[p as i64])?])?;
    let exponent = (p as u128 - 1) * (p as u128).pow(k - 1);
    let base_units: Vec<u64> = (0..modulus).filter(|v| v % p != 0).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(count);
    let mut failures = Vec::new();
    for _ in 0..count {
        let mut coeffs = Vec::with_capacity(degree_bound + 1);
        coeffs.push(base_units[rng.gen_range(0..base_units.len())] as i64);
        for _ in 0..degree_bound {
            coeffs.push((p * rng.gen_range(0..modulus / p)) as i64);
        }
        let g = poly.element(&coeffs)?;
        let has_inverse = polynomial_unit_inverse(&g, &nilradical)?.is_some();
        if !has_inverse || !g.pow(exponent).is_one() {
            failures.push(g.to_string());
        }
        samples.push(g);
    }
    let digest =
        fnv1a(samples.iter().flat_map(|g| {
            std::iter::once(g.coords().len() as u64).chain(g.coords().iter().copied())
        }));
    Ok(SampleReport {
        p,
        k,
        degree_bound,
        sample_count: count,
        seed,
        exponent,
        digest: format!("{digest:016x}"),
        failures,
    })
}

/// Unit test for `R[x]` by structure: the constant term must be a unit of
/// `R` and every other coefficient must lie in `nilradical`. Returns the
/// inverse `u^-1 (1 - a + a^2 - ...)` with `a = u^-1 (g - u)` nilpotent.
pub fn polynomial_unit_inverse(g: &RingElement, nilradical: &Ideal) -> Result<Option<RingElement>> {
    let ring = g.ring();
    let RingKind::PolynomialRing { base, .. } = ring.kind() else {
        return Err(Error::InvalidDescriptor(format!(
            "{ring} is not a polynomial ring"
        )));
    };
    if nilradical.owner() != base {
        return Err(Error::DescriptorMismatch {
            left: base.to_string(),
            right: nilradical.owner().to_string(),
        });
    }
    let coeffs = g.coords();
    if coeffs.is_empty() {
        return Ok(None);
    }
    for &c in &coeffs[1..] {
        if !nilradical.contains(&base.element(&[c as i64])?) {
            return Ok(None);
        }
    }
    let Some(u_inv) = base.element(&[coeffs[0] as i64])?.inverse()? else {
        return Ok(None);
    };
    let u_inv_poly = ring.element(&[u_inv.coords()[0] as i64])?;
    let a = u_inv_poly.mul(&g.sub(&ring.element(&[coeffs[0] as i64])?)?)?;
    let mut sum = ring.one();
    let mut term = ring.one();
    let mut sign_neg = true;
    loop {
        term = term.mul(&a)?;
        if term.is_zero() {
            break;
        }
        sum = if sign_neg {
            sum.sub(&term)?
        } else {
            sum.add(&term)?
        };
        sign_neg = !sign_neg;
    }
    let inv = u_inv_poly.mul(&sum)?;
    debug_assert!(inv.mul(g)?.is_one());
    Ok(Some(inv))
}
