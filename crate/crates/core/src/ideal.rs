//! Two-sided ideals of finite rings, held as fully enumerated element sets.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::{Coords, Ring, RingElement};

#[derive(Clone)]
pub struct Ideal {
    owner: Ring,
    generators: Vec<Coords>,
    elements: Arc<BTreeSet<Coords>>,
}

impl PartialEq for Ideal {
    fn eq(&self, other: &Self) -> bool {
        self.owner == other.owner && self.elements == other.elements
    }
}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Ideal({self} in {}, {} elements)",
            self.owner,
            self.len()
        )
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "{{0}}");
        }
        let gens: Vec<String> = self.generators().iter().map(|g| g.to_string()).collect();
        write!(f, "<{}>", gens.join(","))
    }
}

/// Adds `x` to the additive subgroup `set`, closing under addition.
/// Returns false when `x` was already present.
fn join(ring: &Ring, set: &mut HashSet<Coords>, x: &Coords, cap: u64) -> Result<bool> {
    if set.contains(x) {
        return Ok(false);
    }
    let snapshot: Vec<Coords> = set.iter().cloned().collect();
    let mut multiple = x.clone();
    while !set.contains(&multiple) {
        for s in &snapshot {
            set.insert(ring.add_coords(s, &multiple));
        }
        if set.len() as u64 > cap {
            return Err(Error::CapExceeded {
                what: format!("ideal of {ring}"),
                needed: format!("more than {}", set.len()),
                cap,
            });
        }
        multiple = ring.add_coords(&multiple, x);
    }
    Ok(true)
}

/// Greedy additive generating set of a subgroup, scanning in order.
fn additive_basis<'a>(ring: &Ring, elements: impl Iterator<Item = &'a Coords>) -> Vec<Coords> {
    let mut span: HashSet<Coords> = HashSet::from([ring.zero_coords()]);
    let mut basis = Vec::new();
    for x in elements {
        if join(ring, &mut span, x, u64::MAX).expect("uncapped") {
            basis.push(x.clone());
        }
    }
    basis
}

impl Ideal {
    /// Smallest two-sided ideal containing `gens`.
    ///
    /// Worklist closure: every processed element is joined into the additive
    /// span, and its left and right products with the additive generators of
    /// the ring are queued.
    pub fn generated(ring: &Ring, gens: &[RingElement]) -> Result<Ideal> {
        for g in gens {
            if g.ring() != ring {
                return Err(Error::DescriptorMismatch {
                    left: ring.to_string(),
                    right: g.ring().to_string(),
                });
            }
        }
        let seeds: Vec<Coords> = gens.iter().map(|g| g.coords().to_vec()).collect();
        let elements = Self::close(ring, &seeds)?;
        let mut generators: Vec<Coords> = Vec::new();
        for g in seeds {
            if g.iter().any(|&c| c != 0) && !generators.contains(&g) {
                generators.push(g);
            }
        }
        Ok(Ideal {
            owner: ring.clone(),
            generators,
            elements: Arc::new(elements),
        })
    }

    fn close(ring: &Ring, seeds: &[Coords]) -> Result<BTreeSet<Coords>> {
        let ring_gens = ring.additive_generator_coords()?;
        let mut set: HashSet<Coords> = HashSet::from([ring.zero_coords()]);
        let mut queue: Vec<Coords> = seeds.to_vec();
        while let Some(x) = queue.pop() {
            if join(ring, &mut set, &x, ring.cap())? {
                for a in ring_gens {
                    let left = ring.mul_coords(a, &x);
                    if !set.contains(&left) {
                        queue.push(left);
                    }
                    let right = ring.mul_coords(&x, a);
                    if !set.contains(&right) {
                        queue.push(right);
                    }
                }
            }
        }
        Ok(set.into_iter().collect())
    }

    pub fn zero(ring: &Ring) -> Ideal {
        Ideal {
            owner: ring.clone(),
            generators: Vec::new(),
            elements: Arc::new(BTreeSet::from([ring.zero_coords()])),
        }
    }

    /// Wraps an element set that the caller knows to be an ideal. The
    /// generators are taken to be a greedy additive basis of the set.
    pub(crate) fn from_closed_set(ring: &Ring, elements: BTreeSet<Coords>) -> Ideal {
        let generators = additive_basis(ring, elements.iter());
        Ideal {
            owner: ring.clone(),
            generators,
            elements: Arc::new(elements),
        }
    }

    /// Same element set, re-owned by an equal ring (used when a ring is
    /// rebuilt with a different cap).
    pub(crate) fn rehome(&self, ring: &Ring) -> Ideal {
        Ideal {
            owner: ring.clone(),
            generators: self.generators.clone(),
            elements: self.elements.clone(),
        }
    }

    pub fn owner(&self) -> &Ring {
        &self.owner
    }

    /// Generators as supplied (zero and duplicates dropped), or an additive
    /// basis for ideals produced by products and lifts.
    pub fn generators(&self) -> Vec<RingElement> {
        let gens = if self.generators.is_empty() && !self.is_zero() {
            additive_basis(&self.owner, self.elements.iter())
        } else {
            self.generators.clone()
        };
        gens.into_iter()
            .map(|c| self.owner.element_from_coords(c).expect("canonical"))
            .collect()
    }

    /// A small set whose additive span is the ideal.
    pub fn additive_basis(&self) -> Vec<RingElement> {
        additive_basis(&self.owner, self.elements.iter())
            .into_iter()
            .map(|c| self.owner.element_from_coords(c).expect("canonical"))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.elements.len() == 1
    }

    pub(crate) fn coords(&self) -> impl Iterator<Item = &Coords> {
        self.elements.iter()
    }

    pub(crate) fn contains_coords(&self, c: &[u64]) -> bool {
        self.elements.contains(c)
    }

    pub fn contains(&self, x: &RingElement) -> bool {
        x.ring() == &self.owner && self.contains_coords(x.coords())
    }

    /// Elements in enumeration (lexicographic) order.
    pub fn elements(&self) -> Vec<RingElement> {
        self.elements
            .iter()
            .map(|c| {
                self.owner
                    .element_from_coords(c.clone())
                    .expect("canonical")
            })
            .collect()
    }

    pub fn is_subset(&self, other: &Ideal) -> bool {
        self.owner == other.owner && self.elements.is_subset(&other.elements)
    }

    /// First element of `self` missing from `other`.
    pub fn first_outside(&self, other: &Ideal) -> Option<RingElement> {
        self.elements
            .iter()
            .find(|c| !other.contains_coords(c))
            .map(|c| {
                self.owner
                    .element_from_coords(c.clone())
                    .expect("canonical")
            })
    }

    fn same_owner(&self, other: &Ideal) -> Result<()> {
        if self.owner != other.owner {
            return Err(Error::DescriptorMismatch {
                left: self.owner.to_string(),
                right: other.owner.to_string(),
            });
        }
        Ok(())
    }

    /// Ideal generated by all products `x * y`, `x` in `self`, `y` in `other`.
    pub fn product(&self, other: &Ideal) -> Result<Ideal> {
        self.same_owner(other)?;
        let ring = &self.owner;
        let left = additive_basis(ring, self.elements.iter());
        let right = additive_basis(ring, other.elements.iter());
        let seeds: Vec<Coords> = left
            .iter()
            .flat_map(|a| right.iter().map(move |b| ring.mul_coords(a, b)))
            .collect();
        let elements = Self::close(ring, &seeds)?;
        Ok(Ideal::from_closed_set(ring, elements))
    }

    /// `self^t` for `t >= 1`.
    pub fn power(&self, t: u32) -> Result<Ideal> {
        let mut acc = self.clone();
        for _ in 1..t.max(1) {
            acc = acc.product(self)?;
        }
        Ok(acc)
    }

    /// The quotient ring `owner / self`.
    pub fn quotient_ring(&self) -> Result<Ring> {
        Ring::quotient(&self.owner, self)
    }

    /// Re-checks closure under subtraction and two-sided multiplication by
    /// every ring element. Exhaustive; for tests and audits.
    pub fn is_closed(&self) -> Result<bool> {
        let ring = &self.owner;
        let all = ring.elements()?;
        for x in self.elements.iter() {
            for y in self.elements.iter() {
                if !self.contains_coords(&ring.sub_coords(x, y)) {
                    return Ok(false);
                }
            }
            for r in &all {
                if !self.contains_coords(&ring.mul_coords(r.coords(), x))
                    || !self.contains_coords(&ring.mul_coords(x, r.coords()))
                {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(ring: &Ring, xs: &[i64]) -> Vec<RingElement> {
        xs.iter().map(|&x| ring.element(&[x]).unwrap()).collect()
    }

    fn values(i: &Ideal) -> Vec<u64> {
        i.elements().iter().map(|e| e.coords()[0]).collect()
    }

    #[test]
    fn principal_ideals_of_modular_rings() {
        let z25 = Ring::modular(25).unwrap();
        let i = Ideal::generated(&z25, &ints(&z25, &[5])).unwrap();
        assert_eq!(values(&i), vec![0, 5, 10, 15, 20]);

        let z12 = Ring::modular(12).unwrap();
        let i = Ideal::generated(&z12, &ints(&z12, &[4])).unwrap();
        assert_eq!(values(&i), vec![0, 4, 8]);
        // 4 and 6 generate 2.
        let i = Ideal::generated(&z12, &ints(&z12, &[4, 6])).unwrap();
        assert_eq!(i.len(), 6);
    }

    #[test]
    fn empty_and_zero_generators_give_zero_ideal() {
        let z12 = Ring::modular(12).unwrap();
        assert!(Ideal::generated(&z12, &[]).unwrap().is_zero());
        assert!(Ideal::generated(&z12, &ints(&z12, &[0])).unwrap().is_zero());
        assert_eq!(Ideal::zero(&z12).to_string(), "{0}");
    }

    #[test]
    fn products() {
        let z25 = Ring::modular(25).unwrap();
        let n = Ideal::generated(&z25, &ints(&z25, &[5])).unwrap();
        assert!(n.product(&n).unwrap().is_zero());
        assert!(n.product(&Ideal::zero(&z25)).unwrap().is_zero());

        let z8 = Ring::modular(8).unwrap();
        let two = Ideal::generated(&z8, &ints(&z8, &[2])).unwrap();
        let four = Ideal::generated(&z8, &ints(&z8, &[4])).unwrap();
        let sq = two.product(&two).unwrap();
        assert_eq!(sq, four);
        assert_eq!(sq.to_string(), "<4>");
        assert!(two.power(3).unwrap().is_zero());
    }

    #[test]
    fn closure_in_a_noncommutative_ring() {
        let m = Ring::matrix(&Ring::modular(2).unwrap(), 2).unwrap();
        let e11 = m.element(&[1, 0, 0, 0]).unwrap();
        // M2(F2) is simple: any nonzero element generates everything.
        let i = Ideal::generated(&m, &[e11]).unwrap();
        assert_eq!(i.len(), 16);
        assert!(i.is_closed().unwrap());
    }

    #[test]
    fn mismatched_owner_is_rejected() {
        let z4 = Ring::modular(4).unwrap();
        let z8 = Ring::modular(8).unwrap();
        let g = z8.element(&[2]).unwrap();
        assert!(matches!(
            Ideal::generated(&z4, &[g]),
            Err(Error::DescriptorMismatch { .. })
        ));
    }
}
