use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A finite abelian group `C_{m1} x ... x C_{mr}`.
///
/// Elements are exponent tuples, indexed in mixed radix with the last
/// factor varying fastest, so index order is lexicographic on the tuples.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GroupDescriptor {
    factors: Vec<u64>,
}

impl GroupDescriptor {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidDescriptor(
                "group needs at least one cyclic factor".into(),
            ));
        }
        if factors.contains(&0) {
            return Err(Error::InvalidDescriptor(
                "cyclic orders must be at least 1".into(),
            ));
        }
        Ok(Self { factors })
    }

    pub fn cyclic(m: u64) -> Result<Self> {
        Self::new(vec![m])
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.factors.iter().map(|&m| m as usize).product()
    }

    pub fn tuple(&self, mut index: usize) -> Vec<u64> {
        let mut out = vec![0; self.factors.len()];
        for (slot, &m) in out.iter_mut().zip(&self.factors).rev() {
            *slot = (index % m as usize) as u64;
            index /= m as usize;
        }
        out
    }

    pub fn index(&self, tuple: &[u64]) -> usize {
        tuple
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&e, &m)| acc * m as usize + (e % m) as usize)
    }

    /// Index of the product (sum of exponent tuples) of two group elements.
    pub fn op(&self, a: usize, b: usize) -> usize {
        let (ta, tb) = (self.tuple(a), self.tuple(b));
        let sum: Vec<u64> = ta
            .iter()
            .zip(&tb)
            .zip(&self.factors)
            .map(|((&x, &y), &m)| (x + y) % m)
            .collect();
        self.index(&sum)
    }

    /// Full multiplication table, `table[a][b] = index(a * b)`.
    pub fn table(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        (0..n)
            .map(|a| (0..n).map(|b| self.op(a, b)).collect())
            .collect()
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "x")?;
            }
            write!(f, "C{m}")?;
        }
        Ok(())
    }
}
