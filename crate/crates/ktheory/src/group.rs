//! Finitely generated abelian groups in invariant-factor form.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

use crate::matrix::IntMatrix;
use crate::snf::smith_normal_form;

/// `Z^free_rank ⊕ Z/d_1 ⊕ ... ⊕ Z/d_m` with `d_i >= 2` and `d_i | d_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    free_rank: usize,
    invariant_factors: Vec<BigInt>,
}

impl AbelianGroup {
    /// Builds the canonical form of `Z^free_rank ⊕ ⊕ Z/c` over the given cyclic orders.
    /// Orders of absolute value 1 vanish; order 0 contributes a free summand.
    pub fn new(free_rank: usize, orders: Vec<BigInt>) -> Self {
        let mut free = free_rank;
        let mut torsion = Vec::new();
        for c in orders {
            if c.is_zero() {
                free += 1;
            } else if !c.abs().is_one() {
                torsion.push(c.abs());
            }
        }
        let n = torsion.len();
        let invariant_factors = if n <= 1 {
            torsion
        } else {
            let mut diag = IntMatrix::zeros(n, n);
            for (i, c) in torsion.into_iter().enumerate() {
                diag[(i, i)] = c;
            }
            smith_normal_form(&diag).diagonal().into_iter().filter(|d| !d.is_one()).collect()
        };
        Self { free_rank: free, invariant_factors }
    }

    pub fn trivial() -> Self {
        Self { free_rank: 0, invariant_factors: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        Self { free_rank: rank, invariant_factors: Vec::new() }
    }

    pub fn cyclic(order: u64) -> Self {
        Self::new(0, vec![BigInt::from(order)])
    }

    pub fn from_factors(free_rank: usize, factors: &[u64]) -> Self {
        Self::new(free_rank, factors.iter().map(|&f| BigInt::from(f)).collect())
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    pub fn torsion(&self) -> Self {
        Self { free_rank: 0, invariant_factors: self.invariant_factors.clone() }
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }
}

pub fn group_isomorphic(g: &AbelianGroup, h: &AbelianGroup) -> bool {
    g == h
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.invariant_factors.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GroupRepr {
    free_rank: usize,
    invariant_factors: Vec<String>,
    display: Option<String>,
}

impl Serialize for AbelianGroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GroupRepr {
            free_rank: self.free_rank,
            invariant_factors: self.invariant_factors.iter().map(|d| d.to_string()).collect(),
            display: Some(self.to_string()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AbelianGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = GroupRepr::deserialize(d)?;
        let orders = repr
            .invariant_factors
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(repr.free_rank, orders))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalization_merges_coprime_parts() {
        assert_eq!(AbelianGroup::from_factors(0, &[2, 3]), AbelianGroup::cyclic(6));
        assert_eq!(AbelianGroup::from_factors(0, &[6, 2]), AbelianGroup::from_factors(0, &[2, 6]));
        assert_eq!(AbelianGroup::from_factors(1, &[1, 0]), AbelianGroup::free(2));
    }

    #[test]
    fn isomorphism_comparator() {
        assert!(group_isomorphic(&AbelianGroup::free(1), &AbelianGroup::free(1)));
        assert!(!group_isomorphic(
            &AbelianGroup::from_factors(0, &[2, 2]),
            &AbelianGroup::cyclic(4)
        ));
        let canon = AbelianGroup::from_factors(0, &[6, 2]);
        let g = AbelianGroup::from_factors(0, &[2, 6]);
        assert!(group_isomorphic(&canon, &g));
        assert_eq!(g.invariant_factors(), &[BigInt::from(2), BigInt::from(6)]);
    }

    #[test]
    fn display_and_serde_roundtrip() {
        let g = AbelianGroup::from_factors(2, &[4, 2]);
        assert_eq!(g.to_string(), "Z^2 + Z/2 + Z/4");
        let s = serde_json::to_string(&g).unwrap();
        let back: AbelianGroup = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert_eq!(AbelianGroup::trivial().to_string(), "0");
    }
}
