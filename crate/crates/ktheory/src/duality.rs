//! Group-level check of the duality between the stable and unstable Ruelle algebras.

use serde::{Deserialize, Serialize};

use crate::group::{group_isomorphic, AbelianGroup};
use crate::matrix::TransitionMatrix;
use crate::ruelle::{ruelle_k_groups, RuelleKGroups};
use crate::uct::uct_dual;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoCheck {
    pub label: String,
    pub groups: Vec<AbelianGroup>,
    pub holds: bool,
}

impl IsoCheck {
    fn chain(label: &str, groups: Vec<AbelianGroup>) -> Self {
        let holds = groups.windows(2).all(|w| group_isomorphic(&w[0], &w[1]));
        Self { label: label.to_string(), groups, holds }
    }

    fn ranks(label: &str, groups: Vec<AbelianGroup>) -> Self {
        let holds = groups.windows(2).all(|w| w[0].free_rank() == w[1].free_rank());
        Self { label: label.to_string(), groups, holds }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityVerdict {
    pub matrix: TransitionMatrix,
    pub k_theory: RuelleKGroups,
    /// `(K^0, K^1)` of the stable algebra.
    pub k_homology_stable: (AbelianGroup, AbelianGroup),
    /// `(K^0, K^1)` of the unstable algebra.
    pub k_homology_unstable: (AbelianGroup, AbelianGroup),
    pub checks: Vec<IsoCheck>,
    pub pass: bool,
}

impl DualityVerdict {
    pub fn failures(&self) -> impl Iterator<Item = &IsoCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

pub fn duality_verdict(a: &TransitionMatrix) -> DualityVerdict {
    let k = ruelle_k_groups(a);
    let hs = uct_dual(&k.k0_stable, &k.k1_stable);
    let hu = uct_dual(&k.k0_unstable, &k.k1_unstable);
    let checks = vec![
        IsoCheck::chain("K_0(stable) ~ K^1(unstable)", vec![k.k0_stable.clone(), hu.1.clone()]),
        IsoCheck::chain("K_1(stable) ~ K^0(unstable)", vec![k.k1_stable.clone(), hu.0.clone()]),
        IsoCheck::chain("K_0(unstable) ~ K^1(stable)", vec![k.k0_unstable.clone(), hs.1.clone()]),
        IsoCheck::chain("K_1(unstable) ~ K^0(stable)", vec![k.k1_unstable.clone(), hs.0.clone()]),
        IsoCheck::chain(
            "torsion: tK_0(stable) ~ tK^1(stable) ~ tK_0(unstable)",
            vec![k.k0_stable.torsion(), hs.1.torsion(), k.k0_unstable.torsion()],
        ),
        IsoCheck::ranks(
            "rank: K_0(stable), K^0(stable), K_1(unstable), K^1(unstable), K_0(unstable)",
            vec![
                k.k0_stable.clone(),
                hs.0.clone(),
                k.k1_unstable.clone(),
                hu.1.clone(),
                k.k0_unstable.clone(),
            ],
        ),
    ];
    let pass = checks.iter().all(|c| c.holds);
    DualityVerdict {
        matrix: a.clone(),
        k_theory: k,
        k_homology_stable: hs,
        k_homology_unstable: hu,
        checks,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_mean_passes_trivially() {
        let v = duality_verdict(&TransitionMatrix::new(vec![vec![1, 1], vec![1, 0]]).unwrap());
        assert!(v.pass);
        assert!(v.k_homology_unstable.1.is_trivial());
    }

    #[test]
    fn symmetric_two_by_two() {
        let v = duality_verdict(&TransitionMatrix::new(vec![vec![1, 2], vec![2, 1]]).unwrap());
        assert!(v.pass);
        let z22 = AbelianGroup::from_factors(0, &[2, 2]);
        assert_eq!(v.k_theory.k0_stable, z22);
        assert_eq!(v.k_homology_unstable.1, z22);
        assert_eq!(v.failures().count(), 0);
    }
}
