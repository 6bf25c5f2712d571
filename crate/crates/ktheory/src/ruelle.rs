//! K-groups of the stable and unstable Ruelle algebras of a shift of finite type.
//!
//! The stable algebra is stably isomorphic to the Cuntz-Krieger algebra of `A^t` and the
//! unstable one to that of `A`; with `K_0(O_B) = coker(I - B^t)` and `K_1(O_B) = ker(I - B^t)`
//! this gives the formulas below.

use serde::{Deserialize, Serialize};

use crate::group::AbelianGroup;
use crate::matrix::TransitionMatrix;
use crate::snf::coker_ker;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuelleKGroups {
    pub k0_stable: AbelianGroup,
    pub k1_stable: AbelianGroup,
    pub k0_unstable: AbelianGroup,
    pub k1_unstable: AbelianGroup,
}

pub fn ruelle_k_groups(a: &TransitionMatrix) -> RuelleKGroups {
    let m = a.to_int();
    let (k0_stable, k1_stable) = coker_ker(&m.one_minus());
    let (k0_unstable, k1_unstable) = coker_ker(&m.transpose().one_minus());
    RuelleKGroups { k0_stable, k1_stable, k0_unstable, k1_unstable }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tm(rows: Vec<Vec<i64>>) -> TransitionMatrix {
        TransitionMatrix::new(rows).unwrap()
    }

    #[test]
    fn full_three_shift() {
        let g = ruelle_k_groups(&tm(vec![vec![3]]));
        assert_eq!(g.k0_unstable, AbelianGroup::cyclic(2));
        assert_eq!(g.k1_unstable, AbelianGroup::trivial());
        assert_eq!(g.k0_stable, AbelianGroup::cyclic(2));
    }

    #[test]
    fn golden_mean_is_trivial() {
        let g = ruelle_k_groups(&tm(vec![vec![1, 1], vec![1, 0]]));
        for grp in [&g.k0_stable, &g.k1_stable, &g.k0_unstable, &g.k1_unstable] {
            assert!(grp.is_trivial());
        }
    }

    #[test]
    fn two_by_two_symmetric() {
        let g = ruelle_k_groups(&tm(vec![vec![1, 2], vec![2, 1]]));
        assert_eq!(g.k0_unstable, AbelianGroup::from_factors(0, &[2, 2]));
        assert_eq!(g.k1_unstable, AbelianGroup::trivial());
    }

    #[test]
    fn swap_has_free_parts() {
        let g = ruelle_k_groups(&tm(vec![vec![0, 1], vec![1, 0]]));
        assert_eq!(g.k0_unstable, AbelianGroup::free(1));
        assert_eq!(g.k1_unstable, AbelianGroup::free(1));
    }
}
