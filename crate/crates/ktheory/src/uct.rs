use crate::group::AbelianGroup;

/// K-homology from K-theory via the split universal coefficient sequence:
/// `K^i = Hom(K_i, Z) ⊕ Ext(K_{i+1}, Z)`, where `Hom` keeps the free rank and `Ext` the torsion.
pub fn uct_dual(g0: &AbelianGroup, g1: &AbelianGroup) -> (AbelianGroup, AbelianGroup) {
    let upper0 = AbelianGroup::new(g0.free_rank(), g1.invariant_factors().to_vec());
    let upper1 = AbelianGroup::new(g1.free_rank(), g0.invariant_factors().to_vec());
    (upper0, upper1)
}
