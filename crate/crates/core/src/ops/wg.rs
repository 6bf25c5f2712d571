//! The partial isometry `W_G` from `H ⊗ χ_G` onto the range of `p_G`.

use indexmap::IndexSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::model::SmaleSpace;
use crate::ops::elements::LocalHolonomy;
use crate::ops::Sparse;
use crate::partition::{BumpFamily, EpsilonPartition};
use crate::projection::{pg_matrix, tensor_pairs, Pair, Terms};

/// `W_G(δ_y ⊗ χ_G) = Σ_k f_k(y) δ_{[y,g_k]} ⊗ δ_{[g_k,y]}`.
pub fn wg_column<M: SmaleSpace, F: BumpFamily<M>>(m: &M, f: &F, y: &M::Point) -> Terms<M::Point> {
    let centers = f.centers();
    f.values(m, y)
        .into_iter()
        .filter_map(|(k, c)| Some(((m.bracket(y, &centers[k])?, m.bracket(&centers[k], y)?), c)))
        .collect()
}

/// `W_G*(δ_w ⊗ δ_z) = f_k([w,z]) δ_{[w,z]} ⊗ χ_G` when `w ∈ X^u(g_k, ε)` and `z ∈ X^s(g_k, ε)`.
pub fn wg_adjoint<M: SmaleSpace, F: BumpFamily<M>>(m: &M, f: &F, w: &M::Point, z: &M::Point) -> Option<(M::Point, f64)> {
    let eps = f.epsilon();
    let g = m.bracket(z, w)?;
    let k = f.center_index(&g)?;
    if !(m.in_local_unstable(w, &g, eps) && m.in_local_stable(z, &g, eps)) {
        return None;
    }
    let y = m.bracket(w, z)?;
    let c = f.values(m, &y).into_iter().find(|e| e.0 == k)?.1;
    Some((y, c))
}

/// `W_G` restricted to seed columns `δ_y ⊗ χ_G`.
#[derive(Clone, Debug)]
pub struct WgOperator<P: std::hash::Hash + Eq> {
    pub seeds: Vec<P>,
    pub pairs: IndexSet<Pair<P>>,
    /// Rows indexed by `pairs`, columns by `seeds`.
    pub matrix: Sparse,
    /// Number of pairs generated by the seeds; these come first in `pairs`.
    pub core: usize,
}

pub fn build_wg<M: SmaleSpace, F: BumpFamily<M>>(m: &M, f: &F, seeds: &[M::Point]) -> WgOperator<M::Point> {
    let (pairs, core) = tensor_pairs(m, f, seeds, &[]);
    let cols = seeds
        .par_iter()
        .map(|y| wg_column(m, f, y).into_iter().filter_map(|(p, c)| Some((pairs.get_index_of(&p)?, c))).collect())
        .collect();
    let matrix = Sparse::from_columns(pairs.len(), cols);
    WgOperator { seeds: seeds.to_vec(), pairs, matrix, core }
}

/// `χ_G` evaluated on its own support: `(#G)^{-1/2}` at each center.
pub fn chi_g<P: Clone + Eq + std::hash::Hash>(part: &EpsilonPartition<P>) -> Vec<(P, f64)> {
    let c = (part.len() as f64).powf(-0.5);
    part.center_points().iter().map(|g| (g.clone(), c)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct WgCheck {
    pub seeds: usize,
    pub pairs: usize,
    pub chi_norm: f64,
    /// `‖W*W − 1⊗q_G‖` on the seed columns.
    pub isometry: f64,
    /// `‖WW* − p_G‖` on core pair columns.
    pub range: f64,
    /// Largest entry gap between `Wᵀ` and the displayed adjoint formula.
    pub adjoint_formula: f64,
    /// `max` entry gap between `(u⊗u)W_G(u⊗u)*` and `W_{φ(G)}`, when checked.
    pub conjugation: Option<f64>,
}

pub fn check_wg<M: SmaleSpace>(
    m: &M,
    part: &EpsilonPartition<M::Point>,
    seeds: &[M::Point],
    check_conjugation: bool,
) -> Result<WgCheck> {
    let w = build_wg(m, part, seeds);
    let wt = w.matrix.transpose();
    let isometry = wt.mul(&w.matrix).sub(&Sparse::identity(seeds.len())).norm_exact();
    let p = pg_matrix(m, part, w.pairs.clone(), w.core)?;
    let core: Vec<usize> = (0..w.core).collect();
    let range = w.matrix.mul(&wt).select_columns(&core).sub(&p.matrix.select_columns(&core)).norm_exact();
    let seed_index: std::collections::HashMap<&M::Point, usize> = seeds.iter().enumerate().map(|(i, y)| (y, i)).collect();
    let adjoint_formula = (0..w.pairs.len())
        .into_par_iter()
        .map(|j| {
            let (a, b) = &w.pairs[j];
            let formula = wg_adjoint(m, part, a, b).and_then(|(y, c)| Some((*seed_index.get(&y)?, c)));
            let col = wt.column(j);
            match (formula, col) {
                (None, []) => 0.0,
                (Some((i, c)), [(r, v)]) if i == *r => (c - v).abs(),
                (Some((_, c)), []) => c.abs(),
                _ => col.iter().map(|e| e.1.abs()).fold(0.0, f64::max).max(formula.map_or(0.0, |e| e.1.abs())),
            }
        })
        .reduce(|| 0.0, f64::max);
    let conjugation = if check_conjugation {
        let pushed = part.pushed(m)?;
        Some(
            seeds
                .par_iter()
                .map(|y| {
                    let direct = wg_column(m, &pushed, y);
                    let conj: Terms<M::Point> = wg_column(m, part, &m.phi_inv(y))
                        .into_iter()
                        .map(|((a, b), c)| ((m.phi(&a), m.phi(&b)), c))
                        .collect();
                    max_gap(&direct, &conj)
                })
                .reduce(|| 0.0, f64::max),
        )
    } else {
        None
    };
    let chi_norm = chi_g(part).iter().map(|e| e.1 * e.1).sum::<f64>().sqrt();
    Ok(WgCheck { seeds: seeds.len(), pairs: w.pairs.len(), chi_norm, isometry, range, adjoint_formula, conjugation })
}

fn max_gap<P: std::hash::Hash + Eq + Clone>(a: &Terms<P>, b: &Terms<P>) -> f64 {
    let mut acc: std::collections::HashMap<&Pair<P>, f64> = std::collections::HashMap::new();
    for (p, c) in a {
        *acc.entry(p).or_insert(0.0) += c;
    }
    for (p, c) in b {
        *acc.entry(p).or_insert(0.0) -= c;
    }
    acc.values().map(|v| v.abs()).fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct IntertwineStep {
    pub n: usize,
    pub norm: f64,
    pub norm_power: f64,
    /// Center index and column point realizing the largest entry.
    pub witness: Option<(usize, String)>,
}

/// `‖(1 ⊗ α^n(a)) W_G − W_G (α^n(a) ⊗ 1)‖` for `n = 0..=n_max`.
pub fn wg_intertwine<M: SmaleSpace>(
    m: &M,
    part: &EpsilonPartition<M::Point>,
    a: &LocalHolonomy<M::Point>,
    p: &[M::Point],
    n_max: usize,
    per_set: usize,
    seed: u64,
) -> Vec<IntertwineStep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let local = m.local_unstable_homoclinic(&a.w, a.delta * 1.25, p, per_set, &mut rng);
    let centers = part.center_points();
    (0..=n_max)
        .map(|n| {
            let an = a.alpha(n as i64);
            let cols: Vec<M::Point> = local.iter().map(|y| m.iterate(y, n as i64)).collect();
            let images: Vec<Vec<(Pair<M::Point>, f64, usize)>> = cols
                .par_iter()
                .map(|y| {
                    let mut out: Vec<(Pair<M::Point>, f64, usize)> = Vec::new();
                    for (k, fk) in part.values(m, y) {
                        let (Some(x1), Some(x2)) = (m.bracket(y, &centers[k]), m.bracket(&centers[k], y)) else {
                            continue;
                        };
                        if let Some((z, c)) = an.apply(m, &x2) {
                            out.push(((x1, z), fk * c, k));
                        }
                    }
                    if let Some((y2, c)) = an.apply(m, y) {
                        for (k, fk) in part.values(m, &y2) {
                            let (Some(x1), Some(x2)) = (m.bracket(&y2, &centers[k]), m.bracket(&centers[k], &y2)) else {
                                continue;
                            };
                            out.push(((x1, x2), -c * fk, k));
                        }
                    }
                    out
                })
                .collect();
            let mut rows: IndexSet<Pair<M::Point>> = IndexSet::new();
            let mut best: Option<(f64, usize, usize)> = None;
            let entries: Vec<Vec<(usize, f64)>> = images
                .into_iter()
                .enumerate()
                .map(|(j, img)| {
                    let mut col: Vec<(usize, f64)> = Vec::new();
                    let mut ks: Vec<(usize, usize)> = Vec::new();
                    for (pair, c, k) in img {
                        let r = rows.insert_full(pair).0;
                        col.push((r, c));
                        ks.push((r, k));
                    }
                    let merged = Sparse::from_columns(rows.len(), vec![col.clone()]);
                    for &(r, v) in merged.column(0) {
                        if best.is_none_or(|b| v.abs() > b.0) {
                            let k = ks.iter().find(|e| e.0 == r).map_or(0, |e| e.1);
                            best = Some((v.abs(), k, j));
                        }
                    }
                    col
                })
                .collect();
            let mat = Sparse::from_columns(rows.len(), entries);
            IntertwineStep {
                n,
                norm: mat.norm_exact(),
                norm_power: mat.norm_power(seed).value,
                witness: best.map(|(_, k, j)| (k, m.encode(&cols[j]))),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::desk::{golden_torus, two_shift};
    use crate::ops::elements::{HolonomyKind, Profile};
    use rand::seq::IndexedRandom;

    #[test]
    fn wg_identities_on_two_shift() {
        let d = two_shift();
        let part = d.partition().unwrap();
        let pool = d.homoclinic(4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let seeds: Vec<_> = pool.choose_multiple(&mut rng, 60).cloned().collect();
        let c = check_wg(&d.model, &part, &seeds, true).unwrap();
        assert!((c.chi_norm - 1.0).abs() < 1e-12);
        assert!(c.isometry <= 1e-9 && c.range <= 1e-9, "{c:?}");
        assert_eq!(c.adjoint_formula, 0.0);
        assert!(c.conjugation.unwrap() <= 1e-12, "{c:?}");
    }

    #[test]
    fn wg_identities_and_intertwining_on_torus() {
        let d = golden_torus();
        let part = d.partition().unwrap();
        let pool = d.homoclinic(2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let seeds: Vec<_> = pool.choose_multiple(&mut rng, 40).cloned().collect();
        let c = check_wg(&d.model, &part, &seeds, true).unwrap();
        assert!(c.isometry <= 1e-9 && c.range <= 1e-9 && c.adjoint_formula == 0.0, "{c:?}");
        assert!(c.conjugation.unwrap() <= 1e-12, "{c:?}");

        let z = pool[7].clone();
        let (a, _) = d.crossing_pair(&z, 0.01, 1).unwrap();
        let steps = wg_intertwine(&d.model, &part, &a, &d.p_points(), 30, 16, 5);
        assert!((steps[0].norm - steps[0].norm_power).abs() <= 1e-10);
        assert!(steps[0].norm > 0.0);
        assert!(steps[30].norm < 1e-6, "{:?}", steps.iter().map(|s| s.norm).collect::<Vec<_>>());
        let zero = a.with_profile(Profile::Zero);
        let steps = wg_intertwine(&d.model, &part, &zero, &d.p_points(), 3, 8, 5);
        assert!(steps.iter().all(|s| s.norm == 0.0));
        assert_eq!(a.kind, HolonomyKind::Stable);
    }
}
