//! The duality projection `p_G` on `ℓ²(X^h) ⊗ ℓ²(X^h)` and its homotopy to `p_{φ(G)}`.

use std::collections::HashMap;

use indexmap::IndexSet;
use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SmaleSpace;
use crate::ops::Sparse;
use crate::partition::{BumpFamily, EpsilonPartition, HomotopyFamily};

pub type Pair<P> = (P, P);
pub type Terms<P> = Vec<(Pair<P>, f64)>;

/// `p_G(δ_w ⊗ δ_z) = f_k([w,z]) Σ_i f_i([w,z]) δ_{[w,g_i]} ⊗ δ_{[g_i,z]}` when some `g_k`
/// has `w ∈ X^u(g_k, ε)` and `z ∈ X^s(g_k, ε)`; undefined brackets drop their term.
pub fn pg_apply<M: SmaleSpace, F: BumpFamily<M>>(m: &M, f: &F, w: &M::Point, z: &M::Point) -> Terms<M::Point> {
    let Some(gk) = m.bracket(z, w) else { return Vec::new() };
    let Some(k) = f.center_index(&gk) else { return Vec::new() };
    let eps = f.epsilon();
    if !(m.in_local_unstable(w, &gk, eps) && m.in_local_stable(z, &gk, eps)) {
        return Vec::new();
    }
    let Some(x) = m.bracket(w, z) else { return Vec::new() };
    let vals = f.values(m, &x);
    let Some(&(_, fk)) = vals.iter().find(|(i, _)| *i == k) else { return Vec::new() };
    let centers = f.centers();
    vals.iter()
        .filter_map(|&(i, fi)| {
            let a = m.bracket(w, &centers[i])?;
            let b = m.bracket(&centers[i], z)?;
            Some(((a, b), fk * fi))
        })
        .collect()
}

/// The groupoid-level definition `p_G((x,w),(y,z)) = f_i([x,y]) f_k([w,z])`, evaluated by
/// scanning every center for the membership conditions, on the given candidate rows.
pub fn pg_bruteforce<M: SmaleSpace, F: BumpFamily<M>>(
    m: &M,
    f: &F,
    w: &M::Point,
    z: &M::Point,
    rows: &[Pair<M::Point>],
) -> Terms<M::Point> {
    let eps = f.epsilon();
    let centers = f.centers();
    let member = |a: &M::Point, b: &M::Point| {
        centers.iter().position(|g| m.in_local_unstable(a, g, eps) && m.in_local_stable(b, g, eps))
    };
    let Some(k) = member(w, z) else { return Vec::new() };
    let Some(wz) = m.bracket(w, z) else { return Vec::new() };
    let vals = f.values(m, &wz);
    let value = |j: usize| vals.iter().find(|(i, _)| *i == j).map_or(0.0, |e| e.1);
    let fk = value(k);
    rows.iter()
        .filter_map(|(x, y)| {
            let i = member(x, y)?;
            let xy = m.bracket(x, y)?;
            if xy != wz {
                return None;
            }
            let c = value(i) * fk;
            (c != 0.0).then(|| ((x.clone(), y.clone()), c))
        })
        .collect()
}

/// Truncated tensor basis with interior flags.
#[derive(Clone, Debug)]
pub struct TensorBasis<P: std::hash::Hash + Eq> {
    pub pairs: IndexSet<Pair<P>>,
    /// Pairs generated from seeds; these must come out interior.
    pub core: usize,
    pub interior: Vec<bool>,
}

/// Pairs `([y, g_k], [g_k, y])` for every seed `y` and active center `g_k`, then `extra`.
pub fn tensor_pairs<M: SmaleSpace, F: BumpFamily<M>>(
    m: &M,
    f: &F,
    seeds: &[M::Point],
    extra: &[Pair<M::Point>],
) -> (IndexSet<Pair<M::Point>>, usize) {
    let centers = f.centers();
    let per_seed: Vec<Vec<Pair<M::Point>>> = seeds
        .par_iter()
        .map(|y| {
            f.values(m, y)
                .into_iter()
                .filter_map(|(k, _)| Some((m.bracket(y, &centers[k])?, m.bracket(&centers[k], y)?)))
                .collect()
        })
        .collect();
    let mut pairs: IndexSet<Pair<M::Point>> = per_seed.into_iter().flatten().collect();
    let core = pairs.len();
    pairs.extend(extra.iter().cloned());
    (pairs, core)
}

/// A projection assembled on a tensor basis.
#[derive(Clone, Debug)]
pub struct ProjectionOperator<P: std::hash::Hash + Eq> {
    pub basis: TensorBasis<P>,
    pub matrix: Sparse,
    /// Raw images, including pairs outside the truncation.
    pub images: Vec<Terms<P>>,
}

impl<P: Clone + std::hash::Hash + Eq> ProjectionOperator<P> {
    pub fn interior_columns(&self) -> Vec<usize> {
        (0..self.basis.pairs.len()).filter(|&i| self.basis.interior[i]).collect()
    }
}

/// Assembles `p` on `pairs`; a pair is interior when its image and the images of its image
/// stay inside. Core pairs that are not interior are an error.
pub fn pg_matrix<M: SmaleSpace, F: BumpFamily<M>>(
    m: &M,
    f: &F,
    pairs: IndexSet<Pair<M::Point>>,
    core: usize,
) -> Result<ProjectionOperator<M::Point>> {
    let list: Vec<&Pair<M::Point>> = pairs.iter().collect();
    let images: Vec<Terms<M::Point>> = list.par_iter().map(|(w, z)| pg_apply(m, f, w, z)).collect();
    let inside: Vec<bool> = images.iter().map(|img| img.iter().all(|(p, _)| pairs.contains(p))).collect();
    let interior: Vec<bool> = images
        .iter()
        .zip(&inside)
        .map(|(img, &ok)| ok && img.iter().all(|(p, _)| inside[pairs.get_index_of(p).expect("inside")]))
        .collect();
    if let Some(i) = (0..core).find(|&i| !interior[i]) {
        let (w, z) = &pairs[i];
        return Err(Error::Escape { map: "p_G".into(), from: format!("({}, {})", m.encode(w), m.encode(z)) });
    }
    let cols = images
        .iter()
        .map(|img| img.iter().filter_map(|(p, c)| Some((pairs.get_index_of(p)?, *c))).collect())
        .collect();
    let matrix = Sparse::from_columns(pairs.len(), cols);
    Ok(ProjectionOperator { basis: TensorBasis { pairs, core, interior }, matrix, images })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionCheck {
    pub pairs: usize,
    pub interior: usize,
    pub nonzero_columns: usize,
    /// `‖(p² - p)|_interior‖`, exact block evaluator.
    pub idempotency: f64,
    /// Same quantity by power iteration.
    pub idempotency_power: f64,
    pub power_certified: bool,
    /// `max |p_ab - p_ba|` over interior columns.
    pub adjoint: f64,
    pub predicted_rank: usize,
    pub eigen_rank: usize,
    pub eigen_block: usize,
    /// Largest distance of a block eigenvalue from `{0, 1}`.
    pub eigen_spread: f64,
}

/// Idempotency, self-adjointness, and a rank cross-check on a closed block of at most
/// `block_cap` pairs.
pub fn check_projection<M: SmaleSpace, F: BumpFamily<M>>(
    m: &M,
    f: &F,
    op: &ProjectionOperator<M::Point>,
    block_cap: usize,
    seed: u64,
) -> ProjectionCheck {
    let interior = op.interior_columns();
    let p_i = op.matrix.select_columns(&interior);
    let resid = op.matrix.mul(&p_i).sub(&p_i);
    let power = resid.norm_power(seed);
    let mut adjoint = 0.0f64;
    for &c in &interior {
        for &(r, v) in op.matrix.column(c) {
            adjoint = adjoint.max((v - op.matrix.get(c, r)).abs());
        }
    }
    // Seed blocks: pairs sharing [w, z]; each is closed and carries a rank-one projection.
    let mut blocks: HashMap<M::Point, Vec<usize>> = HashMap::new();
    let mut order: Vec<M::Point> = Vec::new();
    for i in 0..op.basis.core {
        let (w, z) = &op.basis.pairs[i];
        if let Some(x) = m.bracket(w, z) {
            if !blocks.contains_key(&x) {
                order.push(x.clone());
            }
            blocks.entry(x).or_default().push(i);
        }
    }
    let mut chosen: Vec<usize> = Vec::new();
    let mut predicted = 0;
    for x in &order {
        let b = &blocks[x];
        if chosen.len() + b.len() > block_cap {
            break;
        }
        if b.iter().any(|&i| !op.matrix.column(i).is_empty()) {
            predicted += 1;
        }
        chosen.extend(b);
    }
    let pos: HashMap<usize, usize> = chosen.iter().enumerate().map(|(a, &i)| (i, a)).collect();
    let mut dense = DMatrix::zeros(chosen.len(), chosen.len());
    for (a, &i) in chosen.iter().enumerate() {
        for &(r, v) in op.matrix.column(i) {
            if let Some(&b) = pos.get(&r) {
                dense[(b, a)] = v;
            }
        }
    }
    let eig = SymmetricEigen::new(dense).eigenvalues;
    let eigen_rank = eig.iter().filter(|&&l| l > 0.5).count();
    let eigen_spread = eig.iter().map(|&l| l.abs().min((l - 1.0).abs())).fold(0.0, f64::max);
    let _ = f;
    ProjectionCheck {
        pairs: op.basis.pairs.len(),
        interior: interior.len(),
        nonzero_columns: interior.iter().filter(|&&c| !op.matrix.column(c).is_empty()).count(),
        idempotency: resid.norm_exact(),
        idempotency_power: power.value,
        power_certified: power.certified,
        adjoint,
        predicted_rank: predicted,
        eigen_rank,
        eigen_block: chosen.len(),
        eigen_spread,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HomotopyStep {
    pub s: f64,
    pub idempotency: f64,
    pub adjoint: f64,
    /// `‖p_{s} - p_{s_prev}‖` on interior columns.
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomotopyReport {
    pub steps: Vec<HomotopyStep>,
    pub pairs: usize,
    pub interior: usize,
    /// `max` entry difference between `p_{G_0}` and `p_G`.
    pub start_error: f64,
    /// `max` entry difference between `p_{G_1}` and `(u⊗u) p_G (u*⊗u*)`.
    pub end_error: f64,
    pub max_idempotency: f64,
    pub max_gap: f64,
}

fn term_map<P: std::hash::Hash + Eq + Clone>(t: &Terms<P>) -> HashMap<Pair<P>, f64> {
    let mut out = HashMap::new();
    for (p, c) in t {
        *out.entry(p.clone()).or_insert(0.0) += c;
    }
    out
}

fn max_diff<P: std::hash::Hash + Eq + Clone>(a: &Terms<P>, b: &Terms<P>) -> f64 {
    let (a, b) = (term_map(a), term_map(b));
    a.iter()
        .map(|(k, v)| (v - b.get(k).copied().unwrap_or(0.0)).abs())
        .chain(b.iter().map(|(k, v)| (v - a.get(k).copied().unwrap_or(0.0)).abs()))
        .fold(0.0, f64::max)
}

/// Sweeps `s = j/steps`, checking each `p_{G_s}` and the two endpoint identities.
pub fn homotopy_path<M: SmaleSpace>(
    m: &M,
    base: &EpsilonPartition<M::Point>,
    seeds: &[M::Point],
    steps: u32,
) -> Result<HomotopyReport> {
    let mid = HomotopyFamily::new(m, base, 0.5)?;
    let (pairs, core) = tensor_pairs(m, &mid, seeds, &[]);
    let mut report = HomotopyReport {
        steps: Vec::new(),
        pairs: pairs.len(),
        interior: 0,
        start_error: 0.0,
        end_error: 0.0,
        max_idempotency: 0.0,
        max_gap: 0.0,
    };
    let mut prev: Option<Sparse> = None;
    let mut interior_cols: Vec<usize> = Vec::new();
    for j in 0..=steps {
        let s = j as f64 / steps as f64;
        let fam = HomotopyFamily::new(m, base, s)?;
        let op = pg_matrix(m, &fam, pairs.clone(), core)?;
        if j == 0 {
            interior_cols = op.interior_columns();
            report.interior = interior_cols.len();
        }
        let p_i = op.matrix.select_columns(&interior_cols);
        let idem = op.matrix.mul(&p_i).sub(&p_i).norm_exact();
        let mut adjoint = 0.0f64;
        for &c in &interior_cols {
            for &(r, v) in op.matrix.column(c) {
                adjoint = adjoint.max((v - op.matrix.get(c, r)).abs());
            }
        }
        let gap = prev.as_ref().map_or(0.0, |q| p_i.sub(q).norm_exact());
        report.max_idempotency = report.max_idempotency.max(idem);
        report.max_gap = report.max_gap.max(gap);
        report.steps.push(HomotopyStep { s, idempotency: idem, adjoint, gap });
        if j == 0 {
            report.start_error = interior_cols
                .par_iter()
                .map(|&c| {
                    let (w, z) = &op.basis.pairs[c];
                    max_diff(&op.images[c], &pg_apply(m, base, w, z))
                })
                .reduce(|| 0.0, f64::max);
        }
        if j == steps {
            report.end_error = interior_cols
                .par_iter()
                .map(|&c| {
                    let (w, z) = &op.basis.pairs[c];
                    let pulled = pg_apply(m, base, &m.phi_inv(w), &m.phi_inv(z));
                    let conj: Terms<M::Point> = pulled.into_iter().map(|((a, b), v)| ((m.phi(&a), m.phi(&b)), v)).collect();
                    max_diff(&op.images[c], &conj)
                })
                .reduce(|| 0.0, f64::max);
        }
        prev = Some(p_i);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{SftModel, SftPoint};
    use crate::orbit::periodic_orbits;
    use crate::partition::build_partition;
    use rand::seq::IndexedRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn desk() -> (SftModel, EpsilonPartition<SftPoint>, Vec<SftPoint>) {
        let m = SftModel::full_shift(2).unwrap();
        let o = periodic_orbits(&m, 1).unwrap();
        let part = build_partition(&m, &o[0].points, &o[1].points, 0.25, 0.25, true, 0).unwrap();
        let pool = m.homoclinic_points(&o[0].points, &o[1].points, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let seeds: Vec<SftPoint> = pool.choose_multiple(&mut rng, 40).cloned().collect();
        (m, part, seeds)
    }

    #[test]
    fn action_matches_groupoid_definition() {
        let (m, part, seeds) = desk();
        let (pairs, _) = tensor_pairs(&m, &part, &seeds[..10], &[]);
        let rows: Vec<_> = pairs.iter().cloned().collect();
        let mut nonzero = 0;
        for (w, z) in pairs.iter().take(30) {
            let fast = pg_apply(&m, &part, w, z);
            let slow = pg_bruteforce(&m, &part, w, z, &rows);
            nonzero += usize::from(!fast.is_empty());
            assert!(max_diff(&fast, &slow) <= 1e-12);
            assert_eq!(term_map(&fast).len(), term_map(&slow).len());
        }
        assert!(nonzero > 0);
    }

    #[test]
    fn far_pair_has_empty_image() {
        let (m, part, seeds) = desk();
        let w = &seeds[0];
        let z = m.iterate(&seeds[1], 7);
        if m.bracket(&z, w).is_none_or(|g| part.center_index_of(&g).is_none()) {
            assert!(pg_apply(&m, &part, w, &z).is_empty());
        }
    }

    #[test]
    fn projection_identities_on_two_shift() {
        let (m, part, seeds) = desk();
        let extra: Vec<_> = seeds.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        let (pairs, core) = tensor_pairs(&m, &part, &seeds, &extra);
        let op = pg_matrix(&m, &part, pairs, core).unwrap();
        let c = check_projection(&m, &part, &op, 400, 1);
        assert!(c.idempotency <= 1e-9 && c.adjoint == 0.0, "{c:?}");
        assert!((c.idempotency - c.idempotency_power).abs() <= 1e-10);
        assert_eq!(c.predicted_rank, c.eigen_rank);
        assert!(c.predicted_rank > 10 && c.nonzero_columns > 0);
        assert!(c.eigen_spread < 1e-9);
    }

    #[test]
    fn torus_projection_and_homotopy() {
        use crate::model::TorusModel;
        let m = TorusModel::golden();
        let o = periodic_orbits(&m, 1).unwrap();
        let o3 = periodic_orbits(&m, 3).unwrap();
        let q: Vec<_> = o3.iter().filter(|x| x.period == 3).flat_map(|x| x.points.clone()).collect();
        let eps = m.eps_x_prime_analytic();
        let part = build_partition(&m, &o[0].points, &q, eps, eps, true, 60).unwrap();
        let pool = m.homoclinic_points(&o[0].points, &q, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let seeds: Vec<_> = pool.choose_multiple(&mut rng, 30).cloned().collect();
        let (pairs, core) = tensor_pairs(&m, &part, &seeds, &[]);
        let op = pg_matrix(&m, &part, pairs, core).unwrap();
        let c = check_projection(&m, &part, &op, 400, 2);
        assert!(c.idempotency <= 1e-9 && c.adjoint <= 1e-12, "{c:?}");
        assert_eq!(c.predicted_rank, c.eigen_rank);
        let r = homotopy_path(&m, &part, &seeds[..8], 4).unwrap();
        assert!(r.end_error <= 1e-12 && r.max_idempotency <= 1e-9, "{r:?}");
    }

    #[test]
    fn homotopy_endpoints() {
        let (m, part, seeds) = desk();
        let r = homotopy_path(&m, &part, &seeds[..15], 8).unwrap();
        assert_eq!(r.start_error, 0.0);
        assert!(r.end_error <= 1e-12, "{r:?}");
        assert!(r.max_idempotency <= 1e-9);
    }
}
