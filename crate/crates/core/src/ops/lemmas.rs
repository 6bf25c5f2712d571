//! Compactness, asymptotic vanishing and asymptotic commutation on truncations.

use indexmap::IndexSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::model::SmaleSpace;
use crate::ops::elements::{assemble, Expr, Factor, LocalHolonomy};
use crate::ops::Sparse;

/// Sample sizes and seed shared by the lemma checks.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Sampling {
    /// Homoclinic points drawn per local set.
    pub per_set: usize,
    /// Crossing points drawn per product.
    pub crossings: usize,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling { per_set: 24, crossings: 16, seed: 7 }
    }
}

fn source_samples<M: SmaleSpace>(
    m: &M,
    e: &LocalHolonomy<M::Point>,
    p: &[M::Point],
    q: &[M::Point],
    s: &Sampling,
    rng: &mut ChaCha8Rng,
) -> Vec<M::Point> {
    use crate::ops::elements::HolonomyKind::*;
    let (c, r) = e.source_ball(m);
    match e.kind {
        Stable => m.local_unstable_homoclinic(&c, r, p, s.per_set, rng),
        Unstable => m.local_stable_homoclinic(&c, r, q, s.per_set, rng),
    }
}

/// `base` together with preimages of `base` under each element.
fn with_preimages<M: SmaleSpace>(
    m: &M,
    base: impl IntoIterator<Item = M::Point>,
    elems: &[&LocalHolonomy<M::Point>],
) -> Vec<M::Point> {
    let mut out: IndexSet<M::Point> = base.into_iter().collect();
    let extra: Vec<M::Point> = out
        .iter()
        .flat_map(|y| elems.iter().filter_map(|e| e.apply_adjoint(m, y).map(|t| t.0)))
        .collect();
    out.extend(extra);
    out.into_iter().collect()
}

/// `base` together with images of `base` under each element.
fn with_images<M: SmaleSpace>(m: &M, base: Vec<M::Point>, elems: &[&LocalHolonomy<M::Point>]) -> Vec<M::Point> {
    let mut out: IndexSet<M::Point> = base.into_iter().collect();
    let extra: Vec<M::Point> =
        out.iter().flat_map(|x| elems.iter().filter_map(|e| e.apply(m, x).map(|t| t.0))).collect();
    out.extend(extra);
    out.into_iter().collect()
}

fn norm_pair(a: &Sparse, seed: u64) -> (f64, f64) {
    (a.norm_exact(), a.norm_power(seed).value)
}

#[derive(Clone, Debug, Serialize)]
pub struct RankReport {
    pub rank_ab: usize,
    pub rank_ba: usize,
    /// Rank of `a* b*`, which must equal the rank of `ba`.
    pub rank_adjoint: usize,
    /// Points of `X^s(range of b) ∩ X^u(source of a)` found by the geometric search.
    pub oracle_crossings: usize,
    pub columns: usize,
}

/// Ranks of `ab` and `ba` for a stable element `a` and an unstable element `b`.
pub fn product_rank<M: SmaleSpace>(
    m: &M,
    a: &LocalHolonomy<M::Point>,
    b: &LocalHolonomy<M::Point>,
    p: &[M::Point],
    q: &[M::Point],
    s: &Sampling,
) -> RankReport {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let (bv, br) = b.range_ball(m);
    let (aw, ar) = a.source_ball(m);
    let oracle = m.crossings(&bv, br, &aw, ar, 0, 2, &mut rng);
    let mut base = source_samples(m, a, p, q, s, &mut rng);
    base.extend(source_samples(m, b, p, q, s, &mut rng));
    base.extend(m.bracket(&bv, &aw));
    base.extend(m.bracket(&b.source_ball(m).0, &a.range_ball(m).0));
    let columns = with_images(m, with_preimages(m, base, &[a, b]), &[a, b]);
    let rank = |expr: Expr<'_, M::Point>| assemble(m, &expr, &columns).matrix.rank(1e-12);
    RankReport {
        rank_ab: rank(vec![(1.0, vec![Factor::Elem(a), Factor::Elem(b)])]),
        rank_ba: rank(vec![(1.0, vec![Factor::Elem(b), Factor::Elem(a)])]),
        rank_adjoint: rank(vec![(1.0, vec![Factor::Adjoint(a), Factor::Adjoint(b)])]),
        oracle_crossings: oracle.len(),
        columns: columns.len(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    /// `‖α^{-n}(a) b‖` for `n = 0..=n_max`.
    pub left: Vec<f64>,
    /// `‖b α^{-n}(a)‖`.
    pub right: Vec<f64>,
    /// First `n` from which both sequences are exactly zero through `n_max`.
    pub vanish_from: Option<usize>,
    /// Last `n` with a nonzero value, if any.
    pub last_nonzero: Option<usize>,
    /// Indices where the geometric search found no support overlap but a value was nonzero.
    pub oracle_violations: Vec<usize>,
}

pub fn decay_sequence<M: SmaleSpace>(
    m: &M,
    a: &LocalHolonomy<M::Point>,
    b: &LocalHolonomy<M::Point>,
    p: &[M::Point],
    q: &[M::Point],
    n_max: usize,
    s: &Sampling,
) -> DecayReport {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let b_source = source_samples(m, b, p, q, s, &mut rng);
    let (mut left, mut right, mut violations) = (Vec::new(), Vec::new(), Vec::new());
    for n in 0..=n_max {
        let an = a.alpha(-(n as i64));
        // Left: range of b against the source of α^{-n}(a).
        let (bv, br) = b.range_ball(m);
        let (aw, ar) = an.source_ball(m);
        let cross_l = m.crossings(&bv, br, &a.w, a.delta, -(n as i64), s.crossings, &mut rng);
        let cols_l = with_preimages(m, b_source.iter().cloned().chain(cross_l.iter().cloned()), &[b]);
        let l = assemble(m, &vec![(1.0, vec![Factor::Elem(&an), Factor::Elem(b)])], &cols_l).matrix.norm_exact();
        // Right: range of α^{-n}(a) against the source of b.
        let (bw, bwr) = b.source_ball(m);
        let cross_r = m.crossings(&bw, bwr, &a.v, m.eps_x() / 2.0, -(n as i64), s.crossings, &mut rng);
        let mut base_r = m.local_unstable_homoclinic(&aw, ar, p, s.per_set, &mut rng);
        base_r.extend(cross_r.iter().cloned());
        let cols_r = with_preimages(m, base_r, &[&an]);
        let r = assemble(m, &vec![(1.0, vec![Factor::Elem(b), Factor::Elem(&an)])], &cols_r).matrix.norm_exact();
        if (cross_l.is_empty() && l != 0.0) || (cross_r.is_empty() && r != 0.0) {
            violations.push(n);
        }
        left.push(l);
        right.push(r);
    }
    let last_nonzero = (0..=n_max).rev().find(|&n| left[n] != 0.0 || right[n] != 0.0);
    let vanish_from = match last_nonzero {
        None => Some(0),
        Some(k) if k < n_max => Some(k + 1),
        _ => None,
    };
    DecayReport { left, right, vanish_from, last_nonzero, oracle_violations: violations }
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorReport {
    /// `‖α^n(a) b − b α^n(a)‖`, exact block evaluator.
    pub first: Vec<f64>,
    pub first_power: Vec<f64>,
    /// `‖α_s^n(a) α_u^{-n}(b) − α_u^{-n}(b) α_s^n(a)‖`.
    pub second: Vec<f64>,
    pub second_power: Vec<f64>,
    /// `[z, x1, x2, x3]` at `n_max`: `x1 = α_u^{-n}(b)z`, `x2 = α_s^n(a)z`, `x3` their common image.
    pub quadrilateral: Option<[String; 4]>,
    /// Whether the two routes to `x3` agree exactly at every sampled column.
    pub corners_agree: bool,
    pub max_norm_disagreement: f64,
}

fn commutator<'a, P: Clone>(x: Factor<'a, P>, y: Factor<'a, P>) -> Expr<'a, P> {
    vec![(1.0, vec![x, y]), (-1.0, vec![y, x])]
}

/// Both asymptotic-commutation sequences for `n = 0..=n_max`.
pub fn asymptotic_commutator<M: SmaleSpace>(
    m: &M,
    a: &LocalHolonomy<M::Point>,
    b: &LocalHolonomy<M::Point>,
    p: &[M::Point],
    q: &[M::Point],
    n_max: usize,
    s: &Sampling,
) -> CommutatorReport {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let b_source = source_samples(m, b, p, q, s, &mut rng);
    let mut out = CommutatorReport {
        first: Vec::new(),
        first_power: Vec::new(),
        second: Vec::new(),
        second_power: Vec::new(),
        quadrilateral: None,
        corners_agree: true,
        max_norm_disagreement: 0.0,
    };
    for n in 0..=n_max {
        let k = n as i64;
        let an = a.alpha(k);
        let cross = m.crossings(&b.w, b.delta, &a.w, a.delta, k, s.crossings, &mut rng);
        let cols = with_preimages(m, b_source.iter().cloned().chain(cross), &[&an, b]);
        let c1 = assemble(m, &commutator(Factor::Elem(&an), Factor::Elem(b)), &cols).matrix;
        let (e1, p1) = norm_pair(&c1, s.seed);

        let bn = b.alpha(-k);
        let cross2: Vec<M::Point> = m
            .crossings(&b.w, b.delta, &a.w, a.delta, 2 * k, s.crossings, &mut rng)
            .iter()
            .map(|z| m.iterate(z, -k))
            .collect();
        let base2 = cross2.iter().cloned().chain(b_source.iter().map(|z| m.iterate(z, -k)));
        let cols2 = with_preimages(m, base2, &[&an, &bn]);
        let c2 = assemble(m, &commutator(Factor::Elem(&an), Factor::Elem(&bn)), &cols2).matrix;
        let (e2, p2) = norm_pair(&c2, s.seed);
        for z in &cols2 {
            let (Some((x1, _)), Some((x2, _))) = (bn.apply(m, z), an.apply(m, z)) else { continue };
            let (Some((x3, _)), Some((y3, _))) = (an.apply(m, &x1), bn.apply(m, &x2)) else { continue };
            out.corners_agree &= x3 == y3;
            if n == n_max && out.quadrilateral.is_none() {
                out.quadrilateral = Some([m.encode(z), m.encode(&x1), m.encode(&x2), m.encode(&x3)]);
            }
        }
        out.max_norm_disagreement = out.max_norm_disagreement.max((e1 - p1).abs()).max((e2 - p2).abs());
        out.first.push(e1);
        out.first_power.push(p1);
        out.second.push(e2);
        out.second_power.push(p2);
    }
    out
}

/// A generator of the stable Ruelle algebra in the two-sided representation.
#[derive(Debug)]
pub enum StableGen<'a, P> {
    /// `⊕_n α_s^n(a)`.
    Elem(&'a LocalHolonomy<P>),
    /// `1 ⊗ B`.
    Unitary,
}

/// A generator of the unstable Ruelle algebra in the two-sided representation.
#[derive(Debug)]
pub enum UnstableGen<'a, P> {
    /// `b ⊗ 1`.
    Elem(&'a LocalHolonomy<P>),
    /// `u ⊗ B*`.
    Unitary,
}

impl<P> Clone for StableGen<'_, P> {
    fn clone(&self) -> Self {
        *self
    }
}
impl<P> Copy for StableGen<'_, P> {}

impl<P> Clone for UnstableGen<'_, P> {
    fn clone(&self) -> Self {
        *self
    }
}
impl<P> Copy for UnstableGen<'_, P> {}

type Slot<P> = (P, i64);

fn apply_s<M: SmaleSpace>(m: &M, g: StableGen<'_, M::Point>, (x, n): &Slot<M::Point>) -> Option<(Slot<M::Point>, f64)> {
    match g {
        StableGen::Elem(a) => a.alpha(*n).apply(m, x).map(|(y, c)| ((y, *n), c)),
        StableGen::Unitary => Some(((x.clone(), n - 1), 1.0)),
    }
}

fn apply_u<M: SmaleSpace>(m: &M, g: UnstableGen<'_, M::Point>, (x, n): &Slot<M::Point>) -> Option<(Slot<M::Point>, f64)> {
    match g {
        UnstableGen::Elem(b) => b.apply(m, x).map(|(y, c)| ((y, *n), c)),
        UnstableGen::Unitary => Some(((m.phi(x), n + 1), 1.0)),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockProfile {
    pub window: i64,
    /// `(n, ‖[π̄_s(f), π̄_u(g)]‖ restricted to block n)` for interior blocks.
    pub blocks: Vec<(i64, f64)>,
    pub all_exact_zero: bool,
    /// Whether the first and last interior blocks fall below `tolerance`.
    pub ends_converged: (bool, bool),
    pub tolerance: f64,
}

/// Per-block norms of `[π̄_s(f), π̄_u(g)]` on `H ⊗ ℓ²([-window, window])`.
#[allow(clippy::too_many_arguments)]
pub fn two_sided_commutator<M: SmaleSpace>(
    m: &M,
    f: StableGen<'_, M::Point>,
    g: UnstableGen<'_, M::Point>,
    p: &[M::Point],
    q: &[M::Point],
    window: i64,
    tolerance: f64,
    s: &Sampling,
) -> BlockProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut blocks = Vec::new();
    let mut all_zero = true;
    // Blocks at the window edge can map outside; keep one block of margin.
    for n in (-window + 1)..window {
        let mut base: Vec<M::Point> = Vec::new();
        let mut elems: Vec<LocalHolonomy<M::Point>> = Vec::new();
        if let StableGen::Elem(a) = f {
            let an = a.alpha(n);
            base.extend(source_samples(m, &an, p, q, s, &mut rng));
            elems.push(an);
        }
        if let UnstableGen::Elem(b) = g {
            base.extend(source_samples(m, b, p, q, s, &mut rng));
            elems.push(b.clone());
        }
        if let (StableGen::Elem(a), UnstableGen::Elem(b)) = (f, g) {
            base.extend(m.crossings(&b.w, b.delta, &a.w, a.delta, n, s.crossings, &mut rng));
            let (bv, br) = b.range_ball(m);
            base.extend(m.crossings(&bv, br, &a.w, a.delta, n, s.crossings, &mut rng));
        }
        if base.is_empty() {
            base = m.homoclinic_points(p, q, 1);
        }
        let refs: Vec<&LocalHolonomy<M::Point>> = elems.iter().collect();
        let cols: Vec<Slot<M::Point>> = with_preimages(m, base, &refs).into_iter().map(|x| (x, n)).collect();
        let mut rows: IndexSet<Slot<M::Point>> = cols.iter().cloned().collect();
        let entries: Vec<Vec<(usize, f64)>> = cols
            .iter()
            .map(|x| {
                let fg = apply_u(m, g, x).and_then(|(y, c)| apply_s(m, f, &y).map(|(z, d)| (z, c * d)));
                let gf = apply_s(m, f, x).and_then(|(y, c)| apply_u(m, g, &y).map(|(z, d)| (z, c * d)));
                fg.into_iter()
                    .chain(gf.map(|(z, c)| (z, -c)))
                    .map(|(z, c)| (rows.insert_full(z).0, c))
                    .collect()
            })
            .collect();
        let mat = Sparse::from_columns(rows.len(), entries);
        all_zero &= mat.nnz() == 0;
        blocks.push((n, mat.norm_exact()));
    }
    let ends = (
        blocks.first().is_some_and(|b| b.1 < tolerance),
        blocks.last().is_some_and(|b| b.1 < tolerance),
    );
    BlockProfile { window, blocks, all_exact_zero: all_zero, ends_converged: ends, tolerance }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::desk::{golden_torus, two_shift};

    #[test]
    fn crossing_supports_give_rank_one() {
        let d = golden_torus();
        let (p, q) = (d.p_points(), d.q_points());
        let z = d.homoclinic(2)[7].clone();
        let (a, b) = d.crossing_pair(&z, 0.01, 1).unwrap();
        let r = product_rank(&d.model, &a, &b, &p, &q, &Sampling::default());
        assert_eq!((r.rank_ab, r.oracle_crossings), (1, 1), "{r:?}");
        assert_eq!(r.rank_ba, r.rank_adjoint);
        assert!(r.rank_ba <= 1);
        let far = d.homoclinic(2)[40].clone();
        let (a2, _) = d.crossing_pair(&far, 0.01, 1).unwrap();
        let r = product_rank(&d.model, &a2, &b, &p, &q, &Sampling::default());
        assert_eq!((r.rank_ab, r.oracle_crossings), (0, 0), "{r:?}");
    }

    #[test]
    fn decay_vanishes_exactly() {
        let d = golden_torus();
        let (p, q) = (d.p_points(), d.q_points());
        let z = d.homoclinic(2)[7].clone();
        let (a, b) = d.crossing_pair(&z, 0.01, 1).unwrap();
        let r = decay_sequence(&d.model, &a, &b, &p, &q, 16, &Sampling::default());
        assert!(r.oracle_violations.is_empty(), "{r:?}");
        assert!(r.left[0] > 0.0);
        assert!(r.vanish_from.is_some_and(|n| n <= 12), "{r:?}");

        let s = two_shift();
        let z = s.homoclinic(3)[5].clone();
        let (a, b) = s.crossing_pair(&z, 0.2, 1).unwrap();
        let r = decay_sequence(&s.model, &a, &b, &s.p_points(), &s.q_points(), 16, &Sampling::default());
        assert!(r.oracle_violations.is_empty() && r.vanish_from.is_some(), "{r:?}");
    }

    #[test]
    fn commutators_decay() {
        let d = golden_torus();
        let (p, q) = (d.p_points(), d.q_points());
        let z = d.homoclinic(2)[7].clone();
        let (a, b) = d.crossing_pair(&z, 0.01, 1).unwrap();
        let r = asymptotic_commutator(&d.model, &a, &b, &p, &q, 30, &Sampling::default());
        assert!(r.corners_agree && r.max_norm_disagreement <= 1e-10, "{r:?}");
        assert!(r.first[30] < 1e-6 && r.second[30] < 1e-6, "{r:?}");
    }

    #[test]
    fn two_sided_profiles() {
        let d = golden_torus();
        let (p, q) = (d.p_points(), d.q_points());
        let z = d.homoclinic(2)[7].clone();
        let (a, b) = d.crossing_pair(&z, 0.01, 1).unwrap();
        let s = Sampling { per_set: 8, crossings: 8, seed: 3 };
        let m = &d.model;
        for (f, g) in [
            (StableGen::Unitary, UnstableGen::Unitary),
            (StableGen::Elem(&a), UnstableGen::Unitary),
            (StableGen::Unitary, UnstableGen::Elem(&b)),
        ] {
            let prof = two_sided_commutator(m, f, g, &p, &q, 6, 1e-6, &s);
            assert!(prof.all_exact_zero, "{prof:?}");
        }
        let prof = two_sided_commutator(m, StableGen::Elem(&a), UnstableGen::Elem(&b), &p, &q, 30, 1e-6, &s);
        assert!(prof.ends_converged == (true, true), "{prof:?}");
    }
}
