//! Basic-set elements of the stable and unstable algebras as exact weighted partial maps.

use indexmap::IndexSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SmaleSpace;
use crate::orbit::HomoclinicBasis;
use crate::ops::Sparse;
use crate::partition::squared_bump;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HolonomyKind {
    /// Moves points along local unstable sets; lives in the stable algebra.
    Stable,
    /// Moves points along local stable sets; lives in the unstable algebra.
    Unstable,
}

/// Coefficient as a function of the source point, in terms of `ρ = d(x, w) / δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Profile {
    Zero,
    /// `c` on the whole domain; discontinuous at the rim.
    Constant(f64),
    /// `amplitude · cos²(πρ/2)`, vanishing continuously at the rim.
    Cosine { amplitude: f64 },
}

impl Profile {
    pub fn at(&self, rho: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Constant(c) if rho < 1.0 => c,
            Profile::Constant(_) => 0.0,
            Profile::Cosine { amplitude } => amplitude * squared_bump(rho),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Constant(c) => c.abs(),
            Profile::Cosine { amplitude } => amplitude.abs(),
        }
    }
}

/// A function on the graph of a local holonomy `h`, twisted by `α^twist`.
///
/// Stable kind: `h(x) = φ^{-N}[φ^N x, φ^N v]` on `X^u(w, δ)`.
/// Unstable kind: `h(x) = φ^N[φ^{-N} v, φ^{-N} x]` on `X^s(w, δ)`.
#[derive(Clone, Debug)]
pub struct LocalHolonomy<P> {
    pub kind: HolonomyKind,
    pub v: P,
    pub w: P,
    pub n: u32,
    pub delta: f64,
    pub profile: Profile,
    pub twist: i64,
    /// Radius `ε'` controlling the pushed domain.
    pub eps_prime: f64,
}

/// A weighted partial map `x ↦ c·δ_y`.
pub type Weighted<P> = Option<(P, f64)>;

impl<P: Clone + Eq + std::hash::Hash> LocalHolonomy<P> {
    /// Finds the smallest `N ≤ n_cap` that brings `w` into the local set of `v`.
    #[allow(clippy::too_many_arguments)]
    pub fn new<M: SmaleSpace<Point = P>>(
        m: &M,
        kind: HolonomyKind,
        v: P,
        w: P,
        delta: f64,
        profile: Profile,
        eps_prime: f64,
        n_cap: u32,
    ) -> Result<Self> {
        let equivalent = match kind {
            HolonomyKind::Stable => m.stably_equivalent(&v, &w),
            HolonomyKind::Unstable => m.unstably_equivalent(&v, &w),
        };
        if !equivalent {
            return Err(Error::InvalidPoint(format!(
                "{} and {} are not {:?}-equivalent",
                m.encode(&v),
                m.encode(&w),
                kind
            )));
        }
        let n = (0..=n_cap)
            .find(|&k| match kind {
                HolonomyKind::Stable => {
                    m.in_local_stable(&m.iterate(&w, k as i64), &m.iterate(&v, k as i64), eps_prime)
                }
                HolonomyKind::Unstable => m.in_local_unstable(
                    &m.iterate(&w, -(k as i64)),
                    &m.iterate(&v, -(k as i64)),
                    eps_prime,
                ),
            })
            .ok_or_else(|| Error::InvalidPoint(format!("no holonomy within {n_cap} steps")))?;
        Ok(LocalHolonomy { kind, v, w, n, delta, profile, twist: 0, eps_prime })
    }

    /// `α^k` of this element.
    pub fn alpha(&self, k: i64) -> Self {
        LocalHolonomy { twist: self.twist + k, ..self.clone() }
    }

    pub fn with_profile(&self, profile: Profile) -> Self {
        LocalHolonomy { profile, ..self.clone() }
    }

    fn in_domain<M: SmaleSpace<Point = P>>(&self, m: &M, x: &P, center: &P, r: f64) -> bool {
        match self.kind {
            HolonomyKind::Stable => m.in_local_unstable(x, center, r),
            HolonomyKind::Unstable => m.in_local_stable(x, center, r),
        }
    }

    /// The untwisted holonomy with the roles of `v` and `w` given.
    fn holonomy<M: SmaleSpace<Point = P>>(&self, m: &M, x: &P, from: &P, to: &P) -> Option<P> {
        let k = self.n as i64;
        match self.kind {
            HolonomyKind::Stable => {
                let xn = m.iterate(x, k);
                if !m.in_local_unstable(&xn, &m.iterate(from, k), self.eps_prime) {
                    return None;
                }
                let z = m.iterate(&m.bracket(&xn, &m.iterate(to, k))?, -k);
                m.in_local_unstable(&z, to, m.eps_x() / 2.0).then_some(z)
            }
            HolonomyKind::Unstable => {
                let xn = m.iterate(x, -k);
                if !m.in_local_stable(&xn, &m.iterate(from, -k), self.eps_prime) {
                    return None;
                }
                let z = m.iterate(&m.bracket(&m.iterate(to, -k), &xn)?, k);
                m.in_local_stable(&z, to, m.eps_x() / 2.0).then_some(z)
            }
        }
    }

    /// Coefficient at a source point of the untwisted element.
    pub fn coefficient<M: SmaleSpace<Point = P>>(&self, m: &M, x: &P) -> f64 {
        if !self.in_domain(m, x, &self.w, self.delta) {
            return 0.0;
        }
        self.profile.at(m.dist(x, &self.w) / self.delta)
    }

    fn untwisted<M: SmaleSpace<Point = P>>(&self, m: &M, x: &P) -> Weighted<P> {
        let c = self.coefficient(m, x);
        if c == 0.0 {
            return None;
        }
        Some((self.holonomy(m, x, &self.w, &self.v)?, c))
    }

    fn untwisted_adjoint<M: SmaleSpace<Point = P>>(&self, m: &M, y: &P) -> Weighted<P> {
        let x = self.holonomy(m, y, &self.v, &self.w)?;
        let (back, c) = self.untwisted(m, &x)?;
        (back == *y).then_some((x, c))
    }

    /// `e δ_x`.
    pub fn apply<M: SmaleSpace<Point = P>>(&self, m: &M, x: &P) -> Weighted<P> {
        let (y, c) = self.untwisted(m, &m.iterate(x, -self.twist))?;
        Some((m.iterate(&y, self.twist), c))
    }

    /// `e* δ_y`.
    pub fn apply_adjoint<M: SmaleSpace<Point = P>>(&self, m: &M, y: &P) -> Weighted<P> {
        let (x, c) = self.untwisted_adjoint(m, &m.iterate(y, -self.twist))?;
        Some((m.iterate(&x, self.twist), c))
    }

    /// Source-side centre and radius after twisting, as a local set of the right kind.
    pub fn source_ball<M: SmaleSpace<Point = P>>(&self, m: &M) -> (P, f64) {
        (m.iterate(&self.w, self.twist), self.delta * self.twist_scale(m))
    }

    pub fn range_ball<M: SmaleSpace<Point = P>>(&self, m: &M) -> (P, f64) {
        (m.iterate(&self.v, self.twist), m.eps_x() / 2.0 * self.twist_scale(m))
    }

    /// Factor by which `φ^twist` scales the relevant local sets (an upper bound).
    fn twist_scale<M: SmaleSpace<Point = P>>(&self, m: &M) -> f64 {
        let expands = match self.kind {
            HolonomyKind::Stable => self.twist > 0,
            HolonomyKind::Unstable => self.twist < 0,
        };
        let steps = self.twist.unsigned_abs() as i32;
        if expands {
            m.phi_lipschitz().powi(steps)
        } else {
            m.lambda().powi(steps)
        }
    }
}

/// One factor of an operator word.
#[derive(Debug)]
pub enum Factor<'a, P> {
    Elem(&'a LocalHolonomy<P>),
    Adjoint(&'a LocalHolonomy<P>),
    /// `u^k`.
    Shift(i64),
}

impl<P> Clone for Factor<'_, P> {
    fn clone(&self) -> Self {
        *self
    }
}
impl<P> Copy for Factor<'_, P> {}

impl<P: Clone + Eq + std::hash::Hash> Factor<'_, P> {
    pub fn apply<M: SmaleSpace<Point = P>>(&self, m: &M, x: &P) -> Weighted<P> {
        match self {
            Factor::Elem(e) => e.apply(m, x),
            Factor::Adjoint(e) => e.apply_adjoint(m, x),
            Factor::Shift(k) => Some((m.iterate(x, *k), 1.0)),
        }
    }
}

/// `Σ coeff · (f_1 ⋯ f_r)`, each word applied right to left.
pub type Expr<'a, P> = Vec<(f64, Vec<Factor<'a, P>>)>;

pub fn apply_word<M: SmaleSpace>(m: &M, word: &[Factor<'_, M::Point>], x: &M::Point) -> Weighted<M::Point> {
    let mut cur = (x.clone(), 1.0);
    for f in word.iter().rev() {
        let (y, c) = f.apply(m, &cur.0)?;
        cur = (y, cur.1 * c);
    }
    Some(cur)
}

/// An expression restricted to a list of column points; rows are indexed by `rows`,
/// which starts with the columns.
#[derive(Clone, Debug)]
pub struct Assembled<P: std::hash::Hash + Eq> {
    pub rows: IndexSet<P>,
    pub matrix: Sparse,
}

pub fn assemble<M: SmaleSpace>(m: &M, expr: &Expr<'_, M::Point>, columns: &[M::Point]) -> Assembled<M::Point> {
    let images: Vec<Vec<(M::Point, f64)>> = columns
        .par_iter()
        .map(|x| {
            expr.iter()
                .filter_map(|(c, word)| apply_word(m, word, x).map(|(y, v)| (y, c * v)))
                .collect()
        })
        .collect();
    let mut rows: IndexSet<M::Point> = columns.iter().cloned().collect();
    let cols = images
        .into_iter()
        .map(|img| img.into_iter().map(|(y, v)| (rows.insert_full(y).0, v)).collect())
        .collect();
    Assembled { matrix: Sparse::from_columns(rows.len(), cols), rows }
}

/// The element on a fixed basis. Images of interior points must stay in the basis;
/// boundary columns whose images leave are dropped.
pub fn as_operator<M: SmaleSpace>(
    m: &M,
    e: &LocalHolonomy<M::Point>,
    basis: &HomoclinicBasis<M::Point>,
) -> Result<Sparse>
where
    M::Point: Ord,
{
    word_on_basis(m, &[Factor::Elem(e)], basis, "element")
}

/// `u δ_x = δ_{φ(x)}` on the basis, leaving boundary columns empty when `φ(x)` is outside.
pub fn shift_unitary<M: SmaleSpace>(m: &M, basis: &HomoclinicBasis<M::Point>, power: i64) -> Sparse
where
    M::Point: Ord,
{
    let cols = basis
        .points()
        .par_iter()
        .map(|x| basis.index_of(&m.iterate(x, power)).map(|i| vec![(i, 1.0)]).unwrap_or_default())
        .collect();
    Sparse::from_columns(basis.len(), cols)
}

pub fn word_on_basis<M: SmaleSpace>(
    m: &M,
    word: &[Factor<'_, M::Point>],
    basis: &HomoclinicBasis<M::Point>,
    name: &str,
) -> Result<Sparse>
where
    M::Point: Ord,
{
    let cols: Vec<Result<Vec<(usize, f64)>>> = basis
        .points()
        .par_iter()
        .enumerate()
        .map(|(i, x)| match apply_word(m, word, x) {
            None => Ok(Vec::new()),
            Some((y, c)) => match basis.index_of(&y) {
                Some(j) => Ok(vec![(j, c)]),
                None if basis.is_boundary(i) => Ok(Vec::new()),
                None => Err(Error::Escape { map: name.into(), from: m.encode(x) }),
            },
        })
        .collect();
    Ok(Sparse::from_columns(basis.len(), cols.into_iter().collect::<Result<_>>()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{SftModel, TorusModel};
    use crate::orbit::{basis_closure, enumerate_homoclinic, periodic_orbits, PointMap};

    #[test]
    fn zero_profile_is_zero_operator() {
        let m = SftModel::full_shift(2).unwrap();
        let o = periodic_orbits(&m, 1).unwrap();
        let basis = enumerate_homoclinic(&m, vec![o[0].clone()], vec![o[1].clone()], 3).unwrap();
        let x = basis.points()[5].clone();
        let e = LocalHolonomy::new(&m, HolonomyKind::Stable, x.clone(), x, 0.25, Profile::Zero, 0.25, 0).unwrap();
        assert_eq!(as_operator(&m, &e, &basis).unwrap().nnz(), 0);
    }

    #[test]
    fn identity_holonomy_is_diagonal() {
        let m = TorusModel::golden();
        let p = periodic_orbits(&m, 1).unwrap();
        let q: Vec<_> = periodic_orbits(&m, 3).unwrap().into_iter().filter(|o| o.period == 3).collect();
        let basis = enumerate_homoclinic(&m, p, q, 3).unwrap();
        let x = basis.points()[10].clone();
        let eps = m.eps_x_prime_analytic();
        let e = LocalHolonomy::new(&m, HolonomyKind::Stable, x.clone(), x.clone(), eps, Profile::Constant(1.0), eps, 0).unwrap();
        let a = as_operator(&m, &e, &basis).unwrap();
        let mut hits = 0;
        for (i, y) in basis.points().iter().enumerate() {
            let expected = f64::from(m.in_local_unstable(y, &x, eps));
            assert_eq!(a.get(i, i), expected);
            hits += expected as usize;
        }
        assert!(hits >= 1 && a.nnz() == hits);
    }

    #[test]
    fn conjugation_matches_alpha_and_norm_is_max_coefficient() {
        let m = TorusModel::golden();
        let p = periodic_orbits(&m, 1).unwrap();
        let q: Vec<_> = periodic_orbits(&m, 3).unwrap().into_iter().filter(|o| o.period == 3).collect();
        let base = enumerate_homoclinic(&m, p, q, 2).unwrap();
        let eps = m.eps_x_prime_analytic();
        let (v, w) = (base.points()[3].clone(), base.points()[40].clone());
        let e = LocalHolonomy::new(&m, HolonomyKind::Stable, v, w, 0.5, Profile::Cosine { amplitude: 0.7 }, eps, 30).unwrap();
        let maps = [
            PointMap::new("u", |x| Some(m.phi(x))),
            PointMap::new("u*", |x| Some(m.phi_inv(x))),
            PointMap::new("a", |x| e.apply(&m, x).map(|t| t.0)),
            PointMap::new("a*", |x| e.apply_adjoint(&m, x).map(|t| t.0)),
        ];
        let basis = basis_closure(&base, &maps, 3, 20_000).unwrap();
        let a = as_operator(&m, &e, &basis).unwrap();
        assert!(a.is_weighted_partial_permutation());
        let scan = basis
            .points()
            .iter()
            .filter(|x| e.apply(&m, x).is_some_and(|(y, _)| basis.index_of(&y).is_some()))
            .map(|x| e.coefficient(&m, x).abs())
            .fold(0.0, f64::max);
        assert_eq!(a.norm_exact(), scan);
        assert!(scan > 0.0 && scan <= 0.7);
        let u = shift_unitary(&m, &basis, 1);
        let ustar = u.transpose();
        let conj = u.mul(&a).mul(&ustar);
        let alpha = as_operator(&m, &e.alpha(1), &basis).unwrap();
        let mut checked = 0;
        for c in basis.interior() {
            let x = &basis.points()[c];
            let inner = basis.index_of(&m.phi_inv(x));
            let ok = inner.is_some_and(|j| !basis.is_boundary(j))
                && e.alpha(1).apply(&m, x).is_none_or(|(y, _)| basis.index_of(&m.phi_inv(&y)).is_some());
            if ok {
                assert_eq!(conj.column(c), alpha.column(c));
                checked += usize::from(!alpha.column(c).is_empty());
            }
        }
        assert!(checked > 0);
        let u2 = shift_unitary(&m, &basis, 2);
        let uu = u.mul(&u);
        for c in basis.interior().take(100) {
            let (r, v) = u.column(c)[0];
            assert_eq!((&basis.points()[r], v), (&m.phi(&basis.points()[c]), 1.0));
            if !u.column(r).is_empty() {
                assert_eq!(uu.column(c), u2.column(c));
            }
        }
    }
}
