//! Periodic orbits, homoclinic bases, and closure of a truncated basis under point maps.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SmaleSpace;

/// A single φ-orbit, listed from its least point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodicOrbit<P> {
    pub points: Vec<P>,
    pub period: u32,
}

impl<P: Clone + Ord> PeriodicOrbit<P> {
    /// The orbit of `x`, which must return to itself within `max_period` steps.
    pub fn of<M: SmaleSpace<Point = P>>(m: &M, x: &P, max_period: u32) -> Result<Self> {
        let mut points = vec![x.clone()];
        let mut y = m.phi(x);
        while &y != x {
            if points.len() as u32 >= max_period {
                return Err(Error::PeriodBound {
                    requested: points.len() as u32 + 1,
                    bound: max_period,
                });
            }
            points.push(y.clone());
            y = m.phi(&y);
        }
        let start = points
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        points.rotate_left(start);
        let period = points.len() as u32;
        Ok(PeriodicOrbit { points, period })
    }

    pub fn contains(&self, x: &P) -> bool {
        self.points.contains(x)
    }
}

/// All orbits whose period divides `period`, ordered by their least point.
pub fn periodic_orbits<M: SmaleSpace>(m: &M, period: u32) -> Result<Vec<PeriodicOrbit<M::Point>>> {
    let pts = m.periodic_points(period)?;
    let mut seen = std::collections::HashSet::new();
    let mut orbits = Vec::new();
    for x in &pts {
        if seen.contains(x) {
            continue;
        }
        let orbit = PeriodicOrbit::of(m, x, period)?;
        seen.extend(orbit.points.iter().cloned());
        orbits.push(orbit);
    }
    orbits.sort_by(|a, b| a.points[0].cmp(&b.points[0]));
    Ok(orbits)
}

/// Checks that `orbits` is a φ-invariant set.
pub fn check_invariant<M: SmaleSpace>(m: &M, orbits: &[PeriodicOrbit<M::Point>]) -> Result<()> {
    for o in orbits {
        for x in &o.points {
            if !orbits.iter().any(|o| o.contains(&m.phi(x))) {
                return Err(Error::NotInvariant(m.encode(x)));
            }
        }
    }
    Ok(())
}

fn flatten<P: Clone>(orbits: &[PeriodicOrbit<P>]) -> Vec<P> {
    orbits
        .iter()
        .flat_map(|o| o.points.iter().cloned())
        .collect()
}

/// An ordered truncation of `X^h(P, Q)`, serving as an orthonormal basis `{δ_x}`.
#[derive(Clone, Debug)]
pub struct HomoclinicBasis<P> {
    pub p: Vec<PeriodicOrbit<P>>,
    pub q: Vec<PeriodicOrbit<P>>,
    points: Vec<P>,
    index: HashMap<P, usize>,
    boundary: Vec<bool>,
}

impl<P: Clone + Ord + std::hash::Hash> HomoclinicBasis<P> {
    /// Builds a basis from arbitrary points of `X^h(P, Q)`; sorts and deduplicates.
    pub fn from_points<M: SmaleSpace<Point = P>>(
        m: &M,
        p: Vec<PeriodicOrbit<P>>,
        q: Vec<PeriodicOrbit<P>>,
        mut points: Vec<P>,
    ) -> Result<Self> {
        validate_pair(m, &p, &q)?;
        points.sort();
        points.dedup();
        let index = points
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, x)| (x, i))
            .collect();
        let boundary = vec![false; points.len()];
        Ok(HomoclinicBasis {
            p,
            q,
            points,
            index,
            boundary,
        })
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, x: &P) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.boundary[i]
    }

    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.points.len()).filter(|&i| !self.boundary[i])
    }

    pub fn p_points(&self) -> Vec<P> {
        flatten(&self.p)
    }

    pub fn q_points(&self) -> Vec<P> {
        flatten(&self.q)
    }

    /// Checks every point is forward asymptotic to P and backward asymptotic to Q.
    pub fn validate<M: SmaleSpace<Point = P>>(&self, m: &M) -> Result<()> {
        let (ps, qs) = (self.p_points(), self.q_points());
        for x in &self.points {
            let fwd = ps.iter().any(|p| m.stably_equivalent(x, p));
            let bwd = qs.iter().any(|q| m.unstably_equivalent(x, q));
            if !(fwd && bwd) {
                return Err(Error::InvalidPoint(format!(
                    "{} is not in X^h(P, Q)",
                    m.encode(x)
                )));
            }
        }
        Ok(())
    }

    pub fn encoded<M: SmaleSpace<Point = P>>(&self, m: &M) -> Vec<String> {
        self.points.iter().map(|x| m.encode(x)).collect()
    }
}

fn validate_pair<M: SmaleSpace>(
    m: &M,
    p: &[PeriodicOrbit<M::Point>],
    q: &[PeriodicOrbit<M::Point>],
) -> Result<()> {
    check_invariant(m, p)?;
    check_invariant(m, q)?;
    if let Some(x) = flatten(p).iter().find(|x| q.iter().any(|o| o.contains(x))) {
        return Err(Error::PeriodicSetsOverlap(m.encode(x)));
    }
    Ok(())
}

/// All homoclinic points of size at most `size`.
pub fn enumerate_homoclinic<M: SmaleSpace>(
    m: &M,
    p: Vec<PeriodicOrbit<M::Point>>,
    q: Vec<PeriodicOrbit<M::Point>>,
    size: u32,
) -> Result<HomoclinicBasis<M::Point>> {
    validate_pair(m, &p, &q)?;
    let pts = m.homoclinic_points(&flatten(&p), &flatten(&q), size);
    HomoclinicBasis::from_points(m, p, q, pts)
}

/// A named partial map on points; `None` means the image is undefined and dropped.
pub struct PointMap<'a, P> {
    pub name: String,
    #[allow(clippy::type_complexity)]
    pub f: Box<dyn Fn(&P) -> Option<P> + Sync + 'a>,
}

impl<'a, P> PointMap<'a, P> {
    pub fn new(name: impl Into<String>, f: impl Fn(&P) -> Option<P> + Sync + 'a) -> Self {
        PointMap {
            name: name.into(),
            f: Box::new(f),
        }
    }
}

/// Closes `basis` under `maps` for at most `depth` rounds, failing once more than `cap`
/// points would be needed. Points whose defined images fall outside are marked boundary.
pub fn basis_closure<P: Clone + Ord + std::hash::Hash>(
    basis: &HomoclinicBasis<P>,
    maps: &[PointMap<'_, P>],
    depth: usize,
    cap: usize,
) -> Result<HomoclinicBasis<P>> {
    let mut points = basis.points.clone();
    let mut index: HashMap<P, usize> = basis.index.clone();
    let mut queue: VecDeque<(usize, usize)> = (0..points.len()).map(|i| (i, 0)).collect();
    while let Some((i, d)) = queue.pop_front() {
        if d >= depth {
            continue;
        }
        for map in maps {
            let Some(y) = (map.f)(&points[i]) else {
                continue;
            };
            if index.contains_key(&y) {
                continue;
            }
            if points.len() >= cap {
                return Err(Error::ClosureCap {
                    cap,
                    map: map.name.clone(),
                });
            }
            index.insert(y.clone(), points.len());
            points.push(y);
            queue.push_back((points.len() - 1, d + 1));
        }
    }
    points.sort();
    let index: HashMap<P, usize> = points
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, x)| (x, i))
        .collect();
    let boundary = points
        .iter()
        .map(|x| {
            maps.iter()
                .any(|map| (map.f)(x).is_some_and(|y| !index.contains_key(&y)))
        })
        .collect();
    Ok(HomoclinicBasis {
        p: basis.p.clone(),
        q: basis.q.clone(),
        points,
        index,
        boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{SftModel, SftPoint, TorusModel};

    fn two_shift_pq(m: &SftModel) -> (Vec<PeriodicOrbit<SftPoint>>, Vec<PeriodicOrbit<SftPoint>>) {
        let fixed = periodic_orbits(m, 1).unwrap();
        (vec![fixed[0].clone()], vec![fixed[1].clone()])
    }

    #[test]
    fn orbit_counts() {
        let m = SftModel::full_shift(2).unwrap();
        assert_eq!(periodic_orbits(&m, 1).unwrap().len(), 2);
        // Period dividing 4 on the 2-shift: 2 fixed, 1 of period 2, 3 of period 4.
        assert_eq!(periodic_orbits(&m, 4).unwrap().len(), 6);
        let t = TorusModel::golden();
        assert_eq!(periodic_orbits(&t, 1).unwrap().len(), 1);
        let three = periodic_orbits(&t, 3).unwrap();
        let mut sizes: Vec<u32> = three.iter().map(|o| o.period).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 3]);
    }

    #[test]
    fn overlap_is_rejected() {
        let m = SftModel::full_shift(2).unwrap();
        let fixed = periodic_orbits(&m, 1).unwrap();
        let err = enumerate_homoclinic(&m, fixed.clone(), fixed, 2).unwrap_err();
        assert!(matches!(err, Error::PeriodicSetsOverlap(_)));
    }

    #[test]
    fn non_invariant_set_is_rejected() {
        let m = SftModel::full_shift(2).unwrap();
        let two = periodic_orbits(&m, 2)
            .unwrap()
            .into_iter()
            .find(|o| o.period == 2)
            .unwrap();
        let half = PeriodicOrbit {
            points: vec![two.points[0].clone()],
            period: 2,
        };
        let fixed = periodic_orbits(&m, 1).unwrap();
        assert!(matches!(
            enumerate_homoclinic(&m, vec![half], fixed, 1),
            Err(Error::NotInvariant(_))
        ));
    }

    #[test]
    fn two_shift_basis_matches_brute_force() {
        let m = SftModel::full_shift(2).unwrap();
        let (p, q) = two_shift_pq(&m);
        let basis = enumerate_homoclinic(&m, p, q, 3).unwrap();
        basis.validate(&m).unwrap();
        // Oracle: 1^∞ w 0^∞ over all words w on [-3, 3), deduplicated by set semantics on
        // explicit bit windows of length 12 around the origin.
        let mut windows = std::collections::BTreeSet::new();
        for bits in 0u32..64 {
            let w: Vec<u8> = (0..6).map(|k| ((bits >> k) & 1) as u8).collect();
            let seq: Vec<u8> = (-6i64..6)
                .map(|i| {
                    if i < -3 {
                        1
                    } else if i >= 3 {
                        0
                    } else {
                        w[(i + 3) as usize]
                    }
                })
                .collect();
            windows.insert(seq);
        }
        assert_eq!(basis.len(), windows.len());
        let switch = m.point(&[1], &[], &[0], 0).unwrap();
        assert!(basis.index_of(&switch).is_some());
    }

    #[test]
    fn closure_behaviour() {
        let m = SftModel::full_shift(2).unwrap();
        let (p, q) = two_shift_pq(&m);
        let basis = enumerate_homoclinic(&m, p, q, 1).unwrap();
        let same = basis_closure(&basis, &[], 10, 1000).unwrap();
        assert_eq!(same.points(), basis.points());
        let phi = PointMap::new("phi", |x: &SftPoint| Some(m.phi(x)));
        let err = basis_closure(&basis, &[phi], usize::MAX, 50).unwrap_err();
        assert!(matches!(err, Error::ClosureCap { map, .. } if map == "phi"));
        let phi = PointMap::new("phi", |x: &SftPoint| Some(m.phi(x)));
        let grown = basis_closure(&basis, &[phi], 3, 1000).unwrap();
        assert!(grown.interior().count() > 0 && grown.interior().count() < grown.len());
        let g = basis.points()[1].clone();
        let br = PointMap::new("bracket", move |x: &SftPoint| m.bracket(x, &g));
        let closed = basis_closure(&basis, &[br], usize::MAX, 1000).unwrap();
        assert_eq!(closed.interior().count(), closed.len());
    }

    #[test]
    fn torus_basis_points_are_homoclinic() {
        let t = TorusModel::golden();
        let p = periodic_orbits(&t, 1).unwrap();
        let q: Vec<_> = periodic_orbits(&t, 3)
            .unwrap()
            .into_iter()
            .filter(|o| o.period == 3)
            .collect();
        let basis = enumerate_homoclinic(&t, p, q, 2).unwrap();
        assert_eq!(basis.len(), 75);
        basis.validate(&t).unwrap();
    }
}
