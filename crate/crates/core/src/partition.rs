//! Certified ε'_X, ε-partitions with cosine bumps, and the homotopy family over `G ∪ φ(G)`.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SmaleSpace;

/// Squared bump profile: `cos²(πρ/2)` on `[0, 1)`, zero beyond.
pub fn squared_bump(rho: f64) -> f64 {
    if rho < 1.0 {
        let c = (FRAC_PI_2 * rho).cos();
        c * c
    } else {
        0.0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsPrimeCertificate {
    pub value: f64,
    pub samples: u64,
    /// Largest `d(x, [x, y]) / (ε_X/2)` seen; below 1 when certified.
    pub worst_x: f64,
    pub worst_y: f64,
}

/// Certifies the model's ε'_X candidate by sampling pairs at distance below it.
///
/// The sampler promises `d(x, y) <= r` for `random_near(x, r)`; a metric that disagrees
/// with its own sampler fails calibration.
pub fn epsilon_x_prime<M: SmaleSpace>(
    m: &M,
    samples: u64,
    seed: u64,
) -> Result<EpsPrimeCertificate> {
    let c = m.eps_x_prime_candidate();
    let half = m.eps_x() / 2.0;
    if !(c > 0.0 && c <= half) {
        return Err(Error::Certification(format!(
            "candidate {c} is not in (0, ε_X/2 = {half}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst_x, mut worst_y) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let x = m.random_point(&mut rng);
        let y = m.random_near(&x, c, &mut rng);
        let d = m.dist(&x, &y);
        if d > c {
            return Err(Error::Certification(format!(
                "sampler calibration: d = {d} exceeds requested radius {c} at {}",
                m.encode(&x)
            )));
        }
        if d >= c {
            continue;
        }
        let Some(b) = m.bracket(&x, &y) else {
            return Err(Error::Certification(format!(
                "bracket undefined at distance {d} < ε'_X"
            )));
        };
        worst_x = worst_x.max(m.dist(&x, &b) / half);
        worst_y = worst_y.max(m.dist(&y, &b) / half);
        if worst_x >= 1.0 || worst_y >= 1.0 {
            return Err(Error::Certification(format!(
                "bracket of {} and {} leaves the ε_X/2 ball",
                m.encode(&x),
                m.encode(&y)
            )));
        }
    }
    Ok(EpsPrimeCertificate {
        value: c,
        samples,
        worst_x,
        worst_y,
    })
}

/// A finite family `{f_k}` with centers `{g_k}` whose squares sum to one.
pub trait BumpFamily<M: SmaleSpace>: Sync {
    fn epsilon(&self) -> f64;
    fn centers(&self) -> &[M::Point];
    fn center_index(&self, g: &M::Point) -> Option<usize>;
    /// Nonzero values `f_k(x)`, ascending in `k`.
    fn values(&self, m: &M, x: &M::Point) -> Vec<(usize, f64)>;
}

/// An ε-partition, optionally pushed forward by `φ^shift` (centers `φ^shift(g)` and bumps
/// `f ∘ φ^{-shift}`).
#[derive(Clone, Debug)]
pub struct EpsilonPartition<P> {
    pub epsilon: f64,
    /// Bump radius measured at the unshifted centers.
    pub radius: f64,
    base: Vec<P>,
    centers: Vec<P>,
    shift: i64,
    index: HashMap<P, usize>,
}

impl<P: Clone + Eq + std::hash::Hash> EpsilonPartition<P> {
    fn assemble<M: SmaleSpace<Point = P>>(
        m: &M,
        epsilon: f64,
        radius: f64,
        base: Vec<P>,
        shift: i64,
    ) -> Result<Self> {
        let centers: Vec<P> = base.iter().map(|g| m.iterate(g, shift)).collect();
        let index: HashMap<P, usize> = centers
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, g)| (g, i))
            .collect();
        if index.len() != centers.len() {
            return Err(Error::Partition("centers are not distinct".into()));
        }
        Ok(EpsilonPartition {
            epsilon,
            radius,
            base,
            centers,
            shift,
            index,
        })
    }

    /// A partition on explicit centers with bump radius `epsilon/2`, rejected when sampled
    /// points fall outside every support.
    pub fn from_centers<M: SmaleSpace<Point = P>>(
        m: &M,
        epsilon: f64,
        centers: Vec<P>,
        samples: u64,
        seed: u64,
    ) -> Result<Self> {
        let p = Self::assemble(m, epsilon, epsilon / 2.0, centers, 0)?;
        let check = partition_check(m, &p, samples, seed);
        if let Some(w) = check.uncovered_witness {
            return Err(Error::Partition(format!(
                "{w} lies outside every ε/2-ball around the centers"
            )));
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn center_index_of(&self, g: &P) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn center_points(&self) -> &[P] {
        &self.centers
    }

    /// `(F ∘ φ^{-1}, φ(G))`.
    pub fn pushed<M: SmaleSpace<Point = P>>(&self, m: &M) -> Result<Self> {
        Self::assemble(
            m,
            self.epsilon,
            self.radius,
            self.base.clone(),
            self.shift + 1,
        )
    }

    /// Raw squared bumps before normalization.
    fn raw<M: SmaleSpace<Point = P>>(&self, m: &M, x: &P) -> Vec<(usize, f64)> {
        let y = if self.shift == 0 {
            x.clone()
        } else {
            m.iterate(x, -self.shift)
        };
        self.base
            .iter()
            .enumerate()
            .filter_map(|(k, g)| {
                let t = squared_bump(m.dist(&y, g) / self.radius);
                (t > 0.0).then_some((k, t))
            })
            .collect()
    }
}

impl<M: SmaleSpace> BumpFamily<M> for EpsilonPartition<M::Point> {
    fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn centers(&self) -> &[M::Point] {
        &self.centers
    }

    fn center_index(&self, g: &M::Point) -> Option<usize> {
        self.index.get(g).copied()
    }

    fn values(&self, m: &M, x: &M::Point) -> Vec<(usize, f64)> {
        let raw = self.raw(m, x);
        let total: f64 = raw.iter().map(|(_, t)| t).sum();
        raw.into_iter()
            .map(|(k, t)| (k, (t / total).sqrt()))
            .collect()
    }
}

/// Builds an ε-partition from homoclinic points near a cover of `X`.
///
/// With `require_phi_disjoint`, bumps shrink to radius `ε/(2·Lip φ)` so the pushed family is
/// again an ε-partition, and `G ∩ φ(G) = ∅` is enforced.
#[allow(clippy::too_many_arguments)]
pub fn build_partition<M: SmaleSpace>(
    m: &M,
    p: &[M::Point],
    q: &[M::Point],
    epsilon: f64,
    eps_prime: f64,
    require_phi_disjoint: bool,
    size: u32,
) -> Result<EpsilonPartition<M::Point>> {
    if !(epsilon > 0.0 && epsilon <= eps_prime) {
        return Err(Error::Partition(format!(
            "ε = {epsilon} must lie in (0, ε'_X = {eps_prime}]"
        )));
    }
    let eff = if require_phi_disjoint {
        epsilon / m.phi_lipschitz()
    } else {
        epsilon
    };
    let radius = eff / 2.0;
    let targets = m.cover_centers(0.45 * radius);
    // Each candidate carries its φ and φ⁻¹ images.
    let with_images = |cands: Vec<Vec<M::Point>>| -> Vec<Vec<[M::Point; 3]>> {
        cands
            .into_par_iter()
            .map(|cs| {
                cs.into_iter()
                    .map(|c| {
                        let (f, b) = if require_phi_disjoint {
                            (m.phi(&c), m.phi_inv(&c))
                        } else {
                            (c.clone(), c.clone())
                        };
                        [c, f, b]
                    })
                    .collect()
            })
            .collect()
    };
    let mut options = with_images(m.homoclinic_cover(&targets, radius / 2.0, p, q, size, 1)?);
    // Greedy choice per target; with the flag, skip candidates whose φ-neighbours are taken.
    // Targets that clash get a batch of alternatives and the pass is repeated.
    let mut widened = vec![false; targets.len()];
    let chosen = loop {
        let mut chosen: Vec<M::Point> = Vec::new();
        let mut taken = std::collections::HashSet::new();
        let mut stuck = Vec::new();
        for (i, cands) in options.iter().enumerate() {
            let clash = |c: &[M::Point; 3]| {
                require_phi_disjoint
                    && !taken.contains(&c[0])
                    && (taken.contains(&c[1]) || taken.contains(&c[2]))
            };
            match cands.iter().find(|c| !clash(c)) {
                Some(g) => {
                    if taken.insert(g[0].clone()) {
                        chosen.push(g[0].clone());
                    }
                }
                None => stuck.push(i),
            }
        }
        if stuck.is_empty() {
            break chosen;
        }
        if let Some(&i) = stuck.iter().find(|&&i| widened[i]) {
            return Err(Error::Partition(format!(
                "no center near {} avoids φ(G)",
                m.encode(&targets[i])
            )));
        }
        let subset: Vec<M::Point> = stuck.iter().map(|&i| targets[i].clone()).collect();
        let alts = with_images(m.homoclinic_cover(&subset, radius / 2.0, p, q, size, 8)?);
        for (i, alt) in stuck.into_iter().zip(alts) {
            options[i] = alt;
            widened[i] = true;
        }
    };
    let part = EpsilonPartition::assemble(m, epsilon, radius, chosen, 0)?;
    if require_phi_disjoint {
        if let Some(g) = part
            .centers
            .iter()
            .find(|g| part.index.contains_key(&m.phi(g)))
        {
            return Err(Error::Partition(format!(
                "G meets φ(G) at {}",
                m.encode(&m.phi(g))
            )));
        }
    }
    Ok(part)
}

/// `F_s = √(1-s)·F ∪ √s·(F ∘ φ^{-1})` on `G ∪ φ(G)`.
#[derive(Clone, Debug)]
pub struct HomotopyFamily<P> {
    pub s: f64,
    base: EpsilonPartition<P>,
    pushed: EpsilonPartition<P>,
    centers: Vec<P>,
    index: HashMap<P, usize>,
}

impl<P: Clone + Eq + std::hash::Hash> HomotopyFamily<P> {
    pub fn new<M: SmaleSpace<Point = P>>(
        m: &M,
        base: &EpsilonPartition<P>,
        s: f64,
    ) -> Result<Self> {
        let pushed = base.pushed(m)?;
        let centers: Vec<P> = base
            .centers
            .iter()
            .chain(&pushed.centers)
            .cloned()
            .collect();
        let index: HashMap<P, usize> = centers
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, g)| (g, i))
            .collect();
        if index.len() != centers.len() {
            return Err(Error::Partition("G and φ(G) intersect".into()));
        }
        Ok(HomotopyFamily {
            s,
            base: base.clone(),
            pushed,
            centers,
            index,
        })
    }

    pub fn base(&self) -> &EpsilonPartition<P> {
        &self.base
    }

    pub fn pushed(&self) -> &EpsilonPartition<P> {
        &self.pushed
    }
}

impl<M: SmaleSpace> BumpFamily<M> for HomotopyFamily<M::Point> {
    fn epsilon(&self) -> f64 {
        self.base.epsilon
    }

    fn centers(&self) -> &[M::Point] {
        &self.centers
    }

    fn center_index(&self, g: &M::Point) -> Option<usize> {
        self.index.get(g).copied()
    }

    fn values(&self, m: &M, x: &M::Point) -> Vec<(usize, f64)> {
        let k0 = self.base.len();
        let (a, b) = ((1.0 - self.s).sqrt(), self.s.sqrt());
        let mut out: Vec<(usize, f64)> = Vec::new();
        if a > 0.0 {
            out.extend(
                BumpFamily::<M>::values(&self.base, m, x)
                    .into_iter()
                    .map(|(k, f)| (k, a * f)),
            );
        }
        if b > 0.0 {
            out.extend(
                BumpFamily::<M>::values(&self.pushed, m, x)
                    .into_iter()
                    .map(|(k, f)| (k0 + k, b * f)),
            );
        }
        out
    }
}

/// The grid `s = j/steps` of homotopy families.
pub fn homotopy_families<M: SmaleSpace>(
    m: &M,
    base: &EpsilonPartition<M::Point>,
    steps: u32,
) -> Result<Vec<HomotopyFamily<M::Point>>> {
    (0..=steps)
        .map(|j| HomotopyFamily::new(m, base, j as f64 / steps as f64))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionCheck {
    pub samples: u64,
    pub centers: usize,
    pub max_unity_residual: f64,
    pub uncovered: u64,
    pub uncovered_witness: Option<String>,
    pub support_violations: u64,
    pub max_active: usize,
}

/// Samples `Σ f_k² = 1` and `f_k(x) ≠ 0 ⇒ d(x, g_k) < ε/2`.
pub fn partition_check<M: SmaleSpace, F: BumpFamily<M>>(
    m: &M,
    f: &F,
    samples: u64,
    seed: u64,
) -> PartitionCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<M::Point> = (0..samples).map(|_| m.random_point(&mut rng)).collect();
    let rows: Vec<(f64, bool, u64, usize)> = xs
        .par_iter()
        .map(|x| {
            let vals = f.values(m, x);
            let sum: f64 = vals.iter().map(|(_, v)| v * v).sum();
            let bad = vals
                .iter()
                .filter(|(k, _)| m.dist(x, &f.centers()[*k]) >= f.epsilon() / 2.0)
                .count();
            ((sum - 1.0).abs(), vals.is_empty(), bad as u64, vals.len())
        })
        .collect();
    let mut out = PartitionCheck {
        samples,
        centers: f.centers().len(),
        max_unity_residual: 0.0,
        uncovered: 0,
        uncovered_witness: None,
        support_violations: 0,
        max_active: 0,
    };
    for (x, (res, empty, bad, active)) in xs.iter().zip(rows) {
        out.max_unity_residual = out.max_unity_residual.max(res);
        out.support_violations += bad;
        out.max_active = out.max_active.max(active);
        if empty {
            out.uncovered += 1;
            if out.uncovered_witness.is_none() {
                out.uncovered_witness = Some(m.encode(x));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ScaledMetric, SftModel, TorusModel};
    use crate::orbit::periodic_orbits;

    #[test]
    fn eps_prime_values() {
        let sft = SftModel::full_shift(2).unwrap();
        assert_eq!(epsilon_x_prime(&sft, 2000, 1).unwrap().value, 0.25);
        let t = TorusModel::golden();
        let c = epsilon_x_prime(&t, 2000, 1).unwrap();
        assert!((c.value - t.eps_x() / (2.0 * t.projection_norm())).abs() < 1e-15);
        let bad = ScaledMetric {
            inner: SftModel::full_shift(2).unwrap(),
            factor: 10.0,
        };
        assert!(matches!(
            epsilon_x_prime(&bad, 2000, 1),
            Err(Error::Certification(_))
        ));
    }

    #[test]
    fn single_center_is_rejected() {
        let m = SftModel::full_shift(2).unwrap();
        let p = periodic_orbits(&m, 1).unwrap();
        let g = m.homoclinic_points(&p[0].points, &p[1].points, 0);
        let err = EpsilonPartition::from_centers(&m, 0.25, vec![g[0].clone()], 200, 3).unwrap_err();
        assert!(matches!(err, Error::Partition(_)));
    }

    #[test]
    fn sft_partition_is_a_partition_of_unity() {
        let m = SftModel::full_shift(2).unwrap();
        let o = periodic_orbits(&m, 1).unwrap();
        let part = build_partition(&m, &o[0].points, &o[1].points, 0.25, 0.25, true, 0).unwrap();
        let c = partition_check(&m, &part, 2000, 4);
        assert!(c.max_unity_residual <= 1e-12, "{c:?}");
        assert_eq!((c.uncovered, c.support_violations), (0, 0));
        assert!(c.max_active > 1);
        let pushed = part.pushed(&m).unwrap();
        let c = partition_check(&m, &pushed, 2000, 5);
        assert_eq!((c.uncovered, c.support_violations), (0, 0));
    }

    #[test]
    fn torus_partition_centers_near_grid() {
        let t = TorusModel::golden();
        let p = periodic_orbits(&t, 1).unwrap();
        let q: Vec<_> = periodic_orbits(&t, 3)
            .unwrap()
            .into_iter()
            .filter(|o| o.period == 3)
            .collect();
        let qs: Vec<_> = q.iter().flat_map(|o| o.points.clone()).collect();
        let eps = t.eps_x_prime_candidate();
        let part = build_partition(&t, &p[0].points, &qs, eps, eps, true, 60).unwrap();
        let c = partition_check(&t, &part, 500, 4);
        assert!(
            c.max_unity_residual <= 1e-12 && c.uncovered == 0 && c.support_violations == 0,
            "{c:?}"
        );
        let h = HomotopyFamily::new(&t, &part, 0.5).unwrap();
        let c = partition_check(&t, &h, 300, 4);
        assert!(
            c.max_unity_residual <= 1e-12 && c.support_violations == 0,
            "{c:?}"
        );
    }
}
