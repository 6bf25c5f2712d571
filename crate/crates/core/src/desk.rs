//! Two small shipped instances used by tests, suites and examples.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{SftModel, SftPoint, SmaleSpace, TorusModel};
use crate::ops::elements::{HolonomyKind, LocalHolonomy, Profile};
use crate::orbit::{check_invariant, periodic_orbits, PeriodicOrbit};
use crate::partition::{build_partition, EpsilonPartition};

/// A model with chosen disjoint periodic sets and a working `ε'`.
#[derive(Clone, Debug)]
pub struct Desk<M: SmaleSpace> {
    pub model: M,
    pub p: Vec<PeriodicOrbit<M::Point>>,
    pub q: Vec<PeriodicOrbit<M::Point>>,
    pub eps_prime: f64,
    /// Search bound handed to `homoclinic_cover`.
    pub cover_size: u32,
}

impl<M: SmaleSpace> Desk<M> {
    pub fn new(model: M, p: Vec<PeriodicOrbit<M::Point>>, q: Vec<PeriodicOrbit<M::Point>>, cover_size: u32) -> Result<Self> {
        check_invariant(&model, &p)?;
        check_invariant(&model, &q)?;
        let eps_prime = model.eps_x_prime_candidate();
        Ok(Desk { model, p, q, eps_prime, cover_size })
    }

    pub fn p_points(&self) -> Vec<M::Point> {
        self.p.iter().flat_map(|o| o.points.iter().cloned()).collect()
    }

    pub fn q_points(&self) -> Vec<M::Point> {
        self.q.iter().flat_map(|o| o.points.iter().cloned()).collect()
    }

    pub fn homoclinic(&self, size: u32) -> Vec<M::Point> {
        self.model.homoclinic_points(&self.p_points(), &self.q_points(), size)
    }

    /// An `ε'`-partition whose centers avoid their own `φ`-image.
    pub fn partition(&self) -> Result<EpsilonPartition<M::Point>> {
        build_partition(
            &self.model,
            &self.p_points(),
            &self.q_points(),
            self.eps_prime,
            self.eps_prime,
            true,
            self.cover_size,
        )
    }

    /// A stable element centred at `z` and an unstable element whose range is centred at
    /// `z`, each with holonomy displacement below `displacement`.
    pub fn crossing_pair(
        &self,
        z: &M::Point,
        displacement: f64,
        seed: u64,
    ) -> Result<(LocalHolonomy<M::Point>, LocalHolonomy<M::Point>)> {
        let m = &self.model;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pick = |pts: Vec<M::Point>| {
            pts.into_iter()
                .filter(|x| x != z)
                .min_by(|x, y| m.dist(x, z).total_cmp(&m.dist(y, z)))
                .ok_or_else(|| Error::InvalidPoint(format!("no nearby homoclinic point for {}", m.encode(z))))
        };
        let v = pick(m.local_stable_homoclinic(z, displacement, &self.q_points(), 8, &mut rng))?;
        let w = pick(m.local_unstable_homoclinic(z, displacement, &self.p_points(), 8, &mut rng))?;
        let delta = self.eps_prime / 2.0;
        let profile = Profile::Cosine { amplitude: 1.0 };
        let a = LocalHolonomy::new(m, HolonomyKind::Stable, v, z.clone(), delta, profile, self.eps_prime, 40)?;
        let b = LocalHolonomy::new(m, HolonomyKind::Unstable, z.clone(), w, delta, profile, self.eps_prime, 40)?;
        Ok((a, b))
    }
}

/// Golden-mean torus with `P` the fixed point and `Q` the period-3 points.
pub fn golden_torus() -> Desk<TorusModel> {
    let m = TorusModel::golden();
    let p = periodic_orbits(&m, 1).expect("fixed point");
    let q = periodic_orbits(&m, 3)
        .expect("period 3")
        .into_iter()
        .filter(|o| o.period == 3)
        .collect();
    Desk::new(m, p, q, 60).expect("invariant sets")
}

/// Full 2-shift with `P = {0^∞}` and `Q = {1^∞}`.
pub fn two_shift() -> Desk<SftModel> {
    let m = SftModel::full_shift(2).expect("valid matrix");
    let o = periodic_orbits(&m, 1).expect("fixed points");
    let (p, q): (Vec<_>, Vec<_>) = o.into_iter().partition(|x| x.points[0] == SftPoint::periodic(&[0]));
    Desk::new(m, p, q, 0).expect("invariant sets")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_pair_shares_centre() {
        let d = golden_torus();
        let z = d.homoclinic(2)[7].clone();
        let (a, b) = d.crossing_pair(&z, 0.01, 1).unwrap();
        assert_eq!((a.w.clone(), b.v.clone()), (z.clone(), z));
        assert!(d.model.dist(&a.v, &a.w) < 0.01 && d.model.dist(&b.v, &b.w) < 0.01);
        let s = two_shift();
        assert_eq!(s.p_points(), vec![SftPoint::periodic(&[0])]);
        let z = s.homoclinic(3)[5].clone();
        s.crossing_pair(&z, 0.2, 1).unwrap();
    }
}
