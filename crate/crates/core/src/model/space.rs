//! The Smale-space contract.

use rand_chacha::ChaCha8Rng;
use std::fmt::Debug;
use std::hash::Hash;

use crate::error::Result;

/// A Smale space `(X, d, φ, [·,·])` with exact point arithmetic.
///
/// Local sets follow the forward-asymptotic convention: `X^s(x, r)` holds the points whose
/// forward orbit stays within `r` of that of `x`, and `X^u(x, r)` is the mirror under `φ⁻¹`.
/// The bracket `[x, y]` lies in `X^s(x) ∩ X^u(y)`.
pub trait SmaleSpace: Send + Sync {
    type Point: Clone + Eq + Ord + Hash + Debug + Send + Sync;

    fn label(&self) -> String;

    fn phi(&self, x: &Self::Point) -> Self::Point;
    fn phi_inv(&self, x: &Self::Point) -> Self::Point;

    fn iterate(&self, x: &Self::Point, n: i64) -> Self::Point {
        let mut y = x.clone();
        for _ in 0..n.unsigned_abs() {
            y = if n > 0 {
                self.phi(&y)
            } else {
                self.phi_inv(&y)
            };
        }
        y
    }

    fn dist(&self, x: &Self::Point, y: &Self::Point) -> f64;

    /// `None` when the pair lies outside the bracket domain.
    fn bracket(&self, x: &Self::Point, y: &Self::Point) -> Option<Self::Point>;

    fn eps_x(&self) -> f64;

    /// Contraction rate on local stable sets.
    fn lambda(&self) -> f64;

    /// Lipschitz constant of both `φ` and `φ⁻¹`.
    fn phi_lipschitz(&self) -> f64;

    /// Analytic value for `ε'_X`, to be certified by sampling.
    fn eps_x_prime_candidate(&self) -> f64;

    /// `y ∈ X^s(x, r)`.
    fn in_local_stable(&self, y: &Self::Point, x: &Self::Point, r: f64) -> bool;
    /// `y ∈ X^u(x, r)`.
    fn in_local_unstable(&self, y: &Self::Point, x: &Self::Point, r: f64) -> bool;

    fn stably_equivalent(&self, x: &Self::Point, y: &Self::Point) -> bool;
    fn unstably_equivalent(&self, x: &Self::Point, y: &Self::Point) -> bool;

    /// Canonical text encoding, stable across runs.
    fn encode(&self, x: &Self::Point) -> String;

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Self::Point;
    /// A point with `d(x, y) <= r` drawn from the model geometry.
    fn random_near(&self, x: &Self::Point, r: f64, rng: &mut ChaCha8Rng) -> Self::Point;
    fn random_local_stable(&self, x: &Self::Point, r: f64, rng: &mut ChaCha8Rng) -> Self::Point;
    fn random_local_unstable(&self, x: &Self::Point, r: f64, rng: &mut ChaCha8Rng) -> Self::Point;

    /// All points fixed by `φ^period`, sorted.
    fn periodic_points(&self, period: u32) -> Result<Vec<Self::Point>>;

    /// Points of `X^s(P) ∩ X^u(Q)` of size at most `size`, sorted and deduplicated.
    fn homoclinic_points(
        &self,
        p: &[Self::Point],
        q: &[Self::Point],
        size: u32,
    ) -> Vec<Self::Point>;

    /// Up to `limit` points of `X^s(s_center, s_radius) ∩ φ^n(X^u(u_center, u_radius))`,
    /// deterministic for a given rng state. `n` may be negative.
    #[allow(clippy::too_many_arguments)]
    fn crossings(
        &self,
        s_center: &Self::Point,
        s_radius: f64,
        u_center: &Self::Point,
        u_radius: f64,
        n: i64,
        limit: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<Self::Point>;

    /// Homoclinic points in `X^s(center, r)` whose past follows one of `q`.
    fn local_stable_homoclinic(
        &self,
        center: &Self::Point,
        r: f64,
        q: &[Self::Point],
        limit: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<Self::Point>;

    /// Homoclinic points in `X^u(center, r)` whose future follows one of `p`.
    fn local_unstable_homoclinic(
        &self,
        center: &Self::Point,
        r: f64,
        p: &[Self::Point],
        limit: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<Self::Point>;

    /// A finite set of points such that every point lies within distance `h` of one of them.
    fn cover_centers(&self, h: f64) -> Vec<Self::Point>;

    /// For each target, up to `alternatives` points of `X^s(P) ∩ X^u(Q)` at distance strictly
    /// less than `r`, best first; never empty. `size` bounds the search where needed.
    fn homoclinic_cover(
        &self,
        targets: &[Self::Point],
        r: f64,
        p: &[Self::Point],
        q: &[Self::Point],
        size: u32,
        alternatives: usize,
    ) -> Result<Vec<Vec<Self::Point>>>;
}

macro_rules! delegate {
    () => {
        fn phi(&self, x: &Self::Point) -> Self::Point {
            self.inner.phi(x)
        }
        fn phi_inv(&self, x: &Self::Point) -> Self::Point {
            self.inner.phi_inv(x)
        }
        fn iterate(&self, x: &Self::Point, n: i64) -> Self::Point {
            self.inner.iterate(x, n)
        }
        fn eps_x(&self) -> f64 {
            self.inner.eps_x()
        }
        fn lambda(&self) -> f64 {
            self.inner.lambda()
        }
        fn phi_lipschitz(&self) -> f64 {
            self.inner.phi_lipschitz()
        }
        fn eps_x_prime_candidate(&self) -> f64 {
            self.inner.eps_x_prime_candidate()
        }
        fn in_local_stable(&self, y: &Self::Point, x: &Self::Point, r: f64) -> bool {
            self.inner.in_local_stable(y, x, r)
        }
        fn in_local_unstable(&self, y: &Self::Point, x: &Self::Point, r: f64) -> bool {
            self.inner.in_local_unstable(y, x, r)
        }
        fn stably_equivalent(&self, x: &Self::Point, y: &Self::Point) -> bool {
            self.inner.stably_equivalent(x, y)
        }
        fn unstably_equivalent(&self, x: &Self::Point, y: &Self::Point) -> bool {
            self.inner.unstably_equivalent(x, y)
        }
        fn encode(&self, x: &Self::Point) -> String {
            self.inner.encode(x)
        }
        fn random_point(&self, rng: &mut ChaCha8Rng) -> Self::Point {
            self.inner.random_point(rng)
        }
        fn random_near(&self, x: &Self::Point, r: f64, rng: &mut ChaCha8Rng) -> Self::Point {
            self.inner.random_near(x, r, rng)
        }
        fn random_local_stable(
            &self,
            x: &Self::Point,
            r: f64,
            rng: &mut ChaCha8Rng,
        ) -> Self::Point {
            self.inner.random_local_stable(x, r, rng)
        }
        fn random_local_unstable(
            &self,
            x: &Self::Point,
            r: f64,
            rng: &mut ChaCha8Rng,
        ) -> Self::Point {
            self.inner.random_local_unstable(x, r, rng)
        }
        fn periodic_points(&self, period: u32) -> Result<Vec<Self::Point>> {
            self.inner.periodic_points(period)
        }
        fn homoclinic_points(
            &self,
            p: &[Self::Point],
            q: &[Self::Point],
            size: u32,
        ) -> Vec<Self::Point> {
            self.inner.homoclinic_points(p, q, size)
        }
        fn crossings(
            &self,
            s_center: &Self::Point,
            s_radius: f64,
            u_center: &Self::Point,
            u_radius: f64,
            n: i64,
            limit: usize,
            rng: &mut ChaCha8Rng,
        ) -> Vec<Self::Point> {
            self.inner
                .crossings(s_center, s_radius, u_center, u_radius, n, limit, rng)
        }
        fn local_stable_homoclinic(
            &self,
            center: &Self::Point,
            r: f64,
            q: &[Self::Point],
            limit: usize,
            rng: &mut ChaCha8Rng,
        ) -> Vec<Self::Point> {
            self.inner.local_stable_homoclinic(center, r, q, limit, rng)
        }
        fn local_unstable_homoclinic(
            &self,
            center: &Self::Point,
            r: f64,
            p: &[Self::Point],
            limit: usize,
            rng: &mut ChaCha8Rng,
        ) -> Vec<Self::Point> {
            self.inner
                .local_unstable_homoclinic(center, r, p, limit, rng)
        }
        fn cover_centers(&self, h: f64) -> Vec<Self::Point> {
            self.inner.cover_centers(h)
        }
        fn homoclinic_cover(
            &self,
            targets: &[Self::Point],
            r: f64,
            p: &[Self::Point],
            q: &[Self::Point],
            size: u32,
            alternatives: usize,
        ) -> Result<Vec<Vec<Self::Point>>> {
            self.inner
                .homoclinic_cover(targets, r, p, q, size, alternatives)
        }
    };
}

/// Mutation wrapper whose bracket swaps its arguments. Used to show the axiom checker bites.
pub struct SwappedBracket<M> {
    pub inner: M,
}

impl<M: SmaleSpace> SmaleSpace for SwappedBracket<M> {
    type Point = M::Point;

    fn label(&self) -> String {
        format!("{} (swapped bracket)", self.inner.label())
    }

    fn dist(&self, x: &Self::Point, y: &Self::Point) -> f64 {
        self.inner.dist(x, y)
    }

    fn bracket(&self, x: &Self::Point, y: &Self::Point) -> Option<Self::Point> {
        self.inner.bracket(y, x)
    }

    delegate!();
}

/// Mutation wrapper that rescales the metric without touching anything else.
pub struct ScaledMetric<M> {
    pub inner: M,
    pub factor: f64,
}

impl<M: SmaleSpace> SmaleSpace for ScaledMetric<M> {
    type Point = M::Point;

    fn label(&self) -> String {
        format!("{} (metric x{})", self.inner.label(), self.factor)
    }

    fn dist(&self, x: &Self::Point, y: &Self::Point) -> f64 {
        self.factor * self.inner.dist(x, y)
    }

    fn bracket(&self, x: &Self::Point, y: &Self::Point) -> Option<Self::Point> {
        self.inner.bracket(x, y)
    }

    delegate!();
}
