//! Hyperbolic toral automorphisms with exact coordinates in `Q(√D)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::hash::{Hash, Hasher};

use super::quadratic::{square_factor, squarefree_part, QuadraticNumber as Q};
use super::space::SmaleSpace;
use crate::error::{Error, Result};

/// A point of `T² = R²/Z²` with exact coordinates in `[0, 1)`.
///
/// Carries a cached `f64` approximation that takes no part in comparisons.
#[derive(Clone, Debug)]
pub struct TorusPoint {
    x: Q,
    y: Q,
    approx: [f64; 2],
}

impl TorusPoint {
    pub fn x(&self) -> &Q {
        &self.x
    }

    pub fn y(&self) -> &Q {
        &self.y
    }

    pub fn approx(&self) -> [f64; 2] {
        self.approx
    }
}

impl PartialEq for TorusPoint {
    fn eq(&self, other: &Self) -> bool {
        self.x == other.x && self.y == other.y
    }
}

impl Eq for TorusPoint {}

impl Hash for TorusPoint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.x.hash(state);
        self.y.hash(state);
    }
}

impl PartialOrd for TorusPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TorusPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        // Approximations are accurate far below the gaps between distinct points that
        // occur in practice; fall back to exact comparison on near-ties.
        let fast = |a: f64, b: f64| {
            if (a - b).abs() > 1e-12 {
                a.partial_cmp(&b)
            } else {
                None
            }
        };
        match fast(self.approx[0], other.approx[0]) {
            Some(o) => o,
            None => {
                self.x
                    .cmp(&other.x)
                    .then_with(|| match fast(self.approx[1], other.approx[1]) {
                        Some(o) => o,
                        None => self.y.cmp(&other.y),
                    })
            }
        }
    }
}

type Vec2 = [Q; 2];

/// The automorphism of `T²` induced by an integer matrix with determinant `±1` and real
/// irrational eigenvalues.
pub struct TorusModel {
    m: [[i64; 2]; 2],
    m_inv: [[i64; 2]; 2],
    d: u64,
    label: String,
    e_s: Vec2,
    e_u: Vec2,
    /// Inverse of the matrix with columns `e_s` and `-e_u`.
    solve: [[Q; 2]; 2],
    e_s_f: [f64; 2],
    e_u_f: [f64; 2],
    solve_f: [[f64; 2]; 2],
    lambda: f64,
    eps_x: f64,
    proj_norm: f64,
    period_bound: u32,
}

fn sup(v: [f64; 2]) -> f64 {
    v[0].abs().max(v[1].abs())
}

impl TorusModel {
    pub fn new(m: [[i64; 2]; 2], label: impl Into<String>) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() != 1 {
            return Err(Error::InvalidModel(format!(
                "determinant {det} is not a unit"
            )));
        }
        let tr = m[0][0] + m[1][1];
        let disc = tr * tr - 4 * det;
        if disc <= 0 || squarefree_part(disc as u64) == 1 {
            return Err(Error::InvalidModel(format!(
                "matrix {m:?} is not hyperbolic with irrational spectrum"
            )));
        }
        let d = squarefree_part(disc as u64);
        let root = &Q::sqrt_d(d) * square_factor(disc as u64) as i64;
        let half = Q::frac(1, 2, d);
        let mu_plus = &(&Q::int(tr, d) + &root) * &half;
        let mu_minus = &(&Q::int(tr, d) - &root) * &half;
        let (mu_u, mu_s) = if mu_plus.abs() > Q::int(1, d) {
            (mu_plus, mu_minus)
        } else {
            (mu_minus, mu_plus)
        };
        // m[0][1] != 0 for a hyperbolic unimodular matrix; eigenvector (1, (μ - a)/b).
        let b = Q::int(m[0][1], d);
        let e_u = [Q::int(1, d), &(&mu_u - &Q::int(m[0][0], d)) / &b];
        let e_s = [Q::int(1, d), &(&mu_s - &Q::int(m[0][0], d)) / &b];
        // Inverse of [[1, -1], [σs, -σu]], the matrix with columns e_s and -e_u.
        let detc = &e_s[1] - &e_u[1];
        let solve = [
            [&(-e_u[1].clone()) / &detc, &Q::int(1, d) / &detc],
            [&(-e_s[1].clone()) / &detc, &Q::int(1, d) / &detc],
        ];
        let m_inv = if det == 1 {
            [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]
        } else {
            [[-m[1][1], m[0][1]], [m[1][0], -m[0][0]]]
        };
        let f = |v: &Vec2| [v[0].to_f64(), v[1].to_f64()];
        let solve_f = [
            [solve[0][0].to_f64(), solve[0][1].to_f64()],
            [solve[1][0].to_f64(), solve[1][1].to_f64()],
        ];
        let mut model = TorusModel {
            m,
            m_inv,
            d,
            label: label.into(),
            e_s_f: f(&e_s),
            e_u_f: f(&e_u),
            e_s,
            e_u,
            solve,
            solve_f,
            lambda: mu_u.abs().to_f64(),
            eps_x: 0.0,
            proj_norm: 0.0,
            period_bound: 12,
        };
        model.eps_x = model.compute_eps_x();
        model.proj_norm = model.compute_proj_norm();
        Ok(model)
    }

    pub fn golden() -> Self {
        Self::new([[1, 1], [1, 0]], "golden-mean torus").expect("hyperbolic")
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        self.m
    }

    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn stable_direction(&self) -> &Vec2 {
        &self.e_s
    }

    pub fn unstable_direction(&self) -> &Vec2 {
        &self.e_u
    }

    /// `(s, t)` in f64 with `v = s·e_s - t·e_u`.
    fn coords_f(&self, v: [f64; 2]) -> (f64, f64) {
        let s = self.solve_f[0][0] * v[0] + self.solve_f[0][1] * v[1];
        let t = self.solve_f[1][0] * v[0] + self.solve_f[1][1] * v[1];
        (s, t)
    }

    /// A quarter of the smallest eigen-box containing a nonzero lattice vector.
    fn compute_eps_x(&self) -> f64 {
        let mut best = f64::INFINITY;
        for a in -12i64..=12 {
            for b in -12i64..=12 {
                if a == 0 && b == 0 {
                    continue;
                }
                let (s, t) = self.coords_f([a as f64, b as f64]);
                let size = (s.abs() * sup(self.e_s_f)).max(t.abs() * sup(self.e_u_f));
                best = best.min(size);
            }
        }
        best / 4.0
    }

    /// Sup-norm operator norm of the two eigenprojections.
    fn compute_proj_norm(&self) -> f64 {
        let cols = [self.coords_f([1.0, 0.0]), self.coords_f([0.0, 1.0])];
        let mut norm: f64 = 0.0;
        for i in 0..2 {
            let s_row = (cols[0].0 * self.e_s_f[i]).abs() + (cols[1].0 * self.e_s_f[i]).abs();
            let u_row = (cols[0].1 * self.e_u_f[i]).abs() + (cols[1].1 * self.e_u_f[i]).abs();
            norm = norm.max(s_row).max(u_row);
        }
        norm
    }

    pub fn point(&self, x: Q, y: Q) -> TorusPoint {
        let (x, _, ax) = x.reduce_mod_one_approx();
        let (y, _, ay) = y.reduce_mod_one_approx();
        TorusPoint { x, y, approx: [ax, ay] }
    }

    pub fn rational_point(&self, xn: i64, xd: i64, yn: i64, yd: i64) -> TorusPoint {
        self.point(Q::frac(xn, xd, self.d), Q::frac(yn, yd, self.d))
    }

    fn apply(&self, m: &[[i64; 2]; 2], p: &TorusPoint) -> TorusPoint {
        let x = &(&p.x * m[0][0]) + &(&p.y * m[0][1]);
        let y = &(&p.x * m[1][0]) + &(&p.y * m[1][1]);
        self.point(x, y)
    }

    /// Exact minimal lattice representative of `y - x`.
    fn min_rep(&self, x: &TorusPoint, y: &TorusPoint) -> Vec2 {
        let shift = |i: usize| {
            let delta = y.approx[i] - x.approx[i];
            Q::int(-(delta.round() as i64), self.d)
        };
        [&(&y.x - &x.x) + &shift(0), &(&y.y - &x.y) + &shift(1)]
    }

    fn wrapped(delta: f64) -> f64 {
        (delta - delta.round()).abs()
    }

    /// Exact `(s, t)` with `v = s·e_s - t·e_u`.
    fn coords(&self, v: &Vec2) -> (Q, Q) {
        let s = &(&self.solve[0][0] * &v[0]) + &(&self.solve[0][1] * &v[1]);
        let t = &(&self.solve[1][0] * &v[0]) + &(&self.solve[1][1] * &v[1]);
        (s, t)
    }

    fn along(&self, p: &TorusPoint, dir: &Vec2, s: &Q) -> TorusPoint {
        self.point(&p.x + &(&dir[0] * s), &p.y + &(&dir[1] * s))
    }

    /// Whether `v + w` lies on the line through the origin spanned by `dir` for some `w ∈ Z²`.
    fn on_line_mod_lattice(&self, v: &Vec2, dir: &Vec2) -> bool {
        // dir = (1, σ); need integer w0, w1 with v1 + w1 = σ (v0 + w0).
        let sigma = &dir[1];
        let (s0, s1) = (sigma.rational_part(), sigma.radical_part());
        let (a0, a1) = (v[0].rational_part(), v[0].radical_part());
        let (b0, b1) = (v[1].rational_part(), v[1].radical_part());
        let dd = BigRational::from_integer(BigInt::from(self.d));
        let w0 = (b1 - s0 * a1) / s1 - a0;
        if !w0.is_integer() {
            return false;
        }
        let w1 = s0 * &(a0 + &w0) + s1 * a1 * dd - b0;
        w1.is_integer()
    }

    fn random_rational(&self, rng: &mut ChaCha8Rng, bound: f64) -> Q {
        let scale = 1i64 << 20;
        let k = (bound * scale as f64).floor() as i64;
        Q::frac(rng.random_range(-k..=k), scale, self.d)
    }

    /// Lattice strip search: points `c_s + s·e_s = c_u + t·e_u + v` with `|s·e_s| <= rs`,
    /// `|t·e_u| <= ru`, and `c_u` given exactly (not reduced). Deterministic for the rng.
    fn strip(
        &self,
        c_s: &TorusPoint,
        rs: f64,
        c_u: &Vec2,
        ru: f64,
        limit: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<(f64, TorusPoint)> {
        let c_u_f = [c_u[0].to_f64(), c_u[1].to_f64()];
        let delta0 = [c_u_f[0] - c_s.approx[0], c_u_f[1] - c_s.approx[1]];
        let smax = rs / sup(self.e_s_f);
        let tmax = ru / sup(self.e_u_f);
        let (sig_s, sig_u) = (self.e_s_f[1], self.e_u_f[1]);
        // v0 = s - t - δ0, v1 = s σs - t σu - δ1
        let long_is_t = tmax >= smax;
        let (short, long) = if long_is_t {
            (smax, tmax)
        } else {
            (tmax, smax)
        };
        let lo = (-long - short - delta0[0]).floor() as i64 - 1;
        let hi = (long + short - delta0[0]).ceil() as i64 + 1;
        let range = (hi - lo + 1) as u64;
        let budget = (limit as u64).saturating_mul(64).max(4096);
        let sampled = range > budget;
        let mut seen: BTreeSet<i64> = BTreeSet::new();
        let mut out: Vec<(f64, TorusPoint)> = Vec::new();
        for i in 0.. {
            // Sampled strips stop as soon as `limit` hits are in hand.
            let v0 = if !sampled {
                if i >= range {
                    break;
                }
                lo + i as i64
            } else {
                if out.len() >= limit || seen.len() as u64 >= budget {
                    break;
                }
                let mut v = rng.random_range(lo..=hi);
                while !seen.insert(v) {
                    v = rng.random_range(lo..=hi);
                }
                v
            };
            let base = v0 as f64 + delta0[0];
            // Parametrize by the short coordinate u in [-short, short].
            let (slope, offset) = if long_is_t {
                // t = s - base
                (sig_s - sig_u, base * sig_u - delta0[1])
            } else {
                // s = base + t
                (sig_s - sig_u, base * sig_s - delta0[1])
            };
            let ends = [offset - slope * short, offset + slope * short];
            let margin = 1e-6 * (1.0 + offset.abs() * 1e-9);
            let v1lo = (ends[0].min(ends[1]) - margin).floor() as i64;
            let v1hi = (ends[0].max(ends[1]) + margin).ceil() as i64;
            for v1 in v1lo..=v1hi {
                let (sa, ta) = self.coords_f([base, v1 as f64 + delta0[1]]);
                if sa.abs() > smax * (1.0 + 1e-9) + 1e-12 || ta.abs() > tmax * (1.0 + 1e-9) + 1e-12 {
                    continue;
                }
                let delta = [
                    &(&c_u[0] - &c_s.x) + &Q::int(v0, self.d),
                    &(&c_u[1] - &c_s.y) + &Q::int(v1, self.d),
                ];
                let (s, t) = self.coords(&delta);
                let (sf, tf) = (s.to_f64(), t.to_f64());
                if sf.abs() <= smax && tf.abs() <= tmax {
                    out.push((
                        if long_is_t { tf.abs() } else { sf.abs() },
                        self.along(c_s, &self.e_s, &s),
                    ));
                }
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        out.dedup_by(|a, b| a.1 == b.1);
        out
    }

    /// Exact homoclinic point: stable line through `p` meets the unstable line through `q + v`.
    pub fn homoclinic_point(&self, p: &TorusPoint, q: &TorusPoint, v: [i64; 2]) -> TorusPoint {
        let delta = [
            &(&q.x - &p.x) + &Q::int(v[0], self.d),
            &(&q.y - &p.y) + &Q::int(v[1], self.d),
        ];
        let (s, _) = self.coords(&delta);
        self.along(p, &self.e_s, &s)
    }

    /// Float position of the same intersection.
    fn homoclinic_f(&self, p: &TorusPoint, q: &TorusPoint, v: [i64; 2]) -> [f64; 2] {
        let delta = [
            q.approx[0] - p.approx[0] + v[0] as f64,
            q.approx[1] - p.approx[1] + v[1] as f64,
        ];
        let (s, _) = self.coords_f(delta);
        let fr = |z: f64| z - z.floor();
        [
            fr(p.approx[0] + s * self.e_s_f[0]),
            fr(p.approx[1] + s * self.e_s_f[1]),
        ]
    }

    /// For each target, a homoclinic point within sup-distance `< r`, searched over lattice
    /// translates with `|v| <= size`.
    fn cover_from_pool(
        &self,
        targets: &[TorusPoint],
        r: f64,
        p: &[TorusPoint],
        q: &[TorusPoint],
        size: u32,
        alternatives: usize,
    ) -> Result<Vec<Vec<TorusPoint>>> {
        let cells = (1.0 / r).floor().max(1.0) as i64;
        let cell = |z: f64| ((z * cells as f64).floor() as i64).rem_euclid(cells);
        let mut grid: HashMap<(i64, i64), Vec<(usize, usize, [i64; 2], [f64; 2])>> = HashMap::new();
        let b = size as i64;
        for (pi, pp) in p.iter().enumerate() {
            for (qi, qq) in q.iter().enumerate() {
                for v0 in -b..=b {
                    for v1 in -b..=b {
                        let z = self.homoclinic_f(pp, qq, [v0, v1]);
                        grid.entry((cell(z[0]), cell(z[1]))).or_default().push((
                            pi,
                            qi,
                            [v0, v1],
                            z,
                        ));
                    }
                }
            }
        }
        let grid = &grid;
        targets
            .par_iter()
            .map(|t| {
                let (cx, cy) = (cell(t.approx[0]), cell(t.approx[1]));
                let mut near: Vec<(f64, usize, usize, [i64; 2])> = Vec::new();
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        let key = ((cx + dx).rem_euclid(cells), (cy + dy).rem_euclid(cells));
                        for &(pi, qi, v, z) in grid.get(&key).map(Vec::as_slice).unwrap_or(&[]) {
                            let dd = Self::wrapped(z[0] - t.approx[0])
                                .max(Self::wrapped(z[1] - t.approx[1]));
                            if dd < r {
                                near.push((dd, pi, qi, v));
                            }
                        }
                    }
                }
                near.sort_by(|a, b| {
                    a.0.total_cmp(&b.0)
                        .then_with(|| (a.1, a.2, a.3).cmp(&(b.1, b.2, b.3)))
                });
                let picks: Vec<TorusPoint> = near
                    .iter()
                    .take(alternatives.max(1))
                    .map(|&(_, pi, qi, v)| self.homoclinic_point(&p[pi], &q[qi], v))
                    .filter(|z| self.dist(z, t) < r)
                    .collect();
                if picks.is_empty() {
                    return Err(Error::CoverInfeasible {
                        center: self.encode(t),
                        radius: r,
                    });
                }
                Ok(picks)
            })
            .collect()
    }

    /// Grid points `(i/k, j/k)` with sup-distance covering radius at most `h`.
    pub fn grid_points(&self, h: f64) -> Vec<TorusPoint> {
        let k = (1.0 / (2.0 * h)).ceil() as i64;
        (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .map(|(i, j)| self.rational_point(i, k, j, k))
            .collect()
    }

    pub fn eps_x_prime_analytic(&self) -> f64 {
        self.eps_x / (2.0 * self.proj_norm)
    }

    pub fn projection_norm(&self) -> f64 {
        self.proj_norm
    }

    fn exact_det_power_minus_identity(&self, n: u32) -> i64 {
        let mut a = [[1i64, 0], [0, 1]];
        for _ in 0..n {
            a = [
                [
                    a[0][0] * self.m[0][0] + a[0][1] * self.m[1][0],
                    a[0][0] * self.m[0][1] + a[0][1] * self.m[1][1],
                ],
                [
                    a[1][0] * self.m[0][0] + a[1][1] * self.m[1][0],
                    a[1][0] * self.m[0][1] + a[1][1] * self.m[1][1],
                ],
            ];
        }
        ((a[0][0] - 1) * (a[1][1] - 1) - a[0][1] * a[1][0]).abs()
    }

    fn power(&self, n: u32) -> [[i64; 2]; 2] {
        let mut a = [[1i64, 0], [0, 1]];
        for _ in 0..n {
            a = [
                [
                    a[0][0] * self.m[0][0] + a[0][1] * self.m[1][0],
                    a[0][0] * self.m[0][1] + a[0][1] * self.m[1][1],
                ],
                [
                    a[1][0] * self.m[0][0] + a[1][1] * self.m[1][0],
                    a[1][0] * self.m[0][1] + a[1][1] * self.m[1][1],
                ],
            ];
        }
        a
    }

    pub fn with_period_bound(mut self, bound: u32) -> Self {
        self.period_bound = bound;
        self
    }

    /// `φ^n` applied to an exact lift, without reducing mod 1.
    fn lift_iterate(&self, p: &TorusPoint, n: i64) -> Vec2 {
        let mut v = [p.x.clone(), p.y.clone()];
        let m = if n >= 0 { &self.m } else { &self.m_inv };
        if let Some(mn) = matrix_power(*m, n.unsigned_abs()) {
            return [
                &(&v[0] * mn[0][0]) + &(&v[1] * mn[0][1]),
                &(&v[0] * mn[1][0]) + &(&v[1] * mn[1][1]),
            ];
        }
        for _ in 0..n.unsigned_abs() {
            v = [
                &(&v[0] * m[0][0]) + &(&v[1] * m[0][1]),
                &(&v[0] * m[1][0]) + &(&v[1] * m[1][1]),
            ];
        }
        v
    }
}

/// `m^n` by repeated squaring; `None` on `i64` overflow.
fn matrix_power(m: [[i64; 2]; 2], mut n: u64) -> Option<[[i64; 2]; 2]> {
    let mul = |a: [[i64; 2]; 2], b: [[i64; 2]; 2]| -> Option<[[i64; 2]; 2]> {
        let e = |i: usize, j: usize| a[i][0].checked_mul(b[0][j])?.checked_add(a[i][1].checked_mul(b[1][j])?);
        Some([[e(0, 0)?, e(0, 1)?], [e(1, 0)?, e(1, 1)?]])
    };
    let (mut acc, mut base) = ([[1, 0], [0, 1]], m);
    while n > 0 {
        if n & 1 == 1 {
            acc = mul(acc, base)?;
        }
        n >>= 1;
        if n > 0 {
            base = mul(base, base)?;
        }
    }
    Some(acc)
}

impl SmaleSpace for TorusModel {
    type Point = TorusPoint;

    fn label(&self) -> String {
        self.label.clone()
    }

    fn phi(&self, x: &TorusPoint) -> TorusPoint {
        self.apply(&self.m, x)
    }

    fn phi_inv(&self, x: &TorusPoint) -> TorusPoint {
        self.apply(&self.m_inv, x)
    }

    fn iterate(&self, x: &TorusPoint, n: i64) -> TorusPoint {
        let m = if n >= 0 { self.m } else { self.m_inv };
        if let Some(mn) = matrix_power(m, n.unsigned_abs()) {
            return self.apply(&mn, x);
        }
        let mut y = x.clone();
        for _ in 0..n.unsigned_abs() {
            y = self.apply(&m, &y);
        }
        y
    }

    fn dist(&self, x: &TorusPoint, y: &TorusPoint) -> f64 {
        Self::wrapped(y.approx[0] - x.approx[0]).max(Self::wrapped(y.approx[1] - x.approx[1]))
    }

    fn bracket(&self, x: &TorusPoint, y: &TorusPoint) -> Option<TorusPoint> {
        if self.dist(x, y) > self.eps_x {
            return None;
        }
        let delta = self.min_rep(x, y);
        let (s, _) = self.coords(&delta);
        Some(self.along(x, &self.e_s, &s))
    }

    fn eps_x(&self) -> f64 {
        self.eps_x
    }

    fn lambda(&self) -> f64 {
        self.lambda
    }

    fn phi_lipschitz(&self) -> f64 {
        let row = |m: &[[i64; 2]; 2], i: usize| (m[i][0].abs() + m[i][1].abs()) as f64;
        row(&self.m, 0)
            .max(row(&self.m, 1))
            .max(row(&self.m_inv, 0))
            .max(row(&self.m_inv, 1))
    }

    fn eps_x_prime_candidate(&self) -> f64 {
        self.eps_x_prime_analytic()
    }

    fn in_local_stable(&self, y: &TorusPoint, x: &TorusPoint, r: f64) -> bool {
        if self.dist(x, y) > r.min(0.25) {
            return false;
        }
        let (_, t) = self.coords(&self.min_rep(x, y));
        t.is_zero()
    }

    fn in_local_unstable(&self, y: &TorusPoint, x: &TorusPoint, r: f64) -> bool {
        if self.dist(x, y) > r.min(0.25) {
            return false;
        }
        let (s, _) = self.coords(&self.min_rep(x, y));
        s.is_zero()
    }

    fn stably_equivalent(&self, x: &TorusPoint, y: &TorusPoint) -> bool {
        self.on_line_mod_lattice(&[&y.x - &x.x, &y.y - &x.y], &self.e_s)
    }

    fn unstably_equivalent(&self, x: &TorusPoint, y: &TorusPoint) -> bool {
        self.on_line_mod_lattice(&[&y.x - &x.x, &y.y - &x.y], &self.e_u)
    }

    fn encode(&self, x: &TorusPoint) -> String {
        format!("({}, {})", x.x, x.y)
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> TorusPoint {
        let mut coord = || {
            let a = Q::frac(rng.random_range(0..1009), 1009, self.d);
            let b = &Q::sqrt_d(self.d) * &Q::frac(rng.random_range(-5..=5), 1013, self.d);
            &a + &b
        };
        let x = coord();
        let y = coord();
        self.point(x, y)
    }

    fn random_near(&self, x: &TorusPoint, r: f64, rng: &mut ChaCha8Rng) -> TorusPoint {
        let r = r.min(0.49);
        let dx = self.random_rational(rng, r);
        let dy = self.random_rational(rng, r);
        self.point(&x.x + &dx, &x.y + &dy)
    }

    fn random_local_stable(&self, x: &TorusPoint, r: f64, rng: &mut ChaCha8Rng) -> TorusPoint {
        let s = self.random_rational(rng, r.min(0.25) / sup(self.e_s_f));
        self.along(x, &self.e_s, &s)
    }

    fn random_local_unstable(&self, x: &TorusPoint, r: f64, rng: &mut ChaCha8Rng) -> TorusPoint {
        let t = self.random_rational(rng, r.min(0.25) / sup(self.e_u_f));
        self.along(x, &self.e_u, &t)
    }

    fn periodic_points(&self, period: u32) -> Result<Vec<TorusPoint>> {
        if period == 0 || period > self.period_bound {
            return Err(Error::PeriodBound {
                requested: period,
                bound: self.period_bound,
            });
        }
        let n = self.exact_det_power_minus_identity(period);
        let a = self.power(period);
        let b = [[a[0][0] - 1, a[0][1]], [a[1][0], a[1][1] - 1]];
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if (b[0][0] * i + b[0][1] * j) % n == 0 && (b[1][0] * i + b[1][1] * j) % n == 0 {
                    out.push(self.rational_point(i, n, j, n));
                }
            }
        }
        out.sort();
        Ok(out)
    }

    fn homoclinic_points(&self, p: &[TorusPoint], q: &[TorusPoint], size: u32) -> Vec<TorusPoint> {
        let b = size as i64;
        let mut out = BTreeSet::new();
        for pp in p {
            for qq in q {
                for v0 in -b..=b {
                    for v1 in -b..=b {
                        out.insert(self.homoclinic_point(pp, qq, [v0, v1]));
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    fn crossings(
        &self,
        s_center: &TorusPoint,
        s_radius: f64,
        u_center: &TorusPoint,
        u_radius: f64,
        n: i64,
        limit: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<TorusPoint> {
        let c_u = self.lift_iterate(u_center, n);
        let ru = u_radius * self.lambda.powi(n as i32);
        let mut pts = self.strip(s_center, s_radius.min(0.25), &c_u, ru, limit, rng);
        pts.truncate(limit);
        let mut out: Vec<TorusPoint> = pts.into_iter().map(|(_, z)| z).collect();
        out.sort();
        out
    }

    fn local_stable_homoclinic(
        &self,
        center: &TorusPoint,
        r: f64,
        q: &[TorusPoint],
        limit: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<TorusPoint> {
        let mut reach = 2.0;
        loop {
            let mut all: Vec<(f64, TorusPoint)> = q
                .iter()
                .flat_map(|qq| {
                    self.strip(
                        center,
                        r.min(0.25),
                        &[qq.x.clone(), qq.y.clone()],
                        reach,
                        limit,
                        rng,
                    )
                })
                .collect();
            if all.len() >= limit || reach > 1e4 {
                all.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
                all.dedup_by(|a, b| a.1 == b.1);
                all.truncate(limit);
                let mut out: Vec<TorusPoint> = all.into_iter().map(|(_, z)| z).collect();
                out.sort();
                return out;
            }
            reach *= 2.0;
        }
    }

    fn local_unstable_homoclinic(
        &self,
        center: &TorusPoint,
        r: f64,
        p: &[TorusPoint],
        limit: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<TorusPoint> {
        let mut reach = 2.0;
        let c = [center.x.clone(), center.y.clone()];
        loop {
            let mut all: Vec<(f64, TorusPoint)> = p
                .iter()
                .flat_map(|pp| self.strip(pp, reach, &c, r.min(0.25), limit, rng))
                .collect();
            if all.len() >= limit || reach > 1e4 {
                all.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
                all.dedup_by(|a, b| a.1 == b.1);
                all.truncate(limit);
                let mut out: Vec<TorusPoint> = all.into_iter().map(|(_, z)| z).collect();
                out.sort();
                return out;
            }
            reach *= 2.0;
        }
    }

    fn cover_centers(&self, h: f64) -> Vec<TorusPoint> {
        self.grid_points(h)
    }

    fn homoclinic_cover(
        &self,
        targets: &[TorusPoint],
        r: f64,
        p: &[TorusPoint],
        q: &[TorusPoint],
        size: u32,
        alternatives: usize,
    ) -> Result<Vec<Vec<TorusPoint>>> {
        self.cover_from_pool(targets, r, p, q, size, alternatives)
    }
}

impl TorusModel {
    /// Sup-norm of an exact vector, as f64.
    pub fn sup_norm(v: &Vec2) -> f64 {
        v[0].to_f64().abs().max(v[1].to_f64().abs())
    }

    /// Exact minimal representative of `y - x`, exposed for oracles.
    pub fn difference(&self, x: &TorusPoint, y: &TorusPoint) -> Vec2 {
        self.min_rep(x, y)
    }

    /// Exact eigen-coordinates `(s, t)` of a vector `v = s·e_s - t·e_u`.
    pub fn eigen_coordinates(&self, v: &Vec2) -> (Q, Q) {
        self.coords(v)
    }

    pub fn to_f64_pair(v: &Vec2) -> [f64; 2] {
        [v[0].to_f64(), v[1].to_f64()]
    }

    pub fn integer_part(q: &Q) -> i64 {
        q.floor().to_i64().expect("small")
    }
}
