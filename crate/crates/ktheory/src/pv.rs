//! Rational rank bookkeeping through the Pimsner-Voiculescu sequence.
//!
//! The action of `B` on the eventual range `V = ∩ B^k Q^n` models the dimension-group
//! automorphism. Ranks are `dim coker(1 - φ0)` and `dim ker(1 - φ0)`; the degree-one
//! part of the base algebra vanishes rationally for shifts of finite type.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::matrix::{IntMatrix, TransitionMatrix};

type QMat = Vec<Vec<BigRational>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankPair {
    pub k0: usize,
    pub k1: usize,
}

impl RankPair {
    pub fn balanced(&self) -> bool {
        self.k0 == self.k1
    }
}

/// Restriction of a rational matrix to its eventual range.
#[derive(Clone, Debug)]
pub struct DimensionGroupAction {
    /// Columns spanning the eventual range.
    pub basis: QMat,
    /// Matrix of the restricted map in that basis (`dim × dim`).
    pub restricted: QMat,
}

impl DimensionGroupAction {
    pub fn new(b: &IntMatrix) -> Self {
        let n = b.rows();
        let bq = to_q(b);
        let mut power = identity(n);
        for _ in 0..n {
            power = mul(&power, &bq);
        }
        let (_, pivots) = rref(&power);
        let basis: QMat = pivots.iter().map(|&j| column(&power, j)).collect();
        let d = basis.len();
        // Solve basis · c_j = B · basis_j for each j.
        let mut restricted = vec![vec![BigRational::zero(); d]; d];
        if d > 0 {
            let bt = transpose_cols(&basis, n);
            for (j, col) in basis.iter().enumerate() {
                let image = mat_vec(&bq, col);
                let c = solve_in_span(&bt, &image).expect("eventual range is invariant");
                for i in 0..d {
                    restricted[i][j] = c[i].clone();
                }
            }
        }
        Self { basis, restricted }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Rank of `1 - φ0` on the eventual range.
    pub fn rank_one_minus(&self) -> usize {
        let d = self.dim();
        let mut m = identity(d);
        for i in 0..d {
            for j in 0..d {
                m[i][j] -= &self.restricted[i][j];
            }
        }
        rref(&m).1.len()
    }

    pub fn ranks(&self) -> RankPair {
        let d = self.dim();
        let r = self.rank_one_minus();
        // coker(1-φ0) ⊕ ker(1-φ1) and coker(1-φ1) ⊕ ker(1-φ0), with φ1 on the zero space.
        RankPair { k0: d - r, k1: d - r }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PvRanks {
    pub unstable: RankPair,
    pub stable: RankPair,
    pub eventual_dim: usize,
}

pub fn pv_ranks(a: &TransitionMatrix) -> PvRanks {
    let m = a.to_int();
    let unstable = DimensionGroupAction::new(&m.transpose());
    let stable = DimensionGroupAction::new(&m);
    PvRanks { unstable: unstable.ranks(), stable: stable.ranks(), eventual_dim: unstable.dim() }
}

fn to_q(m: &IntMatrix) -> QMat {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| BigRational::from_integer(m[(i, j)].clone())).collect())
        .collect()
}

fn identity(n: usize) -> QMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect()
}

fn mul(a: &QMat, b: &QMat) -> QMat {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    let mut out = vec![vec![BigRational::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    out
}

fn mat_vec(a: &QMat, v: &[BigRational]) -> Vec<BigRational> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

fn column(a: &QMat, j: usize) -> Vec<BigRational> {
    a.iter().map(|r| r[j].clone()).collect()
}

fn transpose_cols(cols: &[Vec<BigRational>], n: usize) -> QMat {
    (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
}

/// Reduced row echelon form and pivot columns.
fn rref(a: &QMat) -> (QMat, Vec<usize>) {
    let mut m = a.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

/// Solves `a x = b` when `a` has independent columns and `b` lies in their span.
fn solve_in_span(a: &QMat, b: &[BigRational]) -> Option<Vec<BigRational>> {
    let cols = a.first().map_or(0, Vec::len);
    let aug: QMat = a.iter().zip(b).map(|(row, v)| {
        let mut r = row.clone();
        r.push(v.clone());
        r
    }).collect();
    let (red, pivots) = rref(&aug);
    if pivots.contains(&cols) || pivots.len() != cols {
        return None;
    }
    Some((0..cols).map(|i| red[i][cols].clone()).collect())
}

/// Rank of an integer matrix over the rationals.
pub fn rational_rank(m: &IntMatrix) -> usize {
    rref(&to_q(m)).1.len()
}
