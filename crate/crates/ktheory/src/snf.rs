//! Smith normal form over arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::group::AbelianGroup;
use crate::matrix::IntMatrix;

/// `u * original * v == d`, with `u`, `v` unimodular and `d` diagonal with a divisibility chain.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub original: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub d: IntMatrix,
}

impl SmithDecomposition {
    /// Nonzero diagonal entries in order.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().len()
    }

    /// Recomputes `u * m * v` and checks it against `d`, the diagonal shape and the chain.
    pub fn verify(&self) -> bool {
        if self.u.mul(&self.original).mul(&self.v) != self.d || !self.d.is_diagonal() {
            return false;
        }
        let diag: Vec<BigInt> =
            (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect();
        let chain = diag.windows(2).all(|w| {
            if w[0].is_zero() {
                w[1].is_zero()
            } else {
                !w[0].is_negative() && (&w[1] % &w[0]).is_zero()
            }
        });
        chain && det_is_unit(&self.u) && det_is_unit(&self.v)
    }
}

fn det_is_unit(m: &IntMatrix) -> bool {
    let n = m.rows();
    let mut a = m.clone();
    // Fraction-free elimination (Bareiss) for an exact determinant.
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&r| !a[(r, k)].is_zero()) {
                Some(r) => {
                    a.swap_rows(k, r);
                    sign = -sign;
                }
                None => return false,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let val = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                a[(i, j)] = val;
            }
        }
        prev = a[(k, k)].clone();
    }
    let det = if n == 0 { BigInt::one() } else { sign * &a[(n - 1, n - 1)] };
    det.abs().is_one()
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = min_abs_entry(&d, t) else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&d[(t, t)]);
                d.add_row(i, t, &q);
                u.add_row(i, t, &q);
                if !d[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&d[(t, t)]);
                d.add_col(j, t, &q);
                v.add_col(j, t, &q);
                if !d[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                // Row and column cleared; enforce divisibility of the remaining block.
                let bad = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| !(&d[(i, j)] % &d[(t, t)]).is_zero());
                match bad {
                    Some((i, _)) => {
                        let one = BigInt::one();
                        d.add_row(t, i, &one);
                        u.add_row(t, i, &one);
                    }
                    None => break,
                }
            }
            // Move the smallest nonzero entry of row t / column t to the pivot.
            let (pi, pj) = min_in_cross(&d, t);
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    SmithDecomposition { original: m.clone(), u, v, d }
}

fn min_abs_entry(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            if d[(i, j)].is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn min_in_cross(d: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let cands = (t..d.rows()).map(|i| (i, t)).chain((t..d.cols()).map(|j| (t, j)));
    for (i, j) in cands {
        if !d[(i, j)].is_zero() && (d[best].is_zero() || d[(i, j)].abs() < d[best].abs()) {
            best = (i, j);
        }
    }
    best
}

/// Cokernel and kernel of `m : Z^cols -> Z^rows`.
pub fn coker_ker(m: &IntMatrix) -> (AbelianGroup, AbelianGroup) {
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    let r = diag.len();
    let coker = AbelianGroup::new(m.rows() - r, diag);
    let ker = AbelianGroup::free(m.cols() - r);
    (coker, ker)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn identity_is_its_own_form() {
        let s = smith_normal_form(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
        assert!(s.verify());
    }

    #[test]
    fn fibonacci_difference_is_unimodular() {
        let s = smith_normal_form(&m(&[vec![0, -1], vec![-1, 1]]));
        assert!(s.verify());
        assert_eq!(s.d, IntMatrix::identity(2));
    }

    #[test]
    fn off_diagonal_two() {
        let s = smith_normal_form(&m(&[vec![0, -2], vec![-1, 0]]));
        assert!(s.verify());
        assert_eq!(s.d, m(&[vec![1, 0], vec![0, 2]]));
    }

    #[test]
    fn divisibility_fixup() {
        // diag(2, 3) is not in normal form; the chain requires diag(1, 6).
        let s = smith_normal_form(&m(&[vec![2, 0], vec![0, 3]]));
        assert!(s.verify());
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn rectangular_and_zero() {
        let s = smith_normal_form(&m(&[vec![2, 4, 4], vec![-6, 6, 12]]));
        assert!(s.verify());
        assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(6)]);
        let z = smith_normal_form(&IntMatrix::zeros(2, 3));
        assert!(z.verify());
        assert_eq!(z.rank(), 0);
    }

    #[test]
    fn coker_ker_small_cases() {
        let (c, k) = coker_ker(&IntMatrix::zeros(1, 1));
        assert_eq!((c, k), (AbelianGroup::free(1), AbelianGroup::free(1)));
        let (c, k) = coker_ker(&m(&[vec![-2]]));
        assert_eq!((c, k), (AbelianGroup::cyclic(2), AbelianGroup::trivial()));
        let (c, k) = coker_ker(&m(&[vec![0, -2], vec![-1, 0]]));
        assert_eq!((c, k), (AbelianGroup::cyclic(2), AbelianGroup::trivial()));
    }
}
