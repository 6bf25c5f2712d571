//! Dense integer matrices over arbitrary-precision integers.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::KError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self, KError> {
        let r = rows.len();
        if r == 0 {
            return Err(KError::Empty);
        }
        let c = rows[0].len();
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(KError::Ragged { row: i, len: row.len(), expected: c });
            }
            data.extend(row.iter().cloned().map(Into::into));
        }
        Ok(Self { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Matrix product; panics on a shape mismatch.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    /// `I - self` for a square matrix.
    pub fn one_minus(&self) -> Self {
        Self::identity(self.rows).sub(self)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        self.data.chunks(self.cols.max(1)).map(|c| c.to_vec()).collect()
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    pub(crate) fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * k;
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += k * col[src]
    pub(crate) fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * k;
            self[(i, dst)] += v;
        }
    }

    pub(crate) fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self[(r, j)];
            self[(r, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Square nonnegative irreducible integer matrix defining a shift of finite type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct TransitionMatrix {
    entries: Vec<Vec<u32>>,
}

impl TransitionMatrix {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self, KError> {
        let n = rows.len();
        if n == 0 {
            return Err(KError::Empty);
        }
        let mut entries = Vec::with_capacity(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(KError::NotSquare { rows: n, cols: row.len() });
            }
            let mut out = Vec::with_capacity(n);
            for (j, &v) in row.iter().enumerate() {
                if v < 0 {
                    return Err(KError::Negative { row: i, col: j, value: v });
                }
                out.push(u32::try_from(v).map_err(|_| KError::Fixture(format!("entry {v} too large")))?);
            }
            entries.push(out);
        }
        if let Some((from, to)) = first_unreachable(&entries) {
            return Err(KError::Reducible { from, to });
        }
        Ok(Self { entries })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> u32 {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.entries
    }

    pub fn allowed(&self, i: usize, j: usize) -> bool {
        self.entries[i][j] > 0
    }

    pub fn to_int(&self) -> IntMatrix {
        let rows: Vec<Vec<i64>> =
            self.entries.iter().map(|r| r.iter().map(|&v| i64::from(v)).collect()).collect();
        IntMatrix::from_rows(&rows).expect("square by construction")
    }

    pub fn transpose(&self) -> Self {
        let n = self.size();
        let entries = (0..n).map(|j| (0..n).map(|i| self.entries[i][j]).collect()).collect();
        Self { entries }
    }
}

/// Returns the first pair (from, to) with no directed path, or `None` if strongly connected
/// and at least one entry is positive.
fn first_unreachable(entries: &[Vec<u32>]) -> Option<(usize, usize)> {
    let n = entries.len();
    for start in 0..n {
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&j| entries[start][j] > 0).collect();
        while let Some(v) = stack.pop() {
            if !seen[v] {
                seen[v] = true;
                stack.extend((0..n).filter(|&j| entries[v][j] > 0 && !seen[j]));
            }
        }
        if let Some(to) = seen.iter().position(|s| !s) {
            return Some((start, to));
        }
    }
    None
}

impl TryFrom<Vec<Vec<i64>>> for TransitionMatrix {
    type Error = KError;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self, KError> {
        Self::new(rows)
    }
}

impl From<TransitionMatrix> for Vec<Vec<i64>> {
    fn from(m: TransitionMatrix) -> Self {
        m.entries.iter().map(|r| r.iter().map(|&v| i64::from(v)).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_reducible_and_accepts_cycles() {
        assert!(matches!(
            TransitionMatrix::new(vec![vec![1, 1], vec![0, 1]]),
            Err(KError::Reducible { from: 1, to: 0 })
        ));
        assert!(TransitionMatrix::new(vec![vec![0, 1], vec![1, 0]]).is_ok());
        assert!(matches!(TransitionMatrix::new(vec![vec![0]]), Err(KError::Reducible { .. })));
        assert!(matches!(
            TransitionMatrix::new(vec![vec![1, -1], vec![1, 1]]),
            Err(KError::Negative { .. })
        ));
    }

    #[test]
    fn product_and_transpose() {
        let a = IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]]).unwrap();
        let b = a.mul(&a.transpose());
        assert_eq!(b, IntMatrix::from_rows(&[vec![5, 11], vec![11, 25]]).unwrap());
    }
}
