//! Sparse real matrices on truncated bases, with two independent norm evaluators.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Column-major sparse matrix; each column is sorted by row with no zero entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Sparse {
    rows: usize,
    cols: Vec<Vec<(usize, f64)>>,
}

/// Outcome of the power-iteration evaluator.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PowerNorm {
    pub value: f64,
    /// Largest relative Rayleigh residual `‖A*Av - θv‖ / θ` over connected blocks.
    pub residual: f64,
    pub iterations: usize,
    pub certified: bool,
}

pub const POWER_ITERATIONS: usize = 200;
pub const POWER_TOLERANCE: f64 = 1e-12;

fn clean(mut col: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    col.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(col.len());
    for (r, v) in col {
        match out.last_mut() {
            Some(last) if last.0 == r => last.1 += v,
            _ => out.push((r, v)),
        }
    }
    out.retain(|e| e.1 != 0.0);
    out
}

impl Sparse {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Sparse { rows, cols: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        Sparse { rows: n, cols: (0..n).map(|i| vec![(i, 1.0)]).collect() }
    }

    pub fn from_columns(rows: usize, cols: Vec<Vec<(usize, f64)>>) -> Self {
        let cols = cols.into_iter().map(clean).collect();
        Sparse { rows, cols }
    }

    pub fn from_triplets(rows: usize, ncols: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut cols = vec![Vec::new(); ncols];
        for (r, c, v) in triplets {
            cols[c].push((r, v));
        }
        Self::from_columns(rows, cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, c: usize) -> &[(usize, f64)] {
        &self.cols[c]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.cols[c].binary_search_by_key(&r, |e| e.0).map(|i| self.cols[c][i].1).unwrap_or(0.0)
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        self.cols.iter().enumerate().flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v))).collect()
    }

    pub fn transpose(&self) -> Sparse {
        Sparse::from_triplets(self.cols.len(), self.rows, self.triplets().into_iter().map(|(r, c, v)| (c, r, v)))
    }

    pub fn scale(&self, s: f64) -> Sparse {
        Sparse::from_columns(self.rows, self.cols.iter().map(|c| c.iter().map(|&(r, v)| (r, v * s)).collect()).collect())
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, other: &Sparse, s: f64) -> Sparse {
        assert_eq!((self.rows, self.cols.len()), (other.rows, other.cols.len()), "shape mismatch");
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| a.iter().copied().chain(b.iter().map(|&(r, v)| (r, s * v))).collect())
            .collect();
        Sparse::from_columns(self.rows, cols)
    }

    pub fn sub(&self, other: &Sparse) -> Sparse {
        self.add_scaled(other, -1.0)
    }

    /// `self · other`.
    pub fn mul(&self, other: &Sparse) -> Sparse {
        assert_eq!(self.cols.len(), other.rows, "shape mismatch");
        let cols = other
            .cols
            .iter()
            .map(|col| col.iter().flat_map(|&(k, v)| self.cols[k].iter().map(move |&(r, a)| (r, a * v))).collect())
            .collect();
        Sparse::from_columns(self.rows, cols)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        for (c, col) in self.cols.iter().enumerate() {
            if x[c] != 0.0 {
                for &(r, v) in col {
                    y[r] += v * x[c];
                }
            }
        }
        y
    }

    pub fn apply_adjoint(&self, y: &[f64]) -> Vec<f64> {
        self.cols.iter().map(|col| col.iter().map(|&(r, v)| v * y[r]).sum()).collect()
    }

    /// Keeps only the listed columns, in order.
    pub fn select_columns(&self, keep: &[usize]) -> Sparse {
        Sparse { rows: self.rows, cols: keep.iter().map(|&c| self.cols[c].clone()).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.cols.iter().flatten().fold(0.0, |m, e| m.max(e.1.abs()))
    }

    /// At most one entry per column and per row.
    pub fn is_weighted_partial_permutation(&self) -> bool {
        let mut seen = vec![false; self.rows];
        for col in &self.cols {
            if col.len() > 1 {
                return false;
            }
            if let Some(&(r, _)) = col.first() {
                if std::mem::replace(&mut seen[r], true) {
                    return false;
                }
            }
        }
        true
    }

    /// Connected blocks of the bipartite row/column graph, as (rows, cols) index lists.
    pub fn blocks(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let n = self.rows + self.cols.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, _) in col {
                let (a, b) = (find(&mut parent, r), find(&mut parent, self.rows + c));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, (Vec<usize>, Vec<usize>)> = Default::default();
        for (c, col) in self.cols.iter().enumerate() {
            if col.is_empty() {
                continue;
            }
            let root = find(&mut parent, self.rows + c);
            groups.entry(root).or_default().1.push(c);
        }
        for r in 0..self.rows {
            let root = find(&mut parent, r);
            if let Some(g) = groups.get_mut(&root) {
                g.0.push(r);
            }
        }
        groups.into_values().collect()
    }

    fn dense_block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        let pos: std::collections::HashMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let mut m = DMatrix::zeros(rows.len(), cols.len());
        for (j, &c) in cols.iter().enumerate() {
            for &(r, v) in &self.cols[c] {
                m[(pos[&r], j)] = v;
            }
        }
        m
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let rows: Vec<usize> = (0..self.rows).collect();
        let cols: Vec<usize> = (0..self.cols.len()).collect();
        self.dense_block(&rows, &cols)
    }

    /// Operator norm: max |entry| for weighted partial permutations, otherwise the largest
    /// singular value over connected blocks.
    pub fn norm_exact(&self) -> f64 {
        if self.is_weighted_partial_permutation() {
            return self.max_abs();
        }
        self.norm_svd()
    }

    pub fn norm_svd(&self) -> f64 {
        self.blocks()
            .iter()
            .map(|(r, c)| self.dense_block(r, c).singular_values().max())
            .fold(0.0, f64::max)
    }

    /// Numerical rank: singular values above `tol` times the largest one, summed over blocks.
    pub fn rank(&self, tol: f64) -> usize {
        let blocks: Vec<Vec<f64>> = self
            .blocks()
            .iter()
            .map(|(r, c)| self.dense_block(r, c).singular_values().iter().copied().collect())
            .collect();
        let top = blocks.iter().flatten().copied().fold(0.0, f64::max);
        blocks.iter().flatten().filter(|&&s| s > tol * top && s > 0.0).count()
    }

    /// Power iteration on `A*A` per connected block, from a seeded start vector.
    pub fn norm_power(&self, seed: u64) -> PowerNorm {
        let mut out = PowerNorm { value: 0.0, residual: 0.0, iterations: 0, certified: true };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (rows, cols) in self.blocks() {
            let m = self.dense_block(&rows, &cols);
            let mut v = nalgebra::DVector::from_fn(cols.len(), |_, _| rng.random::<f64>() + 0.5);
            v /= v.norm();
            let (mut theta, mut residual, mut iters) = (0.0, f64::INFINITY, 0);
            for it in 1..=POWER_ITERATIONS {
                let w = m.tr_mul(&(&m * &v));
                theta = v.dot(&w);
                if theta <= 0.0 {
                    residual = 0.0;
                    iters = it;
                    break;
                }
                residual = (&w - &v * theta).norm() / theta;
                iters = it;
                let wn = w.norm();
                v = w / wn;
                if residual < POWER_TOLERANCE {
                    break;
                }
            }
            out.value = out.value.max(theta.max(0.0).sqrt());
            out.residual = out.residual.max(residual);
            out.iterations = out.iterations.max(iters);
            out.certified &= residual < POWER_TOLERANCE;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weighted_permutation_norm_is_max_coefficient() {
        let a = Sparse::from_triplets(4, 4, [(1, 0, 0.5), (2, 1, -0.9), (0, 3, 0.2)]);
        assert!(a.is_weighted_partial_permutation());
        assert_eq!(a.norm_exact(), 0.9);
        assert!((a.norm_svd() - 0.9).abs() < 1e-15);
        let p = a.norm_power(1);
        assert!(p.certified && (p.value - 0.9).abs() < 1e-12);
    }

    #[test]
    fn block_norms_agree_with_dense_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let trips: Vec<_> = (0..60)
            .map(|_| (rng.random_range(0..30), rng.random_range(0..30), rng.random::<f64>() - 0.5))
            .collect();
        let a = Sparse::from_triplets(30, 30, trips);
        let dense = a.to_dense().singular_values().max();
        assert!((a.norm_svd() - dense).abs() < 1e-12);
        let p = a.norm_power(2);
        assert!((p.value - dense).abs() < 1e-8, "{p:?} vs {dense}");
    }

    #[test]
    fn algebra() {
        let a = Sparse::from_triplets(2, 2, [(0, 0, 1.0), (1, 0, 2.0), (1, 1, 3.0)]);
        let at = a.transpose();
        assert_eq!(at.get(0, 1), 2.0);
        let aa = a.mul(&at);
        assert_eq!(aa.get(1, 1), 13.0);
        assert_eq!(a.sub(&a).nnz(), 0);
        assert_eq!(a.apply(&[1.0, 1.0]), vec![1.0, 5.0]);
        assert_eq!(a.apply_adjoint(&[1.0, 1.0]), vec![3.0, 3.0]);
        assert!(Sparse::zeros(3, 3).norm_power(0).value == 0.0);
    }
}
