//! Seeded corpora of transition matrices and integer matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::duality::{duality_verdict, DualityVerdict};
use crate::error::KError;
use crate::matrix::{IntMatrix, TransitionMatrix};

pub const CORPUS_SEED: u64 = 0x5eed_0d0a;
pub const CORPUS_SIZE: usize = 100;
pub const CORPUS_MAX_DIM: usize = 6;

const FIXTURE: &str = include_str!("../fixtures/corpus.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub seed: u64,
    pub max_dim: usize,
    pub matrices: Vec<TransitionMatrix>,
}

/// Rejection-samples `count` irreducible matrices of size `1..=max_dim`.
pub fn generate_corpus(seed: u64, count: usize, max_dim: usize) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrices = Vec::with_capacity(count);
    while matrices.len() < count {
        let n = rng.random_range(1..=max_dim);
        let rows: Vec<Vec<i64>> =
            (0..n).map(|_| (0..n).map(|_| sparse_entry(&mut rng)).collect()).collect();
        if let Ok(m) = TransitionMatrix::new(rows) {
            matrices.push(m);
        }
    }
    Corpus { seed, max_dim, matrices }
}

fn sparse_entry(rng: &mut ChaCha8Rng) -> i64 {
    match rng.random_range(0..20) {
        0..=8 => 0,
        9..=16 => 1,
        17..=18 => 2,
        _ => 3,
    }
}

/// The corpus shipped with the crate.
pub fn shipped_corpus() -> Result<Corpus, KError> {
    serde_json::from_str(FIXTURE).map_err(|e| KError::Fixture(e.to_string()))
}

/// Integer matrices with `1..=max_dim` rows and columns and entries in `[-bound, bound]`.
pub fn random_int_matrices(seed: u64, count: usize, max_dim: usize, bound: i64) -> Vec<IntMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = rng.random_range(1..=max_dim);
            let c = rng.random_range(1..=max_dim);
            let rows: Vec<Vec<i64>> =
                (0..r).map(|_| (0..c).map(|_| rng.random_range(-bound..=bound)).collect()).collect();
            IntMatrix::from_rows(&rows).expect("rectangular")
        })
        .collect()
}

/// Duality verdicts for every matrix, in input order.
pub fn sweep(matrices: &[TransitionMatrix]) -> Vec<DualityVerdict> {
    matrices.par_iter().map(duality_verdict).collect()
}
