//! Seeded verification of the bracket axioms, contraction, and local uniqueness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{SftModel, SftPoint, SmaleSpace};

/// Per-axiom counts over a sampled run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomTally {
    pub name: String,
    pub checked: u64,
    pub violations: u64,
    pub skipped: u64,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub model: String,
    pub samples: u64,
    pub seed: u64,
    pub axioms: Vec<AxiomTally>,
    /// Largest observed `λ·d(φy, φz) / d(y, z)` over local stable pairs.
    pub stable_contraction: f64,
    /// Largest observed `λ·d(φ⁻¹y, φ⁻¹z) / d(y, z)` over local unstable pairs.
    pub unstable_contraction: f64,
}

impl AxiomReport {
    pub fn violations(&self) -> u64 {
        self.axioms.iter().map(|a| a.violations).sum()
    }

    pub fn tally(&self, name: &str) -> Option<&AxiomTally> {
        self.axioms.iter().find(|a| a.name == name)
    }
}

pub const AXIOMS: [&str; 7] = [
    "idempotent",
    "left-absorb",
    "right-absorb",
    "equivariant",
    "local-product",
    "stable-contraction",
    "unstable-contraction",
];

const CONTRACTION_SLACK: f64 = 1e-12;
const CHUNK: u64 = 250;

#[derive(Clone, Copy, PartialEq)]
enum Outcome {
    Ok,
    Violated,
    Skipped,
}

struct ChunkResult {
    counts: [[u64; 3]; 7],
    witnesses: [Option<String>; 7],
    ratios: [f64; 2],
}

fn sample_chunk<M: SmaleSpace>(m: &M, seed: u64, chunk: u64, count: u64) -> ChunkResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut res = ChunkResult {
        counts: [[0; 3]; 7],
        witnesses: Default::default(),
        ratios: [0.0; 2],
    };
    let half = m.eps_x() / 2.0;
    for _ in 0..count {
        let x = m.random_point(&mut rng);
        let y = m.random_near(&x, half, &mut rng);
        let z = m.random_near(&x, half, &mut rng);
        let enc = |pts: &[&M::Point]| {
            pts.iter()
                .map(|p| m.encode(p))
                .collect::<Vec<_>>()
                .join(" ; ")
        };
        let mut outcomes = [Outcome::Skipped; 7];
        let eq = |a: Option<M::Point>, b: Option<M::Point>| match (a, b) {
            (Some(a), Some(b)) => {
                if a == b {
                    Outcome::Ok
                } else {
                    Outcome::Violated
                }
            }
            _ => Outcome::Skipped,
        };

        outcomes[0] = if m.bracket(&x, &x).as_ref() == Some(&x) {
            Outcome::Ok
        } else {
            Outcome::Violated
        };
        outcomes[1] = eq(
            m.bracket(&y, &z).and_then(|yz| m.bracket(&x, &yz)),
            m.bracket(&x, &z),
        );
        outcomes[2] = eq(
            m.bracket(&x, &y).and_then(|xy| m.bracket(&xy, &z)),
            m.bracket(&x, &z),
        );
        outcomes[3] = eq(
            m.bracket(&x, &y).map(|b| m.phi(&b)),
            m.bracket(&m.phi(&x), &m.phi(&y)),
        );
        outcomes[4] = match m.bracket(&x, &y) {
            Some(b) => {
                if m.in_local_stable(&b, &x, m.eps_x()) && m.in_local_unstable(&b, &y, m.eps_x()) {
                    Outcome::Ok
                } else {
                    Outcome::Violated
                }
            }
            None => Outcome::Skipped,
        };
        let s = m.random_local_stable(&y, half, &mut rng);
        let u = m.random_local_unstable(&y, half, &mut rng);
        for (slot, other, forward) in [(5usize, &s, true), (6usize, &u, false)] {
            let d0 = m.dist(&y, other);
            if d0 == 0.0 {
                outcomes[slot] = Outcome::Skipped;
                continue;
            }
            let (a, b) = if forward {
                (m.phi(&y), m.phi(other))
            } else {
                (m.phi_inv(&y), m.phi_inv(other))
            };
            let d1 = m.dist(&a, &b);
            res.ratios[slot - 5] = res.ratios[slot - 5].max(d1 * m.lambda() / d0);
            outcomes[slot] = if d1 <= d0 / m.lambda() + CONTRACTION_SLACK {
                Outcome::Ok
            } else {
                Outcome::Violated
            };
        }
        for (i, o) in outcomes.iter().enumerate() {
            let col = match o {
                Outcome::Ok => 0,
                Outcome::Violated => 1,
                Outcome::Skipped => 2,
            };
            res.counts[i][col] += 1;
            if *o == Outcome::Violated && res.witnesses[i].is_none() {
                res.witnesses[i] = Some(match i {
                    5 => enc(&[&y, &s]),
                    6 => enc(&[&y, &u]),
                    _ => enc(&[&x, &y, &z]),
                });
            }
        }
    }
    res
}

/// Samples `samples` triples in parallel chunks; the merge is independent of scheduling.
pub fn check_axioms<M: SmaleSpace>(m: &M, samples: u64, seed: u64) -> AxiomReport {
    let chunks = samples.div_ceil(CHUNK);
    let results: Vec<ChunkResult> = (0..chunks)
        .into_par_iter()
        .map(|c| sample_chunk(m, seed, c, CHUNK.min(samples - c * CHUNK)))
        .collect();
    let mut axioms: Vec<AxiomTally> = AXIOMS
        .iter()
        .map(|n| AxiomTally {
            name: n.to_string(),
            checked: 0,
            violations: 0,
            skipped: 0,
            witness: None,
        })
        .collect();
    let mut ratios = [0.0f64; 2];
    for r in results {
        for (i, a) in axioms.iter_mut().enumerate() {
            a.checked += r.counts[i][0] + r.counts[i][1];
            a.violations += r.counts[i][1];
            a.skipped += r.counts[i][2];
            if a.witness.is_none() {
                a.witness.clone_from(&r.witnesses[i]);
            }
        }
        ratios[0] = ratios[0].max(r.ratios[0]);
        ratios[1] = ratios[1].max(r.ratios[1]);
    }
    AxiomReport {
        model: m.label(),
        samples,
        seed,
        axioms,
        stable_contraction: ratios[0],
        unstable_contraction: ratios[1],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub pairs: u64,
    pub candidates_scanned: u64,
    pub mismatches: u64,
    pub witness: Option<String>,
}

/// Compares the bracket against a brute-force scan of `X^s(x, ε) ∩ X^u(y, ε)` with
/// `ε = ε_X/2`, over `pairs` sampled pairs whose intersection is nonempty.
///
/// Every point of the intersection agrees with `y` left of the window and with `x` right
/// of it, so scanning all admissible words on the window is exhaustive.
pub fn uniqueness_scan(m: &SftModel, pairs: u64, window: i64, seed: u64) -> UniquenessReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps = m.eps_x() / 2.0;
    let words = m.words((2 * window + 1) as usize, None, None);
    let mut report = UniquenessReport {
        pairs: 0,
        candidates_scanned: 0,
        mismatches: 0,
        witness: None,
    };
    let mut attempts = 0u64;
    while report.pairs < pairs && attempts < pairs * 1000 {
        attempts += 1;
        let x = m.random_point(&mut rng);
        let y = m.random_near(&x, m.eps_x(), &mut rng);
        let lo = y.start().min(-window) - 1;
        let hi = x.end().max(window + 1) + 1;
        let mut found = Vec::new();
        for w in &words {
            let core: Vec<u8> = (lo..hi)
                .map(|i| {
                    if i < -window {
                        y.at(i)
                    } else if i > window {
                        x.at(i)
                    } else {
                        w[(i + window) as usize]
                    }
                })
                .collect();
            let z =
                SftPoint::from_parts(y.left_cycle().to_vec(), core, x.right_cycle().to_vec(), lo);
            report.candidates_scanned += 1;
            if m.check_admissible(&z).is_err() {
                continue;
            }
            if m.in_local_stable(&z, &x, eps) && m.in_local_unstable(&z, &y, eps) {
                found.push(z);
            }
        }
        if found.is_empty() {
            continue;
        }
        report.pairs += 1;
        let ok = found.len() == 1 && m.bracket(&x, &y).as_ref() == Some(&found[0]);
        if !ok {
            report.mismatches += 1;
            if report.witness.is_none() {
                report.witness = Some(format!("{} ; {}", x.encode(), y.encode()));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{SwappedBracket, TorusModel};

    #[test]
    fn exact_models_have_no_violations() {
        let sft = SftModel::full_shift(2).unwrap();
        let r = check_axioms(&sft, 600, 1);
        assert_eq!(r.violations(), 0, "{r:?}");
        assert!(r.tally("left-absorb").unwrap().checked > 0);
        let torus = TorusModel::golden();
        let r = check_axioms(&torus, 300, 1);
        assert_eq!(r.violations(), 0, "{r:?}");
    }

    #[test]
    fn report_is_independent_of_thread_count() {
        let sft = SftModel::golden_mean().unwrap();
        let a = check_axioms(&sft, 700, 5);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| check_axioms(&sft, 700, 5));
        assert_eq!(a, b);
    }

    #[test]
    fn swapped_bracket_is_caught_by_local_product() {
        let m = SwappedBracket {
            inner: SftModel::full_shift(2).unwrap(),
        };
        let r = check_axioms(&m, 500, 2);
        assert!(r.tally("local-product").unwrap().violations > 0);
        // The swap is the bracket of the inverse system, so the absorption laws survive.
        assert_eq!(r.tally("left-absorb").unwrap().violations, 0);
    }

    #[test]
    fn zero_samples_is_vacuous() {
        let r = check_axioms(&SftModel::full_shift(2).unwrap(), 0, 0);
        assert!(r.axioms.iter().all(|a| a.checked == 0));
    }

    #[test]
    fn uniqueness_on_small_run() {
        let m = SftModel::full_shift(2).unwrap();
        let r = uniqueness_scan(&m, 50, 3, 7);
        assert_eq!((r.pairs, r.mismatches), (50, 0));
    }
}
