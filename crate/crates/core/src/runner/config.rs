//! TOML experiment configuration. Unknown keys are rejected; every field except `seed`
//! and `model` has a documented default.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seed for every sampled check.
    pub seed: u64,
    pub model: ModelSpec,
    #[serde(default)]
    pub periodic: PeriodicSpec,
    #[serde(default)]
    pub basis: BasisSpec,
    #[serde(default)]
    pub partition: PartitionSpec,
    #[serde(default)]
    pub sampling: SamplingSpec,
    #[serde(default)]
    pub horizons: HorizonSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub ktheory: KTheorySpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    /// Vertex shift on the 0/1 (or multiplicity-collapsed) transition matrix.
    Sft { matrix: Vec<Vec<i64>> },
    /// Hyperbolic automorphism of the 2-torus; integer matrix of determinant ±1.
    Torus { matrix: [[i64; 2]; 2] },
}

/// Orbits of exact period `period`; `orbits` picks indices in sorted order (all if absent).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSelection {
    pub period: u32,
    #[serde(default)]
    pub orbits: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicSpec {
    pub p: OrbitSelection,
    pub q: OrbitSelection,
}

impl Default for PeriodicSpec {
    fn default() -> Self {
        PeriodicSpec {
            p: OrbitSelection { period: 1, orbits: Some(vec![0]) },
            q: OrbitSelection { period: 1, orbits: Some(vec![1]) },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasisSpec {
    /// Size bound for the enumerated homoclinic pool.
    pub homoclinic_size: u32,
    /// Size bound used when searching partition centers (torus only).
    pub cover_size: u32,
    /// Seeds `y` generating the tensor basis.
    pub tensor_seeds: usize,
    /// Extra off-block pairs added to the tensor basis.
    pub extra_pairs: usize,
    /// Cap on the tensor basis.
    pub max_pairs: usize,
    /// Largest block handed to the dense eigen solver.
    pub eigen_block: usize,
    /// Points per closure round cap for the homoclinic suite.
    pub closure_cap: usize,
}

impl Default for BasisSpec {
    fn default() -> Self {
        BasisSpec {
            homoclinic_size: 3,
            cover_size: 60,
            tensor_seeds: 120,
            extra_pairs: 100,
            max_pairs: 2000,
            eigen_block: 400,
            closure_cap: 50_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PartitionSpec {
    /// Partition radius; defaults to the model's `ε'` candidate.
    pub epsilon: Option<f64>,
    pub homotopy_steps: u32,
    /// Bound on `‖p_{s+1/steps} − p_s‖` between adjacent grid points.
    pub gap_bound: f64,
    /// Seeds used for the homotopy sweep.
    pub homotopy_seeds: usize,
    /// Samples for the partition-of-unity and `ε'` checks.
    pub samples: u64,
}

impl Default for PartitionSpec {
    fn default() -> Self {
        PartitionSpec { epsilon: None, homotopy_steps: 32, gap_bound: 0.5, homotopy_seeds: 40, samples: 2000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingSpec {
    pub axiom_samples: u64,
    pub uniqueness_pairs: u64,
    /// Window half-width for the brute-force uniqueness scan.
    pub uniqueness_window: i64,
    pub rank_pairs: usize,
    pub decay_pairs: usize,
    pub commutator_pairs: usize,
    /// Homoclinic points drawn per local set.
    pub per_set: usize,
    pub crossings: usize,
    /// Upper bound on the holonomy displacement of sampled elements.
    pub displacement: f64,
    pub wg_seeds: usize,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec {
            axiom_samples: 10_000,
            uniqueness_pairs: 1000,
            uniqueness_window: 3,
            rank_pairs: 200,
            decay_pairs: 50,
            commutator_pairs: 2,
            per_set: 24,
            crossings: 16,
            displacement: 0.01,
            wg_seeds: 60,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HorizonSpec {
    pub decay_n_max: usize,
    pub commutator_n_max: usize,
    /// Half-width of the `ℓ²(Z)` window.
    pub window: i64,
    pub intertwine_n_max: usize,
}

impl Default for HorizonSpec {
    fn default() -> Self {
        HorizonSpec { decay_n_max: 30, commutator_n_max: 30, window: 30, intertwine_n_max: 30 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub unity: f64,
    pub idempotency: f64,
    pub conjugation: f64,
    pub asymptotic: f64,
    pub evaluator_agreement: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { unity: 1e-12, idempotency: 1e-9, conjugation: 1e-12, asymptotic: 1e-6, evaluator_agreement: 1e-10 }
    }
}

/// A K-theory case: a transition matrix and optional expected groups written as
/// `[free_rank, [invariant factors...]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KCase {
    pub name: String,
    pub matrix: Vec<Vec<i64>>,
    #[serde(default)]
    pub k0_unstable: Option<(usize, Vec<u64>)>,
    #[serde(default)]
    pub k1_unstable: Option<(usize, Vec<u64>)>,
    #[serde(default)]
    pub k0_stable: Option<(usize, Vec<u64>)>,
    #[serde(default)]
    pub k1_stable: Option<(usize, Vec<u64>)>,
    /// Expected `(rank K_0, rank K_1)` of the unstable algebra by the dimension-group route.
    #[serde(default)]
    pub pv_unstable: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KTheorySpec {
    pub cases: Vec<KCase>,
    /// Random integer matrices for the Smith-form self-check.
    pub snf_samples: usize,
    /// `"shipped"` uses the bundled corpus; otherwise regenerate from `corpus_seed`.
    pub corpus: String,
    pub corpus_seed: u64,
    pub corpus_size: usize,
    pub corpus_max_dim: usize,
}

impl Default for KTheorySpec {
    fn default() -> Self {
        KTheorySpec {
            cases: Vec::new(),
            snf_samples: 500,
            corpus: "shipped".into(),
            corpus_seed: smale_ktheory::corpus::CORPUS_SEED,
            corpus_size: smale_ktheory::corpus::CORPUS_SIZE,
            corpus_max_dim: smale_ktheory::corpus::CORPUS_MAX_DIM,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        match &self.model {
            ModelSpec::Sft { matrix } => {
                if matrix.is_empty() || matrix.iter().any(|r| r.len() != matrix.len()) {
                    return bad("model.matrix must be a nonempty square matrix".into());
                }
            }
            ModelSpec::Torus { matrix } => {
                let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
                if det.abs() != 1 {
                    return bad(format!("torus matrix must have determinant ±1, got {det}"));
                }
            }
        }
        if self.periodic.p.period == 0 || self.periodic.q.period == 0 {
            return bad("periodic.p.period and periodic.q.period must be positive".into());
        }
        if let Some(e) = self.partition.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return bad(format!("partition.epsilon must be positive, got {e}"));
            }
        }
        if self.partition.homotopy_steps == 0 {
            return bad("partition.homotopy_steps must be at least 1".into());
        }
        if self.horizons.window < 1 {
            return bad("horizons.window must be at least 1".into());
        }
        if !(self.sampling.displacement > 0.0) {
            return bad("sampling.displacement must be positive".into());
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("unity", t.unity),
            ("idempotency", t.idempotency),
            ("conjugation", t.conjugation),
            ("asymptotic", t.asymptotic),
            ("evaluator_agreement", t.evaluator_agreement),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("tolerances.{name} must be a finite nonnegative number"));
            }
        }
        if self.ktheory.corpus != "shipped" && self.ktheory.corpus != "generated" {
            return bad(format!("ktheory.corpus must be \"shipped\" or \"generated\", got {:?}", self.ktheory.corpus));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = ExperimentConfig::from_toml("seed = 1\n[model]\nkind = \"sft\"\nmatrix = [[1,1],[1,1]]\n").unwrap();
        assert_eq!(c.horizons.window, 30);
        assert_eq!(c.partition.homotopy_steps, 32);
    }

    #[test]
    fn schema_errors_are_reported() {
        assert!(ExperimentConfig::from_toml("[model]\nkind = \"sft\"\nmatrix = [[1]]\n").is_err());
        assert!(ExperimentConfig::from_toml("seed = 1\nbogus = 2\n[model]\nkind = \"sft\"\nmatrix = [[1]]\n").is_err());
        let e = ExperimentConfig::from_toml("seed = 1\n[model]\nkind = \"torus\"\nmatrix = [[2,0],[0,1]]\n");
        assert!(e.unwrap_err().to_string().contains("determinant"));
    }
}
