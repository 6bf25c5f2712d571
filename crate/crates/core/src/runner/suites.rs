//! The verification suites. Each returns a list of checks; construction errors that stem
//! from the configuration are returned as `Err` and surface as usage errors.

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use smale_ktheory::{
    corpus, duality_verdict, group_isomorphic, pv_ranks, ruelle_k_groups, smith_normal_form, AbelianGroup,
    TransitionMatrix,
};

use crate::axioms::{check_axioms, uniqueness_scan};
use crate::desk::Desk;
use crate::error::{Error, Result};
use crate::model::{SftModel, SmaleSpace, TorusModel};
use crate::ops::elements::LocalHolonomy;
use crate::ops::lemmas::{
    asymptotic_commutator, decay_sequence, product_rank, two_sided_commutator, Sampling, StableGen, UnstableGen,
};
use crate::ops::wg::{check_wg, wg_intertwine};
use crate::orbit::{basis_closure, enumerate_homoclinic, periodic_orbits, PeriodicOrbit, PointMap};
use crate::partition::{epsilon_x_prime, partition_check, EpsilonPartition, HomotopyFamily};
use crate::projection::{check_projection, homotopy_path, pg_apply, pg_bruteforce, pg_matrix, tensor_pairs};
use crate::runner::config::{ExperimentConfig, KCase, ModelSpec, OrbitSelection};
use crate::runner::report::{timed, Check};

pub const SUITES: [&str; 9] = [
    "axioms",
    "homoclinic",
    "partition",
    "projection",
    "operators",
    "wg",
    "ktheory",
    "duality",
    "pv",
];

/// Runs the checks of `suite`. Unknown suite names and invalid model data are errors.
pub fn run_checks(cfg: &ExperimentConfig, suite: &str) -> Result<Vec<Check>> {
    cfg.validate()?;
    match suite {
        "ktheory" => return ktheory_suite(cfg),
        "duality" => return duality_suite(cfg),
        "pv" => return pv_suite(cfg),
        s if !SUITES.contains(&s) => {
            return Err(Error::Config(format!("unknown suite {s:?}; expected one of {}", SUITES.join(", "))))
        }
        _ => {}
    }
    match &cfg.model {
        ModelSpec::Sft { matrix } => {
            let m = SftModel::new(TransitionMatrix::new(matrix.clone())?, format!("sft{matrix:?}"))?;
            let uniq = |m: &SftModel| {
                let n = cfg.sampling.uniqueness_pairs;
                if n == 0 {
                    return Check::skipped("local-uniqueness", "uniqueness_pairs = 0");
                }
                timed(|| {
                    let r = uniqueness_scan(m, n, cfg.sampling.uniqueness_window, cfg.seed);
                    Check::new("local-uniqueness")
                        .metric("pairs", r.pairs)
                        .metric("candidates_scanned", r.candidates_scanned)
                        .metric("mismatches", r.mismatches)
                        .require(r.mismatches == 0, || format!("{} bracket/scan mismatches", r.mismatches))
                        .require(r.pairs == n, || format!("only {} of {n} pairs had a nonempty intersection", r.pairs))
                        .witness(r.witness.clone())
                })
            };
            let extra = if suite == "axioms" { vec![uniq(&m)] } else { Vec::new() };
            model_suite(m, cfg, suite, extra)
        }
        ModelSpec::Torus { matrix } => {
            let m = TorusModel::new(*matrix, format!("torus{matrix:?}"))?;
            let extra = if suite == "axioms" {
                vec![Check::skipped("local-uniqueness", "the brute-force scan is defined for shifts of finite type")]
            } else {
                Vec::new()
            };
            model_suite(m, cfg, suite, extra)
        }
    }
}

fn select<M: SmaleSpace>(m: &M, sel: &OrbitSelection, role: &str) -> Result<Vec<PeriodicOrbit<M::Point>>> {
    let all: Vec<_> = periodic_orbits(m, sel.period)?.into_iter().filter(|o| o.period == sel.period).collect();
    let Some(ix) = &sel.orbits else { return Ok(all) };
    ix.iter()
        .map(|&i| {
            all.get(i).cloned().ok_or_else(|| {
                Error::Config(format!(
                    "periodic.{role}.orbits: index {i} out of range; the model has {} orbits of exact period {}",
                    all.len(),
                    sel.period
                ))
            })
        })
        .collect()
}

/// The desk described by `cfg`: model, periodic sets and partition radius.
pub fn desk_from_config<M: SmaleSpace>(m: M, cfg: &ExperimentConfig) -> Result<Desk<M>> {
    let p = select(&m, &cfg.periodic.p, "p")?;
    let q = select(&m, &cfg.periodic.q, "q")?;
    if p.is_empty() || q.is_empty() {
        return Err(Error::Config("periodic.p and periodic.q must each select at least one orbit".into()));
    }
    if let Some(x) = p.iter().flat_map(|o| &o.points).find(|x| q.iter().any(|o| o.contains(x))) {
        return Err(Error::PeriodicSetsOverlap(m.encode(x)));
    }
    let mut desk = Desk::new(m, p, q, cfg.basis.cover_size)?;
    if let Some(e) = cfg.partition.epsilon {
        desk.eps_prime = e;
    }
    Ok(desk)
}

fn model_suite<M: SmaleSpace>(m: M, cfg: &ExperimentConfig, suite: &str, extra: Vec<Check>) -> Result<Vec<Check>> {
    if suite == "axioms" {
        let mut out = vec![axiom_check(&m, cfg)];
        out.extend(extra);
        return Ok(out);
    }
    let desk = desk_from_config(m, cfg)?;
    Ok(match suite {
        "homoclinic" => homoclinic_suite(&desk, cfg),
        "partition" => partition_suite(&desk, cfg),
        "projection" => projection_suite(&desk, cfg),
        "operators" => operators_suite(&desk, cfg),
        "wg" => wg_suite(&desk, cfg),
        _ => unreachable!("suite names are checked by the caller"),
    })
}

fn axiom_check<M: SmaleSpace>(m: &M, cfg: &ExperimentConfig) -> Check {
    let n = cfg.sampling.axiom_samples;
    if n == 0 {
        return Check::skipped("bracket-axioms", "axiom_samples = 0");
    }
    timed(|| {
        let r = check_axioms(m, n, cfg.seed);
        let bad = r.axioms.iter().find(|a| a.violations > 0);
        Check::new("bracket-axioms")
            .metric("model", &r.model)
            .metric("axioms", &r.axioms)
            .metric("stable_contraction", r.stable_contraction)
            .metric("unstable_contraction", r.unstable_contraction)
            .require(bad.is_none(), || {
                let a = bad.expect("violation");
                format!("{} violations of {}", a.violations, a.name)
            })
            .witness(bad.and_then(|a| a.witness.clone()))
    })
}

fn seeds<P: Clone>(pool: &[P], count: usize, seed: u64) -> Vec<P> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pool.choose_multiple(&mut rng, count).cloned().collect()
}

fn homoclinic_suite<M: SmaleSpace>(desk: &Desk<M>, cfg: &ExperimentConfig) -> Vec<Check> {
    let m = &desk.model;
    let mut out = Vec::new();
    let basis = enumerate_homoclinic(m, desk.p.clone(), desk.q.clone(), cfg.basis.homoclinic_size);
    let basis = match basis {
        Ok(b) => b,
        Err(e) => return vec![Check::errored("enumeration", &e)],
    };
    out.push(timed(|| {
        let valid = basis.validate(m);
        Check::new("enumeration")
            .metric("size_bound", cfg.basis.homoclinic_size)
            .metric("points", basis.len())
            .metric("p_points", basis.p_points().len())
            .metric("q_points", basis.q_points().len())
            .require(!basis.is_empty(), || "no homoclinic points at this size bound".into())
            .require(valid.is_ok(), || valid.as_ref().err().map(ToString::to_string).unwrap_or_default())
    }));
    out.push(timed(|| {
        let maps = [PointMap::new("phi", |x: &M::Point| Some(m.phi(x))), PointMap::new("phi_inv", |x: &M::Point| Some(m.phi_inv(x)))];
        match basis_closure(&basis, &maps, 1, cfg.basis.closure_cap) {
            Ok(c) => {
                let boundary = (0..c.len()).filter(|&i| c.is_boundary(i)).count();
                let valid = c.validate(m);
                Check::new("closure")
                    .metric("points", c.len())
                    .metric("boundary", boundary)
                    .metric("interior", c.len() - boundary)
                    .require(c.len() > boundary, || "closure has no interior points".into())
                    .require(valid.is_ok(), || valid.as_ref().err().map(ToString::to_string).unwrap_or_default())
            }
            Err(e) => Check::errored("closure", &e),
        }
    }));
    out
}

fn partition_suite<M: SmaleSpace>(desk: &Desk<M>, cfg: &ExperimentConfig) -> Vec<Check> {
    let m = &desk.model;
    let tol = &cfg.tolerances;
    let samples = cfg.partition.samples;
    let mut out = vec![timed(|| match epsilon_x_prime(m, samples, cfg.seed) {
        Ok(c) => Check::new("eps-prime")
            .metric("certificate", &c)
            .metric("radius_in_use", desk.eps_prime)
            .require(c.worst_x < 1.0 && c.worst_y < 1.0, || format!("bracket displacement ratio {}/{}", c.worst_x, c.worst_y))
            .require(desk.eps_prime <= c.value, || format!("partition radius {} exceeds ε' = {}", desk.eps_prime, c.value)),
        Err(e) => Check::errored("eps-prime", &e),
    })];
    let part = match desk.partition() {
        Ok(p) => p,
        Err(e) => {
            out.push(Check::errored("partition-of-unity", &e));
            return out;
        }
    };
    out.push(timed(|| {
        let r = partition_check(m, &part, samples, cfg.seed);
        Check::new("partition-of-unity")
            .metric("check", &r)
            .metric("epsilon", desk.eps_prime)
            .require(r.max_unity_residual <= tol.unity, || format!("Σf² residual {:e} > {:e}", r.max_unity_residual, tol.unity))
            .require(r.uncovered == 0, || format!("{} sampled points uncovered", r.uncovered))
            .require(r.support_violations == 0, || format!("{} support violations", r.support_violations))
            .witness(r.uncovered_witness.clone())
    }));
    out.push(timed(|| {
        let steps = cfg.partition.homotopy_steps;
        let per = (samples / u64::from(steps)).max(16);
        let mut c = Check::new("homotopy-partitions").metric("steps", steps).metric("samples_per_step", per);
        let mut worst = 0.0f64;
        for j in 0..=steps {
            let s = f64::from(j) / f64::from(steps);
            match HomotopyFamily::new(m, &part, s) {
                Ok(f) => {
                    let r = partition_check(m, &f, per, cfg.seed.wrapping_add(u64::from(j)));
                    worst = worst.max(r.max_unity_residual);
                    c = c
                        .require(r.max_unity_residual <= tol.unity && r.uncovered == 0 && r.support_violations == 0, || {
                            format!("family at s = {s} is not a partition of unity")
                        })
                        .witness(r.uncovered_witness.clone());
                }
                Err(e) => return Check::errored("homotopy-partitions", &e),
            }
        }
        c.metric("max_unity_residual", worst)
    }));
    out
}

fn projection_suite<M: SmaleSpace>(desk: &Desk<M>, cfg: &ExperimentConfig) -> Vec<Check> {
    let m = &desk.model;
    let tol = &cfg.tolerances;
    let part = match desk.partition() {
        Ok(p) => p,
        Err(e) => return vec![Check::errored("projection", &e)],
    };
    let pool = desk.homoclinic(cfg.basis.homoclinic_size);
    let mut seed_pts = seeds(&pool, cfg.basis.tensor_seeds, cfg.seed);
    let build = |s: &[M::Point]| {
        let extra: Vec<_> = s.windows(2).take(cfg.basis.extra_pairs).map(|w| (w[0].clone(), w[1].clone())).collect();
        tensor_pairs(m, &part, s, &extra)
    };
    let (mut pairs, mut core) = build(&seed_pts);
    while pairs.len() > cfg.basis.max_pairs && seed_pts.len() > 1 {
        seed_pts.truncate(seed_pts.len() * 9 / 10);
        (pairs, core) = build(&seed_pts);
    }
    let mut out = Vec::new();
    out.push(timed(|| {
        let rows: Vec<_> = pairs.iter().cloned().collect();
        let (mut worst, mut witness) = (0.0f64, None);
        for (w, z) in pairs.iter().take(ACTION_SAMPLES) {
            let fast = pg_apply(m, &part, w, z);
            let slow = pg_bruteforce(m, &part, w, z, &rows);
            let gap = term_gap(&fast, &slow);
            if gap > worst {
                worst = gap;
                witness = Some(format!("({}, {})", m.encode(w), m.encode(z)));
            }
        }
        Check::new("groupoid-action")
            .metric("pairs_compared", pairs.len().min(ACTION_SAMPLES))
            .metric("max_gap", worst)
            .require(worst <= tol.evaluator_agreement, || format!("fast and brute-force actions differ by {worst:e}"))
            .witness(witness.filter(|_| worst > tol.evaluator_agreement))
    }));
    let op = match pg_matrix(m, &part, pairs.clone(), core) {
        Ok(op) => op,
        Err(e) => {
            out.push(Check::errored("projection-identities", &e));
            return out;
        }
    };
    let c = check_projection(m, &part, &op, cfg.basis.eigen_block, cfg.seed);
    out.push(
        Check::new("projection-identities")
            .metric("seeds", seed_pts.len())
            .metric("check", &c)
            .require(c.pairs <= cfg.basis.max_pairs, || format!("{} pairs exceed the cap {}", c.pairs, cfg.basis.max_pairs))
            .require(c.idempotency <= tol.idempotency, || format!("‖p² − p‖ = {:e}", c.idempotency))
            .require(c.adjoint == 0.0, || format!("‖p* − p‖ = {:e} on interior columns", c.adjoint))
            .require(c.nonzero_columns > 0, || "projection vanishes on every interior column".into()),
    );
    out.push(
        Check::new("projection-rank")
            .metric("predicted", c.predicted_rank)
            .metric("eigen", c.eigen_rank)
            .metric("block", c.eigen_block)
            .metric("spread", c.eigen_spread)
            .require(c.predicted_rank == c.eigen_rank, || format!("rank {} vs {}", c.predicted_rank, c.eigen_rank))
            .require(c.eigen_spread <= tol.idempotency, || format!("eigenvalues {:e} away from {{0, 1}}", c.eigen_spread)),
    );
    out.push(timed(|| {
        let hs = &seed_pts[..cfg.partition.homotopy_seeds.min(seed_pts.len())];
        match homotopy_path(m, &part, hs, cfg.partition.homotopy_steps) {
            Ok(r) => Check::new("homotopy")
                .metric("pairs", r.pairs)
                .metric("interior", r.interior)
                .metric("start_error", r.start_error)
                .metric("end_error", r.end_error)
                .metric("max_idempotency", r.max_idempotency)
                .metric("max_gap", r.max_gap)
                .metric("max_adjoint", r.steps.iter().map(|s| s.adjoint).fold(0.0, f64::max))
                .require(r.max_idempotency <= tol.idempotency, || format!("max ‖p_s² − p_s‖ = {:e}", r.max_idempotency))
                .require(r.start_error == 0.0, || format!("p at s = 0 differs from the base by {:e}", r.start_error))
                .require(r.end_error <= tol.conjugation, || format!("endpoint conjugation error {:e}", r.end_error))
                .require(r.max_gap <= cfg.partition.gap_bound, || format!("adjacent gap {} > {}", r.max_gap, cfg.partition.gap_bound)),
            Err(e) => Check::errored("homotopy", &e),
        }
    }));
    out
}

/// Pairs on which the fast action is compared with the brute-force scan.
const ACTION_SAMPLES: usize = 12;

fn term_gap<P: std::hash::Hash + Eq + Clone>(a: &[((P, P), f64)], b: &[((P, P), f64)]) -> f64 {
    let mut acc: std::collections::HashMap<&(P, P), f64> = std::collections::HashMap::new();
    for (p, c) in a {
        *acc.entry(p).or_insert(0.0) += c;
    }
    for (p, c) in b {
        *acc.entry(p).or_insert(0.0) -= c;
    }
    acc.values().map(|v| v.abs()).fold(0.0, f64::max)
}

type ElemPair<P> = (LocalHolonomy<P>, LocalHolonomy<P>);

/// Up to `count` crossing pairs centred at distinct sampled homoclinic points.
fn element_pairs<M: SmaleSpace>(desk: &Desk<M>, cfg: &ExperimentConfig, count: usize) -> Vec<ElemPair<M::Point>> {
    let pool = desk.homoclinic(cfg.basis.homoclinic_size);
    let centers = seeds(&pool, (2 * count).max(4), cfg.seed ^ 0xe1e);
    let built: Vec<Option<ElemPair<M::Point>>> = centers
        .par_iter()
        .enumerate()
        .map(|(i, z)| desk.crossing_pair(z, cfg.sampling.displacement, cfg.seed.wrapping_add(i as u64)).ok())
        .collect();
    built.into_iter().flatten().take(count).collect()
}

fn describe<M: SmaleSpace>(m: &M, a: &LocalHolonomy<M::Point>, b: &LocalHolonomy<M::Point>) -> String {
    format!(
        "a: {:?} {} -> {} ; b: {:?} {} -> {}",
        a.kind,
        m.encode(&a.w),
        m.encode(&a.v),
        b.kind,
        m.encode(&b.w),
        m.encode(&b.v)
    )
}

fn sampling(cfg: &ExperimentConfig) -> Sampling {
    Sampling { per_set: cfg.sampling.per_set, crossings: cfg.sampling.crossings, seed: cfg.seed }
}

fn operators_suite<M: SmaleSpace>(desk: &Desk<M>, cfg: &ExperimentConfig) -> Vec<Check> {
    let m = &desk.model;
    let (p, q) = (desk.p_points(), desk.q_points());
    let tol = &cfg.tolerances;
    let s = sampling(cfg);
    let need = cfg.sampling.rank_pairs.div_ceil(2).max(cfg.sampling.decay_pairs).max(cfg.sampling.commutator_pairs).max(1);
    let elems = element_pairs(desk, cfg, need);
    if elems.is_empty() {
        let reason = "no crossing pairs could be built; raise homoclinic_size or displacement";
        return vec![Check::new("elements").require(false, || reason.into())];
    }
    let mut out = Vec::new();

    out.push(timed(|| {
        let k = elems.len();
        // Even indices pair elements sharing a centre; odd ones pair neighbours.
        let combos: Vec<(usize, usize)> = (0..cfg.sampling.rank_pairs).map(|i| (i / 2 % k, (i / 2 + i % 2) % k)).collect();
        let reports: Vec<_> = combos
            .par_iter()
            .map(|&(i, j)| product_rank(m, &elems[i].0, &elems[j].1, &p, &q, &s))
            .collect();
        let bad = combos.iter().zip(&reports).find(|(_, r)| r.rank_ab > 1 || r.rank_ba > 1 || r.rank_ba != r.rank_adjoint);
        let hist = |f: &dyn Fn(&crate::ops::lemmas::RankReport) -> usize| {
            (0..=2).map(|v| reports.iter().filter(|r| f(r).min(2) == v).count()).collect::<Vec<_>>()
        };
        let oracle_agree = reports.iter().filter(|r| r.rank_ab == r.oracle_crossings.min(1)).count();
        Check::new("compactness")
            .metric("pairs", reports.len())
            .metric("rank_ab_histogram", hist(&|r| r.rank_ab))
            .metric("rank_ba_histogram", hist(&|r| r.rank_ba))
            .metric("oracle_agreements", oracle_agree)
            .metric("max_columns", reports.iter().map(|r| r.columns).max())
            .require(bad.is_none(), || {
                let (_, r) = bad.expect("bad pair");
                format!("rank(ab) = {}, rank(ba) = {}, rank(a*b*) = {}", r.rank_ab, r.rank_ba, r.rank_adjoint)
            })
            .witness(bad.map(|(&(i, j), _)| describe(m, &elems[i].0, &elems[j].1)))
    }));

    out.push(timed(|| {
        let n = cfg.horizons.decay_n_max;
        let used = &elems[..cfg.sampling.decay_pairs.min(elems.len())];
        let reports: Vec<_> = used.par_iter().map(|(a, b)| decay_sequence(m, a, b, &p, &q, n, &s)).collect();
        let bad = reports.iter().position(|r| r.vanish_from.is_none() || !r.oracle_violations.is_empty());
        let vanish: Vec<Option<usize>> = reports.iter().map(|r| r.vanish_from).collect();
        Check::new("decay")
            .metric("pairs", reports.len())
            .metric("n_max", n)
            .metric("vanish_from", &vanish)
            .metric("initially_nonzero", reports.iter().filter(|r| r.left[0] > 0.0 || r.right[0] > 0.0).count())
            .require(reports.len() == cfg.sampling.decay_pairs, || format!("only {} pairs available", reports.len()))
            .require(bad.is_none(), || {
                let r = &reports[bad.expect("bad")];
                format!("no exact vanishing by n = {n} (last nonzero {:?}, oracle violations {:?})", r.last_nonzero, r.oracle_violations)
            })
            .witness(bad.map(|i| describe(m, &used[i].0, &used[i].1)))
    }));

    out.push(timed(|| {
        let n = cfg.horizons.commutator_n_max;
        let used = &elems[..cfg.sampling.commutator_pairs.min(elems.len())];
        let reports: Vec<_> = used.iter().map(|(a, b)| asymptotic_commutator(m, a, b, &p, &q, n, &s)).collect();
        let bad = reports.iter().position(|r| {
            !(r.first[n] < tol.asymptotic
                && r.second[n] < tol.asymptotic
                && r.max_norm_disagreement <= tol.evaluator_agreement
                && r.corners_agree)
        });
        Check::new("asymptotic-commutators")
            .metric("n_max", n)
            .metric("first", reports.iter().map(|r| &r.first).collect::<Vec<_>>())
            .metric("second", reports.iter().map(|r| &r.second).collect::<Vec<_>>())
            .metric("max_evaluator_disagreement", reports.iter().map(|r| r.max_norm_disagreement).fold(0.0, f64::max))
            .metric("quadrilaterals", reports.iter().map(|r| &r.quadrilateral).collect::<Vec<_>>())
            .require(bad.is_none(), || {
                let r = &reports[bad.expect("bad")];
                format!(
                    "at n = {n}: first {:e}, second {:e}, evaluator gap {:e}, corners agree {}",
                    r.first[n], r.second[n], r.max_norm_disagreement, r.corners_agree
                )
            })
            .witness(bad.map(|i| describe(m, &used[i].0, &used[i].1)))
    }));

    out.push(timed(|| {
        let (a, b) = &elems[0];
        let w = cfg.horizons.window;
        let mut c = Check::new("two-sided").metric("window", w);
        let cases: [(&str, StableGen<'_, M::Point>, UnstableGen<'_, M::Point>); 3] = [
            ("unitary-unitary", StableGen::Unitary, UnstableGen::Unitary),
            ("element-unitary", StableGen::Elem(a), UnstableGen::Unitary),
            ("unitary-element", StableGen::Unitary, UnstableGen::Elem(b)),
        ];
        for (name, f, g) in cases {
            let prof = two_sided_commutator(m, f, g, &p, &q, w, tol.asymptotic, &s);
            c = c
                .metric(name, prof.blocks.iter().map(|e| e.1).fold(0.0, f64::max))
                .require(prof.all_exact_zero, || format!("{name} commutator is not exactly zero"));
        }
        let prof = two_sided_commutator(m, StableGen::Elem(a), UnstableGen::Elem(b), &p, &q, w, tol.asymptotic, &s);
        c.metric("element-element", &prof.blocks)
            .require(prof.ends_converged == (true, true), || {
                format!("edge blocks {:?} not below {:e}", (prof.blocks.first(), prof.blocks.last()), tol.asymptotic)
            })
            .witness((prof.ends_converged != (true, true)).then(|| describe(m, a, b)))
    }));
    out
}

fn wg_suite<M: SmaleSpace>(desk: &Desk<M>, cfg: &ExperimentConfig) -> Vec<Check> {
    let m = &desk.model;
    let tol = &cfg.tolerances;
    let part: EpsilonPartition<M::Point> = match desk.partition() {
        Ok(p) => p,
        Err(e) => return vec![Check::errored("wg-identities", &e)],
    };
    let pool = desk.homoclinic(cfg.basis.homoclinic_size);
    let seed_pts = seeds(&pool, cfg.sampling.wg_seeds, cfg.seed);
    let mut out = vec![timed(|| match check_wg(m, &part, &seed_pts, true) {
        Ok(c) => {
            let conj = c.conjugation.unwrap_or(f64::INFINITY);
            Check::new("wg-identities")
                .metric("check", &c)
                .require((c.chi_norm - 1.0).abs() <= tol.conjugation, || format!("‖χ_G‖ = {}", c.chi_norm))
                .require(c.isometry <= tol.idempotency, || format!("‖W*W − 1⊗q‖ = {:e}", c.isometry))
                .require(c.range <= tol.idempotency, || format!("‖WW* − p‖ = {:e}", c.range))
                .require(c.adjoint_formula == 0.0, || format!("adjoint formula gap {:e}", c.adjoint_formula))
                .require(conj <= tol.conjugation, || format!("conjugation identity off by {conj:e}"))
        }
        Err(e) => Check::errored("wg-identities", &e),
    })];
    out.push(timed(|| {
        let Some((a, _)) = element_pairs(desk, cfg, 1).into_iter().next() else {
            return Check::new("wg-intertwining").require(false, || "no stable element could be built".into());
        };
        let n = cfg.horizons.intertwine_n_max;
        let steps = wg_intertwine(m, &part, &a, &desk.p_points(), n, cfg.sampling.per_set, cfg.seed);
        let last = steps.last().expect("n_max + 1 steps");
        let gap = steps.iter().map(|s| (s.norm - s.norm_power).abs()).fold(0.0, f64::max);
        Check::new("wg-intertwining")
            .metric("norms", steps.iter().map(|s| s.norm).collect::<Vec<_>>())
            .metric("evaluator_gap", gap)
            .require(last.norm < tol.asymptotic, || format!("norm {:e} at n = {n}", last.norm))
            .require(gap <= tol.evaluator_agreement, || format!("evaluators disagree by {gap:e}"))
            .witness(last.witness.as_ref().filter(|_| last.norm >= tol.asymptotic).map(|(k, x)| format!("center {k}, column {x}")))
    }));
    out
}

fn matrix_witness(a: &TransitionMatrix) -> String {
    serde_json::to_string(a.rows()).unwrap_or_default()
}

fn expect_group(c: Check, label: &str, got: &AbelianGroup, want: &Option<(usize, Vec<u64>)>) -> Check {
    let c = c.metric(label, got.to_string());
    match want {
        Some((free, tors)) => {
            let w = AbelianGroup::from_factors(*free, tors);
            c.require(group_isomorphic(got, &w), || format!("{label} = {got}, expected {w}"))
        }
        None => c,
    }
}

fn case_matrix(case: &KCase) -> Result<TransitionMatrix> {
    TransitionMatrix::new(case.matrix.clone())
        .map_err(|e| Error::Config(format!("ktheory case {:?}: {e}", case.name)))
}

fn ktheory_suite(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for case in &cfg.ktheory.cases {
        let a = case_matrix(case)?;
        out.push(timed(|| {
            let g = ruelle_k_groups(&a);
            let mut c = Check::new(format!("case:{}", case.name));
            c = expect_group(c, "k0_unstable", &g.k0_unstable, &case.k0_unstable);
            c = expect_group(c, "k1_unstable", &g.k1_unstable, &case.k1_unstable);
            c = expect_group(c, "k0_stable", &g.k0_stable, &case.k0_stable);
            c = expect_group(c, "k1_stable", &g.k1_stable, &case.k1_stable);
            let failed = c.status == crate::runner::report::Status::Fail;
            c.witness(failed.then(|| matrix_witness(&a)))
        }));
    }
    let n = cfg.ktheory.snf_samples;
    out.push(if n == 0 {
        Check::skipped("snf-self-check", "snf_samples = 0")
    } else {
        timed(|| {
            let ms = corpus::random_int_matrices(cfg.seed, n, 6, 9);
            let ok: Vec<bool> = ms.par_iter().map(|x| smith_normal_form(x).verify()).collect();
            let bad = ok.iter().position(|v| !v);
            Check::new("snf-self-check")
                .metric("matrices", n)
                .metric("failures", ok.iter().filter(|v| !**v).count())
                .require(bad.is_none(), || "U·M·V is not the reported diagonal form".into())
                .witness(bad.map(|i| format!("{:?}", ms[i].to_rows())))
        })
    });
    Ok(out)
}

fn corpus_matrices(cfg: &ExperimentConfig) -> Result<Vec<TransitionMatrix>> {
    let k = &cfg.ktheory;
    let c = if k.corpus == "shipped" {
        corpus::shipped_corpus()?
    } else {
        corpus::generate_corpus(k.corpus_seed, k.corpus_size, k.corpus_max_dim)
    };
    Ok(c.matrices)
}

fn duality_suite(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    if cfg.ktheory.corpus == "shipped" {
        let shipped = corpus::shipped_corpus()?;
        out.push(timed(|| {
            let regen = corpus::generate_corpus(shipped.seed, shipped.matrices.len(), shipped.max_dim);
            let first = shipped.matrices.iter().zip(&regen.matrices).position(|(x, y)| x != y);
            Check::new("corpus-reproducible")
                .metric("seed", shipped.seed)
                .metric("size", shipped.matrices.len())
                .require(first.is_none(), || "shipped corpus differs from its seeded regeneration".into())
                .witness(first.map(|i| format!("index {i}: {}", matrix_witness(&shipped.matrices[i]))))
        }));
    }
    let mut mats = corpus_matrices(cfg)?;
    for case in &cfg.ktheory.cases {
        mats.push(case_matrix(case)?);
    }
    out.push(timed(|| {
        let verdicts = corpus::sweep(&mats);
        let bad = verdicts.iter().position(|v| !v.pass);
        let max_dim = mats.iter().map(|a| a.size()).max().unwrap_or(0);
        Check::new("duality-verdicts")
            .metric("matrices", mats.len())
            .metric("max_dim", max_dim)
            .metric("passing", verdicts.iter().filter(|v| v.pass).count())
            .metric("isomorphism_checks", verdicts.iter().map(|v| v.checks.len()).sum::<usize>())
            .require(bad.is_none(), || {
                let v = &verdicts[bad.expect("bad")];
                let labels: Vec<&str> = v.failures().map(|c| c.label.as_str()).collect();
                format!("failed isomorphisms: {}", labels.join(", "))
            })
            .witness(bad.map(|i| matrix_witness(&mats[i])))
    }));
    if let [a, ..] = mats.as_slice() {
        let v = duality_verdict(a);
        out.push(Check::new("example-verdict").metric("matrix", a.rows()).metric("verdict", &v).require(v.pass, || "first corpus matrix fails".into()));
    }
    Ok(out)
}

fn pv_suite(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let mut mats = corpus_matrices(cfg)?;
    let mut expected: Vec<(usize, (usize, usize), String)> = Vec::new();
    for case in &cfg.ktheory.cases {
        if let Some(e) = case.pv_unstable {
            expected.push((mats.len(), e, case.name.clone()));
        }
        mats.push(case_matrix(case)?);
    }
    let ranks: Vec<_> = mats.par_iter().map(pv_ranks).collect();
    let groups: Vec<_> = mats.par_iter().map(ruelle_k_groups).collect();
    let mut out = Vec::new();
    let unbalanced = ranks.iter().position(|r| !(r.unstable.balanced() && r.stable.balanced()));
    out.push(
        Check::new("balanced-ranks")
            .metric("matrices", mats.len())
            .metric("eventual_dims", ranks.iter().map(|r| r.eventual_dim).collect::<Vec<_>>())
            .require(unbalanced.is_none(), || "rank K_0 ≠ rank K_1".into())
            .witness(unbalanced.map(|i| matrix_witness(&mats[i]))),
    );
    let disagree = ranks.iter().zip(&groups).position(|(r, g)| {
        (r.unstable.k0, r.unstable.k1, r.stable.k0, r.stable.k1)
            != (g.k0_unstable.free_rank(), g.k1_unstable.free_rank(), g.k0_stable.free_rank(), g.k1_stable.free_rank())
    });
    out.push(
        Check::new("cross-method")
            .metric("matrices", mats.len())
            .require(disagree.is_none(), || {
                let i = disagree.expect("disagreement");
                format!("dimension-group ranks {:?} vs Smith-form groups {:?}", ranks[i], groups[i])
            })
            .witness(disagree.map(|i| matrix_witness(&mats[i]))),
    );
    for (i, (k0, k1), name) in expected {
        let got = (ranks[i].unstable.k0, ranks[i].unstable.k1);
        out.push(
            Check::new(format!("case:{name}"))
                .metric("unstable", &ranks[i].unstable)
                .metric("stable", &ranks[i].stable)
                .require(got == (k0, k1), || format!("ranks {got:?}, expected {:?}", (k0, k1)))
                .witness((got != (k0, k1)).then(|| matrix_witness(&mats[i]))),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::{compare_reports, run, Status};

    const SHIFT: &str = "seed = 3\n[model]\nkind = \"sft\"\nmatrix = [[1,1],[1,1]]\n\
        [partition]\nsamples = 200\nhomotopy_steps = 4\n";

    #[test]
    fn changed_epsilon_only_moves_partition_fields() {
        let a = ExperimentConfig::from_toml(SHIFT).unwrap();
        let mut b = a.clone();
        b.partition.epsilon = Some(0.2);
        let (ra, rb) = (run(&a, "partition").unwrap(), run(&b, "partition").unwrap());
        assert_eq!((ra.status, rb.status), (Status::Pass, Status::Pass));
        let d = compare_reports(&serde_json::to_value(&ra).unwrap(), &serde_json::to_value(&rb).unwrap()).unwrap();
        assert!(!d.is_empty());
        assert!(d.iter().all(|f| f.path == "/config/partition/epsilon" || f.path.contains("/metrics/")), "{d:?}");
    }

    #[test]
    fn bad_orbit_index_is_a_config_error() {
        let cfg = ExperimentConfig::from_toml(&format!("{SHIFT}[periodic]\np = {{ period = 1, orbits = [5] }}\nq = {{ period = 1 }}\n")).unwrap();
        let e = run_checks(&cfg, "partition").unwrap_err();
        assert!(e.to_string().contains("out of range"), "{e}");
        let overlap = ExperimentConfig::from_toml(&format!("{SHIFT}[periodic]\np = {{ period = 1 }}\nq = {{ period = 1 }}\n")).unwrap();
        assert!(matches!(run_checks(&overlap, "homoclinic"), Err(Error::PeriodicSetsOverlap(_))));
    }
}
