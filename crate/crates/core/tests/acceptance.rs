//! Acceptance harness: one PASS/FAIL line per criterion, thresholds pinned here rather than
//! taken from the shipped configs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use serde_json::Value;
use smale_duality::runner::{self, Check, ExperimentConfig, Status, VerificationReport};

const MODELS: [&str; 3] = ["two_shift", "golden_sft", "golden_torus"];
const DESKS: [&str; 2] = ["two_shift", "golden_torus"];

const AXIOM_SAMPLES: u64 = 10_000;
const UNIQUENESS_PAIRS: u64 = 1_000;
const IDEMPOTENCY: f64 = 1e-9;
const CONJUGATION: f64 = 1e-12;
const MAX_PAIRS: u64 = 2_000;
const HOMOTOPY_STEPS: u64 = 32;
const RANK_PAIRS: u64 = 200;
const DECAY_PAIRS: u64 = 50;
const HORIZON: u64 = 30;
const ASYMPTOTIC: f64 = 1e-6;
const EVALUATORS: f64 = 1e-10;
const CORPUS_SIZE: u64 = 100;
const CORPUS_MAX_DIM: u64 = 6;
const SNF_SAMPLES: u64 = 500;

struct Runs {
    configs: BTreeMap<String, ExperimentConfig>,
    reports: BTreeMap<(String, String), (VerificationReport, Duration)>,
}

impl Runs {
    fn get(&mut self, config: &str, suite: &str) -> Result<&(VerificationReport, Duration), String> {
        let key = (config.to_string(), suite.to_string());
        if !self.reports.contains_key(&key) {
            let cfg = self.configs.get(config).ok_or_else(|| format!("missing config {config}"))?;
            let t = Instant::now();
            let r = runner::run(cfg, suite).map_err(|e| format!("{config}/{suite}: {e}"))?;
            self.reports.insert(key.clone(), (r, t.elapsed()));
        }
        Ok(&self.reports[&key])
    }

    fn check(&mut self, config: &str, suite: &str, name: &str) -> Result<Check, String> {
        let (r, _) = self.get(config, suite)?;
        let c = r
            .checks
            .iter()
            .find(|c| c.name == name)
            .cloned()
            .ok_or_else(|| format!("{config}/{suite}: no check {name}"))?;
        if c.status != Status::Pass {
            return Err(format!("{config}/{suite}/{name}: {} ({})", c.status, c.reason.unwrap_or_default()));
        }
        Ok(c)
    }
}

fn at<'a>(c: &'a Check, path: &str) -> Result<&'a Value, String> {
    let mut v = c.metrics.get(path.split('/').next().unwrap_or(path)).ok_or_else(|| format!("{}: no metric {path}", c.name))?;
    for part in path.split('/').skip(1) {
        v = match part.parse::<usize>() {
            Ok(i) => v.get(i),
            Err(_) => v.get(part),
        }
        .ok_or_else(|| format!("{}: no metric {path}", c.name))?;
    }
    Ok(v)
}

fn num(c: &Check, path: &str) -> Result<f64, String> {
    at(c, path)?.as_f64().ok_or_else(|| format!("{}: {path} is not a number", c.name))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1(r: &mut Runs) -> Result<String, String> {
    let mut total = Duration::ZERO;
    for m in MODELS {
        let c = r.check(m, "axioms", "bracket-axioms")?;
        total += r.get(m, "axioms")?.1;
        let tallies = at(&c, "axioms")?.as_array().cloned().unwrap_or_default();
        for t in &tallies {
            let checked = t["checked"].as_u64().unwrap_or(0) + t["skipped"].as_u64().unwrap_or(0);
            ensure(checked >= AXIOM_SAMPLES && t["violations"] == 0, || format!("{m}: {t}"))?;
        }
        ensure(!tallies.is_empty(), || format!("{m}: empty tally"))?;
    }
    ensure(total < Duration::from_secs(30), || format!("runtime {total:?}"))?;
    Ok(format!("3 models x {AXIOM_SAMPLES} samples, 0 violations, {:.1}s", total.as_secs_f64()))
}

fn criterion_2(r: &mut Runs) -> Result<String, String> {
    let c = r.check("two_shift", "axioms", "local-uniqueness")?;
    let (pairs, mism) = (num(&c, "pairs")? as u64, num(&c, "mismatches")? as u64);
    ensure(pairs == UNIQUENESS_PAIRS && mism == 0, || format!("{pairs} pairs, {mism} mismatches"))?;
    Ok(format!("{pairs} pairs, 0 mismatches"))
}

fn criterion_3(r: &mut Runs) -> Result<String, String> {
    let mut total = Duration::ZERO;
    let mut notes = Vec::new();
    for d in DESKS {
        let c = r.check(d, "projection", "projection-identities")?;
        let (pairs, idem, adj) = (num(&c, "check/pairs")?, num(&c, "check/idempotency")?, num(&c, "check/adjoint")?);
        ensure(pairs as u64 <= MAX_PAIRS && idem <= IDEMPOTENCY && adj == 0.0, || {
            format!("{d}: pairs {pairs}, idempotency {idem:e}, adjoint {adj:e}")
        })?;
        let h = r.check(d, "projection", "homotopy")?;
        let steps = r.configs[d].partition.homotopy_steps;
        let (hi, end) = (num(&h, "max_idempotency")?, num(&h, "end_error")?);
        ensure(u64::from(steps) == HOMOTOPY_STEPS && hi <= IDEMPOTENCY && end <= CONJUGATION, || {
            format!("{d}: steps {steps}, homotopy idempotency {hi:e}, endpoint {end:e}")
        })?;
        total += r.get(d, "projection")?.1;
        notes.push(format!("{d}: {pairs} pairs, ‖p²−p‖ {idem:.1e}, endpoint {end:.1e}"));
    }
    ensure(total < Duration::from_secs(120), || format!("runtime {total:?}"))?;
    Ok(format!("{}; {:.1}s", notes.join("; "), total.as_secs_f64()))
}

fn criterion_4(r: &mut Runs) -> Result<String, String> {
    for m in MODELS {
        let c = r.check(m, "operators", "compactness")?;
        let pairs = num(&c, "pairs")? as u64;
        let over = num(&c, "rank_ab_histogram/2")? + num(&c, "rank_ba_histogram/2")?;
        ensure(pairs == RANK_PAIRS && over == 0.0, || format!("{m}: {pairs} pairs, {over} with rank > 1"))?;
    }
    Ok(format!("{RANK_PAIRS} pairs per model, all ranks ≤ 1"))
}

fn criterion_5(r: &mut Runs) -> Result<String, String> {
    let mut worst = 0u64;
    for m in MODELS {
        let c = r.check(m, "operators", "decay")?;
        let vanish = at(&c, "vanish_from")?.as_array().cloned().unwrap_or_default();
        ensure(vanish.len() as u64 == DECAY_PAIRS && num(&c, "n_max")? as u64 == HORIZON, || format!("{m}: {} pairs", vanish.len()))?;
        for v in &vanish {
            let n = v.as_u64().ok_or_else(|| format!("{m}: a pair never vanishes"))?;
            worst = worst.max(n);
        }
    }
    ensure(worst <= HORIZON, || format!("vanishing at {worst}"))?;
    Ok(format!("{DECAY_PAIRS} pairs per model, exact zero from N ≤ {worst}"))
}

fn criterion_6(r: &mut Runs) -> Result<String, String> {
    let mut peak = 0.0f64;
    for m in MODELS {
        let c = r.check(m, "operators", "asymptotic-commutators")?;
        ensure(num(&c, "n_max")? as u64 == HORIZON, || format!("{m}: horizon"))?;
        for key in ["first", "second"] {
            for seq in at(&c, key)?.as_array().cloned().unwrap_or_default() {
                let last = seq.get(HORIZON as usize).and_then(Value::as_f64).ok_or_else(|| format!("{m}: short sequence"))?;
                ensure(last < ASYMPTOTIC, || format!("{m}: {key} at n = {HORIZON} is {last:e}"))?;
                peak = peak.max(last);
            }
        }
        let gap = num(&c, "max_evaluator_disagreement")?;
        ensure(gap <= EVALUATORS, || format!("{m}: evaluators differ by {gap:e}"))?;
    }
    Ok(format!("largest value at n = {HORIZON}: {peak:.2e}"))
}

fn criterion_7(r: &mut Runs) -> Result<String, String> {
    for m in MODELS {
        let c = r.check(m, "operators", "two-sided")?;
        ensure(num(&c, "window")? as u64 == HORIZON, || format!("{m}: window"))?;
        for k in ["unitary-unitary", "element-unitary", "unitary-element"] {
            ensure(num(&c, k)? == 0.0, || format!("{m}: {k} nonzero"))?;
        }
        let blocks = at(&c, "element-element")?.as_array().cloned().unwrap_or_default();
        let edge = |b: Option<&Value>| b.and_then(|v| v[1].as_f64()).unwrap_or(f64::INFINITY);
        let (lo, hi) = (edge(blocks.first()), edge(blocks.last()));
        ensure(lo < ASYMPTOTIC && hi < ASYMPTOTIC, || format!("{m}: edge blocks {lo:e}, {hi:e}"))?;
    }
    Ok(format!("u-commutators exactly 0; edge blocks < {ASYMPTOTIC:e} on window 2·{HORIZON}+1"))
}

fn criterion_8(r: &mut Runs) -> Result<String, String> {
    let mut last_max = 0.0f64;
    for m in MODELS {
        let c = r.check(m, "wg", "wg-identities")?;
        let (iso, range, conj) = (num(&c, "check/isometry")?, num(&c, "check/range")?, num(&c, "check/conjugation")?);
        ensure(iso <= IDEMPOTENCY && range <= IDEMPOTENCY && conj <= CONJUGATION, || {
            format!("{m}: isometry {iso:e}, range {range:e}, conjugation {conj:e}")
        })?;
        let i = r.check(m, "wg", "wg-intertwining")?;
        let last = num(&i, &format!("norms/{HORIZON}"))?;
        ensure(last < ASYMPTOTIC, || format!("{m}: intertwining {last:e} at n = {HORIZON}"))?;
        last_max = last_max.max(last);
    }
    Ok(format!("identities within tolerance; intertwining at n = {HORIZON} ≤ {last_max:.2e}"))
}

fn criterion_9(r: &mut Runs) -> Result<String, String> {
    let want: [(&str, &str, &str); 6] = [
        ("case:full-3-shift", "k0_unstable", "Z/2"),
        ("case:full-3-shift", "k1_unstable", "0"),
        ("case:fibonacci", "k0_unstable", "0"),
        ("case:fibonacci", "k1_stable", "0"),
        ("case:symmetric-2x2", "k0_unstable", "Z/2 + Z/2"),
        ("case:symmetric-2x2", "k1_unstable", "0"),
    ];
    for (case, key, g) in want {
        let c = r.check("ktheory", "ktheory", case)?;
        let got = at(&c, key)?.as_str().unwrap_or_default().to_string();
        ensure(got == g, || format!("{case} {key} = {got}, expected {g}"))?;
    }
    let fib = r.check("ktheory", "ktheory", "case:fibonacci")?;
    for key in ["k0_unstable", "k1_unstable", "k0_stable", "k1_stable"] {
        ensure(at(&fib, key)? == "0", || format!("fibonacci {key} nontrivial"))?;
    }
    let s = r.check("ktheory", "ktheory", "snf-self-check")?;
    ensure(num(&s, "matrices")? as u64 == SNF_SAMPLES && num(&s, "failures")? == 0.0, || "snf self-check".into())?;
    Ok(format!("fixtures reproduced; {SNF_SAMPLES} Smith forms verified"))
}

fn criterion_10(r: &mut Runs) -> Result<String, String> {
    let c = r.check("corpus", "duality", "duality-verdicts")?;
    let dt = r.get("corpus", "duality")?.1;
    let (n, dim, ok) = (num(&c, "matrices")? as u64, num(&c, "max_dim")? as u64, num(&c, "passing")? as u64);
    ensure(n == CORPUS_SIZE && ok == n && dim <= CORPUS_MAX_DIM, || format!("{ok}/{n} passing, max dim {dim}"))?;
    r.check("corpus", "duality", "corpus-reproducible")?;
    ensure(dt < Duration::from_secs(10), || format!("runtime {dt:?}"))?;
    Ok(format!("{ok}/{n} verdicts PASS, {:.2}s", dt.as_secs_f64()))
}

fn criterion_11(r: &mut Runs) -> Result<String, String> {
    r.check("ktheory", "pv", "balanced-ranks")?;
    r.check("ktheory", "pv", "cross-method")?;
    let c = r.check("ktheory", "pv", "case:swap")?;
    let (k0, k1) = (num(&c, "unstable/k0")?, num(&c, "unstable/k1")?);
    ensure((k0, k1) == (1.0, 1.0), || format!("swap ranks ({k0}, {k1})"))?;
    let corpus = r.check("corpus", "pv", "balanced-ranks")?;
    ensure(num(&corpus, "matrices")? as u64 == CORPUS_SIZE, || "corpus size".into())?;
    r.check("corpus", "pv", "cross-method")?;
    Ok("balanced on corpus; swap gives (1, 1); ranks agree with Smith-form groups".into())
}

fn criterion_12(r: &mut Runs, first_pass: Duration) -> Result<String, String> {
    ensure(first_pass < Duration::from_secs(300), || format!("full suite took {first_pass:?}"))?;
    let keys: Vec<(String, String)> = r.reports.keys().cloned().collect();
    for (config, suite) in &keys {
        if config == "golden_torus" && suite == "operators" {
            continue;
        }
        let before = r.reports[&(config.clone(), suite.clone())].0.without_timings().to_json().map_err(|e| e.to_string())?;
        let again = runner::run(&r.configs[config], suite).map_err(|e| e.to_string())?;
        let after = again.without_timings().to_json().map_err(|e| e.to_string())?;
        ensure(before == after, || format!("{config}/{suite} is not byte-deterministic"))?;
    }
    Ok(format!("full suite {:.1}s; {} reports rerun byte-identical", first_pass.as_secs_f64(), keys.len() - 1))
}

fn load(dir: &Path, name: &str) -> ExperimentConfig {
    let path = dir.join(format!("{name}.toml"));
    ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut configs = BTreeMap::new();
    for name in MODELS.iter().chain(&["ktheory", "corpus"]) {
        configs.insert(name.to_string(), load(&dir, name));
    }
    let mut runs = Runs { configs, reports: BTreeMap::new() };
    let started = Instant::now();
    type Criterion = fn(&mut Runs) -> Result<String, String>;
    let criteria: [(&str, Criterion); 11] = [
        ("bracket axioms", criterion_1),
        ("local uniqueness", criterion_2),
        ("projection", criterion_3),
        ("compactness", criterion_4),
        ("decay", criterion_5),
        ("asymptotic commutation", criterion_6),
        ("two-sided representation", criterion_7),
        ("partial isometry", criterion_8),
        ("exact K-groups", criterion_9),
        ("duality verdict", criterion_10),
        ("PV ranks", criterion_11),
    ];
    let mut results = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = f(&mut runs);
        results.push((i + 1, *name, res, t.elapsed()));
    }
    for suite in ["homoclinic", "partition"] {
        for m in MODELS {
            let _ = runs.get(m, suite);
        }
    }
    let first_pass = started.elapsed();
    let t = Instant::now();
    let res = criterion_12(&mut runs, first_pass);
    results.push((12, "runtime and determinism", res, t.elapsed()));

    let mut failed = 0;
    for (i, name, res, dt) in &results {
        match res {
            Ok(msg) => println!("PASS criterion {i:>2} {name}: {msg} [{:.1}s]", dt.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {i:>2} {name}: {msg} [{:.1}s]", dt.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
