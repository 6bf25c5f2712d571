use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_smale-verify"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("smale-verify-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, text: &str) -> PathBuf {
    let p = scratch(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(config: &Path, suite: &str, out: &Path) -> i32 {
    let s = bin()
        .args(["run", "--quiet", "--suite", suite, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .status()
        .unwrap();
    s.code().unwrap()
}

const FIB: &str = "seed = 1\n[model]\nkind = \"sft\"\nmatrix = [[1,1],[1,0]]\n\
[ktheory]\nsnf_samples = 20\n[[ktheory.cases]]\nname = \"fibonacci\"\nmatrix = [[1,1],[1,0]]\n\
k0_unstable = [0, []]\nk1_unstable = [0, []]\nk0_stable = [0, []]\nk1_stable = [0, []]\n";

#[test]
fn ktheory_fixture_passes_and_reports_trivial_groups() {
    let cfg = write("fib.toml", FIB);
    let out = scratch("fib.json");
    assert_eq!(run(&cfg, "ktheory", &out), 0);
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["status"], "PASS");
    let case = &r["checks"][0];
    for k in ["k0_unstable", "k1_unstable", "k0_stable", "k1_stable"] {
        assert_eq!(case["metrics"][k], "0");
    }
}

#[test]
fn wrong_expectation_fails_with_witness() {
    let cfg = write("bad.toml", &FIB.replace("k0_unstable = [0, []]", "k0_unstable = [0, [2]]"));
    let out = scratch("bad.json");
    assert_eq!(run(&cfg, "ktheory", &out), 1);
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["checks"][0]["status"], "FAIL");
    assert_eq!(r["checks"][0]["witness"], "[[1,1],[1,0]]");
}

#[test]
fn zero_samples_are_skipped() {
    let cfg = write(
        "zero.toml",
        "seed = 1\n[model]\nkind = \"sft\"\nmatrix = [[1,1],[1,1]]\n[sampling]\naxiom_samples = 0\nuniqueness_pairs = 0\n",
    );
    let out = scratch("zero.json");
    assert_eq!(run(&cfg, "axioms", &out), 0);
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["checks"][0]["status"], "SKIPPED");
    assert!(r["checks"][0]["reason"].as_str().unwrap().contains("0"));
}

#[test]
fn usage_and_schema_errors_exit_two() {
    let cfg = write("ok.toml", FIB);
    assert_eq!(run(&cfg, "nonsense", &scratch("x.json")), 2);
    let bad = write("typo.toml", &FIB.replace("seed", "sede"));
    assert_eq!(run(&bad, "ktheory", &scratch("y.json")), 2);
    assert_eq!(bin().arg("frobnicate").status().unwrap().code(), Some(2));
}

#[test]
fn diff_of_reruns_is_empty_and_corruption_is_an_error() {
    let cfg = write("diff.toml", FIB);
    let (a, b) = (scratch("a.json"), scratch("b.json"));
    assert_eq!(run(&cfg, "ktheory", &a), 0);
    assert_eq!(run(&cfg, "ktheory", &b), 0);
    let same = bin().arg("diff").arg(&a).arg(&b).output().unwrap();
    assert_eq!(same.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&same.stdout).contains("no differences"));

    let changed = write("changed.toml", &FIB.replace("snf_samples = 20", "snf_samples = 21"));
    let c = scratch("c.json");
    assert_eq!(run(&changed, "ktheory", &c), 0);
    let d = bin().arg("diff").arg(&a).arg(&c).output().unwrap();
    assert_eq!(d.status.code(), Some(1));
    let text = String::from_utf8_lossy(&d.stdout);
    assert!(text.contains("/config/ktheory/snf_samples") && text.contains("/checks/snf-self-check/metrics/matrices"));

    let broken = write("broken.json", "{\"schema_version\": 1, \"checks\": [");
    assert_eq!(bin().arg("diff").arg(&a).arg(&broken).status().unwrap().code(), Some(2));
}
