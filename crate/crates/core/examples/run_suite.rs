//! Running suites from an inline config and diffing two reports.

use smale_duality::runner::{self, compare_reports, ExperimentConfig};

const CONFIG: &str = r#"
seed = 7

[model]
kind = "sft"
matrix = [[1, 1], [1, 1]]

[sampling]
axiom_samples = 1000
uniqueness_pairs = 100
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    let r1 = runner::run(&cfg, "axioms")?;
    for c in &r1.checks {
        println!("{} {} [{} ms]", c.status, c.name, c.timing_ms);
    }

    let mut other = cfg.clone();
    other.sampling.axiom_samples = 0;
    let r2 = runner::run(&other, "axioms")?;
    let diff = compare_reports(&serde_json::to_value(&r1)?, &serde_json::to_value(&r2)?)?;
    println!("{} differing fields, e.g.", diff.len());
    for d in diff.iter().take(3) {
        println!("  {}", d.path);
    }
    Ok(())
}
