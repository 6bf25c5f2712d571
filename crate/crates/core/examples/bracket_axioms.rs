//! Sampled bracket axioms on the three shipped models, plus the brute-force uniqueness scan
//! on the full 2-shift.

use smale_duality::axioms::{check_axioms, uniqueness_scan};
use smale_duality::model::{SftModel, SmaleSpace, TorusModel};

fn summarize<M: SmaleSpace>(m: &M, samples: u64) {
    let r = check_axioms(m, samples, 1);
    println!("{}: {} violations over {} samples", r.model, r.violations(), r.samples);
    for a in &r.axioms {
        println!("  {:<22} checked {:>6}  skipped {:>5}", a.name, a.checked, a.skipped);
    }
    println!("  contraction ratios: stable {:.4}, unstable {:.4}", r.stable_contraction, r.unstable_contraction);
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let shift = SftModel::full_shift(2)?;
    summarize(&shift, 2000);
    summarize(&SftModel::golden_mean()?, 2000);
    summarize(&TorusModel::golden(), 500);

    let u = uniqueness_scan(&shift, 200, 3, 9);
    println!("uniqueness: {} pairs, {} candidates scanned, {} mismatches", u.pairs, u.candidates_scanned, u.mismatches);
    Ok(())
}
