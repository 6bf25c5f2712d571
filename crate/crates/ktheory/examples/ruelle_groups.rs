//! K-groups of the stable and unstable Ruelle algebras for a few transition matrices,
//! with the duality verdict and the dimension-group rank cross-check.

use smale_ktheory::{duality_verdict, pv_ranks, ruelle_k_groups, smith_normal_form, TransitionMatrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases: [(&str, Vec<Vec<i64>>); 5] = [
        ("full 3-shift", vec![vec![3]]),
        ("fibonacci", vec![vec![1, 1], vec![1, 0]]),
        ("symmetric", vec![vec![1, 2], vec![2, 1]]),
        ("swap", vec![vec![0, 1], vec![1, 0]]),
        ("3-cycle with chord", vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0]]),
    ];
    for (name, rows) in cases {
        let a = TransitionMatrix::new(rows)?;
        let g = ruelle_k_groups(&a);
        let snf = smith_normal_form(&a.to_int().one_minus());
        let v = duality_verdict(&a);
        let pv = pv_ranks(&a);
        println!("{name}");
        println!("  diag SNF(1 − A) = {:?}", snf.diagonal().iter().map(ToString::to_string).collect::<Vec<_>>());
        println!("  unstable: K0 = {}, K1 = {}", g.k0_unstable, g.k1_unstable);
        println!("  stable:   K0 = {}, K1 = {}", g.k0_stable, g.k1_stable);
        println!("  dimension-group ranks {:?}, duality {}", (pv.unstable.k0, pv.unstable.k1), if v.pass { "PASS" } else { "FAIL" });
    }
    Ok(())
}
