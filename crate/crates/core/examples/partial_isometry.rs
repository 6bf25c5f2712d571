//! The partial isometry attached to a partition: identities and intertwining decay.

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use smale_duality::desk::golden_torus;
use smale_duality::ops::wg::{check_wg, wg_intertwine};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = golden_torus();
    let part = d.partition()?;
    let pool = d.homoclinic(2);
    let seeds: Vec<_> = pool.choose_multiple(&mut ChaCha8Rng::seed_from_u64(3), 40).cloned().collect();
    let c = check_wg(&d.model, &part, &seeds, true)?;
    println!(
        "‖W*W − 1⊗q‖ = {:.1e}, ‖WW* − p‖ = {:.1e}, conjugation {:.1e}",
        c.isometry,
        c.range,
        c.conjugation.unwrap_or(f64::NAN)
    );

    let (a, _) = d.crossing_pair(&pool[7], 0.01, 1)?;
    for s in wg_intertwine(&d.model, &part, &a, &d.p_points(), 24, 16, 5).iter().step_by(4) {
        println!("n = {:>2}: {:.3e}", s.n, s.norm);
    }
    Ok(())
}
