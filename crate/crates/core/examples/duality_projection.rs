//! The duality projection on a truncated tensor basis, and its homotopy to the pushed
//! partition.

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use smale_duality::desk::two_shift;
use smale_duality::projection::{check_projection, homotopy_path, pg_matrix, tensor_pairs};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = two_shift();
    let part = d.partition()?;
    let pool = d.homoclinic(4);
    let seeds: Vec<_> = pool.choose_multiple(&mut ChaCha8Rng::seed_from_u64(11), 40).cloned().collect();

    let (pairs, core) = tensor_pairs(&d.model, &part, &seeds, &[]);
    let op = pg_matrix(&d.model, &part, pairs, core)?;
    let c = check_projection(&d.model, &part, &op, 400, 1);
    println!("{} pairs ({} interior), {} nonzero columns", c.pairs, c.interior, c.nonzero_columns);
    println!("‖p² − p‖ = {:.1e} (power iteration {:.1e}), max |p_ab − p_ba| = {:.1e}", c.idempotency, c.idempotency_power, c.adjoint);
    println!("rank on a {}-pair block: predicted {}, eigenvalues {}", c.eigen_block, c.predicted_rank, c.eigen_rank);

    let h = homotopy_path(&d.model, &part, &seeds[..12], 16)?;
    println!(
        "homotopy over {} pairs: max ‖p_s² − p_s‖ {:.1e}, max step gap {:.3}, endpoint error {:.1e}",
        h.pairs, h.max_idempotency, h.max_gap, h.end_error
    );
    Ok(())
}
