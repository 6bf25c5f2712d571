//! Certifying ε' and building a φ-disjoint partition of unity on the golden torus.

use smale_duality::desk::golden_torus;
use smale_duality::partition::{epsilon_x_prime, partition_check, HomotopyFamily};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = golden_torus();
    let cert = epsilon_x_prime(&d.model, 2000, 3)?;
    println!("ε' = {:.5} (worst ratios {:.3}, {:.3})", cert.value, cert.worst_x, cert.worst_y);

    let part = d.partition()?;
    println!("{} centers, shift {}", part.len(), part.shift());
    let c = partition_check(&d.model, &part, 1000, 4);
    println!(
        "Σf² residual {:.1e}, uncovered {}, support violations {}, at most {} active",
        c.max_unity_residual, c.uncovered, c.support_violations, c.max_active
    );

    for s in [0.0, 0.5, 1.0] {
        let f = HomotopyFamily::new(&d.model, &part, s)?;
        let c = partition_check(&d.model, &f, 200, 5);
        println!("s = {s}: residual {:.1e}", c.max_unity_residual);
    }
    Ok(())
}
