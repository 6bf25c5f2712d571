//! Basic holonomy elements: rank of products, exact vanishing, asymptotic commutation.

use smale_duality::desk::golden_torus;
use smale_duality::ops::lemmas::{asymptotic_commutator, decay_sequence, product_rank, Sampling};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = golden_torus();
    let (p, q) = (d.p_points(), d.q_points());
    let z = d.homoclinic(2)[7].clone();
    let (a, b) = d.crossing_pair(&z, 0.01, 1)?;
    println!("stable element with N = {}, unstable element with N = {}", a.n, b.n);
    let s = Sampling::default();

    let r = product_rank(&d.model, &a, &b, &p, &q, &s);
    println!("rank(ab) = {}, rank(ba) = {}, geometric crossings {}", r.rank_ab, r.rank_ba, r.oracle_crossings);

    let dec = decay_sequence(&d.model, &a, &b, &p, &q, 10, &s);
    println!("‖α^-n(a) b‖: {:?}; zero from n = {:?}", &dec.left[..4], dec.vanish_from);

    let c = asymptotic_commutator(&d.model, &a, &b, &p, &q, 20, &s);
    for n in [0, 5, 10, 15, 20] {
        println!("n = {n:>2}: {:.3e}  {:.3e}", c.first[n], c.second[n]);
    }
    println!("evaluators agree to {:.1e}", c.max_norm_disagreement);
    Ok(())
}
