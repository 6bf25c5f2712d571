//! Periodic orbits, a truncated homoclinic basis, and its closure under the dynamics.

use smale_duality::model::{SftModel, SmaleSpace, TorusModel};
use smale_duality::orbit::{basis_closure, enumerate_homoclinic, periodic_orbits, PointMap};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = SftModel::golden_mean()?;
    for n in 1..=6 {
        println!("golden mean shift: {} orbits of period dividing {n}", periodic_orbits(&m, n)?.len());
    }
    let p = periodic_orbits(&m, 1)?;
    let q: Vec<_> = periodic_orbits(&m, 2)?.into_iter().filter(|o| o.period == 2).collect();
    let basis = enumerate_homoclinic(&m, p, q, 4)?;
    basis.validate(&m)?;
    println!("basis of size-4 homoclinic points: {}", basis.len());
    for x in basis.encoded(&m).iter().take(4) {
        println!("  {x}");
    }

    let maps = [PointMap::new("phi", |x| Some(m.phi(x))), PointMap::new("phi_inv", |x| Some(m.phi_inv(x)))];
    let closed = basis_closure(&basis, &maps, 2, 10_000)?;
    let interior = closed.interior().count();
    println!("closed under phi^±1 twice: {} points, {interior} interior", closed.len());

    let t = TorusModel::golden();
    let fixed = periodic_orbits(&t, 1)?;
    let q3: Vec<_> = periodic_orbits(&t, 3)?.into_iter().filter(|o| o.period == 3).collect();
    let tb = enumerate_homoclinic(&t, fixed, q3, 2)?;
    println!("torus: {} homoclinic points of size ≤ 2; first {}", tb.len(), tb.encoded(&t)[0]);
    Ok(())
}
