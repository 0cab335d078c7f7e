//! Built-in domains: membership, tangents and boundary distance.
use nqd::{catalog, geometry::catalog_entries, C64};

fn main() -> nqd::Result<()> {
    for e in catalog_entries() {
        println!("{:<18} {}", e.name, e.region);
    }
    let hhp = catalog("hhp")?;
    for z in [C64::new(0.0, 1.0), C64::new(0.0, 3.0), C64::new(3.0, 9.0)] {
        println!("{z} in hhp: {}, distance to boundary {:.4}", hhp.contains(z)?, hhp.distance_to_boundary(z));
    }
    let disk = catalog("disk-exterior")?;
    let c = &disk.components()[0];
    println!("disk boundary tangent at t = 0: {}", c.tangent_at(0.0)?);
    println!("inward normal at t = 0: {}", c.inward_normal_at(0.0)?);
    Ok(())
}
