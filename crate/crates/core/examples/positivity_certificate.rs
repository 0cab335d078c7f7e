//! Three-tract certificate for a positive roof and for Re z^3.
use nqd::cli::tract_level;
use nqd::growth::{geometric_radii, three_tract_certificate};
use nqd::roof::{build_roof, RoofConfig};
use nqd::{catalog, C64};

fn main() -> nqd::Result<()> {
    let radii = geometric_radii(1.0, 30.0, 40)?;
    let cubic = |z: C64| Some((z * z * z).re);
    let cert = three_tract_certificate(&cubic, &radii, 0.0, 0.0, 4096)?;
    println!("Re z^3: {:?}", cert.verdict);
    for row in cert.rows.iter().step_by(8) {
        println!("  t {:>7.3}  log M {:>8.4}  bound {:>8.4}", row.t, row.log_m, row.bound);
    }
    let r = build_roof(&catalog("halfplane")?, &RoofConfig::default())?;
    let cert = three_tract_certificate(&r, &geometric_radii(1.0, 20.0, 8)?, tract_level(&r), 1e-9, 1024)?;
    println!("halfplane roof: {:?}", cert.verdict);
    Ok(())
}
