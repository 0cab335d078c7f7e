//! Roof-function property checks, including the negative control.
use nqd::catalog;
use nqd::roof::{build_roof, build_roof_unchecked, check_roof, RoofConfig};

fn main() -> nqd::Result<()> {
    for (name, tol) in [("halfplane", 1e-6), ("hhp", 1e-3), ("ellipse-exterior:2,1", 1e-3)] {
        let d = catalog(name)?;
        let r = if name.starts_with("ellipse") {
            build_roof_unchecked(&d, &RoofConfig::default())?
        } else {
            build_roof(&d, &RoofConfig::default())?
        };
        let rep = check_roof(&r, tol)?;
        println!("{name} at tol {tol:e}: {}", if rep.passed { "pass" } else { "fail" });
        for it in &rep.items {
            println!("  {:<32} {:<5} {:.3e} (threshold {:.1e})", it.name, it.passed, it.value, it.threshold);
        }
    }
    Ok(())
}
