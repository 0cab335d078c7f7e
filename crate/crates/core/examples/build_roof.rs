//! Roof candidates: boundary constants, C, periods and point values.
use nqd::roof::{build_roof, RoofConfig};
use nqd::{catalog, C64};

fn main() -> nqd::Result<()> {
    for name in ["disk-exterior", "halfplane", "hhp"] {
        let d = catalog(name)?;
        let r = build_roof(&d, &RoofConfig::default())?;
        println!("{name}: C = {:.12}", r.c());
        for b in r.boundary_constants() {
            println!("  component {}: Re f = {:.12} (spread {:.1e})", b.component, b.value, b.spread);
        }
        for p in r.periods() {
            println!("  period around component {}: {:.12}", p.component, p.value);
        }
        let z = C64::new(2.0, 1.5);
        println!("  u({z}) = {:.12}, grad u = {:.12}", r.eval_u(z)?, r.grad_u(z)?);
    }
    Ok(())
}
