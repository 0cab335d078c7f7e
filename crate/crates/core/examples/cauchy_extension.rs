//! The holomorphic extension h of the conjugate unit tangent.
use nqd::geometry::hhp_strip_preimage;
use nqd::roof::{CauchyEvaluator, RoofConfig};
use nqd::{catalog, C64};

fn main() -> nqd::Result<()> {
    let d = catalog("hhp")?;
    let ev = CauchyEvaluator::new(&d, RoofConfig::default().quad)?;
    for z in [C64::new(0.0, 0.0), C64::new(1.0, 0.5), C64::new(-2.0, 2.5)] {
        let w = hhp_strip_preimage(z).expect("inside");
        let exact = C64::i() * (w / 2.0).tanh();
        println!("h({z}) = {:.12}, |error| {:.1e}", ev.h(z), (ev.h(z) - exact).norm());
    }
    let disk = catalog("disk-exterior")?;
    let ev = CauchyEvaluator::new(&disk, RoofConfig::default().quad)?;
    let z = C64::new(2.0, 1.0);
    println!("disk: h({z}) = {:.12}, i/z = {:.12}", ev.h(z), C64::i() / z);
    Ok(())
}
