//! Linear growth table of a roof and of a function that grows too fast.
use nqd::growth::{geometric_radii, growth_ratio, growth_ratio_roof};
use nqd::roof::{build_roof, RoofConfig};
use nqd::{catalog, C64};

fn main() -> nqd::Result<()> {
    let radii = geometric_radii(2.0, 20.0, 6)?;
    let r = build_roof(&catalog("hhp")?, &RoofConfig::default())?;
    let g = growth_ratio_roof(&r, &radii, 1024, 2.0)?;
    print!("{}", g.to_csv());
    println!("hhp roof: max ratio {:.4}, passed {}", g.max_ratio, g.passed);
    let quad = |z: C64| Some((z * z).re);
    let g = growth_ratio(&quad, &radii, 1024, 2.0)?;
    println!("Re z^2: max ratio {:.4}, passed {}", g.max_ratio, g.passed);
    Ok(())
}
