//! Tract widths and Phragmen-Lindelof lower bounds for Re z^2.
use nqd::growth::{geometric_radii, tract_report, Predicate};
use nqd::C64;

fn main() -> nqd::Result<()> {
    let u = |z: C64| Some((z * z).re);
    let radii = geometric_radii(1.0, 50.0, 12)?;
    let rep = tract_report(&u, &radii, Predicate::Above(0.0), 4096)?;
    print!("{}", rep.to_csv());
    let last = rep.rows.last().expect("rows");
    println!("pl bound at r = {:.1}: {:.4} (2 log r = {:.4})", last.t, last.pl_bound.unwrap_or(f64::NAN), 2.0 * last.t.ln());
    Ok(())
}
