//! Heins functional of two complementary halfplane functions.
use nqd::growth::heins_functional;
use nqd::C64;

fn main() -> nqd::Result<()> {
    let u1 = |z: C64| Some(z.re.max(0.0));
    let u2 = |z: C64| Some((-z.re).max(0.0));
    for row in heins_functional(&[&u1, &u2], &[1.0, 2.0, 4.0, 8.0], 4096)? {
        println!("r = {}: {:.6} (sqrt(pi) = {:.6})", row.r, row.value, std::f64::consts::PI.sqrt());
    }
    let zero = |_: C64| Some(0.0);
    if let Err(e) = heins_functional(&[&u1, &zero], &[1.0], 1024) {
        println!("rejected: {e}");
    }
    Ok(())
}
