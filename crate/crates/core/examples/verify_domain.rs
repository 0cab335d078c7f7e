//! Null-quadrature residuals over the pole dictionary.
use nqd::catalog;
use nqd::verify::{default_dictionary, verify_nqd, DictionarySpec, QuadratureConfig};

fn main() -> nqd::Result<()> {
    for name in ["disk-exterior", "halfplane", "hhp", "ellipse-exterior:2,1"] {
        let d = catalog(name)?;
        let dict = default_dictionary(&d, &DictionarySpec::default())?;
        let rep = verify_nqd(&d, &dict, 1e-6, &QuadratureConfig::default())?;
        println!(
            "{name:<22} {:?}: {} members, max |residual| {:.3e}, exit code {}",
            rep.verdict,
            rep.rows.len(),
            rep.max_abs_residual,
            rep.verdict.exit_code()
        );
    }
    Ok(())
}
