//! u and |grad u| on a grid, with collar flags, as CSV.
use nqd::cli::grid_dump;
use nqd::roof::{build_roof, GridSpec, RoofConfig};
use nqd::catalog;

fn main() -> nqd::Result<()> {
    let r = build_roof(&catalog("disk-exterior")?, &RoofConfig::default())?;
    let spec = GridSpec {
        center: [0.0, 0.0],
        half_width: 3.0,
        spacing: 0.5,
    };
    let g = grid_dump(&r, &spec)?;
    print!("{}", g.to_csv());
    let flagged = g.rows.iter().filter(|x| x.in_collar).count();
    eprintln!("{} points, {flagged} in the collar", g.rows.len());
    Ok(())
}
