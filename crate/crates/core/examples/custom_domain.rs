//! Domains from JSON: a circle hole and a sampled curve.
use nqd::config::parse_domain_json;
use nqd::C64;

const SHIFTED_DISK: &str = r#"{
  "name": "shifted-disk",
  "components": [
    { "kind": "closed", "type": "circle", "params": { "center": [1, 1], "radius": 0.5 }, "orientation": "cw" }
  ],
  "basepoint": [4, 1]
}"#;

const PARABOLA: &str = r#"{
  "components": [
    { "kind": "unbounded", "type": "graph", "params": { "poly": [0, 0, 0.5] }, "orientation": "forward", "t_max": 40 }
  ],
  "basepoint": [0, 2]
}"#;

fn main() -> nqd::Result<()> {
    let d = parse_domain_json(SHIFTED_DISK)?;
    println!("{}: {} component(s), 1+1i inside: {}", d.name(), d.components().len(), d.contains(C64::new(1.0, 1.0))?);
    let p = parse_domain_json(PARABOLA)?;
    let (cm, cp) = p.components()[0].asymptotic_conj_tangents().expect("unbounded");
    println!("parabola exterior: conjugate tangent limits {cm} / {cp}");
    match parse_domain_json(&SHIFTED_DISK.replace("\"cw\"", "\"ccw\"")) {
        Err(e) => println!("wrong orientation rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
