//! The whole pipeline into a temporary directory.
use nqd::cli::cmd_pipeline;
use nqd::config::RunConfig;
use nqd::catalog;

fn main() -> nqd::Result<()> {
    let dir = std::env::temp_dir().join("nqd-pipeline-example");
    for name in ["disk-exterior", "ellipse-exterior:2,1"] {
        let cfg = RunConfig {
            tol: 1e-8,
            out_dir: dir.join(name.replace(':', "_")),
            ..RunConfig::default()
        };
        let out = cmd_pipeline(&catalog(name)?, &cfg, None)?;
        println!("{name}: exit {}", out.exit_code);
        for s in &out.stages {
            println!("  {:<12} {}  {}", s.stage, s.exit_code, s.detail);
        }
        for f in &out.files {
            println!("  wrote {}", f.display());
        }
    }
    Ok(())
}
