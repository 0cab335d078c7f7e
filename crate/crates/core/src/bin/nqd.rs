use std::io::stdout;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nqd::cli::{self, EXIT_INPUT};
use nqd::config::{load_domain, RadiiSpec, RunConfig};
use nqd::growth::Predicate;
use nqd::roof::GridSpec;
use nqd::{NqdError, Result};

/// Arclength null-quadrature domains: verification, roof functions, growth diagnostics.
#[derive(Parser)]
#[command(name = "nqd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Catalog name (`name` or `name:p1,p2`) or a domain JSON file.
    domain: String,
    /// JSON run configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Angular samples per circle.
    #[arg(long)]
    angular: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in domains, or print the region of one.
    Catalog {
        name: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Null-quadrature residuals over the pole dictionary.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Dictionary JSON (a DictionarySpec); default is the built-in grid.
        #[arg(long)]
        dict: Option<String>,
    },
    /// Build the roof candidate and write its summary.
    Roof {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the roof-function properties.
    CheckRoof {
        #[command(flatten)]
        common: Common,
    },
    /// Table of max |u| / t over circles.
    Growth {
        #[command(flatten)]
        common: Common,
        /// r0:r1:n
        #[arg(long)]
        radii: Option<RadiiSpec>,
        #[arg(long)]
        json: bool,
    },
    /// Tract widths and Phragmen-Lindelof bounds.
    Tracts {
        #[command(flatten)]
        common: Common,
        /// r0:r1:n
        #[arg(long)]
        radii: Option<RadiiSpec>,
        /// Super-level threshold (default: largest unbounded boundary value).
        #[arg(long, conflicts_with = "negative")]
        level: Option<f64>,
        /// Track u < 0 instead.
        #[arg(long)]
        negative: bool,
        /// csv or json
        #[arg(long, default_value = "csv")]
        emit: String,
    },
    /// Dump u and |grad u| on a grid.
    Grid {
        #[command(flatten)]
        common: Common,
        /// cx,cy,half_width,spacing
        #[arg(long = "box", default_value = "0,0,3,0.1")]
        box_: String,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full pipeline; writes verification.json, roof.json, tracts.csv, grid.csv.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Path of the grid CSV.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

fn setup(c: &Common) -> Result<(nqd::Domain, RunConfig)> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(t) = c.tol {
        cfg.tol = t;
        if let Some(chk) = cfg.check.as_mut() {
            chk.tol = t;
        }
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(a) = c.angular {
        cfg.angular = a;
    }
    cfg.validate()?;
    Ok((load_domain(&c.domain)?, cfg))
}

fn parse_box(s: &str) -> Result<GridSpec> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| NqdError::InvalidParameter(format!("bad grid box `{s}`")))?;
    let [cx, cy, half_width, spacing] = v[..] else {
        return Err(NqdError::InvalidParameter(format!("grid box needs 4 numbers, got `{s}`")));
    };
    Ok(GridSpec {
        center: [cx, cy],
        half_width,
        spacing,
    })
}

fn run(cmd: Command) -> Result<i32> {
    let out = &mut stdout();
    match cmd {
        Command::Catalog { name, json } => cli::cmd_catalog(name.as_deref(), json, out),
        Command::Verify { common, dict } => {
            let (d, mut cfg) = setup(&common)?;
            if let Some(p) = dict.filter(|p| p != "grid") {
                cfg.dictionary = serde_json::from_str(&std::fs::read_to_string(p)?)?;
            }
            cli::cmd_verify(&d, &cfg, out)
        }
        Command::Roof { common, out: path } => {
            let (d, cfg) = setup(&common)?;
            cli::cmd_roof(&d, &cfg, path.as_deref(), out)
        }
        Command::CheckRoof { common } => {
            let (d, cfg) = setup(&common)?;
            cli::cmd_check_roof(&d, &cfg, out)
        }
        Command::Growth { common, radii, json } => {
            let (d, mut cfg) = setup(&common)?;
            if let Some(r) = radii {
                cfg.growth_radii = r;
            }
            cli::cmd_growth(&d, &cfg, json, out)
        }
        Command::Tracts {
            common,
            radii,
            level,
            negative,
            emit,
        } => {
            let (d, mut cfg) = setup(&common)?;
            if let Some(r) = radii {
                cfg.tract_radii = r;
            }
            let pred = if negative { Some(Predicate::Negative) } else { level.map(Predicate::Above) };
            let csv = match emit.as_str() {
                "csv" => true,
                "json" => false,
                e => return Err(NqdError::InvalidParameter(format!("unknown format `{e}`"))),
            };
            cli::cmd_tracts(&d, &cfg, pred, csv, out)
        }
        Command::Grid {
            common,
            box_,
            json,
            out: path,
        } => {
            let (d, cfg) = setup(&common)?;
            let spec = parse_box(&box_)?;
            match path {
                Some(p) => {
                    let mut f = std::fs::File::create(p)?;
                    cli::cmd_grid(&d, &cfg, &spec, json, &mut f)
                }
                None => cli::cmd_grid(&d, &cfg, &spec, json, out),
            }
        }
        Command::Run { common, out_dir, emit } => {
            let (d, mut cfg) = setup(&common)?;
            if let Some(o) = out_dir {
                cfg.out_dir = o;
            }
            let res = cli::cmd_pipeline(&d, &cfg, emit.as_deref())?;
            for s in &res.stages {
                println!("{:<12} exit {}  {}", s.stage, s.exit_code, s.detail);
            }
            for f in &res.files {
                println!("wrote {}", f.display());
            }
            Ok(res.exit_code)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    ExitCode::from(cli::report(run(cli.command)) as u8)
}
