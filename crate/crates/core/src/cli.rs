//! Command implementations behind the `nqd` binary.
//!
//! Every command returns an exit code: 0 pass, 1 fail, 2 unconverged, 3 input error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::Result;
use crate::geometry::{catalog, catalog_entries, CurveKind, Domain, C64, HHP_REGION};
use crate::growth::{
    growth_ratio_roof, three_tract_certificate, tract_report, Certificate, CircleCache, GrowthTable, Predicate,
    TractReport,
};
use crate::roof::{build_roof, check_roof_with, random_interior_points, GridSpec, RoofCandidate, RoofReport, RoofSummary};
use crate::verify::{default_dictionary, verify_nqd, Verdict, VerificationReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_UNCONVERGED: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

/// Combines stage outcomes: any failure wins, then any unconverged stage.
pub fn combine(codes: &[i32]) -> i32 {
    if codes.contains(&EXIT_INPUT) {
        EXIT_INPUT
    } else if codes.contains(&EXIT_FAIL) {
        EXIT_FAIL
    } else if codes.contains(&EXIT_UNCONVERGED) {
        EXIT_UNCONVERGED
    } else {
        EXIT_PASS
    }
}

fn pass_fail(ok: bool) -> i32 {
    if ok {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

pub fn cmd_catalog(name: Option<&str>, json: bool, out: &mut dyn Write) -> Result<i32> {
    match name {
        Some(spec) => {
            let d = catalog(spec)?;
            let base = spec.split(':').next().unwrap_or(spec);
            let entry = catalog_entries().into_iter().find(|e| e.name == base).expect("catalog entry exists");
            if json {
                #[derive(Serialize)]
                struct One<'a> {
                    name: &'a str,
                    region: &'a str,
                    classification: &'a str,
                    components: usize,
                    basepoint: C64,
                }
                write!(
                    out,
                    "{}",
                    to_json(&One {
                        name: entry.name,
                        region: entry.region,
                        classification: entry.classification,
                        components: d.components().len(),
                        basepoint: d.basepoint(),
                    })
                )?;
            } else if base == "hhp" {
                writeln!(out, "{HHP_REGION}")?;
            } else {
                writeln!(out, "{}", entry.region)?;
            }
        }
        None if json => write!(out, "{}", to_json(&catalog_entries()))?,
        None => {
            for e in catalog_entries() {
                writeln!(out, "{:<18} {:<26} {}", e.name, e.params, e.region)?;
                writeln!(out, "{:<18} {}", "", e.classification)?;
            }
        }
    }
    Ok(EXIT_PASS)
}

pub fn run_verify(d: &Domain, cfg: &RunConfig) -> Result<VerificationReport> {
    let dict = default_dictionary(d, &cfg.dictionary)?;
    verify_nqd(d, &dict, cfg.tol, &cfg.quadrature)
}

pub fn cmd_verify(d: &Domain, cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let rep = run_verify(d, cfg)?;
    write!(out, "{}", to_json(&rep))?;
    Ok(rep.verdict.exit_code())
}

/// `u` and `grad u` at a seeded random point.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub z: C64,
    pub u: f64,
    pub grad_u: C64,
    pub in_collar: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RoofFile {
    #[serde(flatten)]
    pub summary: RoofSummary,
    pub seed: u64,
    pub probes: Vec<ProbeRow>,
}

pub fn roof_file(r: &RoofCandidate, cfg: &RunConfig) -> Result<RoofFile> {
    let pts = if cfg.probes == 0 {
        Vec::new()
    } else {
        random_interior_points(r, cfg.probes, cfg.seed, 0.0)?
    };
    let probes = pts
        .par_iter()
        .map(|&z| {
            Ok(ProbeRow {
                z,
                u: r.eval_u(z)?,
                grad_u: r.grad_u(z)?,
                in_collar: r.in_collar(z),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RoofFile {
        summary: r.summary(),
        seed: cfg.seed,
        probes,
    })
}

pub fn cmd_roof(d: &Domain, cfg: &RunConfig, out_path: Option<&Path>, out: &mut dyn Write) -> Result<i32> {
    let r = build_roof(d, &cfg.roof)?;
    let text = to_json(&roof_file(&r, cfg)?);
    match out_path {
        Some(p) => std::fs::write(p, text)?,
        None => write!(out, "{text}")?,
    }
    Ok(EXIT_PASS)
}

pub fn cmd_check_roof(d: &Domain, cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let r = build_roof(d, &cfg.roof)?;
    let rep = check_roof_with(&r, &cfg.check_config())?;
    write!(out, "{}", to_json(&rep))?;
    Ok(pass_fail(rep.passed))
}

pub fn cmd_growth(d: &Domain, cfg: &RunConfig, json: bool, out: &mut dyn Write) -> Result<i32> {
    let r = build_roof(d, &cfg.roof)?;
    let g = growth_ratio_roof(&r, &cfg.growth_radii.radii()?, cfg.angular, cfg.growth_limit)?;
    if json {
        write!(out, "{}", to_json(&g))?;
    } else {
        write!(out, "{}", g.to_csv())?;
    }
    Ok(pass_fail(g.passed))
}

/// Threshold of the super-level tracts: the largest boundary value of `u`
/// over unbounded components, or over all components when none is unbounded.
pub fn tract_level(r: &RoofCandidate) -> f64 {
    let comps = r.domain().components();
    let unbounded = comps.iter().any(|c| c.kind() == CurveKind::Unbounded);
    r.boundary_constants()
        .iter()
        .filter(|b| !unbounded || comps[b.component].kind() == CurveKind::Unbounded)
        .map(|b| b.value + r.c())
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn cmd_tracts(
    d: &Domain,
    cfg: &RunConfig,
    predicate: Option<Predicate>,
    csv: bool,
    out: &mut dyn Write,
) -> Result<i32> {
    let r = build_roof(d, &cfg.roof)?;
    let pred = predicate.unwrap_or_else(|| Predicate::Above(tract_level(&r)));
    let rep = tract_report(&r, &cfg.tract_radii.radii()?, pred, cfg.angular)?;
    if csv {
        write!(out, "{}", rep.to_csv())?;
    } else {
        write!(out, "{}", to_json(&rep))?;
    }
    for w in &rep.warnings {
        eprintln!("warning: {w}");
    }
    Ok(pass_fail(rep.width_sum_ok))
}

#[derive(Clone, Debug, Serialize)]
pub struct GridRow {
    pub re: f64,
    pub im: f64,
    pub u: f64,
    pub grad_norm: f64,
    /// Near-boundary point evaluated by the close-evaluation scheme.
    pub in_collar: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GridDump {
    pub domain: String,
    pub spec: GridSpec,
    pub rows: Vec<GridRow>,
    pub warnings: Vec<String>,
}

impl GridDump {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("re,im,u,grad_norm,in_collar\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{},{}", r.re, r.im, r.u, r.grad_norm, u8::from(r.in_collar));
        }
        s
    }
}

/// Samples `u` and `|grad u|` at the grid points inside the domain.
pub fn grid_dump(r: &RoofCandidate, spec: &GridSpec) -> Result<GridDump> {
    spec.validate()?;
    let rows: Vec<GridRow> = spec
        .points()
        .par_iter()
        .filter(|z| r.domain().contains_unchecked(**z))
        .filter_map(|&z| {
            let u = r.eval_u(z).ok()?;
            let g = r.grad_u(z).ok()?;
            Some(GridRow {
                re: z.re,
                im: z.im,
                u,
                grad_norm: g.norm(),
                in_collar: r.in_collar(z),
            })
        })
        .collect();
    let mut warnings = Vec::new();
    if rows.is_empty() {
        warnings.push("no grid point lies in the domain".into());
    } else if rows.iter().all(|x| x.in_collar) {
        warnings.push("every grid point lies in the near-boundary collar".into());
    }
    Ok(GridDump {
        domain: r.domain().name().to_string(),
        spec: spec.clone(),
        rows,
        warnings,
    })
}

pub fn cmd_grid(d: &Domain, cfg: &RunConfig, spec: &GridSpec, json: bool, out: &mut dyn Write) -> Result<i32> {
    let r = build_roof(d, &cfg.roof)?;
    let g = grid_dump(&r, spec)?;
    for w in &g.warnings {
        eprintln!("warning: {w}");
    }
    if json {
        write!(out, "{}", to_json(&g))?;
    } else {
        write!(out, "{}", g.to_csv())?;
    }
    Ok(EXIT_PASS)
}

#[derive(Clone, Debug, Serialize)]
pub struct StageOutcome {
    pub stage: &'static str,
    pub exit_code: i32,
    pub detail: String,
}

#[derive(Debug)]
pub struct PipelineOutcome {
    pub exit_code: i32,
    pub stages: Vec<StageOutcome>,
    pub verification: VerificationReport,
    pub roof: Option<RoofReport>,
    pub growth: Option<GrowthTable>,
    pub certificate: Option<Certificate>,
    pub tracts: Option<TractReport>,
    pub files: Vec<PathBuf>,
}

/// Default grid of `grid.csv`.
pub fn default_dump_grid() -> GridSpec {
    GridSpec {
        center: [0.0, 0.0],
        half_width: 3.0,
        spacing: 0.2,
    }
}

/// verify, roof, check-roof, growth, tracts; writes `verification.json`,
/// `roof.json`, `tracts.csv` and `grid.csv` (or `grid_out`) into `cfg.out_dir`.
pub fn cmd_pipeline(d: &Domain, cfg: &RunConfig, grid_out: Option<&Path>) -> Result<PipelineOutcome> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    let mut files = Vec::new();
    let mut write = |name: &Path, text: String| -> Result<()> {
        let p = if name.is_absolute() { name.to_path_buf() } else { cfg.out_dir.join(name) };
        std::fs::write(&p, text)?;
        files.push(p);
        Ok(())
    };
    let mut stages = Vec::new();
    let verification = run_verify(d, cfg)?;
    write(Path::new("verification.json"), to_json(&verification))?;
    let code = verification.verdict.exit_code();
    stages.push(StageOutcome {
        stage: "verify",
        exit_code: code,
        detail: format!("{:?}, max |residual| {:e}", verification.verdict, verification.max_abs_residual),
    });
    let mut outcome = PipelineOutcome {
        exit_code: code,
        stages,
        verification,
        roof: None,
        growth: None,
        certificate: None,
        tracts: None,
        files: Vec::new(),
    };
    if outcome.verification.verdict == Verdict::Fail {
        outcome.files = files;
        return Ok(outcome);
    }
    let r = match build_roof(d, &cfg.roof) {
        Ok(r) => r,
        Err(e) => {
            outcome.stages.push(StageOutcome {
                stage: "roof",
                exit_code: e.exit_code(),
                detail: e.to_string(),
            });
            outcome.exit_code = combine(&outcome.stages.iter().map(|s| s.exit_code).collect::<Vec<_>>());
            outcome.files = files;
            return Ok(outcome);
        }
    };
    write(Path::new("roof.json"), to_json(&roof_file(&r, cfg)?))?;

    let check = check_roof_with(&r, &cfg.check_config())?;
    outcome.stages.push(StageOutcome {
        stage: "check-roof",
        exit_code: pass_fail(check.passed),
        detail: check.failed().iter().map(|c| c.name).collect::<Vec<_>>().join(", "),
    });

    let sampler = CircleCache::new(&r);
    let growth = growth_ratio_roof(&r, &cfg.growth_radii.radii()?, cfg.angular, cfg.growth_limit)?;
    outcome.stages.push(StageOutcome {
        stage: "growth",
        exit_code: pass_fail(growth.passed),
        detail: format!("max ratio {:.6}", growth.max_ratio),
    });

    let radii = cfg.tract_radii.radii()?;
    let level = tract_level(&r);
    let tracts = tract_report(&sampler, &radii, Predicate::Above(level), cfg.angular)?;
    write(Path::new("tracts.csv"), tracts.to_csv())?;
    let cert = three_tract_certificate(&sampler, &radii, level, cfg.check_config().tol, cfg.angular)?;
    outcome.stages.push(StageOutcome {
        stage: "positivity",
        exit_code: pass_fail(cert.passed()),
        detail: format!("{:?}", cert.verdict),
    });

    let grid = grid_dump(&r, &default_dump_grid())?;
    write(grid_out.unwrap_or(Path::new("grid.csv")), grid.to_csv())?;

    outcome.exit_code = combine(&outcome.stages.iter().map(|s| s.exit_code).collect::<Vec<_>>());
    outcome.roof = Some(check);
    outcome.growth = Some(growth);
    outcome.certificate = Some(cert);
    outcome.tracts = Some(tracts);
    outcome.files = files;
    Ok(outcome)
}

/// Exit code of a command result, printing the error on stderr.
pub fn report(res: Result<i32>) -> i32 {
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
