//! Acceptance criteria, one line per check.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;

use nqd::geometry::{CurveComponent, CurveShape, Orientation};
use nqd::growth::{
    cauchy_schwarz_bound, geometric_radii, growth_ratio_roof, heins_functional, pl_integral, tract_lengths,
    tract_report, Predicate,
};
use nqd::quadrature::{integrate_dz_components, QuadSettings, QuadratureRule};
use nqd::roof::{
    boundary_gradient, build_roof, build_roof_unchecked, check_roof, discrete_laplacian, random_interior_points,
    RoofCandidate, RoofConfig,
};
use nqd::verify::{default_dictionary, e1_admissible, nqd_residual, verify_nqd, DictionarySpec, QuadratureConfig, TestFunction, Verdict};
use nqd::{catalog, Domain, C64};

const SEED: u64 = 20240611;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: &str, what: &str, ok: bool, detail: String) {
        if !ok {
            self.failures += 1;
        }
        println!("{} [{id}] {what}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn max_over<T>(items: &[T], f: impl Fn(&T) -> f64) -> f64 {
    items.iter().map(f).fold(0.0, f64::max)
}

fn criterion_1(rep: &mut Report) -> nqd::Result<()> {
    let d = catalog("disk-exterior")?;
    let quad = QuadratureConfig::default();
    let dict = default_dictionary(&d, &DictionarySpec::default())?;
    let v = verify_nqd(&d, &dict, 1e-10, &quad)?;
    let admissible = v.rows.iter().filter(|r| r.admissible).count();
    rep.line(
        "1",
        "disk residuals < 1e-10 with >= 20 members at N = 256",
        v.verdict == Verdict::Pass && v.max_abs_residual < 1e-10 && admissible >= 20 && quad.settings.closed_nodes == 256,
        format!("max |residual| {:.3e}, {admissible} admissible members", v.max_abs_residual),
    );
    let r = build_roof(&d, &RoofConfig::default())?;
    let pts = random_interior_points(&r, 200, SEED, 0.0)?;
    let mut err = 0.0f64;
    for z in &pts {
        err = err.max((r.eval_u(*z)? - z.norm().ln()).abs());
    }
    rep.line("1", "disk roof u = log|z| at 200 probes within 1e-8", err < 1e-8, format!("max error {err:.3e}"));
    let p = r.periods()[0].value;
    rep.line(
        "1",
        "disk period 2 pi within 1e-10, |Im| < 1e-12",
        (p.re - TAU).abs() < 1e-10 && p.im.abs() < 1e-12,
        format!("period {p:.15}"),
    );
    Ok(())
}

fn criterion_2(rep: &mut Report) -> nqd::Result<()> {
    let d = catalog("halfplane")?;
    let quad = QuadratureConfig {
        t_schedule: vec![100.0],
        ..QuadratureConfig::default()
    };
    let dict = default_dictionary(&d, &DictionarySpec::default())?;
    let v = verify_nqd(&d, &dict, 1e-6, &quad)?;
    rep.line(
        "2",
        "halfplane residuals < 1e-6 at T_max = 100",
        v.verdict == Verdict::Pass && v.max_abs_residual < 1e-6,
        format!("max |residual| {:.3e} over {} members", v.max_abs_residual, v.rows.len()),
    );
    let r = build_roof(&d, &RoofConfig::default())?;
    let pts = random_interior_points(&r, 200, SEED, 0.0)?;
    let (mut eu, mut eg) = (0.0f64, 0.0f64);
    for z in &pts {
        eu = eu.max((r.eval_u(*z)? - z.im).abs());
        eg = eg.max((r.grad_u(*z)? - C64::i()).norm());
    }
    rep.line("2", "halfplane u = Im z within 1e-4", eu < 1e-4, format!("max error {eu:.3e}"));
    rep.line("2", "halfplane grad u = i within 1e-4", eg < 1e-4, format!("max error {eg:.3e}"));
    Ok(())
}

fn criterion_3(rep: &mut Report) -> nqd::Result<()> {
    let d = catalog("hhp")?;
    let dict = default_dictionary(&d, &DictionarySpec::default())?;
    let v = verify_nqd(&d, &dict, 1e-4, &QuadratureConfig::default())?;
    rep.line(
        "3",
        "hhp residuals < 1e-4",
        v.verdict == Verdict::Pass && v.max_abs_residual < 1e-4,
        format!("max |residual| {:.3e} over {} members", v.max_abs_residual, v.rows.len()),
    );
    let r = build_roof(&d, &RoofConfig::default())?;
    let mut worst = 0.0f64;
    for j in 0..d.components().len() {
        for k in 0..=24 {
            let t = -3.0 + 0.25 * k as f64;
            let (g, target) = boundary_gradient(&r, j, t, 1e-4)?;
            worst = worst.max((g - target).norm());
        }
    }
    rep.line("3", "hhp |grad u - iT| < 1e-3 for |x| <= 3", worst < 1e-3, format!("max {worst:.3e}"));
    let (min_u, count) = positivity_on_grid(&r)?;
    rep.line(
        "3",
        "hhp u > 0 at grid points outside the collar",
        min_u > 0.0 && count > 0,
        format!("min u {min_u:.4} over {count} points"),
    );
    let g = growth_ratio_roof(&r, &geometric_radii(2.0, 20.0, 8)?, 1024, 2.0)?;
    rep.line(
        "3",
        "hhp growth ratio <= 2 on [2, 20]",
        g.passed,
        format!("max ratio {:.4}", g.max_ratio),
    );
    Ok(())
}

fn positivity_on_grid(r: &RoofCandidate) -> nqd::Result<(f64, usize)> {
    let mut min_u = f64::INFINITY;
    let mut count = 0;
    for (z, f) in r.grid().points.iter().zip(&r.grid().f) {
        if f.is_some() && !r.in_collar(*z) {
            min_u = min_u.min(r.eval_u(*z)?);
            count += 1;
        }
    }
    Ok((min_u, count))
}

fn criterion_4(rep: &mut Report) -> nqd::Result<()> {
    let d = catalog("ellipse-exterior:2,1")?;
    let dict = default_dictionary(&d, &DictionarySpec::default())?;
    let base = QuadratureConfig::default();
    let fine = QuadratureConfig {
        settings: base.settings.scaled(4),
        max_nodes: base.max_nodes * 4,
        ..base.clone()
    };
    for (label, quad) in [("base", &base), ("4x", &fine)] {
        let v = verify_nqd(&d, &dict, 1e-3, quad)?;
        rep.line(
            "4",
            &format!("ellipse fails verification at tol 1e-3 ({label} resolution)"),
            v.verdict == Verdict::Fail && v.max_abs_residual > 1e-3,
            format!("{:?}, max |residual| {:.3e}", v.verdict, v.max_abs_residual),
        );
    }
    let r = build_roof_unchecked(&d, &RoofConfig::default())?;
    let c = check_roof(&r, 1e-3)?;
    let failed: Vec<&str> = c.failed().iter().map(|i| i.name).collect();
    rep.line("4", "ellipse roof check reports a failure", !c.passed && !failed.is_empty(), failed.join(", "));
    Ok(())
}

fn criterion_5(rep: &mut Report) -> nqd::Result<()> {
    let u = |z: C64| Some((z * z).re);
    let mut worst = 0.0f64;
    for t in [0.5, 1.0, 3.0, 10.0, 40.0] {
        for tr in tract_lengths(&u, t, Predicate::Above(0.0), 4096)? {
            worst = worst.max((tr.theta / (PI * t / 2.0) - 1.0).abs());
        }
    }
    rep.line("5", "Re z^2 tract widths pi t / 2 within 1%", worst < 0.01, format!("max relative error {worst:.3e}"));
    let radii = geometric_radii(1.0, 50.0, 60)?;
    let tr = tract_report(&u, &radii, Predicate::Above(0.0), 4096)?;
    let rel = tr
        .rows
        .iter()
        .filter(|r| r.t >= 2.0)
        .map(|r| (r.pl_bound.unwrap_or(f64::NAN) / (2.0 * r.t.ln()) - 1.0).abs())
        .fold(0.0, f64::max);
    rep.line("5", "PL bound 2 log r within 2% on [2, 50]", rel < 0.02, format!("max relative error {rel:.3e}"));
    let mut cs = 0.0f64;
    for t in [1.0, 3.7, 25.0] {
        let (lhs, rhs) = cauchy_schwarz_bound(&[TAU * t / 3.0; 3], t);
        cs = cs.max((lhs - rhs).abs());
    }
    rep.line("5", "equal-tract Cauchy-Schwarz equality within 1e-12", cs < 1e-12, format!("max gap {cs:.3e}"));
    let mut closed = 0.0f64;
    for r in [2.0, 10.0, 100.0] {
        let b = 3.0 * pl_integral(|t| TAU * t / 3.0, r)?;
        closed = closed.max((b - 4.5 * f64::ln(r)).abs());
    }
    rep.line("5", "three-tract bound equals (9/2) log r", closed < 1e-12, format!("max gap {closed:.3e}"));
    Ok(())
}

fn criterion_6(rep: &mut Report) -> nqd::Result<()> {
    let u1 = |z: C64| Some(z.re.max(0.0));
    let u2 = |z: C64| Some((-z.re).max(0.0));
    let rows = heins_functional(&[&u1, &u2], &[1.0, 2.0, 4.0, 8.0], 4096)?;
    let err = max_over(&rows, |r| (r.value - PI.sqrt()).abs());
    rep.line("6", "Heins functional sqrt(pi) within 1e-3 at r = 1, 2, 4, 8", err < 1e-3, format!("max error {err:.3e}"));
    Ok(())
}

/// Least-squares slope of `log e` against `log h`.
fn order(hs: &[f64], es: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = hs.iter().zip(es).map(|(h, e)| (h.ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn criterion_7(rep: &mut Report) -> nqd::Result<()> {
    let d = catalog("hhp")?;
    let r = build_roof(&d, &RoofConfig::default())?;
    let hs = [0.2, 0.1, 0.05, 0.025];
    let pts = random_interior_points(&r, 100, SEED, 0.5)?;
    let mut es = vec![0.0; hs.len()];
    for z in &pts {
        let g = r.grad_u(*z)?;
        for (k, &h) in hs.iter().enumerate() {
            let dx = (r.eval_u(z + h)? - r.eval_u(z - h)?) / (2.0 * h);
            let hy = C64::new(0.0, h);
            let dy = (r.eval_u(z + hy)? - r.eval_u(z - hy)?) / (2.0 * h);
            es[k] += (C64::new(dx, dy) - g).norm();
        }
    }
    let p = order(&hs, &es);
    rep.line("7", "grad u vs central differences, order >= 1.9 at 100 points", p >= 1.9, format!("observed order {p:.3}"));
    let ss = [0.2, 0.1, 0.05, 0.025];
    let mut ls = vec![0.0; ss.len()];
    for z in &pts {
        for (k, &s) in ss.iter().enumerate() {
            ls[k] += discrete_laplacian(&r, *z, s)?.abs();
        }
    }
    let p = order(&ss, &ls);
    rep.line("7", "discrete Laplacian decays with order >= 1.9", p >= 1.9, format!("observed order {p:.3}"));
    let circle = CurveComponent::new(
        CurveShape::Circle {
            center: C64::new(0.5, 0.0),
            radius: 1.0,
        },
        Orientation::Forward,
    )?;
    let f = |z: C64| 1.0 / z;
    let mut errs = Vec::new();
    for n in [8, 16, 32, 64] {
        let rule = QuadratureRule::from_components(
            std::slice::from_ref(&circle),
            QuadSettings {
                closed_nodes: n,
                unbounded_nodes: 16,
            },
        )?;
        errs.push((n, (integrate_dz_components(std::slice::from_ref(&circle), &f, &rule)? - C64::new(0.0, TAU)).norm()));
    }
    // error 2 pi |c/r|^n for a pole at distance |c| from the centre
    let geometric = errs.iter().all(|&(n, e)| e <= 2.0 * TAU * 0.5f64.powi(n as i32) + 1e-14);
    let ratio = errs[1].1 / errs[0].1;
    rep.line(
        "7",
        "periodic trapezoid on the contour integral of dz/z converges geometrically",
        geometric && ratio < 0.01,
        format!("errors {:?}", errs.iter().map(|e| format!("N={} {:.1e}", e.0, e.1)).collect::<Vec<_>>()),
    );
    Ok(())
}

fn residuals(d: &Domain, members: &[TestFunction], quad: &QuadratureConfig) -> nqd::Result<Vec<C64>> {
    members.iter().map(|g| nqd_residual(d, g, quad).map(|r| r.value)).collect()
}

fn criterion_8(rep: &mut Report) -> nqd::Result<()> {
    let quad = QuadratureConfig::default();
    let tol = 10.0 * quad.tol;
    for name in ["ellipse-exterior:2,1", "hhp"] {
        let d = catalog(name)?;
        let mut members = Vec::new();
        for g in default_dictionary(&d, &DictionarySpec::default())?.into_iter().step_by(5) {
            if e1_admissible(&d, &g, &quad)?.admissible {
                members.push(g);
            }
        }
        let base = residuals(&d, &members, &quad)?;
        let shift = C64::new(0.7, -1.3);
        let moved: Vec<TestFunction> = members.iter().map(|g| TestFunction::new(g.pole + shift, g.order)).collect();
        let tr = residuals(&d.translated(shift)?, &moved, &quad)?;
        let et = base.iter().zip(&tr).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        rep.line(
            "8",
            &format!("{name}: translation covariance within {tol:.0e}"),
            et < tol,
            format!("max diff {et:.3e} over {} members", members.len()),
        );
        let u = C64::from_polar(1.0, 0.9);
        let turned: Vec<TestFunction> = members.iter().map(|g| TestFunction::new(g.pole * u, g.order)).collect();
        let rot = residuals(&d.rotated(u)?, &turned, &quad)?;
        let er = base
            .iter()
            .zip(&rot)
            .zip(&members)
            .map(|((a, b), g)| (a * u.powi(-(g.order as i32)) - b).norm())
            .fold(0.0, f64::max);
        rep.line("8", &format!("{name}: rotation covariance within {tol:.0e}"), er < tol, format!("max diff {er:.3e}"));
    }
    let comps = catalog("hhp")?.components().to_vec();
    let reversed: Vec<CurveComponent> = comps.iter().map(|c| c.reversed()).collect();
    let mut worst = 0.0f64;
    for j in 0..comps.len() {
        let one = &comps[j..=j];
        let one_rev = &reversed[j..=j];
        let p = comps[j].point(0.0);
        let n = comps[j].inward_normal_at(0.0)?;
        let (a, b) = (p + n, p - n);
        let g = move |z: C64| 1.0 / ((z - a) * (z - b));
        let r1 = QuadratureRule::from_components(one, QuadSettings::default())?;
        let r2 = QuadratureRule::from_components(one_rev, QuadSettings::default())?;
        let i1 = integrate_dz_components(one, &g, &r1)?;
        let i2 = integrate_dz_components(one_rev, &g, &r2)?;
        worst = worst.max((i1 + i2).norm() / i1.norm());
    }
    let circle = vec![CurveComponent::new(
        CurveShape::Circle { center: C64::new(0.0, 0.0), radius: 2.0 },
        Orientation::Forward,
    )?];
    let circle_rev: Vec<CurveComponent> = circle.iter().map(|c| c.reversed()).collect();
    let b = C64::new(0.3, 0.2);
    let pole = move |z: C64| 1.0 / (z - b);
    let c1 = integrate_dz_components(&circle, &pole, &QuadratureRule::from_components(&circle, QuadSettings::default())?)?;
    let c2 = integrate_dz_components(
        &circle_rev,
        &pole,
        &QuadratureRule::from_components(&circle_rev, QuadSettings::default())?,
    )?;
    let closed = (c1 + c2).norm() / c1.norm();
    rep.line(
        "8",
        "orientation antisymmetry of the dz integral within 1e-14 relative",
        worst <= 1e-14 && closed <= 1e-14,
        format!("open components {worst:.3e}; closed circle {closed:.3e} (|I| = {:.6})", c1.norm()),
    );
    Ok(())
}

fn main() -> ExitCode {
    let mut rep = Report { failures: 0 };
    let criteria: [(&str, fn(&mut Report) -> nqd::Result<()>); 8] = [
        ("1", criterion_1),
        ("2", criterion_2),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
        ("7", criterion_7),
        ("8", criterion_8),
    ];
    for (id, run) in criteria {
        let t0 = std::time::Instant::now();
        if let Err(e) = run(&mut rep) {
            rep.line(id, "criterion raised an error", false, e.to_string());
        }
        eprintln!("criterion {id}: {:.2?}", t0.elapsed());
    }
    println!("{} failure(s)", rep.failures);
    if rep.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
