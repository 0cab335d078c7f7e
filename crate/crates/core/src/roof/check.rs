use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::RoofCandidate;
use crate::error::{NqdError, Result};
use crate::geometry::{CurveKind, C64, I};
use crate::quadrature::BoundaryFunction;
use crate::verify::{default_dictionary, DictionarySpec};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct RoofCheckConfig {
    pub tol: f64,
    pub probes_per_component: usize,
    /// Smallest inward distance of the boundary-limit extrapolation.
    pub normal_step: f64,
    pub laplacian_step: f64,
    pub laplacian_points: usize,
    pub dictionary: DictionarySpec,
}

impl Default for RoofCheckConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            probes_per_component: 61,
            normal_step: 1e-4,
            laplacian_step: 0.1,
            laplacian_points: 40,
            dictionary: DictionarySpec::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckItem {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryProbe {
    pub component: usize,
    pub t: f64,
    pub z: C64,
    pub grad_limit: C64,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RoofReport {
    pub domain: String,
    pub tol: f64,
    pub items: Vec<CheckItem>,
    pub passed: bool,
    pub boundary_probes: Vec<BoundaryProbe>,
}

impl RoofReport {
    pub fn failed(&self) -> Vec<&CheckItem> {
        self.items.iter().filter(|c| !c.passed).collect()
    }

    pub fn item(&self, name: &str) -> Option<&CheckItem> {
        self.items.iter().find(|c| c.name == name)
    }
}

fn item(name: &'static str, value: f64, threshold: f64, passed: bool, detail: String) -> CheckItem {
    CheckItem {
        name,
        passed: passed && value.is_finite(),
        value,
        threshold,
        detail,
    }
}

/// Runs every roof assertion at tolerance `tol` with default settings.
pub fn check_roof(r: &RoofCandidate, tol: f64) -> Result<RoofReport> {
    check_roof_with(
        r,
        &RoofCheckConfig {
            tol,
            ..RoofCheckConfig::default()
        },
    )
}

/// Boundary limit of `grad u` at `z_j(t)` by Richardson extrapolation along the normal.
pub fn boundary_gradient(r: &RoofCandidate, component: usize, t: f64, step: f64) -> Result<(C64, C64)> {
    let comp = &r.domain().components()[component];
    let zb = comp.point(t);
    let tan = comp.tangent_at(t)?;
    let n = I * tan;
    let h = |k: f64| r.h(zb + k * step * n);
    let h0 = (8.0 * h(1.0) - 6.0 * h(2.0) + h(4.0)) / 3.0;
    Ok((I * h0.conj(), I * tan))
}

fn probe_params(r: &RoofCandidate, count: usize) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for (j, comp) in r.domain().components().iter().enumerate() {
        match comp.kind() {
            CurveKind::Closed => {
                out.extend((0..count).map(|k| (j, std::f64::consts::TAU * k as f64 / count as f64)));
            }
            CurveKind::Unbounded => {
                let ext = r.config().probe_extent.min(0.5 * comp.t_max);
                let m = count.max(2);
                out.extend((0..m).map(|k| (j, -ext + 2.0 * ext * k as f64 / (m - 1) as f64)));
            }
        }
    }
    out
}

/// Five-point Laplacian of `u` at `z` with step `s`, from increments of `f`.
pub fn discrete_laplacian(r: &RoofCandidate, z: C64, s: f64) -> Result<f64> {
    let mut total = 0.0;
    for dir in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), I, -I] {
        total += r.f_increment(z, z + s * dir)?.re;
    }
    Ok(total / (s * s))
}

/// Reachable anchor nodes at least `margin` from the boundary, thinned to at most `count`.
pub fn interior_anchor_points(r: &RoofCandidate, count: usize, margin: f64) -> Vec<C64> {
    let pts: Vec<C64> = r
        .grid()
        .points
        .iter()
        .zip(&r.grid().f)
        .filter(|(z, f)| f.is_some() && r.domain().distance_to_boundary(**z) >= margin)
        .map(|(z, _)| *z)
        .collect();
    if pts.len() <= count || count == 0 {
        return pts;
    }
    (0..count).map(|k| pts[k * pts.len() / count]).collect()
}

/// Seeded uniform points of the anchor box lying at least `margin` inside the domain.
pub fn random_interior_points(r: &RoofCandidate, count: usize, seed: u64, margin: f64) -> Result<Vec<C64>> {
    let spec = &r.grid().spec;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count * 1000 {
        if out.len() == count {
            break;
        }
        let z = C64::new(
            spec.center[0] + rng.gen_range(-spec.half_width..spec.half_width),
            spec.center[1] + rng.gen_range(-spec.half_width..spec.half_width),
        );
        if r.domain().contains_unchecked(z) && r.domain().distance_to_boundary(z) >= margin {
            out.push(z);
        }
    }
    if out.len() < count {
        return Err(NqdError::Config(format!(
            "only {} of {count} interior points found in the anchor box",
            out.len()
        )));
    }
    Ok(out)
}

/// Offset contour nodes paired with `h dz`, shared by the contour checks.
pub fn weighted_offset(r: &RoofCandidate) -> Result<Vec<(C64, C64)>> {
    Ok(r
        .offset_nodes(r.offset_distance())?
        .par_iter()
        .map(|n| (n.z, r.h(n.z) * n.dz))
        .collect())
}

/// `int g h dz` over the offset contour, with the asymptotic tails added in closed form.
pub fn forward_residual(r: &RoofCandidate, g: &dyn BoundaryFunction, weighted: &[(C64, C64)]) -> C64 {
    let mut total: C64 = weighted.iter().map(|(z, hdz)| g.eval(*z) * hdz).sum();
    let delta = r.offset_distance();
    for (j, comp) in r.domain().components().iter().enumerate() {
        let Some((cm, cp)) = comp.asymptotic_conj_tangents() else {
            continue;
        };
        let (Ok(start), Ok(end)) = (r.offset_point(j, -comp.t_max, delta), r.offset_point(j, comp.t_max, delta)) else {
            continue;
        };
        if let (Some(gs), Some(ge)) = (g.tail_primitive(start), g.tail_primitive(end)) {
            total += cm * gs - cp * ge;
        }
    }
    total
}

pub fn check_roof_with(r: &RoofCandidate, cfg: &RoofCheckConfig) -> Result<RoofReport> {
    let tol = cfg.tol;
    if !(tol > 0.0) {
        return Err(NqdError::Config(format!("tolerance must be positive, got {tol}")));
    }
    let mut items = Vec::new();

    let probes = probe_params(r, cfg.probes_per_component)
        .par_iter()
        .map(|&(j, t)| {
            let (g, target) = boundary_gradient(r, j, t, cfg.normal_step)?;
            Ok(BoundaryProbe {
                component: j,
                t,
                z: r.domain().components()[j].point(t),
                grad_limit: g,
                error: (g - target).norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = probes.iter().map(|p| p.error).fold(0.0, f64::max);
    items.push(item(
        "boundary_gradient",
        worst,
        tol,
        worst < tol,
        format!("max |grad u - iT| over {} boundary probes", probes.len()),
    ));

    let lowest = r
        .boundary_constants()
        .iter()
        .map(|b| b.value + r.c())
        .fold(f64::INFINITY, f64::min);
    items.push(item(
        "boundary_constants_nonnegative",
        lowest,
        -tol,
        lowest >= -tol,
        "min over components of boundary constant + C".into(),
    ));

    let scale = 1.0 + r.boundary_constants().iter().map(|b| b.value.abs()).fold(0.0, f64::max);
    let spread = r.boundary_constants().iter().map(|b| b.spread).fold(0.0, f64::max);
    items.push(item(
        "boundary_constancy",
        spread,
        tol * scale,
        spread <= tol * scale,
        "max spread of Re f along a component".into(),
    ));

    let s = cfg.laplacian_step;
    let pts = interior_anchor_points(r, cfg.laplacian_points, 2.0 * s);
    let laps = pts
        .par_iter()
        .map(|&z| Ok((discrete_laplacian(r, z, s)?.abs(), discrete_laplacian(r, z, 0.5 * s)?.abs())))
        .collect::<Result<Vec<_>>>()?;
    let coarse = laps.iter().map(|l| l.0).fold(0.0, f64::max);
    let fine = laps.iter().map(|l| l.1).fold(0.0, f64::max);
    let order = (coarse / fine).log2();
    items.push(item(
        "harmonicity",
        fine,
        tol,
        !pts.is_empty() && (fine <= tol || order >= 1.5),
        format!(
            "max |5-point Laplacian| {coarse:e} at step {s}, {fine:e} at step {}; observed order {order:.2} over {} points",
            0.5 * s,
            pts.len()
        ),
    ));

    let us: Vec<f64> = r
        .grid()
        .points
        .par_iter()
        .zip(&r.grid().f)
        .filter_map(|(z, f)| f.map(|f| (*z, f)))
        .filter(|(z, _)| !r.in_collar(*z))
        .map(|(_, f)| f.re + r.c())
        .collect();
    let umin = us.iter().copied().fold(f64::INFINITY, f64::min);
    items.push(item(
        "positivity",
        umin,
        -tol,
        !us.is_empty() && umin >= -tol,
        format!("min u over {} anchor nodes outside the collar", us.len()),
    ));

    let weighted = weighted_offset(r)?;
    let dict = default_dictionary(r.domain(), &cfg.dictionary)?;
    let fwd = dict
        .par_iter()
        .map(|g| forward_residual(r, g, &weighted).norm())
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max);
    items.push(item(
        "forward_consistency",
        fwd,
        tol,
        fwd < tol,
        format!("max |int g h dz| over {} dictionary members", dict.len()),
    ));

    let im = r
        .periods()
        .iter()
        .map(|p| p.value.im.abs() / p.arclength.max(1.0))
        .fold(0.0, f64::max);
    let re = r
        .periods()
        .iter()
        .map(|p| (p.value.re - p.arclength).abs() / p.arclength.max(1.0))
        .fold(0.0, f64::max);
    items.push(item(
        "periods",
        im.max(re),
        tol,
        im <= tol && re <= tol,
        format!("{} periods; relative |Im| {im:e}, relative |Re - arclength| {re:e}", r.periods().len()),
    ));

    let hmax = r
        .grid()
        .points
        .par_iter()
        .zip(&r.grid().f)
        .filter(|(_, f)| f.is_some())
        .map(|(z, _)| r.h(*z).norm())
        .reduce(|| 0.0, f64::max);
    items.push(item(
        "max_modulus",
        hmax,
        1.0 + tol,
        hmax <= 1.0 + tol,
        "max |h| over anchor nodes".into(),
    ));

    let passed = items.iter().all(|c| c.passed);
    Ok(RoofReport {
        domain: r.domain().name().to_string(),
        tol,
        items,
        passed,
        boundary_probes: probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::catalog;
    use crate::roof::{build_roof, build_roof_unchecked, GridSpec, RoofConfig};

    fn cfg() -> RoofConfig {
        RoofConfig {
            grid: GridSpec {
                center: [0.0, 0.0],
                half_width: 4.0,
                spacing: 0.5,
            },
            ..RoofConfig::default()
        }
    }

    #[test]
    fn disk_passes_at_tight_tolerance() {
        let r = build_roof(&catalog("disk-exterior").unwrap(), &cfg()).unwrap();
        let rep = check_roof(&r, 1e-8).unwrap();
        assert!(rep.passed, "{:#?}", rep.failed());
    }

    #[test]
    fn halfplane_passes() {
        let r = build_roof(&catalog("halfplane").unwrap(), &cfg()).unwrap();
        let rep = check_roof(&r, 1e-6).unwrap();
        assert!(rep.passed, "{:#?}", rep.failed());
    }

    #[test]
    fn ellipse_fails_boundary_gradient() {
        let r = build_roof_unchecked(&catalog("ellipse-exterior:2,1").unwrap(), &cfg()).unwrap();
        let rep = check_roof(&r, 1e-3).unwrap();
        assert!(!rep.passed);
        assert!(!rep.item("boundary_gradient").unwrap().passed);
    }

    #[test]
    fn disk_boundary_limit_is_normal() {
        let r = build_roof(&catalog("disk-exterior").unwrap(), &cfg()).unwrap();
        let (g, n) = boundary_gradient(&r, 0, 0.9, 1e-4).unwrap();
        assert!((g - n).norm() < 1e-10);
        let z = r.domain().components()[0].point(0.9);
        assert!((n - z).norm() < 1e-14);
    }
}
