//! Candidate roof function `u = Re f + C` with `f(z) = -i int_{z0}^{z} h`.

mod cauchy;
mod check;
mod paths;

use serde::{Deserialize, Serialize};

pub use cauchy::{
    cauchy_density, cauchy_transform, extend_tangent, CauchyDensity, CauchyEvaluator, Closure, DensitySample,
    COLLAR_FACTOR,
};
pub use check::{
    boundary_gradient, check_roof, check_roof_with, discrete_laplacian, forward_residual, interior_anchor_points,
    random_interior_points, weighted_offset, BoundaryProbe, CheckItem, RoofCheckConfig, RoofReport,
};
pub use paths::{boundary_floor, GridSpec, PathGrid, Walker};

use crate::error::{NqdError, Result};
use crate::geometry::{CurveKind, Domain, C64, I};
use crate::quadrature::{adaptive_gk, QuadSettings, PANEL_ORDER};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct RoofConfig {
    pub quad: QuadSettings,
    /// Anchor grid for path integration.
    pub grid: GridSpec,
    /// Unbounded components are probed for `|t|` up to this value.
    pub probe_extent: f64,
    /// Relative tolerance on the imaginary part of the periods.
    pub period_tol: f64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self {
            quad: QuadSettings::default(),
            grid: GridSpec::default(),
            probe_extent: 3.0,
            period_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryConstant {
    pub component: usize,
    /// Mean of `Re f` over the reference points.
    pub value: f64,
    /// Max minus min over the reference points.
    pub spread: f64,
    /// `(t, Re f(z(t)))`
    pub samples: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Period {
    pub component: usize,
    pub value: C64,
    pub arclength: f64,
}

/// Quadrature node shifted into the domain along the inward normal.
#[derive(Clone, Copy, Debug)]
pub struct OffsetNode {
    pub component: usize,
    pub z: C64,
    pub dz: C64,
}

/// Serializable summary stored in `roof.json`.
#[derive(Clone, Debug, Serialize)]
pub struct RoofSummary {
    pub domain: String,
    pub basepoint: C64,
    pub boundary_constants: Vec<BoundaryConstant>,
    #[serde(rename = "C")]
    pub c: f64,
    pub periods: Vec<Period>,
    pub closures: Vec<Closure>,
    pub quadrature_nodes: usize,
    pub t_max: Vec<Option<f64>>,
    pub grid: GridSpec,
    pub reachable_grid_nodes: usize,
    pub offset_distance: f64,
}

#[derive(Clone, Debug)]
pub struct RoofCandidate {
    domain: Domain,
    config: RoofConfig,
    evaluator: CauchyEvaluator,
    grid: PathGrid,
    boundary_constants: Vec<BoundaryConstant>,
    c: f64,
    periods: Vec<Period>,
    offset: f64,
    /// Per component: whether the offset contour grows with the panel size.
    graded: Vec<bool>,
}

fn reference_params(kind: CurveKind, t_max: f64) -> [f64; 3] {
    match kind {
        CurveKind::Closed => [0.0, std::f64::consts::TAU / 3.0, 2.0 * std::f64::consts::TAU / 3.0],
        CurveKind::Unbounded => {
            let t = 1f64.min(0.25 * t_max);
            [-t, 0.0, t]
        }
    }
}

/// Builds the candidate; fails if a period has a non-negligible imaginary part.
pub fn build_roof(d: &Domain, cfg: &RoofConfig) -> Result<RoofCandidate> {
    let r = build_roof_unchecked(d, cfg)?;
    for p in &r.periods {
        if p.value.im.abs() > cfg.period_tol * p.arclength.max(1.0) {
            return Err(NqdError::Inconsistent(format!(
                "period of component {} has imaginary part {:e}",
                p.component, p.value.im
            )));
        }
    }
    Ok(r)
}

/// Builds the candidate without the period consistency check.
pub fn build_roof_unchecked(d: &Domain, cfg: &RoofConfig) -> Result<RoofCandidate> {
    let evaluator = CauchyEvaluator::new(d, cfg.quad)?;
    let z0 = d.basepoint();
    if d.distance_to_boundary(z0) < boundary_floor(z0) {
        return Err(NqdError::NearBoundary {
            re: z0.re,
            im: z0.im,
            dist: d.distance_to_boundary(z0),
            limit: boundary_floor(z0),
        });
    }
    let grid = PathGrid::build(&Walker::new(d, &evaluator), z0, &cfg.grid)?;
    let min_spacing = evaluator.rule().nodes.iter().map(|n| n.spacing).fold(f64::INFINITY, f64::min);
    let mut r = RoofCandidate {
        domain: d.clone(),
        config: cfg.clone(),
        evaluator,
        grid,
        boundary_constants: Vec::new(),
        c: 0.0,
        periods: Vec::new(),
        offset: (8.0 * min_spacing).min(0.2),
        graded: vec![false; d.components().len()],
    };
    for j in 0..d.components().len() {
        if d.components()[j].kind() == CurveKind::Unbounded {
            r.graded[j] = r.graded_offset_fits(j)?;
        }
    }
    let mut constants = Vec::new();
    for (j, comp) in d.components().iter().enumerate() {
        let samples = reference_params(comp.kind(), comp.t_max)
            .iter()
            .map(|&t| Ok((t, r.boundary_value(j, t)?)))
            .collect::<Result<Vec<_>>>()?;
        let lo = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
        let hi = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        constants.push(BoundaryConstant {
            component: j,
            value: samples.iter().map(|s| s.1).sum::<f64>() / samples.len() as f64,
            spread: hi - lo,
            samples,
        });
    }
    r.c = -constants.iter().map(|b| b.value).fold(f64::INFINITY, f64::min);
    r.boundary_constants = constants;
    let offset_nodes: Vec<OffsetNode> = r
        .offset_nodes(r.offset)?
        .into_iter()
        .filter(|n| d.components()[n.component].kind() == CurveKind::Closed)
        .collect();
    r.periods = d
        .components()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.kind() == CurveKind::Closed)
        .map(|(j, _)| {
            let value = offset_nodes
                .iter()
                .filter(|n| n.component == j)
                .map(|n| r.evaluator.h(n.z) * n.dz)
                .sum();
            let arclength = r
                .evaluator
                .rule()
                .nodes
                .iter()
                .filter(|n| n.component == j)
                .map(|n| n.ds)
                .sum();
            Period {
                component: j,
                value,
                arclength,
            }
        })
        .collect();
    Ok(r)
}

impl RoofCandidate {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn config(&self) -> &RoofConfig {
        &self.config
    }

    pub fn evaluator(&self) -> &CauchyEvaluator {
        &self.evaluator
    }

    pub fn grid(&self) -> &PathGrid {
        &self.grid
    }

    pub fn boundary_constants(&self) -> &[BoundaryConstant] {
        &self.boundary_constants
    }

    /// The offset `C`.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn periods(&self) -> &[Period] {
        &self.periods
    }

    /// Distance of the offset contour used for periods and contour checks.
    pub fn offset_distance(&self) -> f64 {
        self.offset
    }

    pub fn walker(&self) -> Walker<'_> {
        Walker::new(&self.domain, &self.evaluator)
    }

    /// Extension `h(z)` of the conjugate unit tangent.
    pub fn h(&self, z: C64) -> C64 {
        self.evaluator.h(z)
    }

    /// Whether `z` sits inside the near-boundary collar.
    pub fn in_collar(&self, z: C64) -> bool {
        self.domain.distance_to_boundary(z) < self.evaluator.collar_width(z)
    }

    fn check_point(&self, z: C64) -> Result<()> {
        if !self.domain.contains_unchecked(z) {
            return Err(NqdError::InvalidParameter(format!("{z} lies outside the domain")));
        }
        let dist = self.domain.distance_to_boundary(z);
        if dist < boundary_floor(z) {
            return Err(NqdError::NearBoundary {
                re: z.re,
                im: z.im,
                dist,
                limit: boundary_floor(z),
            });
        }
        Ok(())
    }

    /// `f(z) = -i int_{z0}^{z} h`, via the nearest reachable anchor.
    pub fn f(&self, z: C64) -> Result<C64> {
        self.check_point(z)?;
        let walker = self.walker();
        for (p, fp) in self.grid.nearest(z, 8) {
            if let Ok(v) = walker.segment(p, z) {
                return Ok(fp - I * v);
            }
        }
        walker
            .segment(self.domain.basepoint(), z)
            .map(|v| -I * v)
            .map_err(|_| NqdError::Pathing(format!("no admissible path to {z}")))
    }

    /// `f(b) - f(a)` along the straight segment.
    pub fn f_increment(&self, a: C64, b: C64) -> Result<C64> {
        self.walker().segment(a, b).map(|v| -I * v)
    }

    pub fn eval_u(&self, z: C64) -> Result<f64> {
        Ok(self.f(z)?.re + self.c)
    }

    /// `grad u = i conj(h)` in complex form.
    pub fn grad_u(&self, z: C64) -> Result<C64> {
        self.check_point(z)?;
        Ok(I * self.h(z).conj())
    }

    /// `Re f` at the boundary point `z_j(t)`, by integrating `h` in from an interior probe.
    pub fn boundary_value(&self, component: usize, t: f64) -> Result<f64> {
        let comp = &self.domain.components()[component];
        let zb = comp.point(t);
        let n = comp.inward_normal_at(t)?;
        let depth = self.config.grid.spacing.max(2.0 * self.evaluator.collar_width(zb));
        let zp = zb + depth * n;
        let fp = self.f(zp)?;
        let step = zb - zp;
        let tail = adaptive_gk(|s| self.h(zp + step * s) * step, 0.0, 1.0, 1e-13, 2);
        Ok((fp - I * tail).re)
    }

    /// Inward shift of the offset contour at `z_j(t)`: `base` on closed
    /// components, grown with the local panel size on unbounded ones.
    fn offset_depth(&self, component: usize, t: f64, base: f64, graded: bool) -> f64 {
        let comp = &self.domain.components()[component];
        if !graded || comp.kind() == CurveKind::Closed {
            return base;
        }
        let cr = &self.evaluator.rule().components[component];
        let panels = (cr.nodes.len() / PANEL_ORDER).max(1);
        let ds = 2.0 * cr.s_max / panels as f64;
        let spacing = comp.deriv(t).norm() * (1.0 + t * t).sqrt() * ds / PANEL_ORDER as f64;
        base + 12.0 * spacing
    }

    /// Point of the offset contour above `z_j(t)`.
    pub fn offset_point(&self, component: usize, t: f64, base: f64) -> Result<C64> {
        let graded = self.graded[component];
        let comp = &self.domain.components()[component];
        Ok(comp.point(t) + self.offset_depth(component, t, base, graded) * I * comp.tangent_at(t)?)
    }

    /// Quadrature nodes moved along the inward normal (by `base` near the
    /// finite part of the boundary), with weights for the shifted contour.
    pub fn offset_nodes(&self, base: f64) -> Result<Vec<OffsetNode>> {
        let comps = self.domain.components();
        self.evaluator
            .rule()
            .nodes
            .iter()
            .map(|n| {
                let comp = &comps[n.component];
                let e = match comp.kind() {
                    CurveKind::Closed => 1e-3,
                    CurveKind::Unbounded => 1e-3 * (1.0 + n.t.abs()),
                };
                let p = |k: f64| self.offset_point(n.component, n.t + k * e, base);
                let dp = (8.0 * (p(1.0)? - p(-1.0)?) - (p(2.0)? - p(-2.0)?)) / (12.0 * e);
                Ok(OffsetNode {
                    component: n.component,
                    z: p(0.0)?,
                    dz: dp * (n.dz / comp.deriv(n.t)),
                })
            })
            .collect()
    }

    fn graded_offset_fits(&self, component: usize) -> Result<bool> {
        let comp = &self.domain.components()[component];
        for n in self.evaluator.rule().nodes.iter().filter(|n| n.component == component) {
            let depth = self.offset_depth(component, n.t, self.offset, true);
            let z = comp.point(n.t) + depth * I * comp.tangent_at(n.t)?;
            if !self.domain.contains_unchecked(z) || self.domain.distance_to_boundary(z) < 0.5 * depth {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn summary(&self) -> RoofSummary {
        RoofSummary {
            domain: self.domain.name().to_string(),
            basepoint: self.domain.basepoint(),
            boundary_constants: self.boundary_constants.clone(),
            c: self.c,
            periods: self.periods.clone(),
            closures: self.evaluator.closures().to_vec(),
            quadrature_nodes: self.evaluator.rule().len(),
            t_max: self
                .domain
                .components()
                .iter()
                .map(|c| (c.kind() == CurveKind::Unbounded).then_some(c.t_max))
                .collect(),
            grid: self.grid.spec.clone(),
            reachable_grid_nodes: self.grid.reachable(),
            offset_distance: self.offset,
        }
    }
}
