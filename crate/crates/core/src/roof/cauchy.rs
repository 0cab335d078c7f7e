//! Cauchy transform of the conjugate unit tangent.
//!
//! Interior values use the normalized kernel `1/(2 pi i)`; exterior values
//! (the vanishing test) are returned unnormalized. Unbounded components are
//! truncated and the contour is closed by arcs at large radius carrying the
//! constant asymptotic density, whose Cauchy integrals are elementary.

use std::f64::consts::{PI, TAU};
use std::ops::Range;

use serde::Serialize;

use crate::error::{NqdError, Result};
use crate::geometry::{CurveComponent, CurveKind, Domain, C64, I};
use crate::quadrature::{adaptive_gk, QuadSettings, QuadratureRule, PANEL_ORDER};

/// Close evaluation kicks in below this many node spacings (periodic rule).
const CLOSE_CLOSED: f64 = 6.0;
/// Same for Gauss-Legendre panels.
const CLOSE_PANEL: f64 = 10.0;
const CLOSE_TOL: f64 = 1e-14;
/// Collar width in units of the local node spacing.
pub const COLLAR_FACTOR: f64 = 5.0;

#[derive(Clone, Debug, Serialize)]
pub struct DensitySample {
    pub component: usize,
    pub t: f64,
    pub z: C64,
    /// `conj T(z)`
    pub value: C64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CauchyDensity {
    pub samples: Vec<DensitySample>,
    /// `(c_minus, c_plus)` for unbounded components, `None` for closed ones.
    pub asymptotics: Vec<Option<(C64, C64)>>,
}

/// Boundary samples of `conj T` on the quadrature nodes.
pub fn cauchy_density(d: &Domain, settings: QuadSettings) -> Result<CauchyDensity> {
    let rule = QuadratureRule::new(d, settings)?;
    let comps = d.components();
    let samples = rule
        .nodes
        .iter()
        .map(|n| {
            Ok(DensitySample {
                component: n.component,
                t: n.t,
                z: n.z,
                value: comps[n.component].tangent_at(n.t)?.conj(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CauchyDensity {
        samples,
        asymptotics: comps.iter().map(|c| c.asymptotic_conj_tangents()).collect(),
    })
}

/// Arc at large radius joining the exit of one unbounded component to the
/// start of the next one (counter-clockwise).
#[derive(Clone, Debug, Serialize)]
pub struct Closure {
    pub from_component: usize,
    pub to_component: usize,
    pub a: C64,
    pub b: C64,
    /// Constant density carried by the arc.
    pub density: C64,
    /// Counter-clockwise angle swept from `arg a` to `arg b`.
    pub sweep: f64,
}

impl Closure {
    /// `int_arc dzeta / (zeta - z)`, valid for `|z|` below the arc radius.
    fn kernel_integral(&self, z: C64) -> C64 {
        let wrap = |x: f64| x - TAU * ((x + PI) / TAU).floor();
        let (a, b) = (self.a, self.b);
        let dtheta = self.sweep + wrap((b - z).arg() - b.arg()) - wrap((a - z).arg() - a.arg());
        C64::new((b - z).norm().ln() - (a - z).norm().ln(), dtheta)
    }
}

fn closures(comps: &[CurveComponent]) -> Result<Vec<Closure>> {
    let ends: Vec<(usize, C64, C64, C64, C64)> = comps
        .iter()
        .enumerate()
        .filter(|(_, c)| c.kind() == CurveKind::Unbounded)
        .map(|(j, c)| {
            let (cm, cp) = c.asymptotic_conj_tangents().expect("unbounded components carry asymptotics");
            (j, c.point(-c.t_max), c.point(c.t_max), cm, cp)
        })
        .collect();
    let mut out = Vec::with_capacity(ends.len());
    for &(ja, _, a, _, cp) in &ends {
        let (jb, b, cm, sweep) = ends
            .iter()
            .map(|&(jb, b, _, cm, _)| (jb, b, cm, (b.arg() - a.arg()).rem_euclid(TAU)))
            .min_by(|x, y| x.3.partial_cmp(&y.3).unwrap())
            .expect("non-empty");
        out.push(Closure {
            from_component: ja,
            to_component: jb,
            a,
            b,
            density: 0.5 * (cp + cm),
            sweep,
        });
    }
    let mut targets: Vec<usize> = out.iter().map(|c| c.to_component).collect();
    targets.sort_unstable();
    targets.dedup();
    if targets.len() != out.len() {
        return Err(NqdError::InvalidDomain(
            "unbounded components do not pair up into a closed contour at infinity".into(),
        ));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
struct Panel {
    component: usize,
    nodes: Range<usize>,
    kind: CurveKind,
    /// Parameter interval (`t` for closed components, `s = asinh t` otherwise).
    lo: f64,
    hi: f64,
}

/// Evaluates the Cauchy integral of `conj T` anywhere off the boundary.
#[derive(Clone, Debug)]
pub struct CauchyEvaluator {
    comps: Vec<CurveComponent>,
    rule: QuadratureRule,
    panels: Vec<Panel>,
    closures: Vec<Closure>,
}

impl CauchyEvaluator {
    pub fn new(d: &Domain, settings: QuadSettings) -> Result<Self> {
        let rule = QuadratureRule::new(d, settings)?;
        for n in &rule.nodes {
            d.components()[n.component].tangent_at(n.t)?;
        }
        let mut panels = Vec::new();
        for cr in &rule.components {
            match cr.kind {
                CurveKind::Closed => panels.push(Panel {
                    component: cr.component,
                    nodes: cr.nodes.clone(),
                    kind: CurveKind::Closed,
                    lo: 0.0,
                    hi: TAU,
                }),
                CurveKind::Unbounded => {
                    let count = cr.nodes.len() / PANEL_ORDER;
                    let len = 2.0 * cr.s_max / count as f64;
                    for p in 0..count {
                        let start = cr.nodes.start + p * PANEL_ORDER;
                        panels.push(Panel {
                            component: cr.component,
                            nodes: start..start + PANEL_ORDER,
                            kind: CurveKind::Unbounded,
                            lo: -cr.s_max + len * p as f64,
                            hi: -cr.s_max + len * (p + 1) as f64,
                        });
                    }
                }
            }
        }
        Ok(Self {
            comps: d.components().to_vec(),
            closures: closures(d.components())?,
            rule,
            panels,
        })
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn closures(&self) -> &[Closure] {
        &self.closures
    }

    pub fn components(&self) -> &[CurveComponent] {
        &self.comps
    }

    /// Spacing of the quadrature node nearest to `z`.
    pub fn local_spacing(&self, z: C64) -> f64 {
        self.rule
            .nodes
            .iter()
            .min_by(|a, b| (a.z - z).norm_sqr().partial_cmp(&(b.z - z).norm_sqr()).unwrap())
            .map_or(0.0, |n| n.spacing)
    }

    /// Width of the near-boundary collar at `z`.
    pub fn collar_width(&self, z: C64) -> f64 {
        COLLAR_FACTOR * self.local_spacing(z)
    }

    fn panel_close(&self, p: &Panel, z: C64) -> C64 {
        let comp = &self.comps[p.component];
        match p.kind {
            CurveKind::Closed => adaptive_gk(
                |t| {
                    let (w, dw) = comp.eval(t);
                    dw.norm() / (w - z)
                },
                p.lo,
                p.hi,
                CLOSE_TOL,
                16,
            ),
            CurveKind::Unbounded => adaptive_gk(
                |s| {
                    let (w, dw) = comp.eval(s.sinh());
                    dw.norm() * s.cosh() / (w - z)
                },
                p.lo,
                p.hi,
                CLOSE_TOL,
                1,
            ),
        }
    }

    /// `int conj(T) dzeta / (zeta - z)` over the closed-up contour.
    pub fn raw(&self, z: C64) -> C64 {
        let mut total = C64::new(0.0, 0.0);
        for p in &self.panels {
            let mut sum = C64::new(0.0, 0.0);
            let mut ratio = f64::INFINITY;
            for n in &self.rule.nodes[p.nodes.clone()] {
                let diff = n.z - z;
                ratio = ratio.min(diff.norm() / n.spacing);
                sum += n.ds / diff;
            }
            let limit = match p.kind {
                CurveKind::Closed => CLOSE_CLOSED,
                CurveKind::Unbounded => CLOSE_PANEL,
            };
            total += if ratio < limit { self.panel_close(p, z) } else { sum };
        }
        for c in &self.closures {
            total += c.density * c.kernel_integral(z);
        }
        total
    }

    /// Analytic extension `h(z)` of `conj T` into the domain.
    pub fn h(&self, z: C64) -> C64 {
        self.raw(z) / (TAU * I)
    }
}

/// Unnormalized Cauchy transform at a point of the complement.
pub fn cauchy_transform(d: &Domain, w: C64, settings: QuadSettings) -> Result<C64> {
    if d.contains(w)? {
        return Err(NqdError::InvalidParameter(format!("{w} lies inside the domain")));
    }
    CauchyEvaluator::new(d, settings).map(|e| e.raw(w))
}

/// `h(z)` for a point of the domain.
pub fn extend_tangent(d: &Domain, z: C64, settings: QuadSettings) -> Result<C64> {
    if !d.contains(z)? {
        return Err(NqdError::InvalidParameter(format!("{z} lies outside the domain")));
    }
    CauchyEvaluator::new(d, settings).map(|e| e.h(z))
}
