//! Boundary quadrature.
//!
//! Closed components use the periodic trapezoidal rule. Unbounded components
//! are reparameterized by `t = sinh(s)`, truncated at `|t| <= t_max` and
//! integrated with composite 16-point Gauss-Legendre panels in `s`. Integrands
//! that know a primitive vanishing at infinity get the tail beyond the
//! truncation point added in closed form along the asymptotic direction.

use std::f64::consts::{PI, TAU};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{NqdError, Result};
use crate::geometry::{CurveComponent, CurveKind, Domain, C64};

pub const PANEL_ORDER: usize = 16;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

const GK_X: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const GK_W: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const G7_W: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Returns the Kronrod value, a QUADPACK-style error estimate and `int |f|`.
fn gk15(f: &impl Fn(f64) -> C64, a: f64, b: f64) -> (C64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut vals = [C64::new(0.0, 0.0); 15];
    vals[7] = f(c);
    for j in 0..7 {
        let dx = h * GK_X[j];
        vals[j] = f(c - dx);
        vals[14 - j] = f(c + dx);
    }
    let weight = |k: usize| GK_W[k.min(14 - k)];
    let mut kron = C64::new(0.0, 0.0);
    let mut abs = 0.0;
    for (k, v) in vals.iter().enumerate() {
        kron += v * weight(k);
        abs += v.norm() * weight(k);
    }
    let mut gauss = vals[7] * G7_W[3];
    for j in (1..7).step_by(2) {
        gauss += (vals[j] + vals[14 - j]) * G7_W[j / 2];
    }
    let mean = kron * 0.5;
    let asc: f64 = vals.iter().enumerate().map(|(k, v)| (v - mean).norm() * weight(k)).sum::<f64>() * h.abs();
    let mut err = ((kron - gauss) * h).norm();
    if asc > 0.0 && err > 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    let abs = abs * h.abs();
    (kron * h, err.max(50.0 * f64::EPSILON * abs), abs)
}

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of a complex integrand.
///
/// The interval is first split into `initial` pieces; the piece with the
/// largest error estimate is bisected until the summed estimate drops below
/// `tol`, the estimate reaches the rounding level, or the piece budget runs out.
pub fn adaptive_gk(f: impl Fn(f64) -> C64, a: f64, b: f64, tol: f64, initial: usize) -> C64 {
    const MAX_PIECES: usize = 4000;
    let n = initial.max(1);
    let h = (b - a) / n as f64;
    // (lo, hi, value, error, |f| mass)
    let mut pieces: Vec<(f64, f64, C64, f64, f64)> = (0..n)
        .map(|k| {
            let lo = a + h * k as f64;
            let hi = if k + 1 == n { b } else { lo + h };
            let (v, e, m) = gk15(&f, lo, hi);
            (lo, hi, v, e, m)
        })
        .collect();
    loop {
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        let mass: f64 = pieces.iter().map(|p| p.4).sum();
        if err <= tol.max(100.0 * f64::EPSILON * mass) || pieces.len() >= MAX_PIECES {
            break;
        }
        let (k, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .expect("non-empty");
        let (lo, hi, ..) = pieces[k];
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (vl, el, ml) = gk15(&f, lo, mid);
        let (vr, er, mr) = gk15(&f, mid, hi);
        pieces[k] = (lo, mid, vl, el, ml);
        pieces.push((mid, hi, vr, er, mr));
    }
    pieces.iter().map(|p| p.2).sum()
}

/// Node counts for one quadrature level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadSettings {
    pub closed_nodes: usize,
    pub unbounded_nodes: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            closed_nodes: 256,
            unbounded_nodes: 512,
        }
    }
}

impl QuadSettings {
    pub fn scaled(self, factor: usize) -> Self {
        Self {
            closed_nodes: self.closed_nodes * factor,
            unbounded_nodes: self.unbounded_nodes * factor,
        }
    }

    pub fn total_scale(self) -> usize {
        self.closed_nodes.max(self.unbounded_nodes)
    }
}

/// One quadrature node on the boundary.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryNode {
    pub component: usize,
    pub t: f64,
    pub z: C64,
    /// `z'(t)` times the weight (including the `sinh` Jacobian).
    pub dz: C64,
    /// `|dz|`
    pub ds: f64,
    /// Local arclength spacing between neighbouring nodes.
    pub spacing: f64,
}

#[derive(Clone, Debug)]
pub struct ComponentRule {
    pub component: usize,
    pub kind: CurveKind,
    pub nodes: Range<usize>,
    pub t_max: f64,
    /// Half-width of the substituted variable window, `asinh(t_max)`.
    pub s_max: f64,
}

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub settings: QuadSettings,
    pub nodes: Vec<BoundaryNode>,
    pub components: Vec<ComponentRule>,
}

impl QuadratureRule {
    pub fn new(domain: &Domain, settings: QuadSettings) -> Result<Self> {
        Self::from_components(domain.components(), settings)
    }

    /// Rule over bare components, without the domain-level validation.
    pub fn from_components(comps: &[CurveComponent], settings: QuadSettings) -> Result<Self> {
        let (gx, gw) = gauss_legendre(PANEL_ORDER);
        let mut nodes = Vec::new();
        let mut components = Vec::new();
        for (ci, comp) in comps.iter().enumerate() {
            let start = nodes.len();
            match comp.kind() {
                CurveKind::Closed => {
                    let n = settings.closed_nodes.max(4);
                    let w = TAU / n as f64;
                    for j in 0..n {
                        let t = w * j as f64;
                        let (z, d) = comp.eval(t);
                        nodes.push(BoundaryNode {
                            component: ci,
                            t,
                            z,
                            dz: d * w,
                            ds: d.norm() * w,
                            spacing: d.norm() * w,
                        });
                    }
                    components.push(ComponentRule {
                        component: ci,
                        kind: CurveKind::Closed,
                        nodes: start..nodes.len(),
                        t_max: 0.0,
                        s_max: 0.0,
                    });
                }
                CurveKind::Unbounded => {
                    let panels = (settings.unbounded_nodes / PANEL_ORDER).max(1);
                    let s_max = comp.t_max.asinh();
                    let len = 2.0 * s_max / panels as f64;
                    for p in 0..panels {
                        let lo = -s_max + len * p as f64;
                        let mid = lo + 0.5 * len;
                        let panel_arclength: f64 = gx
                            .iter()
                            .zip(&gw)
                            .map(|(x, w)| {
                                let s = mid + 0.5 * len * x;
                                comp.deriv(s.sinh()).norm() * s.cosh() * w * 0.5 * len
                            })
                            .sum();
                        for (x, w) in gx.iter().zip(&gw) {
                            let s = mid + 0.5 * len * x;
                            let t = s.sinh();
                            let jac = s.cosh() * w * 0.5 * len;
                            let (z, d) = comp.eval(t);
                            nodes.push(BoundaryNode {
                                component: ci,
                                t,
                                z,
                                dz: d * jac,
                                ds: d.norm() * jac,
                                spacing: panel_arclength / PANEL_ORDER as f64,
                            });
                        }
                    }
                    components.push(ComponentRule {
                        component: ci,
                        kind: CurveKind::Unbounded,
                        nodes: start..nodes.len(),
                        t_max: comp.t_max,
                        s_max,
                    });
                }
            }
        }
        Ok(Self {
            settings,
            nodes,
            components,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// A function on the boundary.
///
/// `tail_primitive` may return a primitive `G` of the function with
/// `G(z) -> 0` as `z -> infinity`; it is then used to add the part of the
/// integral beyond the truncation window.
pub trait BoundaryFunction: Sync {
    fn eval(&self, z: C64) -> C64;

    fn tail_primitive(&self, _z: C64) -> Option<C64> {
        None
    }
}

impl<F: Fn(C64) -> C64 + Sync> BoundaryFunction for F {
    fn eval(&self, z: C64) -> C64 {
        self(z)
    }
}

/// Pairs a function with a primitive that vanishes at infinity.
pub struct WithPrimitive<F, G> {
    pub f: F,
    pub primitive: G,
}

impl<F, G> BoundaryFunction for WithPrimitive<F, G>
where
    F: Fn(C64) -> C64 + Sync,
    G: Fn(C64) -> C64 + Sync,
{
    fn eval(&self, z: C64) -> C64 {
        (self.f)(z)
    }

    fn tail_primitive(&self, z: C64) -> Option<C64> {
        Some((self.primitive)(z))
    }
}

#[derive(Clone, Copy)]
enum Measure {
    Arclength,
    Complex,
}

fn integrate(
    comps: &[CurveComponent],
    f: &dyn BoundaryFunction,
    rule: &QuadratureRule,
    measure: Measure,
) -> Result<C64> {
    let mut total = C64::new(0.0, 0.0);
    for node in &rule.nodes {
        let v = f.eval(node.z);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(NqdError::NonFinite {
                component: node.component,
                t: node.t,
            });
        }
        total += match measure {
            Measure::Arclength => v * node.ds,
            Measure::Complex => v * node.dz,
        };
    }
    for cr in &rule.components {
        if cr.kind != CurveKind::Unbounded {
            continue;
        }
        let comp = &comps[cr.component];
        let (zs, ze) = (comp.point(-cr.t_max), comp.point(cr.t_max));
        let (Some(gs), Some(ge)) = (f.tail_primitive(zs), f.tail_primitive(ze)) else {
            continue;
        };
        let (cm, cp) = comp
            .asymptotic_conj_tangents()
            .expect("unbounded components carry asymptotics");
        total += match measure {
            Measure::Arclength => cm * gs - cp * ge,
            Measure::Complex => gs - ge,
        };
    }
    Ok(total)
}

/// `int f ds` over the boundary.
pub fn integrate_ds(domain: &Domain, f: &dyn BoundaryFunction, rule: &QuadratureRule) -> Result<C64> {
    integrate(domain.components(), f, rule, Measure::Arclength)
}

/// `int f dz` over the oriented boundary.
pub fn integrate_dz(domain: &Domain, f: &dyn BoundaryFunction, rule: &QuadratureRule) -> Result<C64> {
    integrate(domain.components(), f, rule, Measure::Complex)
}

/// `int f dz` over bare components built with [`QuadratureRule::from_components`].
pub fn integrate_dz_components(
    comps: &[CurveComponent],
    f: &dyn BoundaryFunction,
    rule: &QuadratureRule,
) -> Result<C64> {
    integrate(comps, f, rule, Measure::Complex)
}

/// Outcome of [`refine_until`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Refinement {
    pub value: C64,
    /// Difference between the last two levels.
    pub error_estimate: f64,
    pub converged: bool,
    pub settings: QuadSettings,
    pub t_max: f64,
    pub levels: usize,
}

/// Doubles the node counts and walks the truncation schedule until two
/// successive values differ by less than `tol`.
///
/// With a multi-entry schedule every refinement step also advances the
/// truncation, so a tail that keeps growing can never look converged; once the
/// schedule is exhausted the best value is returned flagged as unconverged.
/// A single-entry schedule keeps the truncation fixed (compact boundaries).
/// Reaching `max_nodes` is not an error either.
pub fn refine_until<F>(
    mut task: F,
    tol: f64,
    start: QuadSettings,
    max_nodes: usize,
    schedule: &[f64],
) -> Result<Refinement>
where
    F: FnMut(QuadSettings, f64) -> Result<C64>,
{
    if !(tol > 0.0) {
        return Err(NqdError::Config(format!("tolerance must be positive, got {tol}")));
    }
    if schedule.is_empty() {
        return Err(NqdError::Config("empty truncation schedule".into()));
    }
    let mut settings = start;
    let mut t_max = schedule[0];
    let mut value = task(settings, t_max)?;
    let mut diff = f64::INFINITY;
    let mut level = 1;
    loop {
        let next = settings.scaled(2);
        let exhausted = schedule.len() > 1 && level >= schedule.len();
        if next.total_scale() > max_nodes || exhausted {
            return Ok(Refinement {
                value,
                error_estimate: diff,
                converged: false,
                settings,
                t_max,
                levels: level,
            });
        }
        settings = next;
        t_max = schedule[level.min(schedule.len() - 1)];
        let cur = task(settings, t_max)?;
        diff = (cur - value).norm();
        value = cur;
        level += 1;
        if diff < tol {
            return Ok(Refinement {
                value,
                error_estimate: diff,
                converged: true,
                settings,
                t_max,
                levels: level,
            });
        }
    }
}

/// Default truncation schedule for unbounded components.
pub const T_SCHEDULE: [f64; 4] = [25.0, 50.0, 100.0, 200.0];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{catalog, CurveComponent, CurveShape, Orientation, I};

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(16);
        for deg in 0..32 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            assert!((q - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn kronrod_rule_is_exact_for_degree_22() {
        let f = |x: f64| C64::new(x.powi(22) + x.powi(21), 0.0);
        let (v, _, _) = gk15(&f, -1.0, 1.0);
        assert!((v.re - 2.0 / 23.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_near_singularity() {
        let eps: f64 = 1e-6;
        let f = |x: f64| C64::new(1.0 / (x * x + eps * eps), 0.0);
        let v = adaptive_gk(f, -1.0, 1.0, 1e-10, 4);
        let exact = 2.0 * (1.0 / eps).atan() / eps;
        assert!(((v.re - exact) / exact).abs() < 1e-12);
    }

    #[test]
    fn circumference_of_unit_circle() {
        let d = catalog("disk-exterior").unwrap();
        let rule = QuadratureRule::new(&d, QuadSettings { closed_nodes: 64, unbounded_nodes: 512 }).unwrap();
        let v = integrate_ds(&d, &|_z: C64| C64::new(1.0, 0.0), &rule).unwrap();
        assert!((v - C64::new(TAU, 0.0)).norm() < 1e-12);
        let v = integrate_ds(&d, &|z: C64| z, &rule).unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn residue_of_inverse_on_circle() {
        let cw = CurveComponent::new(
            CurveShape::Circle {
                center: C64::new(0.0, 0.0),
                radius: 1.0,
            },
            Orientation::Reverse,
        )
        .unwrap();
        let ccw = cw.reversed();
        for (comp, sign) in [(ccw, 1.0), (cw, -1.0)] {
            let comps = [comp];
            let rule = QuadratureRule::from_components(&comps, QuadSettings::default()).unwrap();
            let v = integrate_dz_components(&comps, &|z: C64| 1.0 / z, &rule).unwrap();
            assert!((v - 2.0 * PI * I * sign).norm() < 1e-12);
        }
    }

    #[test]
    fn truncated_lorentzian_on_line() {
        let d = catalog("halfplane").unwrap().with_t_max(50.0).unwrap();
        let rule = QuadratureRule::new(&d, QuadSettings::default()).unwrap();
        let f = |z: C64| 1.0 / (1.0 + z * z);
        let v = integrate_ds(&d, &f, &rule).unwrap();
        // the hard truncation loses the tail 2/T_max
        assert!((v.re - 2.0 * 50f64.atan()).abs() < 1e-10);
        assert!((PI - v.re - 2.0 / 50.0).abs() < 1e-3);
        // with a primitive vanishing at infinity the tail is restored
        let g = WithPrimitive {
            f,
            primitive: |z: C64| z.atan() - C64::new(PI / 2.0, 0.0) * (z.re.signum()),
        };
        let v = integrate_ds(&d, &g, &rule).unwrap();
        assert!((v.re - PI).abs() < 1e-3);
    }

    #[test]
    fn double_pole_on_line_vanishes() {
        let d = catalog("halfplane").unwrap();
        let rule = QuadratureRule::new(&d, QuadSettings::default()).unwrap();
        let bare = integrate_dz(&d, &|z: C64| (z + I).powi(-2), &rule).unwrap();
        assert!((bare.re + 0.02).abs() < 1e-4);
        let f = WithPrimitive {
            f: |z: C64| (z + I).powi(-2),
            primitive: |z: C64| -1.0 / (z + I),
        };
        let v = integrate_dz(&d, &f, &rule).unwrap();
        assert!(v.norm() < 1e-6, "{v}");
    }

    #[test]
    fn refinement_converges_geometrically_on_circle() {
        let d = catalog("disk-exterior").unwrap();
        let r = refine_until(
            |s, _| {
                let rule = QuadratureRule::new(&d, s)?;
                integrate_dz(&d, &|z: C64| 1.0 / z, &rule)
            },
            1e-10,
            QuadSettings { closed_nodes: 8, unbounded_nodes: 16 },
            1 << 14,
            &[0.0],
        )
        .unwrap();
        assert!(r.converged);
        assert!(r.settings.closed_nodes <= 64);
        assert!((r.value + 2.0 * PI * I).norm() < 1e-12);
    }

    #[test]
    fn refinement_on_halfplane_uses_schedule() {
        let base = catalog("halfplane").unwrap();
        let r = refine_until(
            |s, t| {
                let d = base.with_t_max(t)?;
                let rule = QuadratureRule::new(&d, s)?;
                let f = WithPrimitive {
                    f: |z: C64| (z + I).powi(-2),
                    primitive: |z: C64| -1.0 / (z + I),
                };
                integrate_dz(&d, &f, &rule)
            },
            1e-8,
            QuadSettings::default(),
            1 << 14,
            &T_SCHEDULE,
        )
        .unwrap();
        assert!(r.converged);
        assert!(r.value.norm() < 1e-8);
    }

    #[test]
    fn log_divergent_integral_is_flagged() {
        let base = catalog("halfplane").unwrap();
        let r = refine_until(
            |s, t| {
                let d = base.with_t_max(t)?;
                let rule = QuadratureRule::new(&d, s)?;
                integrate_ds(&d, &|z: C64| C64::new(1.0 / (z + I).norm(), 0.0), &rule)
            },
            1e-6,
            QuadSettings::default(),
            1 << 13,
            &T_SCHEDULE,
        )
        .unwrap();
        assert!(!r.converged);
        assert!(r.error_estimate > 1.0);
    }

    #[test]
    fn non_finite_values_are_reported() {
        let d = catalog("disk-exterior").unwrap();
        let rule = QuadratureRule::new(&d, QuadSettings::default()).unwrap();
        let err = integrate_ds(&d, &|z: C64| 1.0 / (z - 1.0), &rule).unwrap_err();
        assert!(matches!(err, NqdError::NonFinite { component: 0, .. }));
    }

    #[test]
    fn bad_tolerance_is_rejected() {
        let r = refine_until(|_, _| Ok(C64::new(0.0, 0.0)), 0.0, QuadSettings::default(), 1024, &T_SCHEDULE);
        assert!(r.is_err());
    }
}
