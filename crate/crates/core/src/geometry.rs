//! Planar domains bounded by finitely many smooth curves.
//!
//! Every component is oriented so that the domain lies on its left. With that
//! convention the inward unit normal at a boundary point is `i * T`, where `T`
//! is the unit tangent.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{NqdError, Result};

pub type C64 = Complex<f64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Points closer than this to the boundary are rejected by [`Domain::contains`].
pub const BOUNDARY_TOL: f64 = 1e-10;

const CLOSED_PROBES: usize = 1024;
const UNBOUNDED_PROBES: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Closed,
    Unbounded,
}

/// Direction of traversal relative to the shape's own parameterization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Forward,
    Reverse,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Forward => 1.0,
            Orientation::Reverse => -1.0,
        }
    }

    fn flipped(self) -> Self {
        match self {
            Orientation::Forward => Orientation::Reverse,
            Orientation::Reverse => Orientation::Forward,
        }
    }
}

/// `y = offset + cosh_amp * cosh(x) + sum_k poly[k] * x^k`
#[derive(Clone, Debug, PartialEq)]
pub struct GraphProfile {
    pub offset: f64,
    pub cosh_amp: f64,
    pub poly: Vec<f64>,
}

impl GraphProfile {
    pub fn value(&self, x: f64) -> f64 {
        let p = self.poly.iter().rev().fold(0.0, |acc, &c| acc * x + c);
        self.offset + self.cosh_amp * x.cosh() + p
    }

    pub fn slope(&self, x: f64) -> f64 {
        let mut d = 0.0;
        for (k, &c) in self.poly.iter().enumerate().skip(1).rev() {
            d = d * x + k as f64 * c;
        }
        self.cosh_amp * x.sinh() + d
    }

    fn degree(&self) -> Option<usize> {
        self.poly.iter().rposition(|&c| c != 0.0)
    }

    /// Limits of the unit tangent of `x + i g(x)` as `x -> -inf` and `x -> +inf`.
    fn end_tangents(&self) -> (C64, C64) {
        if self.cosh_amp != 0.0 {
            let s = self.cosh_amp.signum();
            return (-s * I, s * I);
        }
        match self.degree() {
            Some(d) if d >= 2 => {
                let lead = self.poly[d].signum();
                let minus = if d % 2 == 0 { -lead } else { lead };
                (minus * I, lead * I)
            }
            _ => {
                let slope = self.poly.get(1).copied().unwrap_or(0.0);
                let t = C64::new(1.0, slope);
                let t = t / t.norm();
                (t, t)
            }
        }
    }
}

/// Closed curve interpolating equispaced samples by a trigonometric polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierCurve {
    /// `(k, c_k)` pairs of `z(t) = sum c_k e^{ikt}`.
    coeffs: Vec<(i32, C64)>,
    ccw: bool,
}

impl FourierCurve {
    pub fn from_samples(points: &[C64]) -> Result<Self> {
        let n = points.len();
        if n < 8 {
            return Err(NqdError::MalformedCurve(format!(
                "closed sample curve needs at least 8 points, got {n}"
            )));
        }
        let half = ((n - 1) / 2) as i32;
        let coeffs = (-half..=half)
            .map(|k| {
                let sum: C64 = points
                    .iter()
                    .enumerate()
                    .map(|(j, p)| p * C64::from_polar(1.0, -(k as f64) * TAU * j as f64 / n as f64))
                    .sum();
                (k, sum / n as f64)
            })
            .collect();
        // shoelace
        let area: f64 = (0..n)
            .map(|j| {
                let a = points[j];
                let b = points[(j + 1) % n];
                a.re * b.im - b.re * a.im
            })
            .sum();
        Ok(Self {
            coeffs,
            ccw: area > 0.0,
        })
    }

    /// Whether the samples run counterclockwise.
    pub fn is_ccw(&self) -> bool {
        self.ccw
    }

    fn point(&self, t: f64) -> C64 {
        self.coeffs
            .iter()
            .map(|&(k, c)| c * C64::from_polar(1.0, k as f64 * t))
            .sum()
    }

    fn deriv(&self, t: f64) -> C64 {
        self.coeffs
            .iter()
            .map(|&(k, c)| c * I * k as f64 * C64::from_polar(1.0, k as f64 * t))
            .sum()
    }
}

/// Open curve through samples: cubic Hermite inside, straight rays beyond the ends.
///
/// The parameter is centred so that the samples occupy `t in [-h, h]`,
/// `h = (n - 1) / 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteCurve {
    points: Vec<C64>,
    tangents: Vec<C64>,
}

impl HermiteCurve {
    pub fn from_samples(points: &[C64]) -> Result<Self> {
        let n = points.len();
        if n < 4 {
            return Err(NqdError::MalformedCurve(format!(
                "open sample curve needs at least 4 points, got {n}"
            )));
        }
        let tail = 4.min(n - 1);
        let dir_start = points[tail] - points[0];
        let dir_end = points[n - 1] - points[n - 1 - tail];
        if dir_start.norm() == 0.0 || dir_end.norm() == 0.0 {
            return Err(NqdError::MalformedCurve("repeated sample points at an end".into()));
        }
        let mut tangents = Vec::with_capacity(n);
        tangents.push(dir_start / dir_start.norm() * (points[1] - points[0]).norm());
        for j in 1..n - 1 {
            tangents.push((points[j + 1] - points[j - 1]) * 0.5);
        }
        tangents.push(dir_end / dir_end.norm() * (points[n - 1] - points[n - 2]).norm());
        Ok(Self {
            points: points.to_vec(),
            tangents,
        })
    }

    fn half_span(&self) -> f64 {
        (self.points.len() - 1) as f64 * 0.5
    }

    fn eval(&self, t: f64) -> (C64, C64) {
        let n = self.points.len();
        let u = t + self.half_span();
        if u <= 0.0 {
            let m = self.tangents[0];
            return (self.points[0] + m * u, m);
        }
        let last = (n - 1) as f64;
        if u >= last {
            let m = self.tangents[n - 1];
            return (self.points[n - 1] + m * (u - last), m);
        }
        let j = (u.floor() as usize).min(n - 2);
        let s = u - j as f64;
        let (p0, p1, m0, m1) = (
            self.points[j],
            self.points[j + 1],
            self.tangents[j],
            self.tangents[j + 1],
        );
        let s2 = s * s;
        let s3 = s2 * s;
        let z = p0 * (2.0 * s3 - 3.0 * s2 + 1.0)
            + m0 * (s3 - 2.0 * s2 + s)
            + p1 * (-2.0 * s3 + 3.0 * s2)
            + m1 * (s3 - s2);
        let dz = p0 * (6.0 * s2 - 6.0 * s)
            + m0 * (3.0 * s2 - 4.0 * s + 1.0)
            + p1 * (-6.0 * s2 + 6.0 * s)
            + m1 * (3.0 * s2 - 2.0 * s);
        (z, dz)
    }

    fn end_tangents(&self) -> (C64, C64) {
        let a = self.tangents[0];
        let b = self.tangents[self.tangents.len() - 1];
        (a / a.norm(), b / b.norm())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CurveShape {
    /// `c + r e^{it}`
    Circle { center: C64, radius: f64 },
    /// `c + a cos t + i b sin t`
    Ellipse { center: C64, a: f64, b: f64 },
    /// `p + t d` with `|d| = 1`
    Line { point: C64, direction: C64 },
    /// `t + i g(t)`
    Graph(GraphProfile),
    ClosedSamples(FourierCurve),
    OpenSamples(HermiteCurve),
}

impl CurveShape {
    fn kind(&self) -> CurveKind {
        match self {
            CurveShape::Circle { .. } | CurveShape::Ellipse { .. } | CurveShape::ClosedSamples(_) => {
                CurveKind::Closed
            }
            _ => CurveKind::Unbounded,
        }
    }

    fn eval(&self, t: f64) -> (C64, C64) {
        match self {
            CurveShape::Circle { center, radius } => {
                let e = C64::from_polar(1.0, t);
                (center + e * *radius, I * e * *radius)
            }
            CurveShape::Ellipse { center, a, b } => {
                let (s, c) = t.sin_cos();
                (center + C64::new(a * c, b * s), C64::new(-a * s, b * c))
            }
            CurveShape::Line { point, direction } => (point + direction * t, *direction),
            CurveShape::Graph(g) => (C64::new(t, g.value(t)), C64::new(1.0, g.slope(t))),
            CurveShape::ClosedSamples(f) => (f.point(t), f.deriv(t)),
            CurveShape::OpenSamples(h) => h.eval(t),
        }
    }

    /// Whether the interior of a closed shape lies to the left of its own parameterization.
    fn base_ccw(&self) -> bool {
        match self {
            CurveShape::ClosedSamples(f) => f.ccw,
            _ => true,
        }
    }
}

/// One smooth oriented boundary curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveComponent {
    pub shape: CurveShape,
    pub orientation: Orientation,
    /// Rigid motion `w -> rot * w + shift` applied after the shape parameterization.
    pub rot: C64,
    pub shift: C64,
    /// Parameter half-window for unbounded components; ignored for closed ones.
    pub t_max: f64,
}

impl CurveComponent {
    pub fn new(shape: CurveShape, orientation: Orientation) -> Result<Self> {
        match &shape {
            CurveShape::Circle { radius, .. } if !(*radius > 0.0) => {
                return Err(NqdError::InvalidParameter(format!("radius must be positive, got {radius}")))
            }
            CurveShape::Ellipse { a, b, .. } if !(*a > 0.0 && *b > 0.0) => {
                return Err(NqdError::InvalidParameter(format!(
                    "semi-axes must be positive, got ({a}, {b})"
                )))
            }
            CurveShape::Line { direction, .. } if direction.norm() == 0.0 => {
                return Err(NqdError::MalformedCurve("line direction is zero".into()))
            }
            _ => {}
        }
        let shape = match shape {
            CurveShape::Line { point, direction } => CurveShape::Line {
                point,
                direction: direction / direction.norm(),
            },
            s => s,
        };
        let t_max = match &shape {
            CurveShape::OpenSamples(h) => 4.0 * h.half_span(),
            CurveShape::Graph(_) => 16.0,
            _ => 100.0,
        };
        Ok(Self {
            shape,
            orientation,
            rot: C64::new(1.0, 0.0),
            shift: C64::new(0.0, 0.0),
            t_max,
        })
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn kind(&self) -> CurveKind {
        self.shape.kind()
    }

    fn to_base(&self, z: C64) -> C64 {
        (z - self.shift) / self.rot
    }

    /// `(z(t), z'(t))` in the oriented parameterization.
    pub fn eval(&self, t: f64) -> (C64, C64) {
        let s = self.orientation.sign();
        let (z, dz) = self.shape.eval(s * t);
        (self.rot * z + self.shift, self.rot * dz * s)
    }

    pub fn point(&self, t: f64) -> C64 {
        self.eval(t).0
    }

    pub fn deriv(&self, t: f64) -> C64 {
        self.eval(t).1
    }

    /// Unit tangent `z'(t) / |z'(t)|`.
    pub fn tangent_at(&self, t: f64) -> Result<C64> {
        let (z, dz) = self.eval(t);
        let speed = dz.norm();
        if !(speed > 1e-14 * z.norm().max(1.0)) || !speed.is_finite() {
            return Err(NqdError::MalformedCurve(format!(
                "degenerate derivative |z'| = {speed:e} at t = {t}"
            )));
        }
        Ok(dz / speed)
    }

    /// Inward unit normal `i T`.
    pub fn inward_normal_at(&self, t: f64) -> Result<C64> {
        Ok(I * self.tangent_at(t)?)
    }

    /// Conjugate unit tangent limits `(c_minus, c_plus)` at `t -> -inf` and `t -> +inf`.
    pub fn asymptotic_conj_tangents(&self) -> Option<(C64, C64)> {
        let (minus, plus) = match &self.shape {
            CurveShape::Line { direction, .. } => (*direction, *direction),
            CurveShape::Graph(g) => g.end_tangents(),
            CurveShape::OpenSamples(h) => h.end_tangents(),
            _ => return None,
        };
        let (tm, tp) = match self.orientation {
            Orientation::Forward => (self.rot * minus, self.rot * plus),
            Orientation::Reverse => (-self.rot * plus, -self.rot * minus),
        };
        Some((tm.conj(), tp.conj()))
    }

    /// `|conj T(t) - c_sign|` for the end that `t` heads towards.
    pub fn asymptotic_deviation(&self, t: f64) -> Option<f64> {
        let (cm, cp) = self.asymptotic_conj_tangents()?;
        let c = if t >= 0.0 { cp } else { cm };
        self.tangent_at(t).ok().map(|tt| (tt.conj() - c).norm())
    }

    /// Parameter interval covered by quadrature and distance probes.
    pub fn param_window(&self) -> (f64, f64) {
        match self.kind() {
            CurveKind::Closed => (0.0, TAU),
            CurveKind::Unbounded => (-self.t_max, self.t_max),
        }
    }

    /// Whether `z` lies strictly on the left of this component.
    pub fn left_of(&self, z: C64) -> bool {
        let w = self.to_base(z);
        let forward = self.orientation == Orientation::Forward;
        match &self.shape {
            CurveShape::Circle { center, radius } => ((w - center).norm() < *radius) == forward,
            CurveShape::Ellipse { center, a, b } => {
                let d = w - center;
                ((d.re / a).powi(2) + (d.im / b).powi(2) < 1.0) == forward
            }
            CurveShape::Line { point, direction } => {
                ((direction.conj() * (w - point)).im > 0.0) == forward
            }
            CurveShape::Graph(g) => (w.im > g.value(w.re)) == forward,
            CurveShape::ClosedSamples(f) => {
                let inside = winding_number(w, |t| f.point(t)) != 0;
                inside == (forward == self.shape.base_ccw())
            }
            CurveShape::OpenSamples(h) => {
                let (lo, hi) = (-4.0 * h.half_span(), 4.0 * h.half_span());
                let t = nearest_param(|t| h.eval(t).0, w, lo, hi, UNBOUNDED_PROBES).0;
                let (p, dp) = h.eval(t);
                ((dp.conj() * (w - p)).im > 0.0) == forward
            }
        }
    }

    pub fn reversed(&self) -> Self {
        let mut c = self.clone();
        c.orientation = self.orientation.flipped();
        c
    }

    pub fn translated(&self, by: C64) -> Self {
        let mut c = self.clone();
        c.shift += by;
        c
    }

    /// Rotation about the origin by a unimodular factor.
    pub fn rotated(&self, by: C64) -> Self {
        let u = by / by.norm();
        let mut c = self.clone();
        c.rot *= u;
        c.shift *= u;
        c
    }

    fn probe_params(&self) -> Vec<f64> {
        match self.kind() {
            CurveKind::Closed => (0..CLOSED_PROBES)
                .map(|j| TAU * j as f64 / CLOSED_PROBES as f64)
                .collect(),
            CurveKind::Unbounded => {
                let s_max = self.t_max.asinh();
                (0..UNBOUNDED_PROBES)
                    .map(|j| {
                        let s = -s_max + 2.0 * s_max * j as f64 / (UNBOUNDED_PROBES - 1) as f64;
                        s.sinh()
                    })
                    .collect()
            }
        }
    }
}

fn winding_number(p: C64, curve: impl Fn(f64) -> C64) -> i32 {
    let n = 2048;
    let mut total = 0.0;
    let mut prev = curve(0.0) - p;
    for j in 1..=n {
        let cur = curve(TAU * j as f64 / n as f64) - p;
        total += (cur / prev).arg();
        prev = cur;
    }
    (total / TAU).round() as i32
}

fn nearest_param(curve: impl Fn(f64) -> C64, p: C64, lo: f64, hi: f64, n: usize) -> (f64, f64) {
    let params: Vec<f64> = (0..n)
        .map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64)
        .collect();
    let (best, _) = params
        .iter()
        .enumerate()
        .map(|(j, &t)| (j, (curve(t) - p).norm_sqr()))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let a = params[best.saturating_sub(1)];
    let b = params[(best + 1).min(n - 1)];
    golden_min(|t| (curve(t) - p).norm(), a, b)
}

/// Golden-section minimisation on `[a, b]`; returns `(argmin, min)`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Nearest boundary point found by [`Domain::nearest_boundary`].
#[derive(Clone, Copy, Debug)]
pub struct BoundaryHit {
    pub component: usize,
    pub t: f64,
    pub point: C64,
    pub dist: f64,
}

#[derive(Clone, Debug)]
struct ProbeSet {
    params: Vec<f64>,
    points: Vec<C64>,
}

/// A domain with finitely many boundary components, each oriented with the domain on its left.
#[derive(Clone, Debug)]
pub struct Domain {
    components: Vec<CurveComponent>,
    basepoint: C64,
    probes: Vec<ProbeSet>,
    name: String,
}

impl Domain {
    pub fn new(components: Vec<CurveComponent>, basepoint: C64) -> Result<Self> {
        Self::named("custom", components, basepoint)
    }

    pub fn named(name: &str, components: Vec<CurveComponent>, basepoint: C64) -> Result<Self> {
        if components.is_empty() {
            return Err(NqdError::InvalidDomain("no boundary components".into()));
        }
        for (j, c) in components.iter().enumerate() {
            if c.kind() == CurveKind::Unbounded && !(c.t_max > 0.0) {
                return Err(NqdError::InvalidDomain(format!("component {j}: t_max must be positive")));
            }
            if c.kind() == CurveKind::Closed && c.orientation == Orientation::Forward && c.shape.base_ccw()
                || c.kind() == CurveKind::Closed
                    && c.orientation == Orientation::Reverse
                    && !c.shape.base_ccw()
            {
                return Err(NqdError::InvalidDomain(format!(
                    "component {j} encloses the domain; a domain of this kind must be unbounded"
                )));
            }
        }
        let probes = components
            .iter()
            .map(|c| {
                let params = c.probe_params();
                let points = params.iter().map(|&t| c.point(t)).collect();
                ProbeSet { params, points }
            })
            .collect::<Vec<_>>();
        for (j, c) in components.iter().enumerate() {
            for &t in probes[j].params.iter().step_by(16) {
                c.tangent_at(t)
                    .map_err(|e| NqdError::InvalidDomain(format!("component {j}: {e}")))?;
            }
        }
        // every boundary point must lie on the domain side of every other component
        for a in 0..components.len() {
            for b in 0..components.len() {
                if a == b {
                    continue;
                }
                if let Some(p) = probes[b].points.iter().step_by(4).find(|&&p| !components[a].left_of(p)) {
                    return Err(NqdError::InvalidDomain(format!(
                        "component {b} crosses or lies outside component {a} near {p}"
                    )));
                }
            }
        }
        let d = Self {
            components,
            basepoint,
            probes,
            name: name.to_string(),
        };
        match d.contains(basepoint) {
            Ok(true) => Ok(d),
            Ok(false) => Err(NqdError::InvalidDomain(format!(
                "basepoint {basepoint} is not in the domain"
            ))),
            Err(e) => Err(NqdError::InvalidDomain(format!("basepoint: {e}"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn components(&self) -> &[CurveComponent] {
        &self.components
    }

    pub fn basepoint(&self) -> C64 {
        self.basepoint
    }

    pub fn has_unbounded_boundary(&self) -> bool {
        self.components.iter().any(|c| c.kind() == CurveKind::Unbounded)
    }

    /// Nearest boundary point over all components (within the parameter windows).
    pub fn nearest_boundary(&self, z: C64) -> BoundaryHit {
        let mut best: Option<BoundaryHit> = None;
        for (j, c) in self.components.iter().enumerate() {
            let probes = &self.probes[j];
            let (k, _) = probes
                .points
                .iter()
                .enumerate()
                .map(|(k, p)| (k, (p - z).norm_sqr()))
                .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
            let n = probes.params.len();
            let (lo, hi) = match c.kind() {
                CurveKind::Closed => {
                    let step = TAU / n as f64;
                    (probes.params[k] - step, probes.params[k] + step)
                }
                CurveKind::Unbounded => (probes.params[k.saturating_sub(1)], probes.params[(k + 1).min(n - 1)]),
            };
            let (t, dist) = golden_min(|t| (c.point(t) - z).norm(), lo, hi);
            if best.map_or(true, |b| dist < b.dist) {
                best = Some(BoundaryHit {
                    component: j,
                    t,
                    point: c.point(t),
                    dist,
                });
            }
        }
        best.expect("domain has at least one component")
    }

    pub fn distance_to_boundary(&self, z: C64) -> f64 {
        self.nearest_boundary(z).dist
    }

    /// Membership test; points within [`BOUNDARY_TOL`] of the boundary are ambiguous.
    pub fn contains(&self, z: C64) -> Result<bool> {
        let dist = self.distance_to_boundary(z);
        if dist < BOUNDARY_TOL * (1.0 + z.norm()) {
            return Err(NqdError::AmbiguousPoint {
                re: z.re,
                im: z.im,
                tol: BOUNDARY_TOL,
            });
        }
        Ok(self.contains_unchecked(z))
    }

    /// Membership without the boundary-distance guard.
    pub fn contains_unchecked(&self, z: C64) -> bool {
        self.components.iter().all(|c| c.left_of(z))
    }

    pub fn translated(&self, by: C64) -> Result<Self> {
        Self::named(
            &self.name,
            self.components.iter().map(|c| c.translated(by)).collect(),
            self.basepoint + by,
        )
    }

    pub fn rotated(&self, by: C64) -> Result<Self> {
        let u = by / by.norm();
        Self::named(
            &self.name,
            self.components.iter().map(|c| c.rotated(u)).collect(),
            self.basepoint * u,
        )
    }

    /// Same domain with every unbounded component truncated at `t_max`.
    pub fn with_t_max(&self, t_max: f64) -> Result<Self> {
        Self::named(
            &self.name,
            self.components
                .iter()
                .map(|c| match c.kind() {
                    CurveKind::Unbounded => c.clone().with_t_max(t_max),
                    CurveKind::Closed => c.clone(),
                })
                .collect(),
            self.basepoint,
        )
    }
}

/// One entry of the built-in catalog.
#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub params: &'static str,
    pub classification: &'static str,
    pub region: &'static str,
}

pub const HHP_REGION: &str = "{ x+iy : -pi/2 - cosh x < y < pi/2 + cosh x }";

pub fn catalog_entries() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "disk-exterior",
            params: "r > 0 (default 1)",
            classification: "arclength NQD; the only one with compact boundary",
            region: "{ |z| > r }",
        },
        CatalogEntry {
            name: "halfplane",
            params: "none",
            classification: "arclength NQD; the only one with exactly one unbounded boundary component",
            region: "{ Im z > 0 }",
        },
        CatalogEntry {
            name: "hhp",
            params: "none",
            classification: "arclength NQD; the simply connected case with two unbounded boundary components \
                             (multiply connected case with two unbounded components remains open)",
            region: HHP_REGION,
        },
        CatalogEntry {
            name: "ellipse-exterior",
            params: "a, b > 0 (default 2, 1)",
            classification: "negative control: area NQD but not an arclength NQD unless a = b",
            region: "{ (x/a)^2 + (y/b)^2 > 1 }",
        },
    ]
}

/// Build a catalog domain. `spec` is either a bare name or `name:p1,p2`.
pub fn catalog(spec: &str) -> Result<Domain> {
    let (name, params) = match spec.split_once(':') {
        Some((n, p)) => {
            let vals = p
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| NqdError::InvalidParameter(format!("bad catalog parameter `{s}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            (n, vals)
        }
        None => (spec, Vec::new()),
    };
    catalog_with(name, &params)
}

pub fn catalog_with(name: &str, params: &[f64]) -> Result<Domain> {
    let zero = C64::new(0.0, 0.0);
    match name {
        "disk-exterior" => {
            let r = params.first().copied().unwrap_or(1.0);
            let c = CurveComponent::new(
                CurveShape::Circle {
                    center: zero,
                    radius: r,
                },
                Orientation::Reverse,
            )?;
            Domain::named(name, vec![c], C64::new(3.0 * r, 0.0))
        }
        "halfplane" => {
            let c = CurveComponent::new(
                CurveShape::Line {
                    point: zero,
                    direction: C64::new(1.0, 0.0),
                },
                Orientation::Forward,
            )?;
            Domain::named(name, vec![c], I)
        }
        "hhp" => {
            let lower = CurveComponent::new(
                CurveShape::Graph(GraphProfile {
                    offset: -FRAC_PI_2,
                    cosh_amp: -1.0,
                    poly: vec![],
                }),
                Orientation::Forward,
            )?;
            let upper = CurveComponent::new(
                CurveShape::Graph(GraphProfile {
                    offset: FRAC_PI_2,
                    cosh_amp: 1.0,
                    poly: vec![],
                }),
                Orientation::Reverse,
            )?;
            Domain::named(name, vec![lower, upper], zero)
        }
        "ellipse-exterior" => {
            let a = params.first().copied().unwrap_or(2.0);
            let b = params.get(1).copied().unwrap_or(1.0);
            let c = CurveComponent::new(CurveShape::Ellipse { center: zero, a, b }, Orientation::Reverse)?;
            Domain::named(name, vec![c], C64::new(2.0 * a.max(b), 0.0))
        }
        _ => Err(NqdError::UnknownCatalog(name.to_string())),
    }
}

/// `pi/2 + cosh x`, the half-width of the HHP domain at abscissa `x`.
pub fn hhp_half_width(x: f64) -> f64 {
    FRAC_PI_2 + x.cosh()
}

/// Preimage `w` in the strip `|Im w| < pi/2` of a point of the HHP domain
/// under `w -> w + sinh w`, by Newton continuation along the real axis and
/// then vertically.
pub fn hhp_strip_preimage(z: C64) -> Option<C64> {
    if z.im.abs() >= hhp_half_width(z.re) {
        return None;
    }
    let newton = |mut w: C64, target: C64| -> Option<C64> {
        for _ in 0..50 {
            let step = (w + w.sinh() - target) / (1.0 + w.cosh());
            w -= step;
            if step.norm() < 1e-15 * (1.0 + w.norm()) {
                return Some(w);
            }
        }
        ((w + w.sinh() - target).norm() < 1e-10 * (1.0 + target.norm())).then_some(w)
    };
    let steps = 400;
    let mut w = C64::new(0.0, 0.0);
    for k in 1..=steps {
        let target = C64::new(z.re * k as f64 / steps as f64, 0.0);
        w = newton(w, target)?;
    }
    for k in 1..=steps {
        let target = C64::new(z.re, z.im * k as f64 / steps as f64);
        w = newton(w, target)?;
    }
    (w.im.abs() < FRAC_PI_2).then_some(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hhp_preimage_inverts_the_map() {
        for z in [c(0.0, 0.0), c(1.0, 2.0), c(-3.0, -9.5), c(6.0, 150.0)] {
            let w = hhp_strip_preimage(z).unwrap();
            assert!((w + w.sinh() - z).norm() < 1e-9 * (1.0 + z.norm()));
        }
        assert!(hhp_strip_preimage(c(0.0, 3.0)).is_none());
    }

    #[test]
    fn clockwise_circle_tangent_and_normal() {
        let d = catalog("disk-exterior").unwrap();
        let comp = &d.components()[0];
        assert!((comp.point(0.0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((comp.tangent_at(0.0).unwrap() - c(0.0, -1.0)).norm() < 1e-15);
        assert!((comp.inward_normal_at(0.0).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn line_tangent_and_normal() {
        let d = catalog("halfplane").unwrap();
        let comp = &d.components()[0];
        for t in [-30.0, 0.0, 7.5] {
            assert!((comp.tangent_at(t).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
            assert!((comp.inward_normal_at(t).unwrap() - I).norm() < 1e-15);
        }
    }

    #[test]
    fn hhp_graph_tangent_at_origin() {
        // The forward graph of pi/2 + cosh x has z'(0) = 1 + i sinh 0 = 1.
        let raw = CurveComponent::new(
            CurveShape::Graph(GraphProfile {
                offset: FRAC_PI_2,
                cosh_amp: 1.0,
                poly: vec![],
            }),
            Orientation::Forward,
        )
        .unwrap();
        assert!((raw.tangent_at(0.0).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        // In the catalog the upper curve runs right to left so the domain is on its left.
        let d = catalog("hhp").unwrap();
        let upper = &d.components()[1];
        assert!((upper.tangent_at(0.0).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((upper.inward_normal_at(0.0).unwrap() - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn degenerate_derivative_is_rejected() {
        let g = CurveComponent::new(
            CurveShape::Line {
                point: c(0.0, 0.0),
                direction: c(1.0, 0.0),
            },
            Orientation::Forward,
        )
        .unwrap();
        let mut bad = g.clone();
        bad.rot = c(0.0, 0.0);
        assert!(matches!(bad.tangent_at(0.0), Err(NqdError::MalformedCurve(_))));
        assert!(CurveComponent::new(
            CurveShape::Line {
                point: c(0.0, 0.0),
                direction: c(0.0, 0.0)
            },
            Orientation::Forward
        )
        .is_err());
    }

    #[test]
    fn catalog_membership() {
        let disk = catalog("disk-exterior").unwrap();
        assert_eq!(disk.basepoint(), c(3.0, 0.0));
        assert!(disk.contains(c(2.0, 0.0)).unwrap());
        assert!(!disk.contains(c(0.5, 0.0)).unwrap());

        let hhp = catalog("hhp").unwrap();
        assert!(hhp.contains(c(0.0, 0.0)).unwrap());
        assert!(!hhp.contains(c(0.0, 4.0)).unwrap());
        assert!(hhp.contains(c(0.0, 2.5)).unwrap());
        assert!(!hhp.contains(c(0.0, -2.6)).unwrap());

        let hp = catalog("halfplane").unwrap();
        assert!(hp.contains(I).unwrap());
        assert!(!hp.contains(-I).unwrap());
        assert!(hp.contains(c(10.0, 0.001)).unwrap());
    }

    #[test]
    fn boundary_points_are_ambiguous() {
        let disk = catalog("disk-exterior").unwrap();
        assert!(matches!(
            disk.contains(c(1.0, 0.0)),
            Err(NqdError::AmbiguousPoint { .. })
        ));
    }

    #[test]
    fn catalog_errors() {
        assert!(matches!(catalog("annulus"), Err(NqdError::UnknownCatalog(_))));
        assert!(catalog("disk-exterior:-1").is_err());
        assert!(catalog("ellipse-exterior:2,0").is_err());
        assert!(catalog("disk-exterior:abc").is_err());
    }

    #[test]
    fn bounded_domains_are_rejected() {
        let inner = CurveComponent::new(
            CurveShape::Circle {
                center: c(0.0, 0.0),
                radius: 1.0,
            },
            Orientation::Forward,
        )
        .unwrap();
        assert!(matches!(
            Domain::new(vec![inner], c(0.0, 0.0)),
            Err(NqdError::InvalidDomain(_))
        ));
    }

    #[test]
    fn basepoint_must_be_inside() {
        let hole = CurveComponent::new(
            CurveShape::Circle {
                center: c(0.0, 0.0),
                radius: 1.0,
            },
            Orientation::Reverse,
        )
        .unwrap();
        assert!(Domain::new(vec![hole], c(0.2, 0.0)).is_err());
    }

    #[test]
    fn intersecting_components_are_rejected() {
        let a = CurveComponent::new(
            CurveShape::Circle {
                center: c(0.0, 0.0),
                radius: 1.0,
            },
            Orientation::Reverse,
        )
        .unwrap();
        let b = CurveComponent::new(
            CurveShape::Circle {
                center: c(1.5, 0.0),
                radius: 1.0,
            },
            Orientation::Reverse,
        )
        .unwrap();
        assert!(Domain::new(vec![a, b], c(5.0, 0.0)).is_err());
    }

    #[test]
    fn hhp_boundary_matches_region_formula() {
        let d = catalog("hhp").unwrap();
        for comp in d.components() {
            for j in 0..=200 {
                let t = -10.0 + 0.1 * j as f64;
                let z = comp.point(t);
                let resid = (z.im.abs() - hhp_half_width(z.re)).abs();
                assert!(resid <= 1e-12 * (1.0 + z.im.abs()), "t = {t}, resid {resid}");
            }
        }
    }

    #[test]
    fn hhp_asymptotics() {
        let d = catalog("hhp").unwrap();
        let (lm, lp) = d.components()[0].asymptotic_conj_tangents().unwrap();
        let (um, up) = d.components()[1].asymptotic_conj_tangents().unwrap();
        // conj T limits: +i towards the right end of the domain, -i towards the left end
        assert!((lp - I).norm() < 1e-15 && (um - I).norm() < 1e-15);
        assert!((lm + I).norm() < 1e-15 && (up + I).norm() < 1e-15);
        // monotone approach
        let devs: Vec<f64> = (1..12)
            .map(|k| d.components()[0].asymptotic_deviation(k as f64).unwrap())
            .collect();
        assert!(devs.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn normals_point_into_domain() {
        for name in ["disk-exterior", "halfplane", "hhp", "ellipse-exterior"] {
            let d = catalog(name).unwrap();
            for comp in d.components() {
                let (lo, hi) = comp.param_window();
                let (lo, hi) = (lo.max(-5.0), hi.min(5.0));
                for j in 0..64 {
                    let t = lo + (hi - lo) * (j as f64 + 0.5) / 64.0;
                    let z = comp.point(t);
                    let n = comp.inward_normal_at(t).unwrap();
                    let eps = 1e-3;
                    assert!(d.contains(z + n * eps).unwrap(), "{name} t={t}");
                    assert!(!d.contains(z - n * eps).unwrap(), "{name} t={t}");
                }
            }
        }
    }

    #[test]
    fn ellipse_normal_at_rightmost_point() {
        let d = catalog("ellipse-exterior:2,1").unwrap();
        let comp = &d.components()[0];
        let n = comp.inward_normal_at(0.0).unwrap();
        assert!((comp.point(0.0) - c(2.0, 0.0)).norm() < 1e-15);
        assert!((n - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn sampled_curves_match_analytic_ones() {
        let pts: Vec<C64> = (0..64)
            .map(|j| C64::from_polar(2.0, -TAU * j as f64 / 64.0))
            .collect();
        let f = FourierCurve::from_samples(&pts).unwrap();
        assert!(!f.ccw);
        let comp = CurveComponent::new(CurveShape::ClosedSamples(f), Orientation::Forward).unwrap();
        let d = Domain::new(vec![comp], c(3.0, 0.0)).unwrap();
        assert!(d.contains(c(0.0, 2.5)).unwrap());
        assert!(!d.contains(c(0.0, 1.5)).unwrap());
        assert!((d.distance_to_boundary(c(0.0, 3.0)) - 1.0).abs() < 1e-12);

        let line: Vec<C64> = (0..41).map(|j| c(j as f64 - 20.0, 0.0)).collect();
        let h = HermiteCurve::from_samples(&line).unwrap();
        let comp = CurveComponent::new(CurveShape::OpenSamples(h), Orientation::Forward).unwrap();
        let (cm, cp) = comp.asymptotic_conj_tangents().unwrap();
        assert!((cm - 1.0).norm() < 1e-15 && (cp - 1.0).norm() < 1e-15);
        let d = Domain::new(vec![comp], I).unwrap();
        assert!(d.contains(c(3.0, 0.5)).unwrap());
        assert!(!d.contains(c(-3.0, -0.5)).unwrap());
        assert!(d.contains(c(100.0, 0.5)).unwrap());
    }

    #[test]
    fn distance_to_circle() {
        let d = catalog("disk-exterior").unwrap();
        for z in [c(3.0, 0.0), c(-1.5, 2.0), c(0.1, 1.01)] {
            assert!((d.distance_to_boundary(z) - (z.norm() - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn rigid_motions_preserve_membership() {
        let d = catalog("hhp").unwrap();
        let shift = c(2.0, -1.0);
        let rot = C64::from_polar(1.0, 0.7);
        let moved = d.translated(shift).unwrap().rotated(rot).unwrap();
        for z in [c(0.0, 0.0), c(0.0, 3.0), c(2.0, 4.0), c(-1.0, -2.0)] {
            assert_eq!(
                d.contains(z).unwrap(),
                moved.contains((z + shift) * rot).unwrap()
            );
        }
    }
}
