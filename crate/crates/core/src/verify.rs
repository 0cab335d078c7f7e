//! Residual test of the arclength null-quadrature identity `int g ds = 0`.
//!
//! The admissible class is replaced by a finite dictionary of rational
//! functions `(z - a)^{-k}` with poles off the closure of the domain. Passing
//! is therefore a necessary condition only.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{NqdError, Result};
use crate::geometry::{Domain, C64};
use crate::quadrature::{integrate_ds, refine_until, BoundaryFunction, QuadSettings, QuadratureRule, T_SCHEDULE};

/// `g(z) = (z - pole)^{-order}`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub pole: C64,
    pub order: u32,
}

impl TestFunction {
    pub fn new(pole: C64, order: u32) -> Self {
        Self { pole, order }
    }
}

impl BoundaryFunction for TestFunction {
    fn eval(&self, z: C64) -> C64 {
        (z - self.pole).powi(-(self.order as i32))
    }

    fn tail_primitive(&self, z: C64) -> Option<C64> {
        if self.order < 2 {
            return None;
        }
        let m = 1 - self.order as i32;
        Some((z - self.pole).powi(m) / m as f64)
    }
}

/// Quadrature controls shared by the residual computations.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    #[serde(rename = "N")]
    pub settings: QuadSettings,
    #[serde(rename = "T_schedule")]
    pub t_schedule: Vec<f64>,
    /// Convergence tolerance of the refinement loop.
    pub tol: f64,
    pub max_nodes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            settings: QuadSettings::default(),
            t_schedule: T_SCHEDULE.to_vec(),
            tol: 1e-9,
            max_nodes: 8192,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub reason: String,
    /// Increments of `int |g| ds` between consecutive truncations.
    pub tail_increments: Vec<f64>,
}

/// Decides whether `g` is a usable stand-in for an `E^1` function on `d`.
pub fn e1_admissible(d: &Domain, g: &TestFunction, quad: &QuadratureConfig) -> Result<Admissibility> {
    let reject = |reason: String| Admissibility {
        admissible: false,
        reason,
        tail_increments: Vec::new(),
    };
    if g.order == 0 {
        return Ok(reject("order must be at least 1".into()));
    }
    match d.contains(g.pole) {
        Err(_) => return Ok(reject(format!("pole {} lies on the boundary", g.pole))),
        Ok(true) => return Ok(reject(format!("pole {} lies inside the domain", g.pole))),
        Ok(false) => {}
    }
    if !d.has_unbounded_boundary() {
        return Ok(Admissibility {
            admissible: true,
            reason: "pole off the closure; compact boundary".into(),
            tail_increments: Vec::new(),
        });
    }
    let modulus = |z: C64| C64::new(g.eval(z).norm(), 0.0);
    let mut masses = Vec::with_capacity(quad.t_schedule.len());
    for &t in &quad.t_schedule {
        let dt = d.with_t_max(t)?;
        let rule = QuadratureRule::new(&dt, quad.settings)?;
        masses.push(integrate_ds(&dt, &modulus, &rule)?.re);
    }
    let increments: Vec<f64> = masses.windows(2).map(|w| w[1] - w[0]).collect();
    let decreasing = increments
        .windows(2)
        .all(|w| w[1] <= 0.75 * w[0] || w[1].abs() < 1e-12);
    let (admissible, reason) = if g.order < 2 {
        (
            false,
            "order 1 is not integrable along an unbounded boundary component".to_string(),
        )
    } else if !decreasing {
        (false, "tail of int |g| ds does not decay along the truncation schedule".to_string())
    } else {
        (true, "pole off the closure; tail decays".to_string())
    };
    Ok(Admissibility {
        admissible,
        reason,
        tail_increments: increments,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Residual {
    pub value: C64,
    pub error_estimate: f64,
    pub converged: bool,
    pub nodes: usize,
    pub t_max: f64,
}

/// Refined value of `int_{boundary} g ds` (no admissibility check).
pub fn nqd_residual_unchecked(d: &Domain, g: &TestFunction, quad: &QuadratureConfig) -> Result<Residual> {
    let schedule: Vec<f64> = if d.has_unbounded_boundary() {
        quad.t_schedule.clone()
    } else {
        vec![0.0]
    };
    let r = refine_until(
        |s, t| {
            let dt = if d.has_unbounded_boundary() {
                d.with_t_max(t)?
            } else {
                d.clone()
            };
            let rule = QuadratureRule::new(&dt, s)?;
            integrate_ds(&dt, g, &rule)
        },
        quad.tol,
        quad.settings,
        quad.max_nodes,
        &schedule,
    )?;
    Ok(Residual {
        value: r.value,
        error_estimate: r.error_estimate,
        converged: r.converged,
        nodes: r.settings.total_scale(),
        t_max: r.t_max,
    })
}

/// Refined value of `int_{boundary} g ds` for an admissible `g`.
pub fn nqd_residual(d: &Domain, g: &TestFunction, quad: &QuadratureConfig) -> Result<Residual> {
    let adm = e1_admissible(d, g, quad)?;
    if !adm.admissible {
        return Err(NqdError::Inadmissible(adm.reason));
    }
    nqd_residual_unchecked(d, g, quad)
}

/// Grid dictionary of poles in the complement.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct DictionarySpec {
    pub center: [f64; 2],
    pub half_width: f64,
    pub spacing: f64,
    /// Minimum distance of a pole from the boundary.
    pub standoff: f64,
    pub orders: Vec<u32>,
    pub max_poles: usize,
}

impl Default for DictionarySpec {
    fn default() -> Self {
        Self {
            center: [0.0, 0.0],
            half_width: 3.0,
            spacing: 0.25,
            standoff: 0.5,
            orders: vec![2, 3],
            max_poles: 48,
        }
    }
}

const MIN_POLES: usize = 8;

fn grid_poles(d: &Domain, c: C64, half: f64, spec: &DictionarySpec) -> Vec<C64> {
    let n = (2.0 * half / spec.spacing).round() as i64;
    let mut poles = Vec::new();
    for iy in 0..=n {
        for ix in 0..=n {
            let p = c + C64::new(-half + ix as f64 * spec.spacing, -half + iy as f64 * spec.spacing);
            if !d.contains_unchecked(p) && d.distance_to_boundary(p) >= spec.standoff {
                poles.push(p);
            }
        }
    }
    poles
}

/// Poles on a grid of the complement at least `standoff` away from the boundary.
///
/// The box is doubled (up to three times) while it holds fewer than eight poles.
pub fn default_dictionary(d: &Domain, spec: &DictionarySpec) -> Result<Vec<TestFunction>> {
    if !(spec.spacing > 0.0) || !(spec.half_width > 0.0) {
        return Err(NqdError::Config("dictionary grid needs positive spacing and width".into()));
    }
    let c = C64::new(spec.center[0], spec.center[1]);
    let mut poles = Vec::new();
    let mut half = spec.half_width;
    // widen the box (at fixed spacing) until the complement is sampled
    for _ in 0..4 {
        poles = grid_poles(d, c, half, spec);
        if poles.len() >= MIN_POLES.min(spec.max_poles.max(1)) {
            break;
        }
        half *= 2.0;
    }
    if poles.len() > spec.max_poles && spec.max_poles > 0 {
        let m = poles.len();
        poles = (0..spec.max_poles)
            .map(|i| poles[i * m / spec.max_poles])
            .collect();
    }
    Ok(poles
        .into_iter()
        .flat_map(|p| spec.orders.iter().map(move |&k| TestFunction::new(p, k)))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Unconverged,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Unconverged => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualRow {
    pub index: usize,
    pub pole: C64,
    pub order: u32,
    pub admissible: bool,
    pub reason: String,
    pub residual: Option<C64>,
    pub abs_residual: Option<f64>,
    pub error_estimate: Option<f64>,
    pub converged: bool,
    pub nodes: usize,
    pub t_max: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub domain: String,
    pub tol: f64,
    pub rows: Vec<ResidualRow>,
    pub max_abs_residual: f64,
    pub max_error_estimate: f64,
    pub verdict: Verdict,
    pub note: &'static str,
}

impl VerificationReport {
    /// Row with the largest residual magnitude.
    pub fn worst(&self) -> Option<&ResidualRow> {
        self.rows
            .iter()
            .filter(|r| r.abs_residual.is_some())
            .max_by(|a, b| a.abs_residual.partial_cmp(&b.abs_residual).unwrap())
    }
}

/// Evaluates every admissible dictionary member and aggregates a verdict.
pub fn verify_nqd(
    d: &Domain,
    dictionary: &[TestFunction],
    tol: f64,
    quad: &QuadratureConfig,
) -> Result<VerificationReport> {
    if !(tol > 0.0) {
        return Err(NqdError::Config(format!("tolerance must be positive, got {tol}")));
    }
    let rows = dictionary
        .par_iter()
        .enumerate()
        .map(|(index, g)| -> Result<ResidualRow> {
            let adm = e1_admissible(d, g, quad)?;
            if !adm.admissible {
                return Ok(ResidualRow {
                    index,
                    pole: g.pole,
                    order: g.order,
                    admissible: false,
                    reason: adm.reason,
                    residual: None,
                    abs_residual: None,
                    error_estimate: None,
                    converged: false,
                    nodes: 0,
                    t_max: 0.0,
                });
            }
            let r = nqd_residual_unchecked(d, g, quad)?;
            Ok(ResidualRow {
                index,
                pole: g.pole,
                order: g.order,
                admissible: true,
                reason: adm.reason,
                residual: Some(r.value),
                abs_residual: Some(r.value.norm()),
                error_estimate: Some(r.error_estimate),
                converged: r.converged,
                nodes: r.nodes,
                t_max: r.t_max,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let admitted: Vec<&ResidualRow> = rows.iter().filter(|r| r.admissible).collect();
    if admitted.is_empty() {
        return Err(NqdError::Config("dictionary has no admissible test functions".into()));
    }
    let max_abs = admitted
        .iter()
        .filter_map(|r| r.abs_residual)
        .fold(0.0, f64::max);
    let max_err = admitted
        .iter()
        .filter_map(|r| r.error_estimate)
        .filter(|e| e.is_finite())
        .fold(0.0, f64::max);
    let failing = admitted.iter().any(|r| {
        let err = r.error_estimate.filter(|e| e.is_finite()).unwrap_or(0.0);
        (r.abs_residual.unwrap_or(0.0) - err).max(0.0) >= tol
    });
    let verdict = if failing {
        Verdict::Fail
    } else if admitted.iter().any(|r| !r.converged) {
        Verdict::Unconverged
    } else {
        Verdict::Pass
    };
    Ok(VerificationReport {
        domain: d.name().to_string(),
        tol,
        rows,
        max_abs_residual: max_abs,
        max_error_estimate: max_err,
        verdict,
        note: "finite rational dictionary: passing is a necessary condition only",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{catalog, I};

    fn quad() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn halfplane_admissibility() {
        let d = catalog("halfplane").unwrap();
        let a = e1_admissible(&d, &TestFunction::new(-I, 2), &quad()).unwrap();
        assert!(a.admissible, "{}", a.reason);
        let a = e1_admissible(&d, &TestFunction::new(-I, 1), &quad()).unwrap();
        assert!(!a.admissible);
        // log-divergence: increments stay near 2 log 2
        for inc in &a.tail_increments {
            assert!((inc - 2.0 * 2f64.ln()).abs() < 1e-2, "{inc}");
        }
        let a = e1_admissible(&d, &TestFunction::new(I, 2), &quad()).unwrap();
        assert!(!a.admissible);
        let a = e1_admissible(&d, &TestFunction::new(C64::new(0.0, 0.0), 2), &quad()).unwrap();
        assert!(!a.admissible);
    }

    #[test]
    fn compact_boundary_allows_simple_poles() {
        let d = catalog("disk-exterior").unwrap();
        let a = e1_admissible(&d, &TestFunction::new(C64::new(0.3, 0.0), 1), &quad()).unwrap();
        assert!(a.admissible);
    }

    #[test]
    fn disk_residuals_vanish() {
        let d = catalog("disk-exterior").unwrap();
        for (a, k) in [(C64::new(0.0, 0.0), 2), (C64::new(0.3, 0.0), 2), (C64::new(0.3, 0.0), 1)] {
            let r = nqd_residual(&d, &TestFunction::new(a, k), &quad()).unwrap();
            assert!(r.value.norm() < 1e-10, "{a} {k}: {}", r.value);
            assert!(r.converged);
        }
    }

    #[test]
    fn inadmissible_residual_is_an_error() {
        let d = catalog("halfplane").unwrap();
        let e = nqd_residual(&d, &TestFunction::new(-I, 1), &quad()).unwrap_err();
        assert!(matches!(e, NqdError::Inadmissible(_)));
    }

    #[test]
    fn dictionaries_respect_standoff() {
        for name in ["disk-exterior", "halfplane", "hhp", "ellipse-exterior"] {
            let d = catalog(name).unwrap();
            let dict = default_dictionary(&d, &DictionarySpec::default()).unwrap();
            assert!(!dict.is_empty(), "{name}");
            for g in &dict {
                assert!(!d.contains_unchecked(g.pole));
                assert!(d.distance_to_boundary(g.pole) >= 0.5);
            }
        }
        let d = catalog("disk-exterior").unwrap();
        assert!(default_dictionary(&d, &DictionarySpec::default()).unwrap().len() >= 20);
    }

    #[test]
    fn verify_catalog_positives() {
        for (name, tol) in [("disk-exterior", 1e-8), ("halfplane", 1e-6), ("hhp", 1e-4)] {
            let d = catalog(name).unwrap();
            let dict = default_dictionary(&d, &DictionarySpec::default()).unwrap();
            let rep = verify_nqd(&d, &dict, tol, &quad()).unwrap();
            assert_eq!(rep.verdict, Verdict::Pass, "{name}: max {}", rep.max_abs_residual);
        }
    }

    #[test]
    fn ellipse_fails() {
        let d = catalog("ellipse-exterior:2,1").unwrap();
        let dict = default_dictionary(&d, &DictionarySpec::default()).unwrap();
        let rep = verify_nqd(&d, &dict, 1e-3, &quad()).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);
        assert!(rep.max_abs_residual > 1e-3);
    }

    #[test]
    fn empty_dictionary_is_a_config_error() {
        let d = catalog("halfplane").unwrap();
        let e = verify_nqd(&d, &[TestFunction::new(-I, 1)], 1e-6, &quad()).unwrap_err();
        assert!(matches!(e, NqdError::Config(_)));
    }
}
