//! Growth and positivity diagnostics for harmonic candidates: the linear
//! growth ratio, tract widths on circles, Phragmen-Lindelof lower bounds, the
//! three-tract certificate and the Heins functional.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{NqdError, Result};
use crate::geometry::C64;
use crate::quadrature::adaptive_gk;
use crate::roof::RoofCandidate;

/// Minimum angular resolution for tract sampling.
pub const MIN_ANGULAR: usize = 1024;
pub const DEFAULT_ANGULAR: usize = 4096;

/// A real function on (part of) the plane; `None` off its domain.
pub trait HarmonicSampler: Sync {
    fn value(&self, z: C64) -> Option<f64>;

    /// Values at the angles `2 pi k / m` on `|z| = t`.
    fn circle(&self, t: f64, m: usize) -> Vec<Option<f64>> {
        (0..m).map(|k| self.value(C64::from_polar(t, TAU * k as f64 / m as f64))).collect()
    }
}

impl<F> HarmonicSampler for F
where
    F: Fn(C64) -> Option<f64> + Sync,
{
    fn value(&self, z: C64) -> Option<f64> {
        self(z)
    }
}

impl HarmonicSampler for RoofCandidate {
    fn value(&self, z: C64) -> Option<f64> {
        self.eval_u(z).ok()
    }

    /// Chains `f` increments between neighbouring angles instead of
    /// integrating from an anchor at every sample.
    fn circle(&self, t: f64, m: usize) -> Vec<Option<f64>> {
        let mut out = Vec::with_capacity(m);
        let mut prev: Option<(C64, C64)> = None;
        for k in 0..m {
            let z = C64::from_polar(t, TAU * k as f64 / m as f64);
            let f = if self.domain().contains_unchecked(z) {
                prev.and_then(|(p, fp)| self.f_increment(p, z).ok().map(|d| fp + d))
                    .or_else(|| self.f(z).ok())
            } else {
                None
            };
            prev = f.map(|f| (z, f));
            out.push(f.map(|f| f.re + self.c()));
        }
        out
    }
}

/// Memoizes whole circles of another sampler.
pub struct CircleCache<'a> {
    inner: &'a dyn HarmonicSampler,
    memo: Mutex<HashMap<(u64, usize), Vec<Option<f64>>>>,
}

impl<'a> CircleCache<'a> {
    pub fn new(inner: &'a dyn HarmonicSampler) -> Self {
        Self {
            inner,
            memo: Mutex::new(HashMap::new()),
        }
    }
}

impl HarmonicSampler for CircleCache<'_> {
    fn value(&self, z: C64) -> Option<f64> {
        self.inner.value(z)
    }

    fn circle(&self, t: f64, m: usize) -> Vec<Option<f64>> {
        let key = (t.to_bits(), m);
        if let Some(v) = self.memo.lock().expect("cache lock").get(&key) {
            return v.clone();
        }
        let v = self.inner.circle(t, m);
        self.memo.lock().expect("cache lock").insert(key, v.clone());
        v
    }
}

/// Geometric schedule of `n` radii from `r0` to `r1`.
pub fn geometric_radii(r0: f64, r1: f64, n: usize) -> Result<Vec<f64>> {
    if !(r0 > 0.0 && r1 >= r0) || n == 0 {
        return Err(NqdError::InvalidParameter(format!("bad radius schedule {r0}:{r1}:{n}")));
    }
    if n == 1 {
        return Ok(vec![r0]);
    }
    let q = (r1 / r0).ln() / (n - 1) as f64;
    Ok((0..n).map(|k| r0 * (q * k as f64).exp()).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub t: f64,
    pub max_abs_u: f64,
    pub ratio: f64,
    pub samples: usize,
    /// `(|z - z*| sup|grad u| + |u(z*)|) / t` maximized on the circle.
    pub constructive_ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
    pub max_ratio: f64,
    pub limit: f64,
    pub passed: bool,
    pub sup_grad: Option<f64>,
}

impl GrowthTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,max_abs_u,ratio,samples,constructive_ratio\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.t,
                r.max_abs_u,
                r.ratio,
                r.samples,
                r.constructive_ratio.map_or(String::new(), |v| v.to_string())
            );
        }
        s
    }
}

/// Table of `max_{|z| = t} |u| / t`; passes when every ratio is at most `limit`.
pub fn growth_ratio(s: &dyn HarmonicSampler, radii: &[f64], m: usize, limit: f64) -> Result<GrowthTable> {
    growth_table(s, radii, m, limit, None)
}

/// Growth table of a roof candidate, including the constructive bound
/// `|u(z)| <= |z - z0| sup|grad u| + |u(z0)|` with the sup over anchor nodes
/// and boundary values (`|grad u| = 1` there).
pub fn growth_ratio_roof(r: &RoofCandidate, radii: &[f64], m: usize, limit: f64) -> Result<GrowthTable> {
    let sup = r
        .grid()
        .points
        .par_iter()
        .zip(&r.grid().f)
        .filter(|(_, f)| f.is_some())
        .map(|(z, _)| r.h(*z).norm())
        .reduce(|| 1.0, f64::max);
    let z0 = r.domain().basepoint();
    let u0 = r.eval_u(z0)?;
    growth_table(r, radii, m, limit, Some((sup, z0, u0)))
}

fn growth_table(
    s: &dyn HarmonicSampler,
    radii: &[f64],
    m: usize,
    limit: f64,
    bound: Option<(f64, C64, f64)>,
) -> Result<GrowthTable> {
    if radii.iter().any(|t| !(*t > 0.0)) || m == 0 {
        return Err(NqdError::InvalidParameter("radii must be positive and m >= 1".into()));
    }
    let rows: Vec<GrowthRow> = radii
        .par_iter()
        .map(|&t| {
            let vals = s.circle(t, m);
            let inside: Vec<(usize, f64)> = vals.iter().enumerate().filter_map(|(k, v)| v.map(|v| (k, v))).collect();
            let max_abs_u = inside.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
            let constructive_ratio = bound.map(|(sup, z0, u0)| {
                inside
                    .iter()
                    .map(|(k, _)| (C64::from_polar(t, TAU * *k as f64 / m as f64) - z0).norm() * sup + u0.abs())
                    .fold(0.0, f64::max)
                    / t
            });
            GrowthRow {
                t,
                max_abs_u,
                ratio: max_abs_u / t,
                samples: inside.len(),
                constructive_ratio,
            }
        })
        .collect();
    if rows.iter().all(|r| r.samples == 0) {
        return Err(NqdError::InvalidInput("no radius of the schedule meets the domain".into()));
    }
    let max_ratio = rows.iter().filter(|r| r.samples > 0).map(|r| r.ratio).fold(0.0, f64::max);
    Ok(GrowthTable {
        rows,
        max_ratio,
        limit,
        passed: max_ratio <= limit,
        sup_grad: bound.map(|b| b.0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "level", rename_all = "lowercase")]
pub enum Predicate {
    /// `u < 0`
    Negative,
    /// `u < level`
    Below(f64),
    /// `u > level`
    Above(f64),
}

impl Predicate {
    /// Signed margin: positive where the predicate holds.
    fn margin(self, u: f64) -> f64 {
        match self {
            Predicate::Negative => -u,
            Predicate::Below(level) => level - u,
            Predicate::Above(level) => u - level,
        }
    }
}

/// An angular run on `|z| = t` where the predicate holds.
#[derive(Clone, Debug, Serialize)]
pub struct Tract {
    /// Start angle in `[0, 2 pi)`; `end > start`, possibly past `2 pi` when wrapping.
    pub start: f64,
    pub end: f64,
    /// Arclength `t (end - start)`.
    pub theta: f64,
    pub max_abs: f64,
}

impl Tract {
    fn overlap(&self, other: &Tract) -> f64 {
        let mut best = 0.0f64;
        for shift in [-TAU, 0.0, TAU] {
            let lo = self.start.max(other.start + shift);
            let hi = self.end.min(other.end + shift);
            best = best.max(hi - lo);
        }
        best
    }
}

/// Angular runs of the predicate on `|z| = t`, ends located by linear
/// interpolation of the crossing (half a step where the circle leaves the domain).
pub fn tract_lengths(s: &dyn HarmonicSampler, t: f64, pred: Predicate, m: usize) -> Result<Vec<Tract>> {
    if !(t > 0.0) {
        return Err(NqdError::InvalidParameter(format!("radius must be positive, got {t}")));
    }
    if m < MIN_ANGULAR {
        return Err(NqdError::InvalidParameter(format!("angular resolution {m} below {MIN_ANGULAR}")));
    }
    Ok(runs(&s.circle(t, m), t, pred))
}

fn runs(vals: &[Option<f64>], t: f64, pred: Predicate) -> Vec<Tract> {
    let m = vals.len();
    let dth = TAU / m as f64;
    let margin: Vec<Option<f64>> = vals.iter().map(|v| v.map(|u| pred.margin(u))).collect();
    let on = |k: usize| margin[k % m].is_some_and(|g| g > 0.0);
    if (0..m).all(on) {
        let max_abs = vals.iter().flatten().map(|u| u.abs()).fold(0.0, f64::max);
        return vec![Tract {
            start: 0.0,
            end: TAU,
            theta: TAU * t,
            max_abs,
        }];
    }
    let first_off = (0..m).find(|&k| !on(k)).expect("some sample is off");
    let mut out = Vec::new();
    let mut k = first_off;
    while k < first_off + m {
        if !on(k) {
            k += 1;
            continue;
        }
        let a = k;
        while on(k + 1) && k + 1 < first_off + m {
            k += 1;
        }
        let b = k;
        // fraction of a step by which the run extends past a sample
        let ext = |inside: usize, outside: usize| match (margin[inside % m], margin[outside % m]) {
            (Some(gi), Some(go)) => gi / (gi - go),
            _ => 0.5,
        };
        let start = (a as f64 - ext(a, a + m - 1)) * dth;
        let end = (b as f64 + ext(b, b + 1)) * dth;
        let max_abs = (a..=b).filter_map(|j| vals[j % m]).map(|u| u.abs()).fold(0.0, f64::max);
        let start_wrapped = start.rem_euclid(TAU);
        out.push(Tract {
            start: start_wrapped,
            end: start_wrapped + (end - start),
            theta: t * (end - start),
            max_abs,
        });
        k += 1;
    }
    out.sort_by(|x, y| x.start.partial_cmp(&y.start).unwrap());
    out
}

/// `pi * int_1^r dt / theta(t)` by the trapezoid rule over the samples in `[1, r]`.
pub fn pl_lower_bound(table: &[(f64, f64)], r: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = table.iter().copied().filter(|(t, _)| *t >= 1.0 && *t <= r * (1.0 + 1e-12)).collect();
    for w in pts.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(NqdError::InvalidInput("radii must increase".into()));
        }
    }
    if let Some((t, _)) = pts.iter().find(|(_, th)| !(*th > 0.0)) {
        return Err(NqdError::TractPinch(*t));
    }
    Ok(PI * pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (1.0 / w[0].1 + 1.0 / w[1].1)).sum::<f64>() + 0.0)
}

/// `pi * int_1^r dt / theta(t)` for a width given in closed form.
pub fn pl_integral(theta: impl Fn(f64) -> f64, r: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(NqdError::InvalidParameter(format!("upper radius {r} below 1")));
    }
    let v = adaptive_gk(|t| C64::new(1.0 / theta(t), 0.0), 1.0, r, 1e-14, 8).re;
    if !v.is_finite() {
        return Err(NqdError::TractPinch(f64::NAN));
    }
    Ok(PI * v)
}

/// `(pi sum 1/theta_k, n^2 / (2t))`: the Cauchy-Schwarz step, equality iff the widths agree.
pub fn cauchy_schwarz_bound(thetas: &[f64], t: f64) -> (f64, f64) {
    let n = thetas.len() as f64;
    (PI * thetas.iter().map(|th| 1.0 / th).sum::<f64>(), n * n / (2.0 * t))
}

#[derive(Clone, Debug, Serialize)]
pub struct TractRow {
    pub t: f64,
    pub tract_id: usize,
    pub theta: f64,
    pub start: f64,
    pub end: f64,
    /// Running `max |u|` over the tract up to radius `t`.
    pub mk: f64,
    pub pl_bound: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TractReport {
    pub predicate: Predicate,
    pub radii: Vec<f64>,
    pub m: usize,
    pub rows: Vec<TractRow>,
    /// Running `max |u|` over all samples up to each radius.
    pub m_global: Vec<f64>,
    /// `sum_k theta_k(t) <= 2 pi t (1 + 1/m)` at every radius.
    pub width_sum_ok: bool,
    pub warnings: Vec<String>,
}

impl TractReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,tract_id,theta,Mk,pl_bound\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.t,
                r.tract_id,
                r.theta,
                r.mk,
                r.pl_bound.map_or(String::new(), |v| v.to_string())
            );
        }
        s
    }

    pub fn tract_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.rows.iter().map(|r| r.tract_id).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// `(t, theta)` samples of one tract.
    pub fn widths(&self, id: usize) -> Vec<(f64, f64)> {
        self.rows.iter().filter(|r| r.tract_id == id).map(|r| (r.t, r.theta)).collect()
    }

    fn last_row(&self, id: usize) -> Option<&TractRow> {
        self.rows.iter().rev().find(|r| r.tract_id == id)
    }
}

/// Tracts on every radius, labelled across radii by angular overlap.
pub fn tract_report(s: &dyn HarmonicSampler, radii: &[f64], pred: Predicate, m: usize) -> Result<TractReport> {
    for w in radii.windows(2) {
        if !(w[1] > w[0]) {
            return Err(NqdError::InvalidParameter("radii must increase".into()));
        }
    }
    if m < MIN_ANGULAR {
        return Err(NqdError::InvalidParameter(format!("angular resolution {m} below {MIN_ANGULAR}")));
    }
    if radii.first().is_some_and(|t| !(*t > 0.0)) {
        return Err(NqdError::InvalidParameter("radii must be positive".into()));
    }
    let circles: Vec<Vec<Option<f64>>> = radii.par_iter().map(|&t| s.circle(t, m)).collect();
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    let mut m_global = Vec::with_capacity(radii.len());
    let mut running = 0.0f64;
    let mut width_sum_ok = true;
    let mut prev: Vec<(usize, Tract)> = Vec::new();
    let mut next_id = 0;
    let mut mk: BTreeMap<usize, f64> = BTreeMap::new();
    let mut history: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for (&t, vals) in radii.iter().zip(&circles) {
        running = running.max(vals.iter().flatten().map(|u| u.abs()).fold(0.0, f64::max));
        m_global.push(running);
        let tracts = runs(vals, t, pred);
        if tracts.iter().map(|x| x.theta).sum::<f64>() > TAU * t * (1.0 + 1.0 / m as f64) + 1e-12 {
            width_sum_ok = false;
        }
        let mut labelled: Vec<(usize, Tract)> = Vec::new();
        let mut claimed: BTreeMap<usize, f64> = BTreeMap::new();
        let mut matches: Vec<Option<(usize, f64)>> = tracts
            .iter()
            .map(|tr| {
                prev.iter()
                    .map(|(id, p)| (*id, tr.overlap(p)))
                    .filter(|(_, o)| *o > 0.0)
                    .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            })
            .collect();
        for mt in matches.iter().flatten() {
            let e = claimed.entry(mt.0).or_insert(0.0);
            *e = e.max(mt.1);
        }
        for (tr, mt) in tracts.into_iter().zip(matches.iter_mut()) {
            let id = match *mt {
                Some((id, o)) if claimed.get(&id) == Some(&o) => {
                    claimed.insert(id, f64::INFINITY);
                    id
                }
                Some((id, _)) => {
                    warnings.push(format!("tract {id} splits at t = {t}"));
                    next_id += 1;
                    next_id - 1
                }
                None => {
                    next_id += 1;
                    next_id - 1
                }
            };
            labelled.push((id, tr));
        }
        for (id, _) in &prev {
            if !labelled.iter().any(|(j, _)| j == id) {
                warnings.push(format!("tract {id} ends before t = {t}"));
            }
        }
        for (id, tr) in &labelled {
            let e = mk.entry(*id).or_insert(0.0);
            *e = e.max(tr.max_abs);
            let h = history.entry(*id).or_default();
            h.push((t, tr.theta));
            rows.push(TractRow {
                t,
                tract_id: *id,
                theta: tr.theta,
                start: tr.start,
                end: tr.end,
                mk: *e,
                pl_bound: if t >= 1.0 { pl_lower_bound(h, t).ok() } else { None },
            });
        }
        prev = labelled;
    }
    Ok(TractReport {
        predicate: pred,
        radii: radii.to_vec(),
        m,
        rows,
        m_global,
        width_sum_ok,
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum CertificateVerdict {
    /// No negative sample on any circle.
    PositiveOnGrid,
    /// A negative tract plus two super-level tracts force `log M(r)` to grow
    /// at least like `slope * log r`, `slope >= 3/2`.
    Contradiction { slope: f64 },
    Inconclusive { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateRow {
    pub t: f64,
    pub log_m: f64,
    /// `(1/3) sum_k pi int_1^t dt / theta_k + C`
    pub bound: f64,
    pub cauchy_schwarz: Option<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub verdict: CertificateVerdict,
    pub level: f64,
    pub tracts: Vec<usize>,
    pub fitted_constant: f64,
    pub rows: Vec<CertificateRow>,
    pub negative: TractReport,
    pub positive: Option<TractReport>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.verdict == CertificateVerdict::PositiveOnGrid
    }
}

/// Searches for a tract of `u < -slack` and, if one exists, assembles the three
/// tracts of the growth argument (the negative tract and the two widest
/// persistent tracts of `u > level`) and evaluates the bound chain.
pub fn three_tract_certificate(
    s: &dyn HarmonicSampler,
    radii: &[f64],
    level: f64,
    slack: f64,
    m: usize,
) -> Result<Certificate> {
    let negative = tract_report(s, radii, Predicate::Below(-slack), m)?;
    let mut cert = Certificate {
        verdict: CertificateVerdict::PositiveOnGrid,
        level,
        tracts: Vec::new(),
        fitted_constant: 0.0,
        rows: Vec::new(),
        negative,
        positive: None,
    };
    if cert.negative.rows.is_empty() {
        return Ok(cert);
    }
    let r_last = *radii.last().expect("non-empty");
    let persistent = |rep: &TractReport| -> Vec<usize> {
        let mut ids: Vec<(usize, f64)> = rep
            .tract_ids()
            .into_iter()
            .filter_map(|id| rep.last_row(id).filter(|r| r.t == r_last).map(|r| (id, r.theta)))
            .collect();
        ids.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        ids.into_iter().map(|x| x.0).collect()
    };
    let neg_ids = persistent(&cert.negative);
    let positive = tract_report(s, radii, Predicate::Above(level), m)?;
    let pos_ids = persistent(&positive);
    cert.positive = Some(positive);
    if neg_ids.is_empty() || pos_ids.len() < 2 {
        cert.verdict = CertificateVerdict::Inconclusive {
            reason: format!(
                "found {} persistent negative and {} persistent super-level tracts",
                neg_ids.len(),
                pos_ids.len()
            ),
        };
        return Ok(cert);
    }
    let positive = cert.positive.as_ref().expect("set above");
    let widths = [
        cert.negative.widths(neg_ids[0]),
        positive.widths(pos_ids[0]),
        positive.widths(pos_ids[1]),
    ];
    cert.tracts = vec![neg_ids[0], pos_ids[0], pos_ids[1]];
    let mut pts = Vec::new();
    for (i, &t) in radii.iter().enumerate() {
        if t < 1.0 {
            continue;
        }
        let mut sum = 0.0;
        let mut ths = Vec::new();
        for w in &widths {
            match pl_lower_bound(w, t) {
                Ok(b) => sum += b,
                Err(_) => {
                    cert.verdict = CertificateVerdict::Inconclusive {
                        reason: format!("tract pinches before t = {t}"),
                    };
                    return Ok(cert);
                }
            }
            if let Some((_, th)) = w.iter().find(|(tt, _)| *tt == t) {
                ths.push(*th);
            }
        }
        let log_m = cert.negative.m_global[i].max(f64::MIN_POSITIVE).ln();
        cert.rows.push(CertificateRow {
            t,
            log_m,
            bound: sum / 3.0,
            cauchy_schwarz: (ths.len() == 3).then(|| cauchy_schwarz_bound(&ths, t)),
        });
        pts.push((t.ln(), sum / 3.0));
    }
    if pts.len() < 2 {
        cert.verdict = CertificateVerdict::Inconclusive {
            reason: "fewer than two radii at or above 1".into(),
        };
        return Ok(cert);
    }
    let c = cert.rows[0].log_m - cert.rows[0].bound;
    cert.fitted_constant = c;
    for r in &mut cert.rows {
        r.bound += c;
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    cert.verdict = if slope >= 1.5 - 1e-9 {
        CertificateVerdict::Contradiction { slope }
    } else {
        CertificateVerdict::Inconclusive {
            reason: format!("bound grows like {slope:.3} log r, below 3/2"),
        }
    };
    Ok(cert)
}

#[derive(Clone, Debug, Serialize)]
pub struct HeinsRow {
    pub r: f64,
    pub value: f64,
}

/// `r^{-n/2} (sum_k int_0^{2 pi} u_k(r e^{i theta})^2 d theta)^{1/2}` for
/// non-negative, non-constant samplers with pairwise minimum zero.
/// Samples off a sampler's domain count as zero.
pub fn heins_functional(samplers: &[&dyn HarmonicSampler], radii: &[f64], m: usize) -> Result<Vec<HeinsRow>> {
    if samplers.is_empty() || m == 0 {
        return Err(NqdError::InvalidInput("need at least one sampler and one angle".into()));
    }
    let n = samplers.len();
    let tol = 1e-12;
    let mut out = Vec::with_capacity(radii.len());
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); n];
    let mut rows = Vec::new();
    for &r in radii {
        if !(r > 0.0) {
            return Err(NqdError::InvalidParameter(format!("radius must be positive, got {r}")));
        }
        let vals: Vec<Vec<f64>> = samplers
            .iter()
            .map(|s| s.circle(r, m).into_iter().map(|v| v.unwrap_or(0.0)).collect())
            .collect();
        for (k, v) in vals.iter().enumerate() {
            if let Some((i, u)) = v.iter().enumerate().find(|(_, u)| **u < -tol) {
                return Err(NqdError::InvalidInput(format!(
                    "sampler {k} is negative ({u:e}) at {}",
                    C64::from_polar(r, TAU * i as f64 / m as f64)
                )));
            }
            for u in v {
                ranges[k].0 = ranges[k].0.min(*u);
                ranges[k].1 = ranges[k].1.max(*u);
            }
        }
        for j in 0..n {
            for k in j + 1..n {
                if let Some(i) = (0..m).find(|&i| vals[j][i].min(vals[k][i]) > tol) {
                    return Err(NqdError::InvalidInput(format!(
                        "samplers {j} and {k} are both positive at {}",
                        C64::from_polar(r, TAU * i as f64 / m as f64)
                    )));
                }
            }
        }
        let sum: f64 = vals.iter().map(|v| v.iter().map(|u| u * u).sum::<f64>() * TAU / m as f64).sum();
        rows.push((r, sum));
    }
    if let Some(k) = ranges.iter().position(|(lo, hi)| hi - lo <= tol) {
        return Err(NqdError::InvalidInput(format!("sampler {k} is constant on the sample set")));
    }
    for (r, sum) in rows {
        out.push(HeinsRow {
            r,
            value: r.powf(-(n as f64) / 2.0) * sum.sqrt(),
        });
    }
    Ok(out)
}
