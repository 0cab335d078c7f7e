//! Path integration of `h` inside the domain.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cauchy::CauchyEvaluator;
use crate::error::{NqdError, Result};
use crate::geometry::{Domain, C64};
use crate::quadrature::gauss_legendre;

const SEGMENT_ORDER: usize = 10;
const MAX_STEPS: usize = 20_000;

/// Distance below which a point counts as sitting on the boundary.
pub fn boundary_floor(z: C64) -> f64 {
    1e-9 * (1.0 + z.norm())
}

/// Integrates `h dz` along straight segments, stepping half the local
/// boundary distance at a time so the walk never leaves the domain.
pub struct Walker<'a> {
    pub domain: &'a Domain,
    pub evaluator: &'a CauchyEvaluator,
    gl: (Vec<f64>, Vec<f64>),
}

impl<'a> Walker<'a> {
    pub fn new(domain: &'a Domain, evaluator: &'a CauchyEvaluator) -> Self {
        Self {
            domain,
            evaluator,
            gl: gauss_legendre(SEGMENT_ORDER),
        }
    }

    fn piece(&self, p: C64, q: C64) -> C64 {
        let mid = 0.5 * (p + q);
        let half = 0.5 * (q - p);
        let (x, w) = &self.gl;
        let s: C64 = x.iter().zip(w).map(|(x, w)| self.evaluator.h(mid + half * x) * w).sum();
        s * half
    }

    /// `int_a^b h(zeta) dzeta` along the segment `[a, b]`.
    pub fn segment(&self, a: C64, b: C64) -> Result<C64> {
        if self.domain.distance_to_boundary(b) < boundary_floor(b) {
            return Err(NqdError::Pathing(format!("segment end {b} lies on the boundary")));
        }
        let mut p = a;
        let mut total = C64::new(0.0, 0.0);
        for _ in 0..MAX_STEPS {
            let rest = b - p;
            if rest.norm() == 0.0 {
                return Ok(total);
            }
            let d = self.domain.distance_to_boundary(p);
            if d < boundary_floor(p) {
                return Err(NqdError::Pathing(format!(
                    "segment {a} -> {b} meets the boundary near {p}"
                )));
            }
            let q = if rest.norm() <= 0.5 * d { b } else { p + rest * (0.5 * d / rest.norm()) };
            total += self.piece(p, q);
            p = q;
        }
        Err(NqdError::Pathing(format!("segment {a} -> {b} did not terminate")))
    }
}

/// Square grid of path anchors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub center: [f64; 2],
    pub half_width: f64,
    pub spacing: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            center: [0.0, 0.0],
            half_width: 6.0,
            spacing: 0.25,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.spacing > 0.0 && self.half_width > 0.0) || !self.spacing.is_finite() {
            return Err(NqdError::Config("grid needs positive spacing and half-width".into()));
        }
        if self.half_width / self.spacing > 2000.0 {
            return Err(NqdError::Config("grid is too fine for its extent".into()));
        }
        Ok(())
    }

    /// Nodes per side.
    pub fn side(&self) -> usize {
        (2.0 * self.half_width / self.spacing).round() as usize + 1
    }

    /// Row-major grid points, bottom row first.
    pub fn points(&self) -> Vec<C64> {
        let n = self.side();
        let c = C64::new(self.center[0], self.center[1]);
        (0..n * n)
            .map(|k| {
                let (ix, iy) = (k % n, k / n);
                c + C64::new(
                    -self.half_width + ix as f64 * self.spacing,
                    -self.half_width + iy as f64 * self.spacing,
                )
            })
            .collect()
    }
}

/// Values of `f` on a breadth-first spanning tree of admissible grid nodes.
#[derive(Clone, Debug)]
pub struct PathGrid {
    pub spec: GridSpec,
    pub points: Vec<C64>,
    pub f: Vec<Option<C64>>,
}

impl PathGrid {
    pub fn build(walker: &Walker, z0: C64, spec: &GridSpec) -> Result<Self> {
        spec.validate()?;
        let points = spec.points();
        let n = spec.side();
        let d = walker.domain;
        let valid: Vec<bool> = points
            .par_iter()
            .map(|&z| {
                d.contains_unchecked(z)
                    && d.distance_to_boundary(z) >= (0.6 * spec.spacing).max(walker.evaluator.collar_width(z))
            })
            .collect();
        let mut f = vec![None; points.len()];
        let mut candidates: Vec<usize> = (0..points.len()).filter(|&k| valid[k]).collect();
        candidates.sort_by(|&a, &b| (points[a] - z0).norm().partial_cmp(&(points[b] - z0).norm()).unwrap());
        let root = candidates
            .iter()
            .take(16)
            .find_map(|&k| walker.segment(z0, points[k]).ok().map(|v| (k, v)));
        let Some((root, root_int)) = root else {
            return Ok(Self {
                spec: spec.clone(),
                points,
                f,
            });
        };
        let mut parent = vec![usize::MAX; points.len()];
        let mut order = vec![root];
        let mut queue = VecDeque::from([root]);
        parent[root] = root;
        while let Some(k) = queue.pop_front() {
            let (ix, iy) = (k % n, k / n);
            let mut nb = Vec::with_capacity(4);
            if ix > 0 {
                nb.push(k - 1);
            }
            if ix + 1 < n {
                nb.push(k + 1);
            }
            if iy > 0 {
                nb.push(k - n);
            }
            if iy + 1 < n {
                nb.push(k + n);
            }
            for j in nb {
                if valid[j] && parent[j] == usize::MAX {
                    parent[j] = k;
                    order.push(j);
                    queue.push_back(j);
                }
            }
        }
        let edges: Vec<Option<C64>> = order[1..]
            .par_iter()
            .map(|&k| walker.segment(points[parent[k]], points[k]).ok())
            .collect();
        f[root] = Some(-C64::i() * root_int);
        for (&k, e) in order[1..].iter().zip(edges) {
            f[k] = match (f[parent[k]], e) {
                (Some(fp), Some(e)) => Some(fp - C64::i() * e),
                _ => None,
            };
        }
        Ok(Self {
            spec: spec.clone(),
            points,
            f,
        })
    }

    pub fn reachable(&self) -> usize {
        self.f.iter().filter(|v| v.is_some()).count()
    }

    /// Reachable nodes ordered by distance to `z`.
    pub fn nearest(&self, z: C64, count: usize) -> Vec<(C64, C64)> {
        let mut v: Vec<(f64, C64, C64)> = self
            .points
            .iter()
            .zip(&self.f)
            .filter_map(|(&p, f)| f.map(|f| ((p - z).norm_sqr(), p, f)))
            .collect();
        let count = count.min(v.len());
        if count == 0 {
            return Vec::new();
        }
        v.select_nth_unstable_by(count - 1, |a, b| a.0.partial_cmp(&b.0).unwrap());
        v.truncate(count);
        v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        v.into_iter().map(|(_, p, f)| (p, f)).collect()
    }
}
