//! Domain files and run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{NqdError, Result};
use crate::geometry::{
    catalog, CurveComponent, CurveKind, CurveShape, Domain, FourierCurve, GraphProfile, HermiteCurve, Orientation, C64,
};
use crate::growth::{geometric_radii, MIN_ANGULAR};
use crate::roof::{RoofCheckConfig, RoofConfig};
use crate::verify::{DictionarySpec, QuadratureConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrientationSpec {
    /// Closed: counterclockwise. Unbounded: same as `forward`.
    Ccw,
    /// Closed: clockwise. Unbounded: same as `reverse`.
    Cw,
    Forward,
    Reverse,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "lowercase", deny_unknown_fields)]
pub enum ShapeSpec {
    Circle {
        center: [f64; 2],
        radius: f64,
    },
    Ellipse {
        center: [f64; 2],
        a: f64,
        b: f64,
    },
    Line {
        point: [f64; 2],
        direction: [f64; 2],
    },
    /// `y = offset + cosh_amp cosh(x) + sum_k poly[k] x^k`
    Graph {
        #[serde(default)]
        offset: f64,
        #[serde(default)]
        cosh_amp: f64,
        #[serde(default)]
        poly: Vec<f64>,
    },
    Samples {
        points: Vec<[f64; 2]>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub kind: CurveKind,
    #[serde(flatten)]
    pub shape: ShapeSpec,
    pub orientation: OrientationSpec,
    #[serde(default)]
    pub t_max: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub components: Vec<ComponentSpec>,
    pub basepoint: [f64; 2],
}

fn c(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

impl ComponentSpec {
    pub fn build(&self, index: usize) -> Result<CurveComponent> {
        let bad = |msg: String| NqdError::InvalidDomain(format!("component {index}: {msg}"));
        let shape = match &self.shape {
            ShapeSpec::Circle { center, radius } => CurveShape::Circle {
                center: c(*center),
                radius: *radius,
            },
            ShapeSpec::Ellipse { center, a, b } => CurveShape::Ellipse {
                center: c(*center),
                a: *a,
                b: *b,
            },
            ShapeSpec::Line { point, direction } => CurveShape::Line {
                point: c(*point),
                direction: c(*direction),
            },
            ShapeSpec::Graph { offset, cosh_amp, poly } => CurveShape::Graph(GraphProfile {
                offset: *offset,
                cosh_amp: *cosh_amp,
                poly: poly.clone(),
            }),
            ShapeSpec::Samples { points } => {
                let pts: Vec<C64> = points.iter().map(|p| c(*p)).collect();
                match self.kind {
                    CurveKind::Closed => CurveShape::ClosedSamples(FourierCurve::from_samples(&pts)?),
                    CurveKind::Unbounded => CurveShape::OpenSamples(HermiteCurve::from_samples(&pts)?),
                }
            }
        };
        let natural = match &self.shape {
            ShapeSpec::Circle { .. } | ShapeSpec::Ellipse { .. } => CurveKind::Closed,
            ShapeSpec::Line { .. } | ShapeSpec::Graph { .. } => CurveKind::Unbounded,
            ShapeSpec::Samples { .. } => self.kind,
        };
        if natural != self.kind {
            return Err(bad(format!("shape is {natural:?}, declared {:?}", self.kind)));
        }
        let orientation = match (self.kind, self.orientation) {
            (_, OrientationSpec::Forward) => Orientation::Forward,
            (_, OrientationSpec::Reverse) => Orientation::Reverse,
            (CurveKind::Unbounded, OrientationSpec::Ccw) => Orientation::Forward,
            (CurveKind::Unbounded, OrientationSpec::Cw) => Orientation::Reverse,
            (CurveKind::Closed, o) => {
                let base_ccw = match &shape {
                    CurveShape::ClosedSamples(f) => f.is_ccw(),
                    _ => true,
                };
                if (o == OrientationSpec::Ccw) == base_ccw {
                    Orientation::Forward
                } else {
                    Orientation::Reverse
                }
            }
        };
        let comp = CurveComponent::new(shape, orientation).map_err(|e| bad(e.to_string()))?;
        Ok(match self.t_max {
            Some(t) if !(t > 0.0) => return Err(bad(format!("t_max must be positive, got {t}"))),
            Some(t) => comp.with_t_max(t),
            None => comp,
        })
    }
}

impl DomainSpec {
    pub fn build(&self) -> Result<Domain> {
        let comps = self.components.iter().enumerate().map(|(j, s)| s.build(j)).collect::<Result<Vec<_>>>()?;
        Domain::named(self.name.as_deref().unwrap_or("custom"), comps, c(self.basepoint))
    }
}

pub fn parse_domain_json(text: &str) -> Result<Domain> {
    serde_json::from_str::<DomainSpec>(text)?.build()
}

/// A catalog name (`name` or `name:p1,p2`) or a path to a domain JSON file.
pub fn load_domain(source: &str) -> Result<Domain> {
    let path = Path::new(source);
    if path.extension().is_some_and(|e| e == "json") || path.is_file() {
        return parse_domain_json(&std::fs::read_to_string(path)?);
    }
    catalog(source)
}

/// `r0:r1:n`, geometric spacing. Serialized as that string.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RadiiSpec {
    pub r0: f64,
    pub r1: f64,
    pub n: usize,
}

impl RadiiSpec {
    pub fn radii(&self) -> Result<Vec<f64>> {
        geometric_radii(self.r0, self.r1, self.n)
    }
}

impl std::str::FromStr for RadiiSpec {
    type Err = NqdError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || NqdError::InvalidParameter(format!("radii must look like r0:r1:n, got `{s}`"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let spec = RadiiSpec {
            r0: parts[0].trim().parse().map_err(|_| bad())?,
            r1: parts[1].trim().parse().map_err(|_| bad())?,
            n: parts[2].trim().parse().map_err(|_| bad())?,
        };
        spec.radii()?;
        Ok(spec)
    }
}

impl TryFrom<String> for RadiiSpec {
    type Error = NqdError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<RadiiSpec> for String {
    fn from(r: RadiiSpec) -> String {
        format!("{}:{}:{}", r.r0, r.r1, r.n)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Verification tolerance; also the roof-check tolerance unless `check.tol` is set.
    pub tol: f64,
    pub quadrature: QuadratureConfig,
    pub dictionary: DictionarySpec,
    pub roof: RoofConfig,
    pub check: Option<RoofCheckConfig>,
    pub growth_radii: RadiiSpec,
    pub growth_limit: f64,
    pub tract_radii: RadiiSpec,
    pub angular: usize,
    /// Seed of the random probe points.
    pub seed: u64,
    pub probes: usize,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            quadrature: QuadratureConfig::default(),
            dictionary: DictionarySpec::default(),
            roof: RoofConfig::default(),
            check: None,
            growth_radii: RadiiSpec { r0: 2.0, r1: 20.0, n: 8 },
            growth_limit: 2.0,
            tract_radii: RadiiSpec { r0: 1.0, r1: 20.0, n: 16 },
            angular: MIN_ANGULAR,
            seed: 7,
            probes: 20,
            out_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn check_config(&self) -> RoofCheckConfig {
        self.check.clone().unwrap_or_else(|| RoofCheckConfig {
            tol: self.tol,
            dictionary: self.dictionary.clone(),
            ..RoofCheckConfig::default()
        })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tol", self.tol),
            ("quadrature.tol", self.quadrature.tol),
            ("growth_limit", self.growth_limit),
            ("dictionary.spacing", self.dictionary.spacing),
            ("check.tol", self.check_config().tol),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > 0.0)) {
            return Err(NqdError::Config(format!("{name} must be positive, got {v}")));
        }
        self.roof.grid.validate()?;
        self.growth_radii.radii()?;
        self.tract_radii.radii()?;
        if self.angular < MIN_ANGULAR {
            return Err(NqdError::Config(format!("angular must be at least {MIN_ANGULAR}")));
        }
        Ok(())
    }
}
