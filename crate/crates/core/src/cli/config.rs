use std::path::PathBuf;

use serde::Deserialize;

use crate::expr::Expr;
use crate::flows::FlowKind;
use crate::surface::{fixture, ChartDomain, Family, FinslerSurface, SymmetricField, FIXTURE_NAMES};
use crate::verify::Tolerances;

use super::CliError;

/// A number or an expression in `x1, x2, y1, y2`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ExprText {
    Number(f64),
    Text(String),
}

impl ExprText {
    fn parse(&self, what: &str) -> Result<Expr, CliError> {
        match self {
            ExprText::Number(v) => Ok(Expr::constant(*v)),
            ExprText::Text(s) => Expr::parse(s).map_err(|e| CliError::Config(format!("{what}: {e}"))),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixConfig {
    pub a11: ExprText,
    #[serde(default = "zero_text")]
    pub a12: ExprText,
    pub a22: ExprText,
}

fn zero_text() -> ExprText {
    ExprText::Number(0.0)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum CustomSurface {
    Riemannian {
        name: Option<String>,
        chart: ChartDomain,
        a: MatrixConfig,
    },
    Randers {
        name: Option<String>,
        chart: ChartDomain,
        a: Option<MatrixConfig>,
        b: [ExprText; 2],
    },
    Minkowski {
        name: Option<String>,
        chart: ChartDomain,
        norm: ExprText,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SurfaceConfig {
    Fixture(String),
    Custom(CustomSurface),
}

fn symmetric(m: &MatrixConfig) -> Result<SymmetricField, CliError> {
    Ok(SymmetricField {
        a11: m.a11.parse("a11")?,
        a12: m.a12.parse("a12")?,
        a22: m.a22.parse("a22")?,
    })
}

fn check_chart(chart: &ChartDomain) -> Result<(), CliError> {
    let ok = match chart {
        ChartDomain::Rect { x1, x2 } => x1[0] < x1[1] && x2[0] < x2[1] && x1.iter().chain(x2).all(|v| v.is_finite()),
        ChartDomain::Disk { center, radius } => {
            *radius > 0.0 && radius.is_finite() && center.iter().all(|v| v.is_finite())
        }
    };
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!("degenerate chart domain {chart:?}")))
    }
}

impl SurfaceConfig {
    pub fn build(&self) -> Result<FinslerSurface, CliError> {
        let (name, chart, family) = match self {
            SurfaceConfig::Fixture(name) => {
                return fixture(name).ok_or_else(|| {
                    CliError::Config(format!(
                        "unknown fixture {name:?}; expected one of {}",
                        FIXTURE_NAMES.join(", ")
                    ))
                })
            }
            SurfaceConfig::Custom(CustomSurface::Riemannian { name, chart, a }) => {
                (name, chart, Family::Riemannian { a: symmetric(a)? })
            }
            SurfaceConfig::Custom(CustomSurface::Randers { name, chart, a, b }) => (
                name,
                chart,
                Family::Randers {
                    a: a.as_ref()
                        .map(symmetric)
                        .transpose()?
                        .unwrap_or_else(SymmetricField::identity),
                    b: [b[0].parse("b1")?, b[1].parse("b2")?],
                },
            ),
            SurfaceConfig::Custom(CustomSurface::Minkowski { name, chart, norm }) => (
                name,
                chart,
                Family::Minkowski {
                    norm: norm.parse("norm")?,
                },
            ),
        };
        check_chart(chart)?;
        let surface = FinslerSurface::new(
            name.clone().unwrap_or_else(|| family.tag().into()),
            chart.clone(),
            family,
        );
        surface.check_definition().map_err(CliError::Config)?;
        Ok(surface)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InvariantsConfig {
    /// Grid nodes along x¹ and x².
    pub grid: [usize; 2],
    /// Fiber directions per node.
    pub directions: usize,
}

impl Default for InvariantsConfig {
    fn default() -> Self {
        InvariantsConfig {
            grid: [8, 8],
            directions: 8,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub points: usize,
    pub mean_points: usize,
    pub quadrature: usize,
    pub tolerances: Tolerances,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            points: 100,
            mean_points: 10,
            quadrature: crate::verify::DEFAULT_QUADRATURE,
            tolerances: Tolerances::default(),
        }
    }
}

/// Initial data: a position plus a normal or a tangent direction; the
/// direction is rescaled onto `F = 1`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCondition {
    pub x0: [f64; 2],
    pub n0: Option<[f64; 2]>,
    pub t0: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrateConfig {
    pub flow: FlowKind,
    #[serde(flatten)]
    pub initial: InitialCondition,
    #[serde(default = "default_length")]
    pub length: f64,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_true")]
    pub renormalize: bool,
    #[serde(default = "default_degenerate_tol")]
    pub degenerate_tol: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    #[serde(flatten)]
    pub initial: InitialCondition,
    #[serde(default = "default_length")]
    pub length: f64,
    #[serde(default = "default_step")]
    pub step: f64,
}

fn default_length() -> f64 {
    1.0
}
fn default_step() -> f64 {
    1e-3
}
fn default_true() -> bool {
    true
}
fn default_degenerate_tol() -> f64 {
    1e-6
}
fn default_validation_samples() -> usize {
    256
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_validation_samples")]
    pub validation_samples: usize,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub invariants: InvariantsConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    pub integrate: Option<IntegrateConfig>,
    pub compare: Option<CompareConfig>,
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<(), CliError> {
    if v >= min {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be at least {min}, got {v}")))
    }
}

impl InitialCondition {
    fn check(&self) -> Result<(), CliError> {
        if self.n0.is_some() == self.t0.is_some() {
            return Err(CliError::Config("give exactly one of n0 and t0".into()));
        }
        let v = self.n0.or(self.t0).unwrap_or_default();
        if !self.x0.iter().chain(&v).all(|c| c.is_finite()) || v == [0.0, 0.0] {
            return Err(CliError::Config(
                "initial data must be finite with a non-zero direction".into(),
            ));
        }
        Ok(())
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        at_least("validation_samples", self.validation_samples, 1)?;
        at_least("invariants.grid[0]", self.invariants.grid[0], 1)?;
        at_least("invariants.grid[1]", self.invariants.grid[1], 1)?;
        at_least("invariants.directions", self.invariants.directions, 1)?;
        at_least("verify.points", self.verify.points, 1)?;
        at_least("verify.quadrature", self.verify.quadrature, 64)?;
        let t = &self.verify.tolerances;
        positive("tolerances.first_order", t.first_order)?;
        positive("tolerances.higher_order", t.higher_order)?;
        positive("tolerances.mean_i", t.mean_i)?;
        if let Some(i) = &self.integrate {
            i.initial.check()?;
            positive("integrate.length", i.length)?;
            positive("integrate.step", i.step)?;
            positive("integrate.degenerate_tol", i.degenerate_tol)?;
            if i.flow == FlowKind::NParallelDownstairs && i.initial.n0.is_none() {
                return Err(CliError::Config("the downstairs flow starts from n0".into()));
            }
        }
        if let Some(c) = &self.compare {
            c.initial.check()?;
            positive("compare.length", c.length)?;
            positive("compare.step", c.step)?;
        }
        Ok(())
    }
}
