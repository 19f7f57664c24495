//! Run configuration read from a TOML file.

use std::path::PathBuf;

use nalgebra::{Matrix2, Vector3};
use serde::{Deserialize, Serialize};

use tripleline::contact_line::{ContactAngles, LineConfig, LineError, RelativeDeformation, Side};
use tripleline::fields::Component;
use tripleline::surface::{
    Poly2, SurfaceEnvironment, SurfaceError, SurfacePatch, SurfaceStressField,
};
use tripleline::verification::QuadratureSpec;

use crate::RunError;

/// Name of the complex displacement output; every other quantity is a
/// real [`Component`].
pub const DISPLACEMENT: &str = "u";

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemBlock,
    pub grid: GridBlock,
    pub quadrature: QuadratureBlock,
    pub surface: Option<SurfaceBlock>,
    pub line: Vec<LineEntry>,
    pub output: OutputBlock,
}

/// Physical inputs of the half-space problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemBlock {
    pub sigma_l: f64,
    pub sigma_s: f64,
    pub lambda: f64,
    pub mu: f64,
    /// Load scale; derived from the line balance when absent.
    pub a_prime: Option<f64>,
    pub b: f64,
}

impl Default for ProblemBlock {
    fn default() -> Self {
        Self {
            sigma_l: 1.0,
            sigma_s: 1.0,
            lambda: 1.0,
            mu: 1.0,
            a_prime: None,
            b: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridBlock {
    /// `[min, max]` in physical units.
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub nx: usize,
    pub ny: usize,
    /// Points closer than this to the contact line are left out.
    pub exclusion_radius: f64,
    /// Output quantities; all of them when empty.
    pub quantities: Vec<String>,
}

impl Default for GridBlock {
    fn default() -> Self {
        Self {
            x: [0.0, 2.0],
            y: [-1.0, 1.0],
            nx: 21,
            ny: 21,
            exclusion_radius: 1e-3,
            quantities: Vec::new(),
        }
    }
}

impl GridBlock {
    fn axis(range: [f64; 2], n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![range[0]];
        }
        (0..n)
            .map(|i| range[0] + (range[1] - range[0]) * i as f64 / (n - 1) as f64)
            .collect()
    }

    /// Grid points in row order: y-major, then x.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let xs = Self::axis(self.x, self.nx);
        Self::axis(self.y, self.ny)
            .into_iter()
            .flat_map(|y| xs.iter().map(move |&x| (x, y)))
            .collect()
    }

    pub fn quantity_names(&self) -> Vec<String> {
        if self.quantities.is_empty() {
            std::iter::once(DISPLACEMENT.to_string())
                .chain(Component::ALL.iter().map(|c| c.name().to_string()))
                .collect()
        } else {
            self.quantities.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureBlock {
    pub r0: f64,
    /// Strictly decreasing cutoffs for the convergence studies.
    pub eps: Vec<f64>,
    /// Cutoffs at which Green's formula is checked.
    pub green_eps: Vec<f64>,
    pub radial_rule: usize,
    pub angular_rule: usize,
    pub l0: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for QuadratureBlock {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            r0: q.r0,
            eps: vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
            green_eps: vec![1e-2, 1e-3],
            radial_rule: q.radial_rule,
            angular_rule: q.angular_rule,
            l0: q.l0,
            tol: q.tol,
            seed: 2013,
        }
    }
}

impl QuadratureBlock {
    /// Quadrature settings at the first cutoff of the schedule.
    pub fn spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            r0: self.r0,
            eps: self
                .eps
                .first()
                .copied()
                .unwrap_or(QuadratureSpec::default().eps),
            radial_rule: self.radial_rule,
            angular_rule: self.angular_rule,
            l0: self.l0,
            tol: self.tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PatchSpec {
    Plane {
        origin: [f64; 3],
        e1: [f64; 3],
        e2: [f64; 3],
    },
    Sphere {
        radius: f64,
    },
    Cylinder {
        radius: f64,
    },
    Graph {
        terms: Vec<(u32, u32, f64)>,
    },
}

impl PatchSpec {
    pub fn build(&self) -> SurfacePatch {
        match self {
            PatchSpec::Plane { origin, e1, e2 } => SurfacePatch::Plane {
                origin: Vector3::from(*origin),
                e1: Vector3::from(*e1),
                e2: Vector3::from(*e2),
            },
            PatchSpec::Sphere { radius } => SurfacePatch::Sphere { radius: *radius },
            PatchSpec::Cylinder { radius } => SurfacePatch::Cylinder { radius: *radius },
            PatchSpec::Graph { terms } => SurfacePatch::Graph {
                height: Poly2::new(terms.clone()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StressSpec {
    /// Contravariant components, row by row.
    Constant { value: [[f64; 2]; 2] },
    /// `base + gradient · x` times the inverse metric.
    Isotropic { base: f64, gradient: [f64; 3] },
    /// Per component, coefficients of `1, x¹, x², (x¹)², x¹x², (x²)²`.
    Polynomial { coeffs: [[[f64; 6]; 2]; 2] },
}

impl StressSpec {
    pub fn build(&self) -> Result<SurfaceStressField, SurfaceError> {
        match self {
            StressSpec::Constant { value } => SurfaceStressField::constant(Matrix2::new(
                value[0][0],
                value[0][1],
                value[1][0],
                value[1][1],
            )),
            StressSpec::Isotropic { base, gradient } => Ok(SurfaceStressField::Isotropic {
                base: *base,
                gradient: Vector3::from(*gradient),
            }),
            StressSpec::Polynomial { coeffs } => SurfaceStressField::polynomial(*coeffs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceBlock {
    pub patch: PatchSpec,
    pub stress: StressSpec,
    /// Chart coordinates at which the checks run.
    pub points: Vec<[f64; 2]>,
    #[serde(default)]
    pub density: f64,
    #[serde(default)]
    pub gravity: [f64; 3],
    #[serde(default)]
    pub pressure: f64,
    #[serde(default)]
    pub traction: [f64; 3],
}

impl SurfaceBlock {
    pub fn environment(&self) -> SurfaceEnvironment {
        SurfaceEnvironment {
            density: self.density,
            gravity: Vector3::from(self.gravity),
            pressure: self.pressure,
            traction: Vector3::from(self.traction),
            normal: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineEntry {
    pub first: Side,
    pub second: Side,
    pub tension: f64,
    pub angles: ContactAngles,
    #[serde(default)]
    pub relative: RelativeDeformation,
}

impl LineEntry {
    pub fn build(&self) -> Result<LineConfig, LineError> {
        LineConfig::new(
            self.first,
            self.second,
            self.tension,
            self.angles,
            self.relative,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    /// Overridden by `--out`.
    pub directory: Option<PathBuf>,
    /// Any of `csv` (tables and field files) and `json` (run manifest).
    pub formats: Vec<String>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            directory: None,
            formats: vec!["csv".into(), "json".into()],
        }
    }
}

impl OutputBlock {
    pub fn wants(&self, format: &str) -> bool {
        self.formats.iter().any(|f| f == format)
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |msg: String| Err(RunError::Config(msg));
        let g = &self.grid;
        if !(g.exclusion_radius > 0.0 && g.exclusion_radius.is_finite()) {
            return bad(format!(
                "grid.exclusion_radius must be positive, got {}",
                g.exclusion_radius
            ));
        }
        if g.nx == 0 || g.ny == 0 {
            return bad("grid.nx and grid.ny must be at least 1".into());
        }
        for (name, r) in [("x", g.x), ("y", g.y)] {
            if !(r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]) {
                return bad(format!("grid.{name} must be a finite range [min, max]"));
            }
        }
        for q in &g.quantities {
            if q != DISPLACEMENT && q.parse::<Component>().is_err() {
                return bad(format!("unknown grid quantity `{q}`"));
            }
        }
        let q = &self.quadrature;
        q.spec()
            .validate()
            .map_err(|e| RunError::Config(e.to_string()))?;
        for (name, s) in [("eps", &q.eps), ("green_eps", &q.green_eps)] {
            if s.is_empty() {
                return bad(format!("quadrature.{name} must not be empty"));
            }
            if s.iter().any(|&e| !(e > 0.0 && e < q.r0)) {
                return bad(format!("quadrature.{name} entries must lie in (0, r0)"));
            }
            if s.windows(2).any(|p| p[1] >= p[0]) {
                return bad(format!("quadrature.{name} must strictly decrease"));
            }
        }
        if let Some(s) = &self.surface {
            s.stress
                .build()
                .map_err(|e| RunError::Config(format!("surface.stress: {e}")))?;
        }
        for (i, l) in self.line.iter().enumerate() {
            l.build()
                .map_err(|e| RunError::Config(format!("line entry {i}: {e}")))?;
        }
        for f in &self.output.formats {
            if f != "csv" && f != "json" {
                return bad(format!("unknown output format `{f}`; expected csv or json"));
            }
        }
        Ok(())
    }
}
