//! Differential geometry of embedded surfaces and the divergence of surface
//! stress tensors.
//!
//! Orientation: the unit normal `n` points from the fluid into the body, and
//! a principal curvature is positive when its centre lies on the side of `n`.
//! For the built-in charts this means the sphere and cylinder hold the body
//! inside, the graph holds it below, and the plane holds it on the side of
//! `e1 × e2`.

mod stress;
mod transform;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix2, Matrix3x2, SymmetricEigen, Vector2, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use stress::{
    divergence_decomposition, special_divergence, surface_equilibrium_residual, Decomposition,
    SurfaceEnvironment, SurfaceResidual, SurfaceStressField,
};
pub use transform::{contract, TransformData, TransformError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    #[error("metric is degenerate at ({0}, {1})")]
    DegenerateMetric(f64, f64),
    #[error("coordinates ({0}, {1}) are outside the chart domain")]
    OutOfDomain(f64, f64),
    #[error("surface stress is not symmetric: σ^12 − σ^21 = {0:e}")]
    Asymmetric(f64),
    #[error("divergence identity violated by {residual:e} (allowed {allowed:e})")]
    IdentityViolation { residual: f64, allowed: f64 },
    #[error("invalid surface input: {0}")]
    Invalid(String),
}

/// Chart coordinates `(x¹, x²)`.
pub type Coords = [f64; 2];

/// Christoffel symbols `Γ^α_βγ` indexed `[α][β][γ]`.
pub type Christoffel = [[[f64; 2]; 2]; 2];

/// Position with first and second chart derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub x: Vector3<f64>,
    /// `d1[α] = ∂_α x`
    pub d1: [Vector3<f64>; 2],
    /// `d2[α][β] = ∂_α ∂_β x`
    pub d2: [[Vector3<f64>; 2]; 2],
}

/// Bivariate polynomial `Σ c x^i y^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly2 {
    pub terms: Vec<(u32, u32, f64)>,
}

impl Poly2 {
    pub fn new(terms: Vec<(u32, u32, f64)>) -> Self {
        Self { terms }
    }

    /// Value, gradient and Hessian at `(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> (f64, [f64; 2], [[f64; 2]; 2]) {
        let p = |b: f64, e: i64| if e < 0 { 0.0 } else { b.powi(e as i32) };
        let (mut v, mut g, mut h) = (0.0, [0.0; 2], [[0.0; 2]; 2]);
        for &(i, j, c) in &self.terms {
            let (i, j) = (i as i64, j as i64);
            let (fi, fj) = (i as f64, j as f64);
            v += c * p(x, i) * p(y, j);
            g[0] += c * fi * p(x, i - 1) * p(y, j);
            g[1] += c * fj * p(x, i) * p(y, j - 1);
            h[0][0] += c * fi * (fi - 1.0) * p(x, i - 2) * p(y, j);
            h[1][1] += c * fj * (fj - 1.0) * p(x, i) * p(y, j - 2);
            h[0][1] += c * fi * fj * p(x, i - 1) * p(y, j - 1);
        }
        h[1][0] = h[0][1];
        (v, g, h)
    }
}

/// User-supplied parametrisation, differentiated numerically.
pub type ChartMap = Arc<dyn Fn(Coords) -> Vector3<f64> + Send + Sync>;

/// Parametrised surface patch.
#[derive(Clone)]
pub enum SurfacePatch {
    /// `origin + s e1 + t e2`.
    Plane {
        origin: Vector3<f64>,
        e1: Vector3<f64>,
        e2: Vector3<f64>,
    },
    /// Colatitude–longitude chart `(θ, φ)` of a sphere centred at the origin.
    Sphere { radius: f64 },
    /// `(θ, z) ↦ (R cos θ, R sin θ, z)`.
    Cylinder { radius: f64 },
    /// `(x, y) ↦ (x, y, f(x, y))`.
    Graph { height: Poly2 },
    /// Arbitrary chart on a rectangle, with fourth-order central differences
    /// at step `1e-4` of the larger side. `normal_sign` orients `∂_1 x × ∂_2 x`.
    Numeric {
        map: ChartMap,
        domain: [[f64; 2]; 2],
        normal_sign: f64,
    },
}

impl fmt::Debug for SurfacePatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Plane { origin, e1, e2 } => f
                .debug_struct("Plane")
                .field("origin", origin)
                .field("e1", e1)
                .field("e2", e2)
                .finish(),
            Self::Sphere { radius } => f.debug_struct("Sphere").field("radius", radius).finish(),
            Self::Cylinder { radius } => {
                f.debug_struct("Cylinder").field("radius", radius).finish()
            }
            Self::Graph { height } => f.debug_struct("Graph").field("height", height).finish(),
            Self::Numeric {
                domain,
                normal_sign,
                ..
            } => f
                .debug_struct("Numeric")
                .field("domain", domain)
                .field("normal_sign", normal_sign)
                .finish(),
        }
    }
}

/// Fourth-order central difference weights for the first derivative.
const D1: [(f64, f64); 4] = [
    (-2.0, 1.0 / 12.0),
    (-1.0, -8.0 / 12.0),
    (1.0, 8.0 / 12.0),
    (2.0, -1.0 / 12.0),
];
/// Fourth-order central difference weights for the second derivative.
const D2: [(f64, f64); 5] = [
    (-2.0, -1.0 / 12.0),
    (-1.0, 16.0 / 12.0),
    (0.0, -30.0 / 12.0),
    (1.0, 16.0 / 12.0),
    (2.0, -1.0 / 12.0),
];

/// First and second derivatives of `f` at `at` by fourth-order stencils.
pub(crate) fn numeric_jet<T, F>(f: F, at: Coords, h: f64) -> (T, [T; 2], [[T; 2]; 2])
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    F: Fn(Coords) -> T,
{
    let shift = |a: f64, b: f64| f([at[0] + a * h, at[1] + b * h]);
    let centre = f(at);
    let zero = centre * 0.0;
    let mut d1 = [zero; 2];
    let mut d2 = [[zero; 2]; 2];
    for &(s, w) in &D1 {
        d1[0] = d1[0] + shift(s, 0.0) * (w / h);
        d1[1] = d1[1] + shift(0.0, s) * (w / h);
        for &(t, v) in &D1 {
            d2[0][1] = d2[0][1] + shift(s, t) * (w * v / (h * h));
        }
    }
    for &(s, w) in &D2 {
        d2[0][0] = d2[0][0] + shift(s, 0.0) * (w / (h * h));
        d2[1][1] = d2[1][1] + shift(0.0, s) * (w / (h * h));
    }
    d2[1][0] = d2[0][1];
    (centre, d1, d2)
}

impl SurfacePatch {
    /// Parameter rectangle `[[min1, max1], [min2, max2]]`; `None` if unbounded.
    pub fn domain(&self) -> Option<[[f64; 2]; 2]> {
        match self {
            Self::Sphere { .. } => Some([[0.0, PI], [-PI, PI]]),
            Self::Cylinder { .. } => Some([[-PI, PI], [f64::NEG_INFINITY, f64::INFINITY]]),
            Self::Numeric { domain, .. } => Some(*domain),
            Self::Plane { .. } | Self::Graph { .. } => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, Self::Numeric { .. })
    }

    fn normal_sign(&self) -> f64 {
        match self {
            Self::Plane { .. } => 1.0,
            Self::Sphere { .. } | Self::Cylinder { .. } | Self::Graph { .. } => -1.0,
            Self::Numeric { normal_sign, .. } => normal_sign.signum(),
        }
    }

    /// Finite-difference step used for numeric charts and numeric stress fields.
    pub fn fd_step(&self) -> f64 {
        match self {
            Self::Numeric { domain, .. } => {
                1e-4 * (domain[0][1] - domain[0][0]).max(domain[1][1] - domain[1][0])
            }
            _ => 1e-4,
        }
    }

    fn check_domain(&self, at: Coords) -> Result<(), SurfaceError> {
        if !(at[0].is_finite() && at[1].is_finite()) {
            return Err(SurfaceError::OutOfDomain(at[0], at[1]));
        }
        if let Some(d) = self.domain() {
            let margin = if self.is_numeric() {
                2.0 * self.fd_step()
            } else {
                0.0
            };
            let inside = |v: f64, r: [f64; 2]| v >= r[0] + margin && v <= r[1] - margin;
            if !(inside(at[0], d[0]) && inside(at[1], d[1])) {
                return Err(SurfaceError::OutOfDomain(at[0], at[1]));
            }
        }
        Ok(())
    }

    pub fn jet(&self, at: Coords) -> Result<Jet, SurfaceError> {
        self.check_domain(at)?;
        let z = Vector3::zeros();
        Ok(match self {
            Self::Plane { origin, e1, e2 } => Jet {
                x: origin + e1 * at[0] + e2 * at[1],
                d1: [*e1, *e2],
                d2: [[z; 2]; 2],
            },
            Self::Sphere { radius: r } => {
                let (st, ct) = at[0].sin_cos();
                let (sp, cp) = at[1].sin_cos();
                let x = Vector3::new(st * cp, st * sp, ct) * *r;
                Jet {
                    x,
                    d1: [
                        Vector3::new(ct * cp, ct * sp, -st) * *r,
                        Vector3::new(-st * sp, st * cp, 0.0) * *r,
                    ],
                    d2: [
                        [-x, Vector3::new(-ct * sp, ct * cp, 0.0) * *r],
                        [
                            Vector3::new(-ct * sp, ct * cp, 0.0) * *r,
                            Vector3::new(-st * cp, -st * sp, 0.0) * *r,
                        ],
                    ],
                }
            }
            Self::Cylinder { radius: r } => {
                let (s, c) = at[0].sin_cos();
                Jet {
                    x: Vector3::new(r * c, r * s, at[1]),
                    d1: [Vector3::new(-r * s, r * c, 0.0), Vector3::z()],
                    d2: [[Vector3::new(-r * c, -r * s, 0.0), z], [z, z]],
                }
            }
            Self::Graph { height } => {
                let (f, g, h) = height.eval(at[0], at[1]);
                Jet {
                    x: Vector3::new(at[0], at[1], f),
                    d1: [Vector3::new(1.0, 0.0, g[0]), Vector3::new(0.0, 1.0, g[1])],
                    d2: [
                        [
                            Vector3::new(0.0, 0.0, h[0][0]),
                            Vector3::new(0.0, 0.0, h[0][1]),
                        ],
                        [
                            Vector3::new(0.0, 0.0, h[1][0]),
                            Vector3::new(0.0, 0.0, h[1][1]),
                        ],
                    ],
                }
            }
            Self::Numeric { map, .. } => {
                let (x, d1, d2) = numeric_jet(|c| map(c), at, self.fd_step());
                Jet { x, d1, d2 }
            }
        })
    }
}

/// First-order geometric data at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub jet: Jet,
    /// Covariant metric `g_αβ`.
    pub metric: Matrix2<f64>,
    pub metric_inv: Matrix2<f64>,
    /// `metric_derivative[γ] = ∂_γ g`.
    pub metric_derivative: [Matrix2<f64>; 2],
    /// `christoffel[α][β][γ] = Γ^α_βγ`.
    pub christoffel: Christoffel,
    /// Unit normal oriented from the fluid into the body.
    pub normal: Vector3<f64>,
}

impl Geometry {
    pub fn at(patch: &SurfacePatch, at: Coords) -> Result<Self, SurfaceError> {
        let jet = patch.jet(at)?;
        let metric = Matrix2::from_fn(|a, b| jet.d1[a].dot(&jet.d1[b]));
        let det = metric.determinant();
        if !(det > 1e-14 * metric.trace().powi(2)) {
            return Err(SurfaceError::DegenerateMetric(at[0], at[1]));
        }
        let metric_inv = metric
            .try_inverse()
            .ok_or(SurfaceError::DegenerateMetric(at[0], at[1]))?;
        let metric_derivative: [Matrix2<f64>; 2] = std::array::from_fn(|c| {
            Matrix2::from_fn(|a, b| jet.d2[c][a].dot(&jet.d1[b]) + jet.d1[a].dot(&jet.d2[c][b]))
        });
        let dg = |c: usize, a: usize, b: usize| metric_derivative[c][(a, b)];
        let mut christoffel = [[[0.0; 2]; 2]; 2];
        for (a, row) in christoffel.iter_mut().enumerate() {
            for (b, col) in row.iter_mut().enumerate() {
                for (c, v) in col.iter_mut().enumerate() {
                    *v = 0.5
                        * (0..2)
                            .map(|d| metric_inv[(a, d)] * (dg(b, d, c) + dg(c, d, b) - dg(d, b, c)))
                            .sum::<f64>();
                }
            }
        }
        let cross = jet.d1[0].cross(&jet.d1[1]);
        let normal = cross.normalize() * patch.normal_sign();
        Ok(Self {
            jet,
            metric,
            metric_inv,
            metric_derivative,
            christoffel,
            normal,
        })
    }

    /// Tangent frame as columns `[∂_1 x, ∂_2 x]`.
    pub fn tangent_frame(&self) -> Matrix3x2<f64> {
        Matrix3x2::from_columns(&self.jet.d1)
    }

    /// `Γ^β_βγ = ∂_γ log √det g`.
    pub fn contracted_christoffel(&self) -> [f64; 2] {
        std::array::from_fn(|c| 0.5 * (self.metric_inv * self.metric_derivative[c]).trace())
    }
}

/// Metric `g_αβ` and Christoffel symbols `Γ^α_βγ` (indexed `[α][β][γ]`).
pub fn metric_and_christoffel(
    patch: &SurfacePatch,
    at: Coords,
) -> Result<(Matrix2<f64>, Christoffel), SurfaceError> {
    let g = Geometry::at(patch, at)?;
    Ok((g.metric, g.christoffel))
}

/// Second fundamental form at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondForm {
    /// Vector form `l_αβ = ∂_αβ x − Γ^γ_αβ ∂_γ x`.
    pub vector: [[Vector3<f64>; 2]; 2],
    /// Normal contraction `l_n,αβ = l_αβ · n`.
    pub normal: Matrix2<f64>,
    /// Eigenvalues of `g⁻¹ l_n`, ascending.
    pub principal_curvatures: [f64; 2],
}

impl SecondForm {
    pub fn mean_curvature_sum(&self) -> f64 {
        self.principal_curvatures[0] + self.principal_curvatures[1]
    }
}

pub(crate) fn second_form_from(geo: &Geometry) -> SecondForm {
    let j = &geo.jet;
    let vector: [[Vector3<f64>; 2]; 2] = std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            j.d2[a][b] - j.d1[0] * geo.christoffel[0][a][b] - j.d1[1] * geo.christoffel[1][a][b]
        })
    });
    let normal = Matrix2::from_fn(|a, b| vector[a][b].dot(&geo.normal));
    // g = C Cᵀ, eigenvalues of g⁻¹ l_n are those of C⁻¹ l_n C⁻ᵀ.
    let c = geo
        .metric
        .cholesky()
        .expect("metric checked positive definite")
        .l();
    let ci = c.try_inverse().expect("Cholesky factor is invertible");
    let m = ci * normal * ci.transpose();
    let sym = (m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    SecondForm {
        vector,
        normal,
        principal_curvatures: [ev[0], ev[1]],
    }
}

pub fn second_fundamental_form(
    patch: &SurfacePatch,
    at: Coords,
) -> Result<SecondForm, SurfaceError> {
    Ok(second_form_from(&Geometry::at(patch, at)?))
}

/// Contravariant components of a tangent 3-vector in the chart basis.
pub(crate) fn tangent_components(geo: &Geometry, v: &Vector3<f64>) -> Vector2<f64> {
    let cov = Vector2::new(v.dot(&geo.jet.d1[0]), v.dot(&geo.jet.d1[1]));
    geo.metric_inv * cov
}
