use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector3};

use super::{
    numeric_jet, second_form_from, tangent_components, Coords, Geometry, SurfaceError, SurfacePatch,
};

/// Relative tolerance for the asymmetry check on σ^αβ.
const SYMMETRY_TOL: f64 = 1e-12;

/// Contravariant surface stress `σ^αβ` as a function of chart coordinates.
#[derive(Clone)]
pub enum SurfaceStressField {
    Constant(Matrix2<f64>),
    /// `σ^αβ = Σ_k c[α][β][k] m_k(x¹, x²)` with monomials `1, x¹, x², (x¹)², x¹x², (x²)²`.
    Polynomial([[[f64; 6]; 2]; 2]),
    /// `σ̂ g^αβ` with `σ̂ = base + gradient · x` (ambient position).
    Isotropic {
        base: f64,
        gradient: Vector3<f64>,
    },
    /// Arbitrary components, differentiated numerically.
    Custom(Arc<dyn Fn(Coords) -> Matrix2<f64> + Send + Sync>),
}

impl fmt::Debug for SurfaceStressField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(m) => f.debug_tuple("Constant").field(m).finish(),
            Self::Polynomial(c) => f.debug_tuple("Polynomial").field(c).finish(),
            Self::Isotropic { base, gradient } => f
                .debug_struct("Isotropic")
                .field("base", base)
                .field("gradient", gradient)
                .finish(),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

fn check_symmetric(s: &Matrix2<f64>) -> Result<(), SurfaceError> {
    let gap = s[(0, 1)] - s[(1, 0)];
    if gap.abs() > SYMMETRY_TOL * s.amax().max(1.0) {
        return Err(SurfaceError::Asymmetric(gap));
    }
    Ok(())
}

impl SurfaceStressField {
    /// Polynomial field; rejects coefficient sets that are not symmetric.
    pub fn polynomial(coeffs: [[[f64; 6]; 2]; 2]) -> Result<Self, SurfaceError> {
        for (upper, lower) in coeffs[0][1].iter().zip(&coeffs[1][0]) {
            let gap = upper - lower;
            if gap.abs() > SYMMETRY_TOL * upper.abs().max(1.0) {
                return Err(SurfaceError::Asymmetric(gap));
            }
        }
        Ok(Self::Polynomial(coeffs))
    }

    pub fn constant(s: Matrix2<f64>) -> Result<Self, SurfaceError> {
        check_symmetric(&s)?;
        Ok(Self::Constant(s))
    }

    /// Components and their chart derivatives `[∂_1 σ, ∂_2 σ]`.
    pub(crate) fn eval(
        &self,
        patch: &SurfacePatch,
        geo: &Geometry,
        at: Coords,
    ) -> Result<(Matrix2<f64>, [Matrix2<f64>; 2]), SurfaceError> {
        let (s, ds) = match self {
            Self::Constant(s) => (*s, [Matrix2::zeros(); 2]),
            Self::Polynomial(c) => {
                let (x, y) = (at[0], at[1]);
                let m = [1.0, x, y, x * x, x * y, y * y];
                let dm = [
                    [0.0, 1.0, 0.0, 2.0 * x, y, 0.0],
                    [0.0, 0.0, 1.0, 0.0, x, 2.0 * y],
                ];
                let dot =
                    |a: &[f64; 6], b: &[f64; 6]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
                (
                    Matrix2::from_fn(|a, b| dot(&c[a][b], &m)),
                    std::array::from_fn(|g| Matrix2::from_fn(|a, b| dot(&c[a][b], &dm[g]))),
                )
            }
            Self::Isotropic { base, gradient } => {
                let hat = base + gradient.dot(&geo.jet.x);
                let gi = geo.metric_inv;
                let ds = std::array::from_fn(|g| {
                    let dhat = gradient.dot(&geo.jet.d1[g]);
                    gi * dhat - gi * geo.metric_derivative[g] * gi * hat
                });
                (gi * hat, ds)
            }
            Self::Custom(f) => {
                let (s, d1, _) = numeric_jet(|c| f(c), at, patch.fd_step());
                (s, d1)
            }
        };
        check_symmetric(&s)?;
        Ok((s, ds))
    }
}

/// Special divergence `∂_β(σ^αβ ∂_α x) + Γ^β_βγ σ^αγ ∂_α x`, with the
/// product differentiated directly and the contracted symbols taken from
/// `∂_γ log √det g`.
fn product_divergence(geo: &Geometry, s: &Matrix2<f64>, ds: &[Matrix2<f64>; 2]) -> Vector3<f64> {
    let j = &geo.jet;
    let gc = geo.contracted_christoffel();
    let mut out = Vector3::zeros();
    for a in 0..2 {
        for b in 0..2 {
            out += j.d1[a] * ds[b][(a, b)] + j.d2[a][b] * s[(a, b)];
        }
        for c in 0..2 {
            out += j.d1[a] * (gc[c] * s[(a, c)]);
        }
    }
    out
}

pub fn special_divergence(
    patch: &SurfacePatch,
    s: &SurfaceStressField,
    at: Coords,
) -> Result<Vector3<f64>, SurfaceError> {
    let geo = Geometry::at(patch, at)?;
    let (sv, ds) = s.eval(patch, &geo, at)?;
    Ok(product_divergence(&geo, &sv, &ds))
}

/// Split of the special divergence into normal and tangential parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    /// `σ^αβ l_αβ`
    pub normal_part: Vector3<f64>,
    /// `(div σ)^α ∂_α x`
    pub tangential_part: Vector3<f64>,
    /// Contravariant `(div σ)^α`.
    pub tangential_divergence: [f64; 2],
    /// The special divergence computed independently.
    pub special: Vector3<f64>,
    /// `|normal + tangential − special|`
    pub identity_residual: f64,
}

/// Allowed identity residual relative to the size of the summed terms.
fn identity_tolerance(patch: &SurfacePatch) -> f64 {
    if patch.is_numeric() {
        1e-5
    } else {
        1e-8
    }
}

pub fn divergence_decomposition(
    patch: &SurfacePatch,
    s: &SurfaceStressField,
    at: Coords,
) -> Result<Decomposition, SurfaceError> {
    let geo = Geometry::at(patch, at)?;
    let (sv, ds) = s.eval(patch, &geo, at)?;
    let l = second_form_from(&geo);
    let gam = &geo.christoffel;

    let mut normal_part = Vector3::zeros();
    let mut div = [0.0; 2];
    for a in 0..2 {
        for b in 0..2 {
            normal_part += l.vector[a][b] * sv[(a, b)];
            div[a] += ds[b][(a, b)];
            for c in 0..2 {
                div[a] += gam[a][b][c] * sv[(c, b)] + gam[b][b][c] * sv[(a, c)];
            }
        }
    }
    let tangential_part = geo.jet.d1[0] * div[0] + geo.jet.d1[1] * div[1];
    let special = product_divergence(&geo, &sv, &ds);
    let identity_residual = (normal_part + tangential_part - special).norm();
    let scale = normal_part.norm() + tangential_part.norm() + special.norm();
    let allowed = identity_tolerance(patch) * scale.max(1.0);
    if identity_residual > allowed {
        return Err(SurfaceError::IdentityViolation {
            residual: identity_residual,
            allowed,
        });
    }
    Ok(Decomposition {
        normal_part,
        tangential_part,
        tangential_divergence: div,
        special,
        identity_residual,
    })
}

/// Loads acting on a surface element besides its own stress.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SurfaceEnvironment {
    /// Surface mass density.
    pub density: f64,
    pub gravity: Vector3<f64>,
    /// Fluid pressure.
    pub pressure: f64,
    /// Bulk traction `σ · n`.
    pub traction: Vector3<f64>,
    /// Normal assumed by the caller, checked against the patch orientation.
    pub normal: Option<Vector3<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceResidual {
    /// `div σ̄ + ρ g + σ·n + p n`
    pub vector: Vector3<f64>,
    /// Contravariant tangential components.
    pub tangential: [f64; 2],
    /// Normal component `l_n : σ + ρ g_n + σ_nn + p`.
    pub normal: f64,
    /// Set when the supplied normal points against the patch normal.
    pub orientation_mismatch: bool,
}

pub fn surface_equilibrium_residual(
    patch: &SurfacePatch,
    s: &SurfaceStressField,
    env: &SurfaceEnvironment,
    at: Coords,
) -> Result<SurfaceResidual, SurfaceError> {
    let geo = Geometry::at(patch, at)?;
    let d = divergence_decomposition(patch, s, at)?;
    let n = geo.normal;
    let vector = d.special + env.gravity * env.density + env.traction + n * env.pressure;
    let t = tangent_components(&geo, &(vector - n * vector.dot(&n)));
    Ok(SurfaceResidual {
        vector,
        tangential: [t[0], t[1]],
        normal: vector.dot(&n),
        orientation_mismatch: env.normal.is_some_and(|m| m.dot(&n) < 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::Poly2;
    use approx::assert_relative_eq;

    #[test]
    fn plane_constant_stress_is_free() {
        let p = SurfacePatch::Plane {
            origin: Vector3::zeros(),
            e1: Vector3::x(),
            e2: Vector3::y(),
        };
        let s = SurfaceStressField::constant(Matrix2::new(1.0, 0.3, 0.3, 2.0)).unwrap();
        assert_eq!(
            special_divergence(&p, &s, [0.2, 0.1]).unwrap(),
            Vector3::zeros()
        );
        let r = surface_equilibrium_residual(&p, &s, &SurfaceEnvironment::default(), [0.0, 0.0])
            .unwrap();
        assert_eq!(r.vector, Vector3::zeros());
    }

    #[test]
    fn sphere_laplace() {
        let p = SurfacePatch::Sphere { radius: 2.0 };
        let s = SurfaceStressField::Isotropic {
            base: 3.0,
            gradient: Vector3::zeros(),
        };
        let at = [0.8, 1.3];
        let d = divergence_decomposition(&p, &s, at).unwrap();
        assert_relative_eq!(d.normal_part.norm(), 3.0, epsilon = 1e-13);
        assert!(d.tangential_part.norm() < 1e-13);
        let env = SurfaceEnvironment {
            pressure: -3.0,
            ..Default::default()
        };
        let r = surface_equilibrium_residual(&p, &s, &env, at).unwrap();
        assert!(r.vector.norm() < 1e-13);
    }

    #[test]
    fn asymmetric_input_rejected() {
        assert!(SurfaceStressField::constant(Matrix2::new(1.0, 0.5, 0.4, 1.0)).is_err());
        let mut c = [[[0.0; 6]; 2]; 2];
        c[0][1][2] = 1.0;
        assert!(SurfaceStressField::polynomial(c).is_err());
        let f = SurfaceStressField::Custom(Arc::new(|_| Matrix2::new(0.0, 1.0, 0.0, 0.0)));
        let p = SurfacePatch::Cylinder { radius: 1.0 };
        assert!(matches!(
            special_divergence(&p, &f, [0.0, 0.0]),
            Err(SurfaceError::Asymmetric(_))
        ));
    }

    #[test]
    fn graph_decomposition_orthogonal() {
        let p = SurfacePatch::Graph {
            height: Poly2::new(vec![(2, 0, 0.3), (1, 1, -0.2), (0, 3, 0.1)]),
        };
        let mut c = [[[0.0; 6]; 2]; 2];
        for (k, v) in [0.5, -0.2, 0.7, 0.1, 0.3, -0.4].into_iter().enumerate() {
            c[0][0][k] = v;
            c[1][1][k] = 0.5 * v + 0.1;
            c[0][1][k] = -v;
            c[1][0][k] = -v;
        }
        let s = SurfaceStressField::polynomial(c).unwrap();
        let d = divergence_decomposition(&p, &s, [0.4, -0.6]).unwrap();
        let geo = Geometry::at(&p, [0.4, -0.6]).unwrap();
        let n = geo.normal;
        assert!(d.normal_part.cross(&n).norm() < 1e-12 * d.normal_part.norm().max(1.0));
        assert!(d.tangential_part.dot(&n).abs() < 1e-12);
        assert!(d.identity_residual < 1e-12);
    }

    #[test]
    fn orientation_flag() {
        let p = SurfacePatch::Plane {
            origin: Vector3::zeros(),
            e1: Vector3::x(),
            e2: Vector3::y(),
        };
        let s = SurfaceStressField::Constant(Matrix2::identity());
        let env = SurfaceEnvironment {
            normal: Some(-Vector3::z()),
            ..Default::default()
        };
        assert!(
            surface_equilibrium_residual(&p, &s, &env, [0.0, 0.0])
                .unwrap()
                .orientation_mismatch
        );
    }
}
