//! Displacement, strain and stress of the half-space solution.
//!
//! All quantities are reduced Kolosov forms built from `F'` and
//! `(z + z̄) F''` only:
//!
//! ```text
//! u    = −(k (F + F̄) + (z + z̄) conj F') / 2μ
//! ε_xx = Re(−2(1+k)F' − (z+z̄)F'') / 2μ      σ_xx = Re((1−k)F' − (z+z̄)F'')
//! ε_yy = Re((z+z̄)F'') / 2μ                   σ_yy = Re((3+k)F' + (z+z̄)F'')
//! ε_xy = Im((1+k)F' + (z+z̄)F'') / 2μ         σ_xy = Im((1+k)F' + (z+z̄)F'')
//!                                             σ_z'z' = (3+k) Re F'
//! ∂_y u_x = Im(2kF' + (z+z̄)F'') / 2μ         ∂_x u_y = Im(2F' + (z+z̄)F'') / 2μ
//! ```
//!
//! Coordinates are the dimensionless `z = x + iy` of the unit-length problem;
//! [`apply_scaling`] maps to physical units.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::potentials::{eval_potentials, Material, PotentialChain, PotentialError};
use crate::scaling::ScaledProblem;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("strain and stress are singular at the contact line z = 0")]
    ContactLine,
    #[error("ray angle {0} is outside (−π/2, π/2)")]
    AngleOutOfRange(f64),
    #[error("unknown field component `{0}`")]
    UnknownComponent(String),
    #[error("finite-difference step {h:e} is too large for a point at distance {r:e} from the contact line")]
    StepTooLarge { h: f64, r: f64 },
}

/// In-plane strain; `ε_z'z' = 0` identically.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Strain {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

impl Strain {
    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn scaled(self, s: f64) -> Self {
        Self {
            xx: s * self.xx,
            yy: s * self.yy,
            xy: s * self.xy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Stress {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
    pub zz: f64,
}

impl Stress {
    pub fn scaled(self, s: f64) -> Self {
        Self {
            xx: s * self.xx,
            yy: s * self.yy,
            xy: s * self.xy,
            zz: s * self.zz,
        }
    }

    /// In-plane Cauchy stress as a symmetric matrix.
    pub fn in_plane(&self) -> Matrix2<f64> {
        Matrix2::new(self.xx, self.xy, self.xy, self.yy)
    }

    pub fn max_abs(&self) -> f64 {
        self.xx
            .abs()
            .max(self.yy.abs())
            .max(self.xy.abs())
            .max(self.zz.abs())
    }
}

/// First partial derivatives of the stress components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StressGradient {
    pub dx: Stress,
    pub dy: Stress,
}

impl StressGradient {
    /// In-plane divergence `(∂_x σ_xx + ∂_y σ_xy, ∂_x σ_xy + ∂_y σ_yy)`.
    pub fn divergence(&self) -> [f64; 2] {
        [self.dx.xx + self.dy.xy, self.dx.xy + self.dy.yy]
    }
}

/// Point evaluation of the solution away from the contact line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub z: Complex64,
    /// Complex displacement `u_x + i u_y`.
    pub u: Complex64,
    /// `grad_u[(i, j)] = ∂_j u_i`.
    pub grad_u: Matrix2<f64>,
    pub strain: Strain,
    pub stress: Stress,
}

/// Tagged value for quantities that may be singular at the contact line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Limit {
    Finite(f64),
    PlusInfinity,
    /// The limit exists only along rays and depends on the direction.
    DirectionDependent,
}

impl Limit {
    pub fn finite(self) -> Option<f64> {
        match self {
            Limit::Finite(v) => Some(v),
            _ => None,
        }
    }
}

/// Values at `z = 0`: finite displacement, singular strain and stress.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactLineSample {
    pub u: Complex64,
    pub strain_xx: Limit,
    pub strain_yy: Limit,
    pub strain_xy: Limit,
    pub stress_xx: Limit,
    pub stress_yy: Limit,
    pub stress_xy: Limit,
    pub stress_zz: Limit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldPoint {
    Regular(FieldSample),
    ContactLine(ContactLineSample),
}

impl FieldPoint {
    pub fn u(&self) -> Complex64 {
        match self {
            FieldPoint::Regular(s) => s.u,
            FieldPoint::ContactLine(c) => c.u,
        }
    }

    pub fn regular(self) -> Option<FieldSample> {
        match self {
            FieldPoint::Regular(s) => Some(s),
            FieldPoint::ContactLine(_) => None,
        }
    }
}

/// Field components addressable by name (CLI, ray limits).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    StrainXx,
    StrainYy,
    StrainXy,
    StressXx,
    StressYy,
    StressXy,
    StressZz,
}

impl Component {
    pub const ALL: [Component; 7] = [
        Component::StrainXx,
        Component::StrainYy,
        Component::StrainXy,
        Component::StressXx,
        Component::StressYy,
        Component::StressXy,
        Component::StressZz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Component::StrainXx => "strain_xx",
            Component::StrainYy => "strain_yy",
            Component::StrainXy => "strain_xy",
            Component::StressXx => "stress_xx",
            Component::StressYy => "stress_yy",
            Component::StressXy => "stress_xy",
            Component::StressZz => "stress_zz",
        }
    }

    pub fn of(self, s: &FieldSample) -> f64 {
        match self {
            Component::StrainXx => s.strain.xx,
            Component::StrainYy => s.strain.yy,
            Component::StrainXy => s.strain.xy,
            Component::StressXx => s.stress.xx,
            Component::StressYy => s.stress.yy,
            Component::StressXy => s.stress.xy,
            Component::StressZz => s.stress.zz,
        }
    }
}

impl std::str::FromStr for Component {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Component::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| FieldError::UnknownComponent(s.to_string()))
    }
}

fn sample_from_chain(z: Complex64, chain: &PotentialChain, m: &Material) -> FieldSample {
    let k = m.kolosov();
    let inv2mu = 0.5 / m.mu();
    let f = chain.f(0).expect("F is finite on the closed half-plane");
    let f1 = chain.f(1).expect("caller excludes the origin");
    let f2 = chain.f(2).expect("caller excludes the origin");
    let b = 2.0 * z.re * f2;

    let u = -inv2mu * (k * (f + f.conj()) + 2.0 * z.re * f1.conj());
    let strain = Strain {
        xx: inv2mu * (-2.0 * (1.0 + k) * f1 - b).re,
        yy: inv2mu * b.re,
        xy: inv2mu * ((1.0 + k) * f1 + b).im,
    };
    let stress = Stress {
        xx: ((1.0 - k) * f1 - b).re,
        yy: ((3.0 + k) * f1 + b).re,
        xy: ((1.0 + k) * f1 + b).im,
        zz: (3.0 + k) * f1.re,
    };
    let dy_ux = inv2mu * (2.0 * k * f1 + b).im;
    let dx_uy = inv2mu * (2.0 * f1 + b).im;
    let grad_u = Matrix2::new(strain.xx, dy_ux, dx_uy, strain.yy);
    FieldSample {
        z,
        u,
        grad_u,
        strain,
        stress,
    }
}

/// Displacement `u` alone; finite on the whole closed half-plane.
pub fn displacement(z: Complex64, m: &Material) -> Result<Complex64, FieldError> {
    let chain = eval_potentials(z, m)?;
    let f = chain.f(0).expect("F is finite on the closed half-plane");
    let k = m.kolosov();
    let tail = match chain.f(1) {
        Some(f1) => 2.0 * z.re * f1.conj(),
        // (z + z̄) F' → 0 at the origin.
        None => Complex64::from(0.0),
    };
    Ok(-(k * (f + f.conj()) + tail) / (2.0 * m.mu()))
}

impl FieldSample {
    /// Full evaluation at a point of the closed half-plane other than `z = 0`.
    pub fn eval(z: Complex64, m: &Material) -> Result<Self, FieldError> {
        if z.re == 0.0 && z.im == 0.0 {
            return Err(FieldError::ContactLine);
        }
        let chain = eval_potentials(z, m)?;
        Ok(sample_from_chain(z, &chain, m))
    }
}

/// Evaluate the solution at `z`; at the contact line the singular
/// components are returned as tagged limits.
pub fn eval_fields(z: Complex64, m: &Material) -> Result<FieldPoint, FieldError> {
    if z.re == 0.0 && z.im == 0.0 {
        return Ok(FieldPoint::ContactLine(ContactLineSample {
            u: displacement(z, m)?,
            strain_xx: Limit::PlusInfinity,
            strain_yy: Limit::DirectionDependent,
            strain_xy: Limit::DirectionDependent,
            stress_xx: Limit::PlusInfinity,
            stress_yy: Limit::PlusInfinity,
            stress_xy: Limit::DirectionDependent,
            stress_zz: Limit::PlusInfinity,
        }));
    }
    FieldSample::eval(z, m).map(FieldPoint::Regular)
}

/// Analytic stress gradient from `F''` and `(z + z̄) F'''`.
pub fn stress_gradient(z: Complex64, m: &Material) -> Result<StressGradient, FieldError> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(FieldError::ContactLine);
    }
    let chain = eval_potentials(z, m)?;
    let k = m.kolosov();
    let f2 = chain.f(2).expect("finite away from the origin");
    let c3 = 2.0 * z.re * chain.f(3).expect("finite away from the origin");
    // ∂_x acts as d/dz on analytic factors and gives 2 on (z + z̄);
    // ∂_y acts as i d/dz and leaves (z + z̄) fixed.
    let dx = Stress {
        xx: (-(1.0 + k) * f2 - c3).re,
        yy: ((5.0 + k) * f2 + c3).re,
        xy: ((3.0 + k) * f2 + c3).im,
        zz: (3.0 + k) * f2.re,
    };
    let dy = Stress {
        xx: -((1.0 - k) * f2 - c3).im,
        yy: -((3.0 + k) * f2 + c3).im,
        xy: ((1.0 + k) * f2 + c3).re,
        zz: -(3.0 + k) * f2.im,
    };
    Ok(StressGradient { dx, dy })
}

/// Closed-form limit of a component as `z → 0` along the ray `arg z = θ`.
pub fn ray_limit(theta: f64, m: &Material, which: Component) -> Result<Limit, FieldError> {
    if !(theta > -PI / 2.0 && theta < PI / 2.0) {
        return Err(FieldError::AngleOutOfRange(theta));
    }
    let k = m.kolosov();
    let inv2mu = 0.5 / m.mu();
    let shear = ((1.0 + k) * theta - (2.0 * theta).sin()) / (k * PI);
    Ok(match which {
        Component::StrainYy => Limit::Finite(inv2mu * (1.0 + (2.0 * theta).cos()) / (k * PI)),
        Component::StrainXy => Limit::Finite(inv2mu * shear),
        Component::StressXy => Limit::Finite(shear),
        Component::StrainXx | Component::StressXx | Component::StressYy | Component::StressZz => {
            Limit::PlusInfinity
        }
    })
}

/// Same as [`ray_limit`] with the component given by name.
pub fn ray_limit_named(theta: f64, m: &Material, which: &str) -> Result<Limit, FieldError> {
    ray_limit(theta, m, which.parse()?)
}

/// Physical fields: `ũ(z) = a′ u(z/b)`, `ε̃(z) = (a′/b) ε(z/b)`,
/// `σ̃(z) = (a′/b) σ(z/b)`.
pub fn apply_scaling(
    p: &ScaledProblem,
    m: &Material,
    z: Complex64,
) -> Result<FieldSample, FieldError> {
    let local = FieldSample::eval(z / p.b, m)?;
    let s = p.a_prime / p.b;
    Ok(FieldSample {
        z,
        u: p.a_prime * local.u,
        grad_u: local.grad_u * s,
        strain: local.strain.scaled(s),
        stress: local.stress.scaled(s),
    })
}

/// Physical displacement `ũ(z) = a′ u(z/b)`, finite everywhere including `z = 0`.
pub fn scaled_displacement(
    p: &ScaledProblem,
    m: &Material,
    z: Complex64,
) -> Result<Complex64, FieldError> {
    Ok(p.a_prime * displacement(z / p.b, m)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit() -> Material {
        Material::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn boundary_displacement() {
        let m = unit();
        for y in [-2.5, -1.0, -0.3, 0.0, 0.2, 1.0, 1.02, 4.0] {
            let u = displacement(c(0.0, y), &m).unwrap();
            assert_relative_eq!(u.re, -1.0 / (2.0 * (1.0 + y.abs())), epsilon = 1e-13);
            assert!(u.im.abs() < 1e-13, "Im u = {} at y = {y}", u.im);
        }
        assert_eq!(eval_fields(c(0.0, 0.0), &m).unwrap().u(), c(-0.5, 0.0));
    }

    #[test]
    fn displacement_decays_along_real_ray() {
        let m = unit();
        let far = displacement(c(1e4, 0.0), &m).unwrap().norm();
        let near = displacement(c(1e3, 0.0), &m).unwrap().norm();
        assert!(far <= near);
    }

    #[test]
    fn contact_line_tags() {
        let m = unit();
        match eval_fields(c(0.0, 0.0), &m).unwrap() {
            FieldPoint::ContactLine(s) => {
                assert_eq!(s.strain_xx, Limit::PlusInfinity);
                assert_eq!(s.stress_zz, Limit::PlusInfinity);
                assert_eq!(s.strain_yy, Limit::DirectionDependent);
            }
            FieldPoint::Regular(_) => panic!("origin must be tagged"),
        }
        assert_eq!(
            FieldSample::eval(c(0.0, 0.0), &m),
            Err(FieldError::ContactLine)
        );
    }

    #[test]
    fn ray_limit_cases() {
        let m = unit();
        assert!(
            ray_limit(PI / 2.0 - 1e-12, &m, Component::StrainYy)
                .unwrap()
                .finite()
                .unwrap()
                .abs()
                < 1e-11
        );
        assert_eq!(
            ray_limit(0.0, &m, Component::StressXy).unwrap(),
            Limit::Finite(0.0)
        );
        let exy = ray_limit(PI / 4.0, &m, Component::StrainXy)
            .unwrap()
            .finite()
            .unwrap();
        assert_relative_eq!(exy, (-PI / 4.0 - 1.0) / (-2.0 * PI) / 2.0, epsilon = 1e-15);
        assert_eq!(
            ray_limit(0.3, &m, Component::StressXx).unwrap(),
            Limit::PlusInfinity
        );
        assert!(ray_limit(PI / 2.0, &m, Component::StrainYy).is_err());
        assert!(ray_limit_named(0.0, &m, "strain_zz").is_err());
    }

    #[test]
    fn constitutive_law() {
        let m = Material::new(2.5, 0.7).unwrap();
        for z in [c(0.3, 0.1), c(1.5, -2.0), c(0.01, 0.9), c(2.0, 0.0)] {
            let s = FieldSample::eval(z, &m).unwrap();
            let tr = s.strain.trace();
            let scale = s.stress.max_abs();
            assert!(
                (s.stress.xx - (m.lambda() * tr + 2.0 * m.mu() * s.strain.xx)).abs()
                    < 1e-12 * scale
            );
            assert!(
                (s.stress.yy - (m.lambda() * tr + 2.0 * m.mu() * s.strain.yy)).abs()
                    < 1e-12 * scale
            );
            assert!((s.stress.xy - 2.0 * m.mu() * s.strain.xy).abs() < 1e-12 * scale);
            assert!((s.stress.zz - m.lambda() * tr).abs() < 1e-12 * scale);
            let sym = 0.5 * (s.grad_u[(0, 1)] + s.grad_u[(1, 0)]);
            assert!((sym - s.strain.xy).abs() < 1e-14 * scale.max(1.0));
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let m = Material::new(1.3, 0.8).unwrap();
        for z in [c(0.4, 0.3), c(1.2, -0.7), c(2.5, 1.5)] {
            let s = FieldSample::eval(z, &m).unwrap();
            let err = |h: f64| {
                let dx = (displacement(z + h, &m).unwrap() - displacement(z - h, &m).unwrap())
                    / (2.0 * h);
                let ih = c(0.0, h);
                let dy = (displacement(z + ih, &m).unwrap() - displacement(z - ih, &m).unwrap())
                    / (2.0 * h);
                let fd = Matrix2::new(dx.re, dy.re, dx.im, dy.im);
                (fd - s.grad_u).amax()
            };
            let (e1, e2) = (err(1e-3), err(5e-4));
            assert!(e1 < 1e-5, "grad error {e1} at {z}");
            assert!(e1 / e2 > 3.5, "order ratio {} at {z}", e1 / e2);
        }
    }

    #[test]
    fn stress_gradient_matches_central_differences() {
        let m = unit();
        let h = 1e-5;
        for z in [c(0.5, 0.2), c(1.1, -1.6), c(0.05, 0.3)] {
            let g = stress_gradient(z, &m).unwrap();
            let at = |w: Complex64| FieldSample::eval(w, &m).unwrap().stress;
            let (px, mx) = (at(z + h), at(z - h));
            let (py, my) = (at(z + c(0.0, h)), at(z - c(0.0, h)));
            let fd = |a: f64, b: f64| (a - b) / (2.0 * h);
            let scale = g.dx.max_abs().max(g.dy.max_abs());
            for (an, num) in [
                (g.dx.xx, fd(px.xx, mx.xx)),
                (g.dx.yy, fd(px.yy, mx.yy)),
                (g.dx.xy, fd(px.xy, mx.xy)),
                (g.dx.zz, fd(px.zz, mx.zz)),
                (g.dy.xx, fd(py.xx, my.xx)),
                (g.dy.yy, fd(py.yy, my.yy)),
                (g.dy.xy, fd(py.xy, my.xy)),
                (g.dy.zz, fd(py.zz, my.zz)),
            ] {
                assert!((an - num).abs() < 1e-6 * scale, "{an} vs {num} at {z}");
            }
            let div = g.divergence();
            assert!(div[0].abs() < 1e-12 * scale && div[1].abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn mirror_symmetry() {
        let m = Material::new(0.5, 2.0).unwrap();
        for z in [c(0.3, 0.7), c(1.9, 2.2), c(0.01, 0.02)] {
            let up = displacement(z, &m).unwrap();
            let down = displacement(z.conj(), &m).unwrap();
            assert!((up.re - down.re).abs() < 1e-14 * up.norm());
            assert!((up.im + down.im).abs() < 1e-14 * up.norm());
        }
    }

    #[test]
    fn identity_scaling() {
        let m = unit();
        let p = ScaledProblem {
            a_prime: 1.0,
            b: 1.0,
            sigma_l: 0.0,
            sigma_s: 1.0,
            rho: 0.0,
            phi: PI / 2.0,
            a: 0.5,
        };
        let z = c(0.7, -0.2);
        assert_eq!(
            apply_scaling(&p, &m, z).unwrap(),
            FieldSample::eval(z, &m).unwrap()
        );
        let q = ScaledProblem {
            a_prime: 2.0,
            b: 3.0,
            a: 3.0,
            ..p
        };
        assert_relative_eq!(
            scaled_displacement(&q, &m, c(0.0, 0.0)).unwrap().re,
            -1.0,
            epsilon = 1e-15
        );
    }
}
