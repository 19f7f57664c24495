//! Equilibrium equations at a triple line where a deformable body meets two
//! fluids.
//!
//! Geometry lives in the plane normal to the line. Each side carries an
//! outward conormal (unit vector tangent to that surface, pointing away from
//! the line). Going counter-clockwise about `τ`: the first body–fluid side,
//! then across the first fluid (angle `first_fluid`) to the fluid–fluid
//! interface, across the second fluid (angle `second_fluid`) to the second
//! body–fluid side, and back across the body (angle `body`).

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Window around `body = π` where form 2c switches to its series.
pub const STRAIGHT_BODY_WINDOW: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LineError {
    #[error("contact angles sum to {0}, expected 2π")]
    AngleSum(f64),
    #[error("relative deformation normal component must be positive, got {0}")]
    NonPositiveStretch(f64),
    #[error("frame vector `{0}` is not a unit vector orthogonal to the tangent")]
    BadFrame(&'static str),
    #[error("body angle has zero sine while the relative stretch differs from 1")]
    Singular,
}

/// Components of `σ_s · ν` in the basis `(ν, τ)` of one side.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConormalStress {
    pub normal: f64,
    pub shear: f64,
}

/// One body–fluid side of the line.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Side {
    /// Surface energy.
    pub energy: f64,
    pub stress: ConormalStress,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactAngles {
    pub first_fluid: f64,
    pub second_fluid: f64,
    pub body: f64,
}

/// Components of the relative deformation gradient applied to the first
/// conormal, in the basis `(−ν', τ)` of the second side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeDeformation {
    pub normal: f64,
    pub shear: f64,
}

impl Default for RelativeDeformation {
    fn default() -> Self {
        Self {
            normal: 1.0,
            shear: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFrame {
    pub first: Vector3<f64>,
    pub second: Vector3<f64>,
    pub interface: Vector3<f64>,
    pub tangent: Vector3<f64>,
}

impl LineFrame {
    /// Conormals in the `xy` plane with the body wedge bisected by `+x` and
    /// `τ = e_z`.
    pub fn from_angles(a: &ContactAngles) -> Self {
        let dir = |t: f64| Vector3::new(t.cos(), t.sin(), 0.0);
        let start = a.body / 2.0;
        Self {
            first: dir(start),
            interface: dir(start + a.first_fluid),
            second: dir(start + a.first_fluid + a.second_fluid),
            tangent: Vector3::z(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineConfig {
    pub first: Side,
    pub second: Side,
    /// Fluid–fluid surface tension.
    pub tension: f64,
    pub angles: ContactAngles,
    pub relative: RelativeDeformation,
    pub frame: LineFrame,
}

impl LineConfig {
    /// Validate inputs and build the frame from the angles.
    pub fn new(
        first: Side,
        second: Side,
        tension: f64,
        angles: ContactAngles,
        relative: RelativeDeformation,
    ) -> Result<Self, LineError> {
        Self::with_frame(
            first,
            second,
            tension,
            angles,
            relative,
            LineFrame::from_angles(&angles),
        )
    }

    pub fn with_frame(
        first: Side,
        second: Side,
        tension: f64,
        angles: ContactAngles,
        relative: RelativeDeformation,
        frame: LineFrame,
    ) -> Result<Self, LineError> {
        let sum = angles.first_fluid + angles.second_fluid + angles.body;
        if (sum - 2.0 * PI).abs() > 1e-12 {
            return Err(LineError::AngleSum(sum));
        }
        if !(relative.normal > 0.0) {
            return Err(LineError::NonPositiveStretch(relative.normal));
        }
        if (frame.tangent.norm() - 1.0).abs() > 1e-12 {
            return Err(LineError::BadFrame("tangent"));
        }
        for (v, name) in [
            (frame.first, "first"),
            (frame.second, "second"),
            (frame.interface, "interface"),
        ] {
            if (v.norm() - 1.0).abs() > 1e-12 || v.dot(&frame.tangent).abs() > 1e-12 {
                return Err(LineError::BadFrame(name));
            }
        }
        Ok(Self {
            first,
            second,
            tension,
            angles,
            relative,
            frame,
        })
    }

    /// Symmetric half-space configuration: isotropic surface stress
    /// `sigma_s` on both sides, line force `sigma_l` and half-angle `phi`.
    pub fn symmetric(sigma_s: f64, sigma_l: f64, phi: f64, energy: f64) -> Result<Self, LineError> {
        let side = Side {
            energy,
            stress: ConormalStress {
                normal: sigma_s,
                shear: 0.0,
            },
        };
        let angles = ContactAngles {
            first_fluid: PI - phi,
            second_fluid: PI - phi,
            body: 2.0 * phi,
        };
        Self::new(side, side, sigma_l, angles, RelativeDeformation::default())
    }
}

/// `σ_s·ν + σ'_s·ν' + γ ν_ff'` assembled in ambient coordinates.
pub fn line_force_residual(c: &LineConfig) -> Vector3<f64> {
    let f = &c.frame;
    f.first * c.first.stress.normal
        + f.tangent * c.first.stress.shear
        + f.second * c.second.stress.normal
        + f.tangent * c.second.stress.shear
        + f.interface * c.tension
}

/// Force on the free line, `(σ_s − γ I)·ν + φ_r*·(σ'_s − γ' I')·ν'`, as a
/// vector tangent to the first side.
pub fn modified_line_force(c: &LineConfig) -> Vector3<f64> {
    let f = &c.frame;
    let a = &c.relative;
    let own = f.first * (c.first.stress.normal - c.first.energy) + f.tangent * c.first.stress.shear;
    let other =
        f.second * (c.second.stress.normal - c.second.energy) + f.tangent * c.second.stress.shear;
    // Adjoint of the map ν ↦ −a_n ν' + a_t τ, τ ↦ τ.
    let image_of_first = -f.second * a.normal + f.tangent * a.shear;
    let pulled = f.first * other.dot(&image_of_first) + f.tangent * other.dot(&f.tangent);
    own + pulled
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum YoungForm {
    /// Stress components on both sides.
    Stresses,
    /// Tensions and contact angles through `sin φ_b`.
    Sines,
    /// Tensions and contact angles through `(cos φ_b + a) / sin φ_b`.
    Cosines,
}

/// `(cos φ_b + a) / sin φ_b`, finite at `φ_b = π` when `a = 1`.
fn body_ratio(body: f64, a: f64) -> Result<f64, LineError> {
    let d = PI - body;
    if d.abs() <= STRAIGHT_BODY_WINDOW && a == 1.0 {
        // (1 − cos d) / sin d = tan(d/2)
        return Ok(d / 2.0 + d * d * d / 24.0);
    }
    let s = body.sin();
    if s == 0.0 || d == 0.0 {
        return Err(LineError::Singular);
    }
    Ok((body.cos() + a) / s)
}

/// Left-hand side of the modified Young equation in the chosen form.
pub fn modified_young_residual(c: &LineConfig, form: YoungForm) -> Result<f64, LineError> {
    let a = &c.relative;
    let tail = c.second.stress.shear * a.shear;
    let ang = &c.angles;
    Ok(match form {
        YoungForm::Stresses => {
            c.first.stress.normal
                - c.first.energy
                - (c.second.stress.normal - c.second.energy) * a.normal
                + tail
        }
        YoungForm::Sines if (PI - ang.body).abs() > STRAIGHT_BODY_WINDOW => {
            let s = ang.body.sin();
            if s == 0.0 {
                return Err(LineError::Singular);
            }
            -c.first.energy
                + c.second.energy * a.normal
                + c.tension * (ang.second_fluid.sin() - a.normal * ang.first_fluid.sin()) / s
                + tail
        }
        // Near a straight body the sine form is 0/0; it equals the cosine
        // form through sin φ_f' = −sin(φ_f + φ_b).
        YoungForm::Sines | YoungForm::Cosines => {
            -c.first.energy + c.second.energy * a.normal
                - c.tension * ang.first_fluid.cos()
                - c.tension * ang.first_fluid.sin() * body_ratio(ang.body, a.normal)?
                + tail
        }
    })
}

/// Classical Young residual `−γ_bf + γ_bf' − γ_ff' cos φ_f`.
pub fn classical_young_residual(c: &LineConfig) -> f64 {
    -c.first.energy + c.second.energy - c.tension * c.angles.first_fluid.cos()
}
