//! Assembly of the physical problem from tensions, moduli and length scales.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::potentials::{Material, PotentialError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalingError {
    #[error("no contact angle balances the line: sigma_l = {sigma_l} must lie in [0, 2 sigma_s) with sigma_s = {sigma_s}")]
    Infeasible { sigma_l: f64, sigma_s: f64 },
    #[error("length scale b = {0} must be positive and finite")]
    BadLength(f64),
    #[error("a' = {given} disagrees with the line-equilibrium value {required}")]
    Inconsistent { given: f64, required: f64 },
    #[error(transparent)]
    Material(#[from] PotentialError),
}

/// Physical load and length scales of the half-space problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledProblem {
    /// Load scale (force per unit length).
    pub a_prime: f64,
    pub b: f64,
    pub sigma_l: f64,
    pub sigma_s: f64,
    /// `sigma_l / (2 sigma_s)`.
    pub rho: f64,
    /// Contact half-angle, `arccos rho`.
    pub phi: f64,
    /// Boundary displacement amplitude `a′ b / 2μ`.
    pub a: f64,
}

impl ScaledProblem {
    /// Amplitude of the prescribed boundary displacement `−a / (|y| + b)`.
    pub fn boundary_displacement(&self, y: f64) -> f64 {
        -self.a / (y.abs() + self.b)
    }

    /// Line force recovered from the angle: `2 sigma_s cos phi`.
    pub fn recovered_sigma_l(&self) -> f64 {
        2.0 * self.sigma_s * self.phi.cos()
    }
}

/// Contact half-angle and the ratio `a/b²` fixed by the line balance.
pub fn contact_angle(sigma_l: f64, sigma_s: f64) -> Result<(f64, f64), ScalingError> {
    if !(sigma_s > 0.0) || !(sigma_l >= 0.0) || !(sigma_l < 2.0 * sigma_s) {
        return Err(ScalingError::Infeasible { sigma_l, sigma_s });
    }
    let rho = sigma_l / (2.0 * sigma_s);
    Ok((rho.acos(), rho / (1.0 - rho * rho).sqrt()))
}

/// Bind physical inputs into a consistent problem.
///
/// When `a_prime` is `None` it is derived from the line balance; when given
/// it must agree with that value to 1e-10 relative.
pub fn build_problem(
    sigma_l: f64,
    sigma_s: f64,
    lambda: f64,
    mu: f64,
    a_prime: Option<f64>,
    b: f64,
) -> Result<(Material, ScaledProblem), ScalingError> {
    let material = Material::new(lambda, mu)?;
    if !(b > 0.0) || !b.is_finite() {
        return Err(ScalingError::BadLength(b));
    }
    let (phi, a_over_b2) = contact_angle(sigma_l, sigma_s)?;
    let required = 2.0 * mu * b * a_over_b2;
    let a_prime = match a_prime {
        None => required,
        Some(given) => {
            if (given - required).abs() > 1e-10 * required.abs().max(1.0) {
                return Err(ScalingError::Inconsistent { given, required });
            }
            given
        }
    };
    let problem = ScaledProblem {
        a_prime,
        b,
        sigma_l,
        sigma_s,
        rho: sigma_l / (2.0 * sigma_s),
        phi,
        a: a_prime * b / (2.0 * mu),
    };
    Ok((material, problem))
}
