//! Analytic potentials of the half-space contact-line solution.
//!
//! The solution is carried by a single analytic function `F` on the closed
//! right half-plane (the second Kolosov potential is `G = kF + zF'`):
//!
//! ```text
//! kF(z) = (π/2 + z log z) / (π (1 + z²))
//! ```
//!
//! Three evaluation paths are provided:
//!
//! * the *chain* route, which writes `kπF = z log z + g` and obtains
//!   `g, g', g'', g'''` by solving each differentiated defining identity of `g`
//!   for its highest derivative;
//! * the *closed* route, which uses the explicit rational-logarithmic
//!   expressions of `F`, `F'`, `F''` (and `F'''` by the product rule);
//! * a *series* fallback inside a small disk around `±i`, where both routes
//!   are `0/0`. There `π/2 + z log z = (z ∓ i) F₁(z)` and `F₁` is expanded in
//!   Taylor series.
//!
//! At `z = 0` the potential itself extends continuously (`kF(0) = 1/2`) while
//! every derivative diverges; those slots are reported as [`Slot::Divergent`]
//! rather than as non-finite floats.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Radius of the disks around `±i` inside which the series fallback is used.
pub const GUARD_RADIUS: f64 = 0.05;

/// Taylor degree of the expansion of `π/2 + z log z` about `±i`.
pub const SERIES_DEGREE: usize = 12;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error("log is undefined at the origin")]
    LogAtOrigin,
    #[error("z = {0} lies on the branch cut (negative real axis)")]
    BranchCut(Complex64),
    #[error("z = {0} lies outside the closed right half-plane")]
    OutsideBody(Complex64),
    #[error("z = {z} is within {distance:.3e} of a pole of 1/(1+z²); use the series route")]
    NearPole { z: Complex64, distance: f64 },
    #[error("the conformal map is singular at ζ = -1")]
    MapPole,
    #[error("ζ = {0} lies outside the open unit disk")]
    OutsideDisk(Complex64),
    #[error("invalid material: {0}")]
    Material(String),
}

/// Isotropic linear-elastic material in plane strain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    lambda: f64,
    mu: f64,
}

impl Material {
    pub fn new(lambda: f64, mu: f64) -> Result<Self, PotentialError> {
        if !(lambda.is_finite() && mu.is_finite()) {
            return Err(PotentialError::Material(
                "Lamé parameters must be finite".into(),
            ));
        }
        if mu <= 0.0 {
            return Err(PotentialError::Material(format!(
                "shear modulus must be positive, got {mu}"
            )));
        }
        if lambda + mu <= 0.0 {
            return Err(PotentialError::Material(format!(
                "λ + μ must be positive, got λ = {lambda}, μ = {mu}"
            )));
        }
        Ok(Self { lambda, mu })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Kolosov constant `k = −(λ + 3μ)/(λ + μ)`, always in `(−3, −1)`.
    pub fn kolosov(&self) -> f64 {
        -(self.lambda + 3.0 * self.mu) / (self.lambda + self.mu)
    }
}

/// Which evaluation path produced a [`PotentialChain`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    Chain,
    Closed,
    SeriesFallback,
    /// Continuous-extension values at `z = 0`.
    Origin,
}

/// How a derivative blows up at the contact line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Divergence {
    /// `Re F' → +∞` while `Im F'` stays bounded.
    RealPartToPlusInfinity,
    /// `|F^(n)| → ∞` with a direction-dependent phase.
    Modulus,
}

/// One entry of the `F` chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slot {
    Finite(Complex64),
    Divergent(Divergence),
}

impl Slot {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            Slot::Finite(v) => Some(v),
            Slot::Divergent(_) => None,
        }
    }
}

/// Values of the auxiliary function `g` and its derivatives.
///
/// `g'''` has no limit at the origin; only `z g'''(z)` extends continuously
/// (to `0`), so `g3` is `None` there and `z_g3` carries the extension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GChain {
    pub g: [Complex64; 3],
    pub g3: Option<Complex64>,
    pub z_g3: Complex64,
}

/// `F, F', F'', F'''` at a point together with the matching `g` chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialChain {
    pub z: Complex64,
    pub route: Route,
    pub g: GChain,
    pub f: [Slot; 4],
}

impl PotentialChain {
    /// `F^(order)` if it is finite at this point.
    pub fn f(&self, order: usize) -> Option<Complex64> {
        self.f[order].finite()
    }

    pub fn divergence(&self, order: usize) -> Option<Divergence> {
        match self.f[order] {
            Slot::Divergent(d) => Some(d),
            Slot::Finite(_) => None,
        }
    }

    /// `F, F', F'', F'''` when all four are finite (every point but the origin).
    pub fn finite(&self) -> Option<[Complex64; 4]> {
        Some([self.f(0)?, self.f(1)?, self.f(2)?, self.f(3)?])
    }
}

/// Principal logarithm on `C − R₋`, with `arg ∈ (−π, π)`.
pub fn principal_log(z: Complex64) -> Result<Complex64, PotentialError> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(PotentialError::LogAtOrigin);
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(PotentialError::BranchCut(z));
    }
    Ok(Complex64::new(z.norm().ln(), z.im.atan2(z.re)))
}

fn check_domain(z: Complex64) -> Result<(), PotentialError> {
    if !(z.re >= 0.0) || !z.im.is_finite() || !z.re.is_finite() {
        return Err(PotentialError::OutsideBody(z));
    }
    Ok(())
}

fn is_origin(z: Complex64) -> bool {
    z.re == 0.0 && z.im == 0.0
}

/// Distance from `z` to the nearer of `±i`.
pub fn pole_distance(z: Complex64) -> f64 {
    (z - I).norm().min((z + I).norm())
}

fn check_pole(z: Complex64) -> Result<(), PotentialError> {
    let distance = pole_distance(z);
    if distance < GUARD_RADIUS {
        return Err(PotentialError::NearPole { z, distance });
    }
    Ok(())
}

/// `g, g', g'', g'''` from the recursive defining identities
///
/// ```text
/// (1+z²) g   = π/2 − z³ log z
/// (1+z²) g'  = −3z² log z − z² − 2z g
/// (1+z²) g'' = −6z log z − 5z − 2g − 4z g'
/// (1+z²) g'''= −6 log z − 11 − 6g' − 6z g''
/// ```
pub fn eval_g_chain(z: Complex64) -> Result<GChain, PotentialError> {
    check_domain(z)?;
    if is_origin(z) {
        return Ok(GChain {
            g: [
                Complex64::from(FRAC_PI_2),
                Complex64::from(0.0),
                Complex64::from(-PI),
            ],
            g3: None,
            z_g3: Complex64::from(0.0),
        });
    }
    check_pole(z)?;
    let log = principal_log(z)?;
    let z2 = z * z;
    let denom = 1.0 + z2;
    let g0 = (FRAC_PI_2 - z2 * z * log) / denom;
    let g1 = (-3.0 * z2 * log - z2 - 2.0 * z * g0) / denom;
    let g2 = (-6.0 * z * log - 5.0 * z - 2.0 * g0 - 4.0 * z * g1) / denom;
    let g3 = (-6.0 * log - 11.0 - 6.0 * g1 - 6.0 * z * g2) / denom;
    Ok(GChain {
        g: [g0, g1, g2],
        g3: Some(g3),
        z_g3: z * g3,
    })
}

fn origin_chain(m: &Material) -> PotentialChain {
    let g = eval_g_chain(Complex64::from(0.0)).expect("origin is in the domain");
    PotentialChain {
        z: Complex64::from(0.0),
        route: Route::Origin,
        g,
        f: [
            Slot::Finite(Complex64::from(0.5 / m.kolosov())),
            Slot::Divergent(Divergence::RealPartToPlusInfinity),
            Slot::Divergent(Divergence::Modulus),
            Slot::Divergent(Divergence::Modulus),
        ],
    }
}

/// `F` chain through the `g` recursion: `kπF = z log z + g`,
/// `kπF' = log z + 1 + g'`, `kπF'' = 1/z + g''`, `kπF''' = −1/z² + g'''`.
pub fn eval_f_chain(z: Complex64, m: &Material) -> Result<PotentialChain, PotentialError> {
    check_domain(z)?;
    if is_origin(z) {
        return Ok(origin_chain(m));
    }
    let g = eval_g_chain(z)?;
    let log = principal_log(z)?;
    let kpi = m.kolosov() * PI;
    let g3 = g.g3.expect("g''' is finite away from the origin");
    let f = [
        (z * log + g.g[0]) / kpi,
        (log + 1.0 + g.g[1]) / kpi,
        (1.0 / z + g.g[2]) / kpi,
        (-1.0 / (z * z) + g3) / kpi,
    ];
    Ok(PotentialChain {
        z,
        route: Route::Chain,
        g,
        f: f.map(Slot::Finite),
    })
}

fn g_from_f(z: Complex64, log: Complex64, kpi_f: &[Complex64; 4]) -> GChain {
    let g3 = kpi_f[3] + 1.0 / (z * z);
    GChain {
        g: [kpi_f[0] - z * log, kpi_f[1] - log - 1.0, kpi_f[2] - 1.0 / z],
        g3: Some(g3),
        z_g3: z * g3,
    }
}

/// `F` chain from the explicit closed forms
///
/// ```text
/// kπF   = (π/2 + z log z) / (1+z²)
/// kπF'  = (1 − πz + z² + (1−z²) log z) / (1+z²)²
/// kπF'' = (1 − πz − 2z² + 3πz³ − 3z⁴ + (−6z² + 2z⁴) log z) / (z (1+z²)³)
/// ```
///
/// with `(1+z²) kπF''' = −1/z² − 6z kπF'' − 6 kπF'`. Inside the guard disks
/// around `±i` the series fallback is used instead.
pub fn eval_f_closed(z: Complex64, m: &Material) -> Result<PotentialChain, PotentialError> {
    check_domain(z)?;
    if is_origin(z) {
        return Ok(origin_chain(m));
    }
    if pole_distance(z) < GUARD_RADIUS {
        return eval_f_series(z, m);
    }
    let log = principal_log(z)?;
    let z2 = z * z;
    let d = 1.0 + z2;
    let d2 = d * d;
    let kf0 = (FRAC_PI_2 + z * log) / d;
    let kf1 = (1.0 - PI * z + z2 + (1.0 - z2) * log) / d2;
    let z3 = z2 * z;
    let z4 = z2 * z2;
    let kf2 = (1.0 - PI * z - 2.0 * z2 + 3.0 * PI * z3 - 3.0 * z4 + (-6.0 * z2 + 2.0 * z4) * log)
        / (z * d2 * d);
    let kf3 = (-1.0 / z2 - 6.0 * z * kf2 - 6.0 * kf1) / d;
    let kpi_f = [kf0, kf1, kf2, kf3];
    let kpi = m.kolosov() * PI;
    Ok(PotentialChain {
        z,
        route: Route::Closed,
        g: g_from_f(z, log, &kpi_f),
        f: kpi_f.map(|v| Slot::Finite(v / kpi)),
    })
}

/// Taylor coefficients of `F₁(z) = (π/2 + z log z)/(z − c)` about `c = ±i`,
/// in powers of `(z − c)`.
fn numerator_factor_coefficients(c: Complex64) -> Vec<Complex64> {
    // N(z) = π/2 + z log z has N(c) = 0, N'(c) = log c + 1 and
    // N^(n)(c) = (−1)^n (n−2)! / c^(n−1) for n ≥ 2.
    let mut coeffs = Vec::with_capacity(SERIES_DEGREE);
    coeffs.push(principal_log(c).expect("±i is off the cut") + 1.0);
    let mut c_pow = c;
    for n in 2..=SERIES_DEGREE {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        coeffs.push(sign / ((n * (n - 1)) as f64 * c_pow));
        c_pow *= c;
    }
    coeffs
}

/// Polynomial value and first three derivatives at `w` (coefficients in
/// ascending order).
fn poly_jet(coeffs: &[Complex64], w: Complex64) -> [Complex64; 4] {
    // Horner on the shifted Taylor coefficients p^(n)(w)/n!.
    let mut t = [Complex64::from(0.0); 4];
    for &a in coeffs.iter().rev() {
        t[3] = t[3] * w + t[2];
        t[2] = t[2] * w + t[1];
        t[1] = t[1] * w + t[0];
        t[0] = t[0] * w + a;
    }
    [t[0], t[1], 2.0 * t[2], 6.0 * t[3]]
}

/// Series evaluation of the `F` chain near `±i`.
///
/// Valid in the whole guard disk; used by [`eval_f_closed`] and
/// [`eval_potentials`] there, and callable directly for cross-checks.
pub fn eval_f_series(z: Complex64, m: &Material) -> Result<PotentialChain, PotentialError> {
    check_domain(z)?;
    let c = if (z - I).norm() <= (z + I).norm() {
        I
    } else {
        -I
    };
    let coeffs = numerator_factor_coefficients(c);
    let p = poly_jet(&coeffs, z - c);
    // kπF = F₁(z) / (z + c)
    let s = 1.0 / (z + c);
    let q = [s, -s * s, 2.0 * s * s * s, -6.0 * s * s * s * s];
    let kpi_f = [
        p[0] * q[0],
        p[1] * q[0] + p[0] * q[1],
        p[2] * q[0] + 2.0 * p[1] * q[1] + p[0] * q[2],
        p[3] * q[0] + 3.0 * p[2] * q[1] + 3.0 * p[1] * q[2] + p[0] * q[3],
    ];
    let log = principal_log(z)?;
    let kpi = m.kolosov() * PI;
    Ok(PotentialChain {
        z,
        route: Route::SeriesFallback,
        g: g_from_f(z, log, &kpi_f),
        f: kpi_f.map(|v| Slot::Finite(v / kpi)),
    })
}

/// Default evaluation used by the field evaluators: origin extension at
/// `z = 0`, series fallback near `±i`, closed forms elsewhere.
pub fn eval_potentials(z: Complex64, m: &Material) -> Result<PotentialChain, PotentialError> {
    eval_f_closed(z, m)
}

/// Möbius map `ω(ζ) = (1 − ζ)/(1 + ζ)`, an involution taking the unit disk
/// onto the right half-plane.
pub fn omega(zeta: Complex64) -> Result<Complex64, PotentialError> {
    let den = 1.0 + zeta;
    if den.norm() == 0.0 {
        return Err(PotentialError::MapPole);
    }
    Ok((1.0 - zeta) / den)
}

/// `kΦ(ζ)` on the unit disk, with the additive constant `C = −1/4`.
pub fn k_phi(zeta: Complex64) -> Result<Complex64, PotentialError> {
    if zeta.norm() >= 1.0 {
        return Err(PotentialError::OutsideDisk(zeta));
    }
    let w = omega(zeta)?;
    let zeta2 = zeta * zeta;
    let log = principal_log(w)?;
    Ok((1.0 + zeta + zeta2 + (1.0 - zeta2) / PI * log) / (2.0 * (1.0 + zeta2)) - 0.25)
}

/// `|kΦ(ζ) − kF(ω(ζ))|`: consistency of the disk-variable potential with the
/// half-plane closed form.
pub fn conformal_check(zeta: Complex64, m: &Material) -> Result<f64, PotentialError> {
    let lhs = k_phi(zeta)?;
    let z = omega(zeta)?;
    let rhs = m.kolosov()
        * eval_f_closed(z, m)?
            .f(0)
            .expect("F is finite on the closed half-plane");
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn steel() -> Material {
        Material::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn principal_log_cases() {
        assert_eq!(principal_log(c(1.0, 0.0)).unwrap(), c(0.0, 0.0));
        let li = principal_log(c(0.0, 1.0)).unwrap();
        assert!(li.re.abs() < 1e-16);
        assert_relative_eq!(li.im, FRAC_PI_2);
        assert_eq!(
            principal_log(c(-1.0, 0.0)),
            Err(PotentialError::BranchCut(c(-1.0, 0.0)))
        );
        assert_eq!(principal_log(c(0.0, 0.0)), Err(PotentialError::LogAtOrigin));
    }

    #[test]
    fn kolosov_constant() {
        assert_eq!(steel().kolosov(), -2.0);
        let m = Material::new(0.0, 1.0).unwrap();
        assert_eq!(m.kolosov(), -3.0);
        assert!(Material::new(1.0, 0.0).is_err());
        assert!(Material::new(-2.0, 1.0).is_err());
    }

    #[test]
    fn g_chain_at_origin_and_one() {
        let g = eval_g_chain(c(0.0, 0.0)).unwrap();
        assert_eq!(g.g[0], c(FRAC_PI_2, 0.0));
        assert_eq!(g.g[1], c(0.0, 0.0));
        assert_eq!(g.g[2], c(-PI, 0.0));
        assert!(g.g3.is_none());
        let g1 = eval_g_chain(c(1.0, 0.0)).unwrap();
        assert_relative_eq!(g1.g[0].re, PI / 4.0, epsilon = 1e-15);
        assert!(g1.g[0].im.abs() < 1e-15);
    }

    #[test]
    fn g_chain_continuous_at_origin() {
        let near = eval_g_chain(c(1e-9, 1e-9)).unwrap();
        let at = eval_g_chain(c(0.0, 0.0)).unwrap();
        for n in 0..3 {
            assert!((near.g[n] - at.g[n]).norm() < 1e-6, "g^({n})");
        }
        assert!(near.z_g3.norm() < 1e-6);
    }

    #[test]
    fn f_chain_values() {
        let m = steel();
        let k = m.kolosov();
        let origin = eval_f_chain(c(0.0, 0.0), &m).unwrap();
        assert_eq!(k * origin.f(0).unwrap(), c(0.5, 0.0));
        assert_eq!(
            origin.divergence(1),
            Some(Divergence::RealPartToPlusInfinity)
        );
        assert!(origin.f(2).is_none() && origin.f(3).is_none());
        let one = eval_f_chain(c(1.0, 0.0), &m).unwrap();
        assert_relative_eq!((k * one.f(0).unwrap()).re, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn chain_matches_closed_off_axis() {
        let m = steel();
        let z = c(0.5, 0.5);
        let a = eval_f_chain(z, &m).unwrap().finite().unwrap();
        let b = eval_f_closed(z, &m).unwrap().finite().unwrap();
        for n in 0..4 {
            assert!((a[n] - b[n]).norm() <= 1e-10 * b[n].norm(), "order {n}");
        }
    }

    #[test]
    fn chain_refuses_guard_disk() {
        let m = steel();
        assert!(matches!(
            eval_f_chain(c(0.01, 1.0), &m),
            Err(PotentialError::NearPole { .. })
        ));
        assert!(matches!(
            eval_f_chain(c(0.0, -0.98), &m),
            Err(PotentialError::NearPole { .. })
        ));
        assert!(matches!(
            eval_f_chain(c(-0.1, 1.0), &m),
            Err(PotentialError::OutsideBody(_))
        ));
    }

    #[test]
    fn series_value_at_i() {
        // kπF(i) = F₁(i)/(2i) with F₁(i) = N'(i) = log i + 1.
        let m = steel();
        let k = m.kolosov();
        let expected = (c(1.0, FRAC_PI_2)) / (c(0.0, 2.0) * PI);
        let got = eval_f_closed(c(0.0, 1.0), &m).unwrap();
        assert_eq!(got.route, Route::SeriesFallback);
        assert!((k * got.f(0).unwrap() - expected).norm() < 1e-12);
        let conj = eval_f_closed(c(0.0, -1.0), &m).unwrap().f(0).unwrap();
        assert!((conj - got.f(0).unwrap().conj()).norm() < 1e-12);
    }

    #[test]
    fn series_agrees_with_closed_on_guard_boundary() {
        let m = steel();
        for t in 0..16 {
            let a = -FRAC_PI_2 + PI * (t as f64 + 0.5) / 16.0;
            for centre in [I, -I] {
                let z = centre + GUARD_RADIUS * 1.01 * Complex64::from_polar(1.0, a);
                if z.re < 0.0 {
                    continue;
                }
                let s = eval_f_series(z, &m).unwrap().finite().unwrap();
                let cl = eval_f_closed(z, &m).unwrap().finite().unwrap();
                for n in 0..4 {
                    let tol = 1e-10 * cl[n].norm().max(1.0);
                    assert!(
                        (s[n] - cl[n]).norm() < tol,
                        "order {n} at {z}: {} vs {}",
                        s[n],
                        cl[n]
                    );
                }
            }
        }
    }

    #[test]
    fn conformal_identities() {
        let m = steel();
        assert_eq!(omega(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert!(conformal_check(c(0.0, 0.0), &m).unwrap() <= 1e-12);
        assert!(conformal_check(c(0.3, 0.4), &m).unwrap() <= 1e-10);
        assert_eq!(omega(c(-1.0, 0.0)), Err(PotentialError::MapPole));
        let zeta = c(-0.2, 0.7);
        assert!((omega(omega(zeta).unwrap()).unwrap() - zeta).norm() < 1e-15);
    }
}
