//! Numerical evidence for the regularity of the half-space solution:
//! finite elastic energy, Green's formula on the truncated domain, decay of
//! the small-arc traction integral and the Sobolev picture of the stress.
//!
//! Integration domains are the half-disk `V_0 = {|z| < r0, Re z > 0}` with
//! the half-disk of radius `eps` removed. Every integral carries a
//! discretisation estimate from a second run on a mesh refined by two in both
//! directions, plus a rounding floor `√N · ε_mach · ∫|f|`.

pub mod fit;
pub mod quadrature;

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields::{self, displacement, FieldError, FieldSample, Stress, StressGradient};
use crate::potentials::Material;
use fit::{linear_fit, nonnegative_linear_fit};
use quadrature::{graded_panels, integrate_line, integrate_polar, uniform_panels, RawSum};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("invalid quadrature: {0}")]
    InvalidSpec(String),
    #[error("quadrature did not converge: refinement changed `{what}` by {change:e} (allowed {allowed:e})")]
    NonConvergence {
        what: &'static str,
        change: f64,
        allowed: f64,
    },
    #[error("invalid eps schedule: {0}")]
    InvalidSchedule(String),
    #[error("fitted divergence slope {0} is not positive")]
    SlopeSign(f64),
    #[error("line-integral bound violated by more than 5% at eps = {eps:e}")]
    FitFailure { eps: f64 },
}

/// Polar quadrature on the truncated half-disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub r0: f64,
    pub eps: f64,
    /// Geometric subdivisions of each radial octave `[r, 2r]`.
    pub radial_rule: usize,
    /// Angular panels on `(−π/2, π/2)`.
    pub angular_rule: usize,
    /// Out-of-plane length; integrals are reported per this length.
    pub l0: f64,
    /// Relative tolerance for the refinement check.
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            r0: 1.0,
            eps: 1e-4,
            radial_rule: 1,
            angular_rule: 4,
            l0: 1.0,
            tol: 1e-8,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), VerifyError> {
        let bad = |m: String| Err(VerifyError::InvalidSpec(m));
        if !(self.eps > 0.0 && self.eps < self.r0 && self.r0.is_finite()) {
            return bad(format!(
                "need 0 < eps < r0, got eps = {}, r0 = {}",
                self.eps, self.r0
            ));
        }
        if self.radial_rule == 0 || self.angular_rule == 0 {
            return bad("panel counts must be at least 1".into());
        }
        if !(self.l0 > 0.0) || !(self.tol > 0.0) {
            return bad("l0 and tol must be positive".into());
        }
        Ok(())
    }

    pub fn with_eps(self, eps: f64) -> Self {
        Self { eps, ..self }
    }

    /// Same mesh with `factor` times the panels in both directions.
    pub fn refined(self, factor: usize) -> Self {
        Self {
            radial_rule: self.radial_rule * factor,
            angular_rule: self.angular_rule * factor,
            ..self
        }
    }

    fn radial(&self) -> Vec<(f64, f64)> {
        graded_panels(self.eps, self.r0, self.radial_rule)
    }

    fn angular(&self) -> Vec<(f64, f64)> {
        uniform_panels(-PI / 2.0, PI / 2.0, self.angular_rule)
    }
}

/// Integral value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    /// Integral of the absolute integrand.
    pub magnitude: f64,
}

fn combine<const N: usize>(coarse: RawSum<N>, fine: RawSum<N>) -> [Estimate; N] {
    let floor = (fine.nodes as f64).sqrt() * f64::EPSILON;
    std::array::from_fn(|i| Estimate {
        value: fine.value[i],
        error: (fine.value[i] - coarse.value[i]).abs() + floor * fine.abs[i],
        magnitude: fine.abs[i],
    })
}

fn check(est: &Estimate, tol: f64, what: &'static str) -> Result<(), VerifyError> {
    let allowed = 10.0 * tol * est.magnitude;
    if est.error > allowed {
        return Err(VerifyError::NonConvergence {
            what,
            change: est.error,
            allowed,
        });
    }
    Ok(())
}

fn polar_estimate<const N: usize, F>(q: &QuadratureSpec, f: F) -> Result<[Estimate; N], VerifyError>
where
    F: Fn(Complex64) -> Result<[f64; N], VerifyError> + Sync,
{
    q.validate()?;
    let fine = q.refined(2);
    let a = integrate_polar(&q.radial(), &q.angular(), &f)?;
    let b = integrate_polar(&fine.radial(), &fine.angular(), &f)?;
    Ok(combine(a, b))
}

fn line_estimate<const N: usize, F>(
    panels: impl Fn(usize) -> Vec<(f64, f64)>,
    n: usize,
    f: F,
) -> Result<[Estimate; N], VerifyError>
where
    F: Fn(f64) -> Result<[f64; N], VerifyError> + Sync,
{
    let a = integrate_line(&panels(n), &f)?;
    let b = integrate_line(&panels(2 * n), &f)?;
    Ok(combine(a, b))
}

/// A plane-strain stress field with analytic first derivatives.
pub trait StressField: Sync {
    fn stress(&self, z: Complex64) -> Result<Stress, FieldError>;
    fn stress_gradient(&self, z: Complex64) -> Result<StressGradient, FieldError>;
}

/// The contact-line solution for a given material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpace(pub Material);

impl StressField for HalfSpace {
    fn stress(&self, z: Complex64) -> Result<Stress, FieldError> {
        Ok(FieldSample::eval(z, &self.0)?.stress)
    }

    fn stress_gradient(&self, z: Complex64) -> Result<StressGradient, FieldError> {
        fields::stress_gradient(z, &self.0)
    }
}

/// Spatially constant stress; a regular control field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformStress(pub Stress);

impl StressField for UniformStress {
    fn stress(&self, _: Complex64) -> Result<Stress, FieldError> {
        Ok(self.0)
    }

    fn stress_gradient(&self, _: Complex64) -> Result<StressGradient, FieldError> {
        Ok(StressGradient::default())
    }
}

/// Strain energy density `λ/2 (tr ε)² + μ ε:ε` in plane strain.
pub fn energy_density(m: &Material, s: &FieldSample) -> f64 {
    let e = &s.strain;
    0.5 * m.lambda() * e.trace().powi(2) + m.mu() * (e.xx * e.xx + e.yy * e.yy + 2.0 * e.xy * e.xy)
}

/// Elastic energy per unit out-of-plane length on the truncated half-disk.
pub fn elastic_energy(m: &Material, q: &QuadratureSpec) -> Result<Estimate, VerifyError> {
    let [e] = polar_estimate(q, |z| Ok([energy_density(m, &FieldSample::eval(z, m)?)]))?;
    check(&e, q.tol, "elastic energy")?;
    Ok(e)
}

/// Virtual displacement fields vanishing on the outer arc `|z| = r0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestDisplacementField {
    Zero,
    /// `χ(r) p(x, y)` with `p_i = c0 + c1 x + c2 y + c3 x² + c4 xy + c5 y²`.
    BumpPolynomial {
        r0: f64,
        coeffs: [[f64; 6]; 2],
    },
    /// `χ(r) u(z)` with `u` the contact-line displacement of `material`.
    BumpSolution {
        r0: f64,
        material: Material,
    },
}

/// Cutoff `χ = (1 − r²/r0²)³` for `r < r0`, zero outside, with its gradient.
fn cutoff(z: Complex64, r0: f64) -> (f64, [f64; 2]) {
    let s = z.norm_sqr() / (r0 * r0);
    if s >= 1.0 {
        return (0.0, [0.0, 0.0]);
    }
    let t = 1.0 - s;
    let d = -6.0 * t * t / (r0 * r0);
    (t * t * t, [d * z.re, d * z.im])
}

fn poly(c: &[f64; 6], x: f64, y: f64) -> (f64, [f64; 2]) {
    (
        c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y,
        [
            c[1] + 2.0 * c[3] * x + c[4] * y,
            c[2] + c[4] * x + 2.0 * c[5] * y,
        ],
    )
}

impl TestDisplacementField {
    pub fn value(&self, z: Complex64) -> Result<Complex64, FieldError> {
        Ok(match self {
            Self::Zero => Complex64::from(0.0),
            Self::BumpPolynomial { r0, coeffs } => {
                let (chi, _) = cutoff(z, *r0);
                Complex64::new(
                    chi * poly(&coeffs[0], z.re, z.im).0,
                    chi * poly(&coeffs[1], z.re, z.im).0,
                )
            }
            Self::BumpSolution { r0, material } => cutoff(z, *r0).0 * displacement(z, material)?,
        })
    }

    /// Value and gradient `grad[(i, j)] = ∂_j w_i`.
    pub fn value_and_gradient(
        &self,
        z: Complex64,
    ) -> Result<(Complex64, Matrix2<f64>), FieldError> {
        let (chi, dchi) = match self {
            Self::Zero => return Ok((Complex64::from(0.0), Matrix2::zeros())),
            Self::BumpPolynomial { r0, .. } | Self::BumpSolution { r0, .. } => cutoff(z, *r0),
        };
        let (p, dp) = match self {
            Self::BumpPolynomial { coeffs, .. } => {
                let (px, gx) = poly(&coeffs[0], z.re, z.im);
                let (py, gy) = poly(&coeffs[1], z.re, z.im);
                (
                    Complex64::new(px, py),
                    Matrix2::new(gx[0], gx[1], gy[0], gy[1]),
                )
            }
            Self::BumpSolution { material, .. } => {
                let s = FieldSample::eval(z, material)?;
                (s.u, s.grad_u)
            }
            Self::Zero => unreachable!(),
        };
        let outer = Matrix2::new(
            p.re * dchi[0],
            p.re * dchi[1],
            p.im * dchi[0],
            p.im * dchi[1],
        );
        Ok((chi * p, dp * chi + outer))
    }

    /// Sampled `sup |w|` over the half-disk of radius `r0`.
    pub fn sup_norm(&self, r0: f64) -> Result<f64, FieldError> {
        const RADII: usize = 400;
        const ANGLES: usize = 181;
        let mut best = self.value(Complex64::from(0.0))?.norm();
        for i in 1..=RADII {
            let r = r0 * i as f64 / RADII as f64;
            for j in 0..ANGLES {
                let t = -PI / 2.0 + PI * j as f64 / (ANGLES - 1) as f64;
                best = best.max(self.value(Complex64::from_polar(r, t))?.norm());
            }
        }
        Ok(best)
    }
}

/// The four terms of Green's formula on the truncated domain, with normals
/// pointing into the domain on the straight sides and the small arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenBreakdown {
    pub eps: f64,
    /// `∫ σ_ij ∂_j w_i dv`
    pub volume: Estimate,
    /// `∫ ∂_j σ_ij w_i dv`
    pub divergence: Estimate,
    /// `∫ σ_ix w_i dy` over both straight sides.
    pub side: Estimate,
    /// `∫ σ_ij w_i r̂_j ε dθ` over the small arc.
    pub arc: Estimate,
    pub residual: f64,
    /// Sum of the four error estimates.
    pub error: f64,
}

impl GreenBreakdown {
    pub fn within(&self, factor: f64) -> bool {
        self.residual.abs() <= factor * self.error
    }

    /// Residual of the identity with the small-arc term dropped.
    pub fn limit_residual(&self) -> f64 {
        self.volume.value + self.divergence.value + self.side.value
    }
}

fn traction_dot(s: &Stress, n: [f64; 2], w: Complex64) -> f64 {
    (s.xx * n[0] + s.xy * n[1]) * w.re + (s.xy * n[0] + s.yy * n[1]) * w.im
}

fn arc_integral(
    m: &Material,
    w: &TestDisplacementField,
    q: &QuadratureSpec,
) -> Result<Estimate, VerifyError> {
    let eps = q.eps;
    let [arc] = line_estimate(
        |n| uniform_panels(-PI / 2.0, PI / 2.0, n),
        q.angular_rule,
        |t| {
            let z = Complex64::from_polar(eps, t);
            let s = FieldSample::eval(z, m)?.stress;
            Ok([eps * traction_dot(&s, [t.cos(), t.sin()], w.value(z)?)])
        },
    )?;
    Ok(arc)
}

/// Evaluate each term of Green's formula on the truncated domain.
pub fn green_residual(
    m: &Material,
    w: &TestDisplacementField,
    q: &QuadratureSpec,
) -> Result<GreenBreakdown, VerifyError> {
    let [volume, divergence] = polar_estimate(q, |z| {
        let (wv, dw) = w.value_and_gradient(z)?;
        if wv == Complex64::from(0.0) && dw == Matrix2::zeros() {
            return Ok([0.0, 0.0]);
        }
        let s = FieldSample::eval(z, m)?.stress;
        let div = fields::stress_gradient(z, m)?.divergence();
        Ok([
            s.xx * dw[(0, 0)] + s.xy * dw[(0, 1)] + s.xy * dw[(1, 0)] + s.yy * dw[(1, 1)],
            div[0] * wv.re + div[1] * wv.im,
        ])
    })?;
    let [side] = line_estimate(
        |n| graded_panels(q.eps, q.r0, n),
        q.radial_rule,
        |y| {
            let mut acc = 0.0;
            for z in [Complex64::new(0.0, y), Complex64::new(0.0, -y)] {
                let s = FieldSample::eval(z, m)?.stress;
                acc += traction_dot(&s, [1.0, 0.0], w.value(z)?);
            }
            Ok([acc])
        },
    )?;
    let arc = arc_integral(m, w, q)?;
    for (e, what) in [
        (&volume, "volume term"),
        (&divergence, "divergence term"),
        (&side, "side term"),
        (&arc, "arc term"),
    ] {
        check(e, q.tol, what)?;
    }
    let l0 = q.l0;
    let scale = |e: Estimate| Estimate {
        value: l0 * e.value,
        error: l0 * e.error,
        magnitude: l0 * e.magnitude,
    };
    let (volume, divergence, side, arc) =
        (scale(volume), scale(divergence), scale(side), scale(arc));
    Ok(GreenBreakdown {
        eps: q.eps,
        volume,
        divergence,
        side,
        arc,
        residual: volume.value + divergence.value + side.value + arc.value,
        error: volume.error + divergence.error + side.error + arc.error,
    })
}

fn validate_schedule(eps: &[f64], r0: f64) -> Result<(), VerifyError> {
    if eps.is_empty() {
        return Err(VerifyError::InvalidSchedule("empty".into()));
    }
    if eps.iter().any(|&e| !(e > 0.0 && e < r0)) {
        return Err(VerifyError::InvalidSchedule(format!(
            "every eps must lie in (0, {r0})"
        )));
    }
    if eps.windows(2).any(|p| p[1] >= p[0]) {
        return Err(VerifyError::InvalidSchedule(
            "eps values must strictly decrease".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub eps: f64,
    /// `|∫_{C_eps} σ_ij w_i n_j|` per unit length.
    pub integral: f64,
    pub error: f64,
    /// Fitted `(c |log eps| + d) e π eps l0`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayTable {
    pub rows: Vec<DecayRow>,
    pub c: f64,
    pub d: f64,
    /// Sampled sup of `|w|`.
    pub e: f64,
    pub l0: f64,
}

impl DecayTable {
    /// Entries strictly decrease with eps.
    pub fn monotone(&self) -> bool {
        self.rows.windows(2).all(|p| p[1].integral < p[0].integral)
    }

    /// Largest ratio of an entry to its fitted bound.
    pub fn worst_ratio(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| {
                if r.bound > 0.0 {
                    r.integral / r.bound
                } else if r.integral == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn within_bound(&self, slack: f64) -> bool {
        self.worst_ratio() <= 1.0 + slack
    }

    /// Observed ratio of consecutive entries divided by the ratio predicted
    /// by an `eps |log eps|` law.
    pub fn asymptotic_ratios(&self) -> Vec<(f64, f64)> {
        self.rows
            .windows(2)
            .map(|p| {
                let observed = p[1].integral / p[0].integral;
                let predicted = (p[1].eps / p[0].eps) * (p[1].eps.ln() / p[0].eps.ln());
                (p[0].eps, observed / predicted)
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,line_integral,error,bound\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.eps, r.integral, r.error, r.bound
            ));
        }
        out
    }
}

/// Small-arc traction integral over an eps schedule with a fitted
/// `(c |log eps| + d) e π eps l0` envelope.
pub fn line_integral_decay(
    m: &Material,
    w: &TestDisplacementField,
    q: &QuadratureSpec,
    eps_schedule: &[f64],
) -> Result<DecayTable, VerifyError> {
    validate_schedule(eps_schedule, q.r0)?;
    let e = w.sup_norm(q.r0)?;
    let mut raw = Vec::with_capacity(eps_schedule.len());
    for &eps in eps_schedule {
        let qe = q.with_eps(eps);
        qe.validate()?;
        let arc = arc_integral(m, w, &qe)?;
        raw.push((eps, q.l0 * arc.value.abs(), q.l0 * arc.error));
    }
    let (c, d) = if e > 0.0 {
        let x: Vec<f64> = raw.iter().map(|r| r.0.ln().abs()).collect();
        let y: Vec<f64> = raw.iter().map(|r| r.1 / (PI * r.0 * e * q.l0)).collect();
        nonnegative_linear_fit(&x, &y)
    } else {
        (0.0, 0.0)
    };
    let rows = raw
        .into_iter()
        .map(|(eps, integral, error)| DecayRow {
            eps,
            integral,
            error,
            bound: (c * eps.ln().abs() + d) * e * PI * eps * q.l0,
        })
        .collect();
    Ok(DecayTable {
        rows,
        c,
        d,
        e,
        l0: q.l0,
    })
}

/// Same as [`line_integral_decay`] but fails when an entry exceeds its
/// fitted bound by more than 5%.
pub fn line_integral_decay_checked(
    m: &Material,
    w: &TestDisplacementField,
    q: &QuadratureSpec,
    eps_schedule: &[f64],
) -> Result<DecayTable, VerifyError> {
    let t = line_integral_decay(m, w, q, eps_schedule)?;
    if let Some(r) = t.rows.iter().find(|r| r.integral > 1.05 * r.bound) {
        return Err(VerifyError::FitFailure { eps: r.eps });
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevRow {
    pub eps: f64,
    /// `∫ σ_ij²` for xx, yy, xy, z'z'.
    pub stress_l2: [f64; 4],
    /// `∫ |∂_x σ_xx|`
    pub gradient_l1: f64,
    /// `∫ (∂_x σ_xx)²`
    pub gradient_l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevReport {
    pub rows: Vec<SobolevRow>,
    /// Fitted slope of `∫ (∂_x σ_xx)²` against `log(1/eps)`.
    pub slope: f64,
    pub intercept: f64,
}

/// A sequence is taken as convergent when each increment is at most half the
/// previous one (or negligible against the value itself).
fn increments_shrink(values: &[f64]) -> bool {
    let diffs: Vec<f64> = values.windows(2).map(|p| (p[1] - p[0]).abs()).collect();
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    diffs
        .windows(2)
        .all(|d| d[1] <= 0.5 * d[0] || d[1] <= 1e-14 * scale)
}

impl SobolevReport {
    pub fn stress_l2_convergent(&self) -> [bool; 4] {
        std::array::from_fn(|i| {
            increments_shrink(&self.rows.iter().map(|r| r.stress_l2[i]).collect::<Vec<_>>())
        })
    }

    pub fn gradient_l1_convergent(&self) -> bool {
        increments_shrink(&self.rows.iter().map(|r| r.gradient_l1).collect::<Vec<_>>())
    }

    /// Fails when `∫ (∂_x σ_xx)²` does not grow with `log(1/eps)`.
    pub fn require_divergent(&self) -> Result<f64, VerifyError> {
        if self.slope > 0.0 {
            Ok(self.slope)
        } else {
            Err(VerifyError::SlopeSign(self.slope))
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,l2_xx,l2_yy,l2_xy,l2_zz,grad_l1,grad_l2\n");
        for r in &self.rows {
            let s = r.stress_l2;
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.eps, s[0], s[1], s[2], s[3], r.gradient_l1, r.gradient_l2
            ));
        }
        out
    }
}

/// Square and absolute integrals of the stress and of `∂_x σ_xx` over the
/// truncated domains of an eps schedule.
pub fn sobolev_diagnostics<S: StressField + ?Sized>(
    field: &S,
    eps_schedule: &[f64],
    q: &QuadratureSpec,
) -> Result<SobolevReport, VerifyError> {
    validate_schedule(eps_schedule, q.r0)?;
    let mut rows = Vec::with_capacity(eps_schedule.len());
    for &eps in eps_schedule {
        let v = polar_estimate(&q.with_eps(eps), |z| {
            let s = field.stress(z)?;
            let g = field.stress_gradient(z)?.dx.xx;
            Ok([
                s.xx * s.xx,
                s.yy * s.yy,
                s.xy * s.xy,
                s.zz * s.zz,
                g.abs(),
                g * g,
            ])
        })?;
        rows.push(SobolevRow {
            eps,
            stress_l2: [v[0].value, v[1].value, v[2].value, v[3].value],
            gradient_l1: v[4].value,
            gradient_l2: v[5].value,
        });
    }
    let x: Vec<f64> = rows.iter().map(|r| -r.eps.ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.gradient_l2).collect();
    let (slope, intercept) = if rows.len() > 1 {
        linear_fit(&x, &y)
    } else {
        (0.0, y[0])
    };
    Ok(SobolevReport {
        rows,
        slope,
        intercept,
    })
}

/// Leading-order growth rate of `∫ (∂_x σ_xx)²` per unit `log(1/eps)`:
/// the angular integral of `((k cos θ − cos 3θ) / kπ)²` over the half-plane,
/// by composite Gauss–Legendre quadrature.
pub fn divergence_slope(m: &Material) -> f64 {
    let k = m.kolosov();
    let raw = integrate_line::<1, (), _>(&uniform_panels(-PI / 2.0, PI / 2.0, 8), |t| {
        Ok([((k * t.cos() - (3.0 * t).cos()) / (k * PI)).powi(2)])
    })
    .expect("infallible integrand");
    raw.value[0]
}

/// Central-difference divergence of the stress at `z` with step `h`.
pub fn equilibrium_residual_fd<S: StressField + ?Sized>(
    field: &S,
    z: Complex64,
    h: f64,
) -> Result<[f64; 2], VerifyError> {
    let r = z.norm();
    if !(h > 0.0) || r <= 10.0 * h || z.re <= h {
        return Err(FieldError::StepTooLarge { h, r }.into());
    }
    let dx = Complex64::new(h, 0.0);
    let dy = Complex64::new(0.0, h);
    let (px, mx) = (field.stress(z + dx)?, field.stress(z - dx)?);
    let (py, my) = (field.stress(z + dy)?, field.stress(z - dy)?);
    let d = |a: f64, b: f64| (a - b) / (2.0 * h);
    Ok([
        d(px.xx, mx.xx) + d(py.xy, my.xy),
        d(px.xy, mx.xy) + d(py.yy, my.yy),
    ])
}

/// Stress gradient scale `max |σ_ij| / r` used to normalise FD residuals.
pub fn local_stress_scale<S: StressField + ?Sized>(
    field: &S,
    z: Complex64,
) -> Result<f64, VerifyError> {
    Ok(field.stress(z)?.max_abs() / z.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdEquilibrium {
    pub z: [f64; 2],
    pub h: f64,
    /// `|residual(h)| / scale`
    pub relative: f64,
    /// `log2(|residual(h)| / |residual(h/2)|)`
    pub order: f64,
}

/// FD equilibrium at `z` with `h = 1e-4 |z|` and the observed order from a
/// second run at `h/2`.
pub fn fd_equilibrium_check<S: StressField + ?Sized>(
    field: &S,
    z: Complex64,
) -> Result<FdEquilibrium, VerifyError> {
    let h = 1e-4 * z.norm();
    let norm = |v: [f64; 2]| v[0].hypot(v[1]);
    let r1 = norm(equilibrium_residual_fd(field, z, h)?);
    let r2 = norm(equilibrium_residual_fd(field, z, h / 2.0)?);
    let scale = local_stress_scale(field, z)?;
    Ok(FdEquilibrium {
        z: [z.re, z.im],
        h,
        relative: if scale > 0.0 { r1 / scale } else { r1 },
        order: (r1 / r2).log2(),
    })
}
