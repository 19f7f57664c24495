//! Pull-back and push-forward of surface strain and stress between the
//! reference (Lagrangian) and present (Eulerian) tangent planes.

use nalgebra::Matrix2;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("tangent map is singular")]
    Singular,
    #[error("metric is not positive definite")]
    BadMetric,
}

/// Tangent map `φ0` with the metrics of both states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformData {
    pub phi0: Matrix2<f64>,
    pub reference_metric: Matrix2<f64>,
    pub present_metric: Matrix2<f64>,
    /// Area ratio `da / da0`.
    pub area_ratio: f64,
    phi0_inv: Matrix2<f64>,
}

impl TransformData {
    pub fn new(
        phi0: Matrix2<f64>,
        reference_metric: Matrix2<f64>,
        present_metric: Matrix2<f64>,
    ) -> Result<Self, TransformError> {
        let phi0_inv = phi0.try_inverse().ok_or(TransformError::Singular)?;
        let g0 = reference_metric.determinant();
        let gp = (phi0.transpose() * present_metric * phi0).determinant();
        if !(g0 > 0.0 && gp > 0.0) {
            return Err(if g0 > 0.0 && phi0.determinant() != 0.0 {
                TransformError::BadMetric
            } else {
                TransformError::Singular
            });
        }
        Ok(Self {
            phi0,
            reference_metric,
            present_metric,
            area_ratio: (gp / g0).sqrt(),
            phi0_inv,
        })
    }

    /// Both metrics Euclidean.
    pub fn flat(phi0: Matrix2<f64>) -> Result<Self, TransformError> {
        Self::new(phi0, Matrix2::identity(), Matrix2::identity())
    }

    /// Covariant strain increment: `δe = φ0ᵀ δε φ0`.
    pub fn strain_to_reference(&self, d_eps: &Matrix2<f64>) -> Matrix2<f64> {
        self.phi0.transpose() * d_eps * self.phi0
    }

    /// Inverse of [`Self::strain_to_reference`].
    pub fn strain_to_present(&self, d_e: &Matrix2<f64>) -> Matrix2<f64> {
        self.phi0_inv.transpose() * d_e * self.phi0_inv
    }

    /// Contravariant stress: `π = A φ0⁻¹ σ φ0⁻ᵀ`.
    pub fn stress_to_reference(&self, sigma: &Matrix2<f64>) -> Matrix2<f64> {
        self.phi0_inv * sigma * self.phi0_inv.transpose() * self.area_ratio
    }

    /// Inverse of [`Self::stress_to_reference`]: `σ = A⁻¹ φ0 π φ0ᵀ`.
    pub fn stress_to_present(&self, pi: &Matrix2<f64>) -> Matrix2<f64> {
        self.phi0 * pi * self.phi0.transpose() / self.area_ratio
    }
}

/// Double contraction `a : b = Σ a_ij b_ij`.
pub fn contract(a: &Matrix2<f64>, b: &Matrix2<f64>) -> f64 {
    a.component_mul(b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_scaling() {
        let t = TransformData::flat(Matrix2::identity()).unwrap();
        let s = Matrix2::new(1.0, 2.0, 2.0, 3.0);
        assert_eq!(t.strain_to_reference(&s), s);
        assert_eq!(t.stress_to_reference(&s), s);
        let t2 = TransformData::flat(Matrix2::identity() * 2.0).unwrap();
        assert_eq!(t2.strain_to_reference(&s), s * 4.0);
        assert_eq!(
            TransformData::flat(Matrix2::new(2.0, 0.0, 0.0, 3.0))
                .unwrap()
                .area_ratio,
            6.0
        );
        assert_eq!(
            TransformData::flat(Matrix2::new(1.0, 2.0, 2.0, 4.0)),
            Err(TransformError::Singular)
        );
    }

    #[test]
    fn round_trips_and_work() {
        let t = TransformData::new(
            Matrix2::new(1.3, 0.2, -0.4, 0.9),
            Matrix2::new(2.0, 0.3, 0.3, 1.0),
            Matrix2::new(1.0, -0.2, -0.2, 1.5),
        )
        .unwrap();
        let s = Matrix2::new(0.7, -0.1, -0.1, 1.2);
        let e = Matrix2::new(0.01, 0.02, 0.02, -0.03);
        assert!((t.stress_to_present(&t.stress_to_reference(&s)) - s).amax() < 1e-15);
        assert!((t.strain_to_present(&t.strain_to_reference(&e)) - e).amax() < 1e-16);
        let lhs = contract(&t.stress_to_reference(&s), &t.strain_to_reference(&e));
        assert!((lhs - t.area_ratio * contract(&s, &e)).abs() < 1e-15);
    }
}
