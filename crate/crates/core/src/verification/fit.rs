//! Small least-squares fits for convergence tables and envelope bounds.

/// Unconstrained least-squares line `y ≈ slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return (0.0, my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Least-squares line with both coefficients constrained to be non-negative.
pub fn nonnegative_linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let (c, d) = linear_fit(x, y);
    if c >= 0.0 && d >= 0.0 {
        return (c, d);
    }
    let n = x.len() as f64;
    // Best fit on each face of the feasible quadrant, keep the better one.
    let mean = (y.iter().sum::<f64>() / n).max(0.0);
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let slope = if sxx > 0.0 {
        (x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / sxx).max(0.0)
    } else {
        0.0
    };
    let sse = |c: f64, d: f64| {
        x.iter()
            .zip(y)
            .map(|(a, b)| (b - c * a - d).powi(2))
            .sum::<f64>()
    };
    if sse(0.0, mean) <= sse(slope, 0.0) {
        (0.0, mean)
    } else {
        (slope, 0.0)
    }
}

/// Radial profile of an envelope `c·φ(r) + d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Envelope {
    /// `φ(r) = |log r|`
    Log,
    /// `φ(r) = 1/r`
    Inverse,
}

impl Envelope {
    pub fn profile(self, r: f64) -> f64 {
        match self {
            Envelope::Log => r.ln().abs(),
            Envelope::Inverse => 1.0 / r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeFit {
    pub c: f64,
    pub d: f64,
    /// Largest `value / (c φ(r) + d)` over the samples.
    pub worst_ratio: f64,
}

impl EnvelopeFit {
    pub fn holds_within(&self, slack: f64) -> bool {
        self.worst_ratio <= 1.0 + slack
    }
}

/// Fit `c φ(r) + d` (c, d ≥ 0) to `(r, value)` samples and report the worst
/// excess of any sample over the fitted curve.
pub fn fit_envelope(samples: &[(f64, f64)], kind: Envelope) -> EnvelopeFit {
    let x: Vec<f64> = samples.iter().map(|s| kind.profile(s.0)).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.1.abs()).collect();
    let (c, d) = nonnegative_linear_fit(&x, &y);
    let worst_ratio = x
        .iter()
        .zip(&y)
        .map(|(xi, yi)| {
            let b = c * xi + d;
            if b > 0.0 {
                yi / b
            } else if *yi == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    EnvelopeFit { c, d, worst_ratio }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0];
        let y = [3.0, 5.0, 7.0];
        assert_eq!(linear_fit(&x, &y), (2.0, 1.0));
        assert_eq!(nonnegative_linear_fit(&x, &y), (2.0, 1.0));
    }

    #[test]
    fn constrained_faces() {
        let (c, d) = nonnegative_linear_fit(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]);
        assert_eq!(c, 0.0);
        assert!((d - 2.0).abs() < 1e-15);
        let (c, d) = nonnegative_linear_fit(&[1.0, 2.0, 3.0], &[0.0, 2.0, 4.0]);
        assert!(c > 0.0 && d == 0.0);
    }

    #[test]
    fn envelope_of_log() {
        let s: Vec<(f64, f64)> = (1..=20)
            .map(|j| {
                let r = 10f64.powf(-(j as f64) / 4.0);
                (r, 2.0 * r.ln().abs() + 0.5)
            })
            .collect();
        let f = fit_envelope(&s, Envelope::Log);
        assert!((f.c - 2.0).abs() < 1e-12 && (f.d - 0.5).abs() < 1e-10);
        assert!(f.holds_within(1e-9));
    }
}
