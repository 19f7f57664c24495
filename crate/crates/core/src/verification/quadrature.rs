//! Gauss–Legendre product rules on graded polar meshes.
//!
//! Sums are accumulated per radial panel in parallel, collected in panel
//! order and reduced sequentially with Neumaier compensation, so results are
//! bit-identical across thread counts.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;

/// Points per panel in each direction.
pub const NODES_PER_PANEL: usize = 8;

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = NonZeroUsize::new(NODES_PER_PANEL).expect("nonzero");
        GaussLegendre::new(n).as_node_weight_pairs().to_vec()
    })
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Raw quadrature output: signed integrals, integrals of absolute values
/// (a rounding scale) and the number of nodes used.
#[derive(Debug, Clone, Copy)]
pub struct RawSum<const N: usize> {
    pub value: [f64; N],
    pub abs: [f64; N],
    pub nodes: usize,
}

#[derive(Clone, Copy)]
struct Acc<const N: usize> {
    value: [CompensatedSum; N],
    abs: [CompensatedSum; N],
    nodes: usize,
}

impl<const N: usize> Acc<N> {
    fn new() -> Self {
        Self {
            value: [CompensatedSum::default(); N],
            abs: [CompensatedSum::default(); N],
            nodes: 0,
        }
    }

    fn push(&mut self, w: f64, f: &[f64; N]) {
        for ((v, a), fi) in self.value.iter_mut().zip(&mut self.abs).zip(f) {
            v.add(w * fi);
            a.add((w * fi).abs());
        }
        self.nodes += 1;
    }

    fn merge(parts: Vec<Self>) -> RawSum<N> {
        let mut total = Self::new();
        for p in &parts {
            for i in 0..N {
                total.value[i].add(p.value[i].value());
                total.abs[i].add(p.abs[i].value());
            }
            total.nodes += p.nodes;
        }
        RawSum {
            value: std::array::from_fn(|i| total.value[i].value()),
            abs: std::array::from_fn(|i| total.abs[i].value()),
            nodes: total.nodes,
        }
    }
}

/// Panels `[eps, 2 eps], [2 eps, 4 eps], …` up to `r0`, each split
/// geometrically into `sub` pieces. A short last octave is merged into its
/// neighbour.
pub fn graded_panels(eps: f64, r0: f64, sub: usize) -> Vec<(f64, f64)> {
    let mut edges = vec![eps];
    let mut r = eps;
    while 2.0 * r < r0 {
        r *= 2.0;
        edges.push(r);
    }
    if edges.len() > 1 && r0 / edges[edges.len() - 1] < 1.25 {
        edges.pop();
    }
    edges.push(r0);
    let mut panels = Vec::with_capacity(sub * edges.len());
    for pair in edges.windows(2) {
        let ratio = (pair[1] / pair[0]).powf(1.0 / sub as f64);
        let mut a = pair[0];
        for s in 0..sub {
            let b = if s + 1 == sub { pair[1] } else { a * ratio };
            panels.push((a, b));
            a = b;
        }
    }
    panels
}

pub fn uniform_panels(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / n as f64;
    (0..n)
        .map(|j| {
            (
                a + j as f64 * h,
                if j + 1 == n {
                    b
                } else {
                    a + (j + 1) as f64 * h
                },
            )
        })
        .collect()
}

fn mapped(a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule().iter().map(move |&(x, w)| (mid + half * x, half * w))
}

/// `∫∫ f(r e^{iθ}) r dr dθ` over the given radial and angular panels.
pub fn integrate_polar<const N: usize, E, F>(
    radial: &[(f64, f64)],
    angular: &[(f64, f64)],
    f: F,
) -> Result<RawSum<N>, E>
where
    E: Send,
    F: Fn(Complex64) -> Result<[f64; N], E> + Sync,
{
    let parts = radial
        .par_iter()
        .map(|&(ra, rb)| {
            let mut acc = Acc::<N>::new();
            for (r, wr) in mapped(ra, rb) {
                for &(ta, tb) in angular {
                    for (t, wt) in mapped(ta, tb) {
                        let v = f(Complex64::from_polar(r, t))?;
                        acc.push(wr * wt * r, &v);
                    }
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>, E>>()?;
    Ok(Acc::merge(parts))
}

/// `∫ f(t) dt` over the given panels.
pub fn integrate_line<const N: usize, E, F>(panels: &[(f64, f64)], f: F) -> Result<RawSum<N>, E>
where
    E: Send,
    F: Fn(f64) -> Result<[f64; N], E> + Sync,
{
    let parts = panels
        .par_iter()
        .map(|&(a, b)| {
            let mut acc = Acc::<N>::new();
            for (t, w) in mapped(a, b) {
                acc.push(w, &f(t)?);
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>, E>>()?;
    Ok(Acc::merge(parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn panels_cover_interval() {
        let p = graded_panels(1e-3, 1.0, 3);
        assert_eq!(p[0].0, 1e-3);
        assert_eq!(p.last().unwrap().1, 1.0);
        for w in p.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
        assert!(p
            .iter()
            .all(|(a, b)| b / a <= 2.5f64.powf(1.0 / 3.0) + 1e-12));
        let u = uniform_panels(-1.0, 1.0, 4);
        assert_eq!(u, vec![(-1.0, -0.5), (-0.5, 0.0), (0.0, 0.5), (0.5, 1.0)]);
    }

    #[test]
    fn polar_integrals() {
        let rad = graded_panels(1e-6, 1.0, 1);
        let ang = uniform_panels(-PI / 2.0, PI / 2.0, 2);
        // Half-annulus area and ∫ log² r.
        let s =
            integrate_polar::<2, (), _>(&rad, &ang, |z| Ok([1.0, z.norm().ln().powi(2)])).unwrap();
        let area = PI / 2.0 * (1.0 - 1e-12);
        assert!((s.value[0] - area).abs() < 1e-13);
        // ∫_ε^1 r log² r dr = 1/4 − ε²(log²ε/2 − logε/2 + 1/4)
        let e: f64 = 1e-6;
        let l = e.ln();
        let exact = PI * (0.25 - e * e * (l * l / 2.0 - l / 2.0 + 0.25));
        assert!(
            (s.value[1] - exact).abs() < 1e-13,
            "{} vs {exact}",
            s.value[1]
        );
        assert_eq!(s.nodes, rad.len() * ang.len() * 64);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        for x in [1e16, 1.0, -1e16, 1.0] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }
}
