//! Composite Gauss–Legendre quadrature along straight segments in C.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule with `order` nodes; exact for polynomials of degree `2·order − 1`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d.is_finite() { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_{z0}^{z1} f(ζ) dζ` along the straight segment, split into `panels`
    /// equal pieces. `f` may return several integrands at once.
    pub fn integrate_segment<const N: usize, E>(
        &self,
        z0: Complex64,
        z1: Complex64,
        panels: usize,
        mut f: impl FnMut(Complex64) -> Result<[Complex64; N], E>,
    ) -> Result<[Complex64; N], E> {
        let zero = Complex64::new(0.0, 0.0);
        let mut total = [zero; N];
        if z0 == z1 {
            return Ok(total);
        }
        let panels = panels.max(1);
        let dz = z1 - z0;
        let h = 1.0 / panels as f64;
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            let mut acc = [zero; N];
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                let t = mid + 0.5 * h * x;
                let vals = f(z0 + dz * t)?;
                for k in 0..N {
                    acc[k] += vals[k] * *w;
                }
            }
            for k in 0..N {
                total[k] += acc[k] * (0.5 * h);
            }
        }
        for v in total.iter_mut() {
            *v *= dz;
        }
        Ok(total)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_are_symmetric() {
        for n in 1..=20 {
            let g = GaussLegendre::new(n);
            let s: f64 = g.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "order {n}: {s}");
            for i in 0..n {
                assert_eq!(g.nodes()[i], -g.nodes()[n - 1 - i]);
            }
        }
    }

    #[test]
    fn known_four_point_rule() {
        let g = GaussLegendre::new(4);
        let a = (3.0 / 7.0 - 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
        let b = (3.0 / 7.0 + 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
        let wa = (18.0 + 30f64.sqrt()) / 36.0;
        let wb = (18.0 - 30f64.sqrt()) / 36.0;
        assert!((g.nodes()[3] - b).abs() < 1e-15 && (g.nodes()[2] - a).abs() < 1e-15);
        assert!((g.weights()[3] - wb).abs() < 1e-15 && (g.weights()[2] - wa).abs() < 1e-15);
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        for n in 1..=10 {
            let g = GaussLegendre::new(n);
            for deg in 0..2 * n {
                let got = g
                    .integrate_segment::<1, ()>(
                        Complex64::new(0.0, 0.0),
                        Complex64::new(1.0, 0.0),
                        1,
                        |z| Ok([z.powu(deg as u32)]),
                    )
                    .unwrap()[0];
                let want = 1.0 / (deg as f64 + 1.0);
                assert!((got.re - want).abs() < 1e-14, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn complex_segment_of_exponential() {
        let g = GaussLegendre::new(8);
        let z1 = Complex64::new(1.2, -0.7);
        let got = g
            .integrate_segment::<1, ()>(Complex64::new(0.0, 0.0), z1, 4, |z| Ok([z.exp()]))
            .unwrap()[0];
        assert!((got - (z1.exp() - 1.0)).norm() < 1e-14);
    }

    #[test]
    fn errors_short_circuit() {
        let g = GaussLegendre::new(4);
        let r = g.integrate_segment::<1, &str>(
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            2,
            |z| if z.re > 0.5 { Err("boom") } else { Ok([z]) },
        );
        assert_eq!(r, Err("boom"));
    }
}
