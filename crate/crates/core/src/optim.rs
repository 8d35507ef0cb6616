//! Derivative-free Nelder–Mead simplex descent.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NelderMead {
    /// Edge length of the initial simplex along each axis.
    pub edge: f64,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Stop once the largest vertex distance from the best vertex falls below this.
    pub diameter_tol: f64,
    pub max_iter: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            edge: 0.5,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            diameter_tol: 1e-10,
            max_iter: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Minimum<const N: usize> {
    #[serde(with = "serde_arrays")]
    pub x: [f64; N],
    pub value: f64,
    pub iterations: usize,
    /// The simplex shrank below `diameter_tol` before `max_iter`.
    pub small_simplex: bool,
}

mod serde_arrays {
    use serde::ser::{SerializeTuple, Serializer};

    pub fn serialize<S: Serializer, const N: usize>(a: &[f64; N], s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(N)?;
        for v in a {
            t.serialize_element(v)?;
        }
        t.end()
    }
}

impl NelderMead {
    /// Minimize `f` from `x0`. Non-finite objective values are treated as `+∞`.
    pub fn minimize<const N: usize>(&self, mut f: impl FnMut(&[f64; N]) -> f64, x0: [f64; N]) -> Minimum<N> {
        let mut eval = |x: &[f64; N]| {
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
        simplex.push((x0, eval(&x0)));
        for i in 0..N {
            let mut x = x0;
            x[i] += self.edge;
            simplex.push((x, eval(&x)));
        }
        let mut iterations = 0;
        let mut small_simplex = false;
        loop {
            // stable sort keeps the older vertex first among ties
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if diameter(&simplex) < self.diameter_tol {
                small_simplex = true;
                break;
            }
            if iterations >= self.max_iter {
                break;
            }
            iterations += 1;

            let mut centroid = [0.0; N];
            for (x, _) in &simplex[..N] {
                for k in 0..N {
                    centroid[k] += x[k] / N as f64;
                }
            }
            let worst = simplex[N];
            let along = |t: f64| -> [f64; N] {
                let mut p = [0.0; N];
                for k in 0..N {
                    p[k] = centroid[k] + t * (worst.0[k] - centroid[k]);
                }
                p
            };

            let xr = along(-self.reflection);
            let fr = eval(&xr);
            if fr < simplex[0].1 {
                let xe = along(-self.reflection * self.expansion);
                let fe = eval(&xe);
                simplex[N] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[N - 1].1 {
                simplex[N] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < worst.1 {
                let xc = along(-self.reflection * self.contraction);
                (xc, eval(&xc))
            } else {
                let xc = along(self.contraction);
                (xc, eval(&xc))
            };
            if fc < worst.1.min(fr) {
                simplex[N] = (xc, fc);
                continue;
            }
            let best = simplex[0].0;
            for v in simplex.iter_mut().skip(1) {
                for k in 0..N {
                    v.0[k] = best[k] + self.shrink * (v.0[k] - best[k]);
                }
                v.1 = eval(&v.0);
            }
        }
        let (x, value) = simplex[0];
        Minimum {
            x,
            value,
            iterations,
            small_simplex,
        }
    }
}

fn diameter<const N: usize>(simplex: &[([f64; N], f64)]) -> f64 {
    let best = &simplex[0].0;
    simplex[1..]
        .iter()
        .map(|(x, _)| x.iter().zip(best).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}
