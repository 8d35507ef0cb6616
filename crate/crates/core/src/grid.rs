//! Rectangular sampling lattices and the parallel sweep helper.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Uniform lattice on `[x_min, x_max] × [y_min, y_max]` including both
/// endpoints in each direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, nx: usize, y_min: f64, y_max: f64, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::EmptyGrid);
        }
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidGrid(format!(
                "resolution must be at least 2 in each direction, got {nx}x{ny}"
            )));
        }
        if ![x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if x_min >= x_max || y_min >= y_max {
            return Err(Error::InvalidGrid(format!(
                "bounds must be increasing, got [{x_min}, {x_max}] x [{y_min}, {y_max}]"
            )));
        }
        Ok(GridSpec {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
        })
    }

    /// `[-r, r]²` with `n` samples per side.
    pub fn square(r: f64, n: usize) -> Result<Self> {
        GridSpec::new(-r, r, n, -r, r, n)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coord(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
        if i + 1 == n {
            hi
        } else {
            lo + (hi - lo) * (i as f64) / ((n - 1) as f64)
        }
    }

    /// Sample points, `x` varying fastest.
    pub fn points(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(self.len());
        for j in 0..self.ny {
            let y = Self::coord(self.y_min, self.y_max, self.ny, j);
            for i in 0..self.nx {
                out.push([Self::coord(self.x_min, self.x_max, self.nx, i), y]);
            }
        }
        out
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::square(2.0, 41).expect("default grid is valid")
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{},{}:{}:{}",
            self.x_min, self.x_max, self.nx, self.y_min, self.y_max, self.ny
        )
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// `"X0:X1:NX,Y0:Y1:NY"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidGrid(format!("expected X0:X1:NX,Y0:Y1:NY, got `{s}`"));
        let (xs, ys) = s.split_once(',').ok_or_else(bad)?;
        let axis = |part: &str| -> Result<(f64, f64, usize)> {
            let fields: Vec<&str> = part.trim().split(':').collect();
            if fields.len() != 3 {
                return Err(bad());
            }
            let lo = fields[0].trim().parse::<f64>().map_err(|_| bad())?;
            let hi = fields[1].trim().parse::<f64>().map_err(|_| bad())?;
            let n = fields[2].trim().parse::<usize>().map_err(|_| bad())?;
            Ok((lo, hi, n))
        };
        let (x0, x1, nx) = axis(xs)?;
        let (y0, y1, ny) = axis(ys)?;
        GridSpec::new(x0, x1, nx, y0, y1, ny)
    }
}

/// An evaluation failure at one sample point. Sweeps collect these instead
/// of aborting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointError {
    pub x: f64,
    pub y: f64,
    pub message: String,
}

impl PointError {
    pub fn new(p: [f64; 2], err: &Error) -> Self {
        PointError {
            x: p[0],
            y: p[1],
            message: err.to_string(),
        }
    }
}

/// Evaluate `f` at every point in parallel; results keep the input order so
/// any later reduction is deterministic.
pub fn sweep<T, F>(points: &[[f64; 2]], f: F) -> Vec<T>
where
    T: Send,
    F: Fn([f64; 2]) -> T + Sync + Send,
{
    points.par_iter().map(|&p| f(p)).collect()
}

/// Honour `MINIGRAPH_THREADS` by sizing the global pool. Safe to call more
/// than once; only the first successful call has an effect.
pub fn configure_threads_from_env() {
    if let Some(n) = std::env::var("MINIGRAPH_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_includes_endpoints_and_origin() {
        let g = GridSpec::default();
        let pts = g.points();
        assert_eq!(pts.len(), 41 * 41);
        assert_eq!(pts[0], [-2.0, -2.0]);
        assert_eq!(pts[40], [2.0, -2.0]);
        assert_eq!(*pts.last().unwrap(), [2.0, 2.0]);
        assert!(pts.contains(&[0.0, 0.0]));
    }

    #[test]
    fn parse_and_display() {
        let g: GridSpec = "-1.5:1.5:21,-1:2:11".parse().unwrap();
        assert_eq!(g, GridSpec::new(-1.5, 1.5, 21, -1.0, 2.0, 11).unwrap());
        assert_eq!(g.to_string(), "-1.5:1.5:21,-1:2:11");
        assert_eq!(g.to_string().parse::<GridSpec>().unwrap(), g);
    }

    #[test]
    fn rejects_bad_grids() {
        assert_eq!(GridSpec::new(-1.0, 1.0, 0, -1.0, 1.0, 5), Err(Error::EmptyGrid));
        assert!(matches!(GridSpec::new(-1.0, 1.0, 1, -1.0, 1.0, 5), Err(Error::InvalidGrid(_))));
        assert!(matches!(GridSpec::new(1.0, -1.0, 3, -1.0, 1.0, 5), Err(Error::InvalidGrid(_))));
        assert!(matches!(GridSpec::new(0.0, f64::NAN, 3, -1.0, 1.0, 5), Err(Error::InvalidGrid(_))));
        assert!("1:2".parse::<GridSpec>().is_err());
        assert!("a:2:3,0:1:2".parse::<GridSpec>().is_err());
        assert_eq!("0:1:0,0:1:3".parse::<GridSpec>(), Err(Error::EmptyGrid));
    }

    #[test]
    fn sweep_preserves_order() {
        let g = GridSpec::square(1.0, 17).unwrap();
        let pts = g.points();
        let out = sweep(&pts, |p| p[0] * 10.0 + p[1]);
        let seq: Vec<f64> = pts.iter().map(|p| p[0] * 10.0 + p[1]).collect();
        assert_eq!(out, seq);
    }
}
