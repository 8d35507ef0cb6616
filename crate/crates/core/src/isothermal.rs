//! Recovery of global isothermal parameters for a minimal graph.
//!
//! For an entire minimal graph there are constants `a` and `b > 0` such that
//! `x = u`, `y = au + bv` are isothermal. This module finds them by
//! minimizing a conformality defect over `(a, log b)` with deterministic
//! multi-start Nelder–Mead.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{first_fundamental_form, grid_minimality_report, JetSource, MetricCoeffs, DEFAULT_MINIMAL_TOL};
use crate::grid::{sweep, GridSpec, PointError};
use crate::optim::NelderMead;

/// Defect below which a fit counts as converged.
pub const CONVERGED_DEFECT: f64 = 1e-8;
pub const DEFAULT_STARTS: usize = 15;
pub const DEFAULT_MAX_ITER: usize = 2000;
/// Candidates within this factor of the best defect are reported.
pub const CANDIDATE_FACTOR: f64 = 10.0;
/// Defects below this are rounding noise when comparing candidates.
pub const DEFECT_FLOOR: f64 = 1e-20;

const START_A: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];
const START_LOG_B: [f64; 3] = [-1.0, 0.0, 1.0];

/// Default fitting domain, `[-1.5, 1.5]²` at 21×21.
pub fn default_fit_grid() -> GridSpec {
    GridSpec::square(1.5, 21).expect("default fit grid is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShearParams {
    pub a: f64,
    pub b: f64,
    pub defect: f64,
    pub converged: bool,
}

/// First fundamental forms sampled once so that the defect can be
/// re-evaluated cheaply for many `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSamples {
    pub metrics: Vec<MetricCoeffs>,
    pub errors: Vec<PointError>,
}

impl MetricSamples {
    pub fn collect<S: JetSource + ?Sized>(f: &S, grid: &GridSpec) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let pts = grid.points();
        let mut metrics = Vec::with_capacity(pts.len());
        let mut errors = Vec::new();
        for r in sweep(&pts, |p| f.jets_at(p[0], p[1]).map_err(|e| PointError::new(p, &e))) {
            match r {
                Ok(j) => metrics.push(first_fundamental_form(&j)),
                Err(e) => errors.push(e),
            }
        }
        Ok(MetricSamples { metrics, errors })
    }

    /// Mean of `((E − G)² + 4F²) / (E + G)²` in the coordinates
    /// `x = u`, `y = au + bv`.
    pub fn defect(&self, a: f64, b: f64) -> f64 {
        if self.metrics.is_empty() {
            return f64::NAN;
        }
        let sum: f64 = self
            .metrics
            .iter()
            .map(|g| {
                let e = g.g11 + 2.0 * a * g.g12 + a * a * g.g22;
                let f = b * (g.g12 + a * g.g22);
                let gg = b * b * g.g22;
                ((e - gg).powi(2) + 4.0 * f * f) / (e + gg).powi(2)
            })
            .sum();
        sum / self.metrics.len() as f64
    }
}

fn check_b(b: f64) -> Result<()> {
    if b > 0.0 && b.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("b must be positive and finite, got {b}")))
    }
}

/// Conformality defect of `f` for the shear `(a, b)`; zero exactly when the
/// shear is isothermal at every sample.
pub fn conformal_defect<S: JetSource + ?Sized>(f: &S, a: f64, b: f64, grid: &GridSpec) -> Result<f64> {
    check_b(b)?;
    let m = MetricSamples::collect(f, grid)?;
    if let Some(e) = m.errors.first() {
        return Err(Error::InvalidArgument(format!(
            "could not evaluate at ({}, {}): {}",
            e.x, e.y, e.message
        )));
    }
    Ok(m.defect(a, b))
}

/// Outcome of one simplex run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StartResult {
    pub start: [f64; 2],
    pub params: ShearParams,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShearFit {
    pub best: ShearParams,
    /// Distinct minima whose defect is within `CANDIDATE_FACTOR` of the best.
    pub candidates: Vec<ShearParams>,
    pub starts: Vec<StartResult>,
    pub evaluated: usize,
    pub points: usize,
    /// Present when the input does not pass the minimality check on the
    /// fitting grid; the fit still runs but carries no guarantee.
    pub warning: Option<String>,
    pub errors: Vec<PointError>,
}

/// Starting points `(a, log b)`, truncated to `starts`.
pub fn start_lattice(starts: usize) -> Vec<[f64; 2]> {
    START_A
        .iter()
        .flat_map(|&a| START_LOG_B.iter().map(move |&lb| [a, lb]))
        .take(starts)
        .collect()
}

/// Minimize the defect over `(a, log b)` from each lattice start and
/// return the best result.
pub fn fit_shear<S: JetSource + ?Sized>(f: &S, grid: &GridSpec, starts: usize, max_iter: usize) -> Result<ShearFit> {
    if starts == 0 {
        return Err(Error::InvalidArgument("at least one start is required".into()));
    }
    let metrics = MetricSamples::collect(f, grid)?;
    if metrics.metrics.is_empty() {
        return Err(Error::InvalidArgument("no sample of the fitting grid could be evaluated".into()));
    }
    let minimality = grid_minimality_report(f, grid, DEFAULT_MINIMAL_TOL)?;
    let warning = (!minimality.is_minimal()).then(|| {
        format!(
            "input is not minimal on the fitting grid (max residual {:e}); isothermal shear parameters need not exist",
            minimality.max_residual
        )
    });

    let nm = NelderMead {
        max_iter,
        ..NelderMead::default()
    };
    let runs: Vec<StartResult> = start_lattice(starts)
        .into_iter()
        .map(|start| {
            let m = nm.minimize(|p: &[f64; 2]| metrics.defect(p[0], p[1].exp()), start);
            StartResult {
                start,
                params: ShearParams {
                    a: m.x[0],
                    b: m.x[1].exp(),
                    defect: m.value,
                    converged: m.value < CONVERGED_DEFECT,
                },
                iterations: m.iterations,
            }
        })
        .collect();

    let best = runs
        .iter()
        .map(|r| r.params)
        .reduce(|best, p| if p.defect < best.defect { p } else { best })
        .expect("at least one start");
    let cutoff = (CANDIDATE_FACTOR * best.defect).max(DEFECT_FLOOR);
    let mut candidates: Vec<ShearParams> = Vec::new();
    let mut sorted: Vec<ShearParams> = runs.iter().map(|r| r.params).filter(|p| p.defect <= cutoff).collect();
    sorted.sort_by(|x, y| x.defect.total_cmp(&y.defect));
    for p in sorted {
        let duplicate = candidates
            .iter()
            .any(|c| (c.a - p.a).abs() < 1e-6 && (c.b.ln() - p.b.ln()).abs() < 1e-6);
        if !duplicate {
            candidates.push(p);
        }
    }

    Ok(ShearFit {
        best,
        candidates,
        starts: runs,
        evaluated: metrics.metrics.len(),
        points: grid.len(),
        warning,
        errors: metrics.errors,
    })
}

/// Largest `|φ_uu + φ_vv|` over both components, where
/// `φ(u, v) = f(u, au + bv)`.
pub fn harmonicity_check<S: JetSource + ?Sized>(f: &S, params: &ShearParams, grid: &GridSpec) -> Result<f64> {
    let (a, b) = (params.a, params.b);
    check_b(b)?;
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let pts = grid.points();
    let vals = sweep(&pts, |p| {
        f.jets_at(p[0], p[1]).map(|j| {
            let lap = |c: crate::expr::Jet2| c.d_xx + 2.0 * a * c.d_xy + a * a * c.d_yy + b * b * c.d_yy;
            lap(j.f1).abs().max(lap(j.f2).abs())
        })
    });
    let mut max = 0.0f64;
    for v in vals {
        max = max.max(v?);
    }
    Ok(max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{osserman, Z_SQUARED};
    use crate::geometry::MapExpr;

    fn map(f1: &str, f2: &str) -> MapExpr {
        MapExpr::parse(f1, f2).unwrap()
    }

    #[test]
    fn plane_defect_examples() {
        let g = GridSpec::square(1.0, 5).unwrap();
        assert_eq!(conformal_defect(&map("0", "0"), 0.0, 1.0, &g).unwrap(), 0.0);
        // E = 1 + a², F = ab, G = b²
        let d = conformal_defect(&map("0", "0"), 1.0, 2.0, &g).unwrap();
        let want = ((2.0f64 - 4.0).powi(2) + 4.0 * 4.0) / 36.0;
        assert!((d - want).abs() < 1e-15);
        assert!(conformal_defect(&map("0", "0"), 0.0, 0.0, &g).is_err());
        assert!(conformal_defect(&map("log(x)", "0"), 0.0, 1.0, &g).is_err());
    }

    #[test]
    fn osserman_defect() {
        let g = GridSpec::square(1.0, 21).unwrap();
        let f = osserman();
        assert!(conformal_defect(&f, 0.0, 2.0, &g).unwrap() < 1e-12);
        assert!(conformal_defect(&f, 0.0, 1.0, &g).unwrap() > 0.05);
    }

    #[test]
    fn defect_matches_closed_form_metric() {
        // For the Osserman map g₁₂ = 0 and g₁₁ = 4g₂₂, so with a = 0 the
        // defect is ((4 − b²)/(4 + b²))² at every sample.
        let g = GridSpec::square(1.0, 7).unwrap();
        for b in [0.5, 1.0, 3.0] {
            let d = conformal_defect(&osserman(), 0.0, b, &g).unwrap();
            let want = ((4.0 - b * b) / (4.0 + b * b)).powi(2);
            assert!((d - want).abs() < 1e-12, "b={b}: {d} vs {want}");
        }
    }

    #[test]
    fn lattice_order_and_truncation() {
        let l = start_lattice(15);
        assert_eq!(l.len(), 15);
        assert_eq!(l[0], [-2.0, -1.0]);
        assert_eq!(l[7], [0.0, 0.0]);
        assert_eq!(start_lattice(4).len(), 4);
        assert_eq!(start_lattice(100).len(), 15);
    }

    #[test]
    fn fits_known_parameters() {
        let g = default_fit_grid();
        let cases = [
            (osserman(), 0.0, 2.0),
            (map("0", "0"), 0.0, 1.0),
            (map("3", "-1.5"), 0.0, 1.0),
            (map(Z_SQUARED.0, Z_SQUARED.1), 0.0, 1.0),
        ];
        for (f, a, b) in cases {
            let fit = fit_shear(&f, &g, DEFAULT_STARTS, DEFAULT_MAX_ITER).unwrap();
            let p = fit.best;
            assert!(p.converged && p.defect < 1e-8, "{fit:#?}");
            assert!((p.a - a).abs() < 1e-6 && (p.b - b).abs() < 1e-6, "{p:?}");
            assert!(fit.warning.is_none());
            assert_eq!(fit.starts.len(), 15);
            assert_eq!(fit.candidates[0], p);
            assert!(harmonicity_check(&f, &p, &g).unwrap() < 1e-9);
        }
    }

    #[test]
    fn plane_defect_is_tiny_at_fit() {
        let fit = fit_shear(&map("0", "0"), &default_fit_grid(), DEFAULT_STARTS, DEFAULT_MAX_ITER).unwrap();
        assert!(fit.best.defect < 1e-12);
    }

    #[test]
    fn slope_vanishes_at_optimum() {
        let g = default_fit_grid();
        let f = osserman();
        let m = MetricSamples::collect(&f, &g).unwrap();
        let p = fit_shear(&f, &g, DEFAULT_STARTS, DEFAULT_MAX_ITER).unwrap().best;
        let h = 1e-4;
        let slope_a = (m.defect(p.a + h, p.b) - m.defect(p.a - h, p.b)) / (2.0 * h);
        let slope_b = (m.defect(p.a, p.b + h) - m.defect(p.a, p.b - h)) / (2.0 * h);
        assert!(slope_a.abs() < 1e-4 && slope_b.abs() < 1e-4, "{slope_a} {slope_b}");
    }

    #[test]
    fn deterministic_fit() {
        let g = default_fit_grid();
        let a = fit_shear(&osserman(), &g, 6, 500).unwrap();
        let b = fit_shear(&osserman(), &g, 6, 500).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.best.a.to_bits(), b.best.a.to_bits());
    }

    #[test]
    fn non_minimal_input_warns() {
        let fit = fit_shear(&map("x^2", "y^2"), &default_fit_grid(), 3, 200).unwrap();
        assert!(fit.warning.is_some());
        assert!(fit_shear(&map("x", "y"), &default_fit_grid(), 0, 10).is_err());
    }

    #[test]
    fn harmonicity_examples() {
        let g = GridSpec::square(1.0, 21).unwrap();
        let good = ShearParams {
            a: 0.0,
            b: 2.0,
            defect: 0.0,
            converged: true,
        };
        let bad = ShearParams { b: 1.0, ..good };
        assert!(harmonicity_check(&osserman(), &good, &g).unwrap() < 1e-9);
        assert!(harmonicity_check(&osserman(), &bad, &g).unwrap() > 1e-2);
        for p in [good, bad, ShearParams { a: -1.3, b: 0.2, ..good }] {
            assert_eq!(harmonicity_check(&map("2*x - y + 1", "3*y"), &p, &g).unwrap(), 0.0);
        }
    }

    #[test]
    fn weierstrass_seeds_refit() {
        use crate::weierstrass::HoloData;
        let g = GridSpec::square(1.0, 9).unwrap();
        for (h, a, b) in [("exp(w) + 2", 0.7, 1.3), ("w^2 + 5", -0.4, 3.0)] {
            let s = HoloData::parse(h, a, b).unwrap();
            let fit = fit_shear(&s, &g, DEFAULT_STARTS, DEFAULT_MAX_ITER).unwrap();
            assert!((fit.best.a - a).abs() < 1e-5 && (fit.best.b - b).abs() < 1e-5, "{h}: {:?}", fit.best);
        }
    }
}
