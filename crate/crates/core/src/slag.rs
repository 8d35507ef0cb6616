//! Special Lagrangian equation `cos θ Δu = sin θ (det Hess u − 1)` for a
//! potential `u(x, y)`, the gradient graph `f = ∇u`, and a sampled version
//! of Fu's classification of entire solutions.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Expr, Mode, Var};
use crate::geometry::{grid_minimality_report, MapExpr, MinimalityReport, DEFAULT_MINIMAL_TOL};
use crate::grid::{sweep, GridSpec, PointError};
use crate::jacobian::{classify_cr, jacobian, CrClass, DEFAULT_CR_TOL};

pub const DEFAULT_FU_TOL: f64 = 1e-8;
/// Samples with `|A|` and `|B|` all below this make the phase undetermined.
pub const DEGENERATE_TOL: f64 = 1e-14;
/// Residual below which a candidate counts as solving the equation.
pub const SOLUTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SlagProblem {
    pub u: Expr,
    /// Phase in radians; `None` means it should be fitted.
    pub theta: Option<f64>,
}

impl SlagProblem {
    pub fn new(u: Expr, theta: Option<f64>) -> Result<Self> {
        if u.mode() != Mode::Real2 {
            return Err(Error::ModeMismatch {
                expected: Mode::Real2.name(),
                found: u.mode().name(),
            });
        }
        if let Some(t) = theta {
            if !t.is_finite() {
                return Err(Error::InvalidArgument(format!("theta must be finite, got {t}")));
            }
        }
        Ok(SlagProblem { u, theta })
    }

    pub fn parse(u: &str, theta: Option<f64>) -> Result<Self> {
        SlagProblem::new(Expr::real(u)?, theta)
    }
}

/// `A = Δu` and `B = det Hess u − 1` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlagSample {
    pub x: f64,
    pub y: f64,
    pub laplacian: f64,
    pub det_minus_one: f64,
}

impl SlagSample {
    pub fn residual(&self, theta: f64) -> f64 {
        (theta.cos() * self.laplacian - theta.sin() * self.det_minus_one).abs()
    }
}

pub fn slag_samples(u: &Expr, grid: &GridSpec) -> Result<(Vec<SlagSample>, Vec<PointError>)> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let pts = grid.points();
    let mut samples = Vec::with_capacity(pts.len());
    let mut errors = Vec::new();
    let rows = sweep(&pts, |p| {
        u.eval_jet2(p[0], p[1])
            .map(|j| SlagSample {
                x: p[0],
                y: p[1],
                laplacian: j.d_xx + j.d_yy,
                det_minus_one: j.d_xx * j.d_yy - j.d_xy * j.d_xy - 1.0,
            })
            .map_err(|e| PointError::new(p, &e))
    });
    for r in rows {
        match r {
            Ok(s) => samples.push(s),
            Err(e) => errors.push(e),
        }
    }
    Ok((samples, errors))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub theta: f64,
    pub max_residual: f64,
    pub worst_point: Option<[f64; 2]>,
    pub evaluated: usize,
    pub errors: Vec<PointError>,
}

fn max_residual(samples: &[SlagSample], theta: f64) -> (f64, Option<[f64; 2]>) {
    let mut max = 0.0;
    let mut at = None;
    for s in samples {
        let r = s.residual(theta);
        if at.is_none() || r > max {
            max = r;
            at = Some([s.x, s.y]);
        }
    }
    (max, at)
}

/// Largest `|cos θ Δu − sin θ (det Hess u − 1)|` over the grid.
pub fn slag_residual(p: &SlagProblem, grid: &GridSpec) -> Result<ResidualReport> {
    let theta = p
        .theta
        .ok_or_else(|| Error::InvalidArgument("slag_residual needs a phase theta".into()))?;
    let (samples, errors) = slag_samples(&p.u, grid)?;
    let (max_residual, worst_point) = max_residual(&samples, theta);
    Ok(ResidualReport {
        theta,
        max_residual,
        worst_point,
        evaluated: samples.len(),
        errors,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaFit {
    /// Fitted phase in `(−π/2, π/2]`.
    pub theta: f64,
    /// Largest pointwise residual at `theta`.
    pub residual: f64,
    /// Root-mean-square residual at `theta`.
    pub rms_residual: f64,
    pub degenerate: bool,
    pub note: Option<String>,
}

fn normalize_phase(t: f64) -> f64 {
    let mut t = t;
    while t <= -FRAC_PI_2 {
        t += std::f64::consts::PI;
    }
    while t > FRAC_PI_2 {
        t -= std::f64::consts::PI;
    }
    t
}

/// Least-squares phase for samples `(Aᵢ, Bᵢ)`. The objective
/// `Σ (cos θ Aᵢ − sin θ Bᵢ)²` has period π and stationary points at
/// `θ₀ = ½ atan2(−2ΣAB, ΣA² − ΣB²)` and `θ₀ + π/2`; the smaller wins.
pub(crate) fn fit_theta_samples(samples: &[SlagSample]) -> ThetaFit {
    let (mut saa, mut sab, mut sbb) = (0.0, 0.0, 0.0);
    let mut degenerate = true;
    for s in samples {
        let (a, b) = (s.laplacian, s.det_minus_one);
        saa += a * a;
        sab += a * b;
        sbb += b * b;
        if a.abs() >= DEGENERATE_TOL || b.abs() >= DEGENERATE_TOL {
            degenerate = false;
        }
    }
    let sse = |t: f64| {
        let (s, c) = t.sin_cos();
        samples
            .iter()
            .map(|x| (c * x.laplacian - s * x.det_minus_one).powi(2))
            .sum::<f64>()
    };
    let (theta, note) = if degenerate {
        (0.0, Some("degenerate fit: Δu and det Hess u − 1 vanish at every sample, any phase fits".to_string()))
    } else {
        let t0 = 0.5 * (-2.0 * sab).atan2(saa - sbb);
        let t1 = t0 + FRAC_PI_2;
        let t = if sse(t1) < sse(t0) { t1 } else { t0 };
        (normalize_phase(t), None)
    };
    let n = samples.len().max(1) as f64;
    ThetaFit {
        theta,
        residual: max_residual(samples, theta).0,
        rms_residual: (sse(theta) / n).sqrt(),
        degenerate,
        note,
    }
}

pub fn fit_theta(p: &SlagProblem, grid: &GridSpec) -> Result<ThetaFit> {
    let (samples, _) = slag_samples(&p.u, grid)?;
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no sample of the grid could be evaluated".into()));
    }
    Ok(fit_theta_samples(&samples))
}

/// `f = ∇u` by symbolic differentiation.
pub fn gradient_graph(p: &SlagProblem) -> Result<MapExpr> {
    MapExpr::new(p.u.differentiate(Var::X)?, p.u.differentiate(Var::Y)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FuClass {
    Harmonic,
    Quadratic,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuReport {
    pub classification: FuClass,
    pub max_abs_laplacian: f64,
    /// Largest modulus among the six third partials of `u`.
    pub max_abs_third: f64,
    pub tolerance: f64,
    pub evaluated: usize,
    pub note: Option<String>,
    pub warning: Option<String>,
    pub errors: Vec<PointError>,
}

/// Sampled harmonic / quadratic / other verdict. Third partials come from
/// differentiating `u` symbolically twice and taking first-order jets.
pub fn fu_classify(p: &SlagProblem, grid: &GridSpec, tol: f64) -> Result<FuReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let ux = p.u.differentiate(Var::X)?;
    let uy = p.u.differentiate(Var::Y)?;
    let second = [ux.differentiate(Var::X)?, ux.differentiate(Var::Y)?, uy.differentiate(Var::Y)?];
    let pts = grid.points();
    let rows = sweep(&pts, |q| {
        let eval = || -> Result<(f64, f64)> {
            let mut third = 0.0f64;
            let mut lap = 0.0;
            for (k, e) in second.iter().enumerate() {
                let j = e.eval_jet2(q[0], q[1])?;
                third = third.max(j.d_x.abs()).max(j.d_y.abs());
                if k != 1 {
                    lap += j.value;
                }
            }
            Ok((lap.abs(), third))
        };
        eval().map_err(|e| PointError::new(q, &e))
    });
    let mut r = FuReport {
        classification: FuClass::Other,
        max_abs_laplacian: 0.0,
        max_abs_third: 0.0,
        tolerance: tol,
        evaluated: 0,
        note: None,
        warning: None,
        errors: Vec::new(),
    };
    for row in rows {
        match row {
            Ok((lap, third)) => {
                r.evaluated += 1;
                r.max_abs_laplacian = r.max_abs_laplacian.max(lap);
                r.max_abs_third = r.max_abs_third.max(third);
            }
            Err(e) => r.errors.push(e),
        }
    }
    if r.evaluated == 0 {
        r.note = Some("no sample could be evaluated".into());
        return Ok(r);
    }
    let harmonic = r.max_abs_laplacian < tol;
    let quadratic = r.max_abs_third < tol;
    r.classification = match (harmonic, quadratic) {
        (true, true) => {
            r.note = Some("also harmonic: a harmonic quadratic polynomial".into());
            FuClass::Quadratic
        }
        (false, true) => FuClass::Quadratic,
        (true, false) => FuClass::Harmonic,
        (false, false) => FuClass::Other,
    };
    if r.classification == FuClass::Other {
        let (samples, _) = slag_samples(&p.u, grid)?;
        let residual = match p.theta {
            Some(t) => max_residual(&samples, t).0,
            None => fit_theta_samples(&samples).residual,
        };
        if residual < SOLUTION_TOL {
            r.warning = Some(format!(
                "u solves the special Lagrangian equation on the grid (residual {residual:e}) but is neither \
                 harmonic nor quadratic there; sampled evidence only, u may not be an entire solution"
            ));
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JacobianVsOne {
    /// Sampled `J` reaches or crosses 1.
    AttainsOne,
    AllAbove,
    AllBelow,
}

/// Range of `J_f = det Hess u` over the samples, relative to 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobianRangeVsOne {
    pub min: f64,
    pub max: f64,
    pub relation: JacobianVsOne,
}

pub fn jacobian_vs_one(f: &MapExpr, grid: &GridSpec, tol: f64) -> Result<JacobianRangeVsOne> {
    let pts = grid.points();
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in sweep(&pts, |p| f.jets(p[0], p[1]).map(|j| jacobian(&j))).into_iter().flatten() {
        min = min.min(j);
        max = max.max(j);
    }
    if min > max {
        return Err(Error::InvalidArgument("no sample of the grid could be evaluated".into()));
    }
    let relation = if min > 1.0 + tol {
        JacobianVsOne::AllAbove
    } else if max < 1.0 - tol {
        JacobianVsOne::AllBelow
    } else {
        JacobianVsOne::AttainsOne
    };
    Ok(JacobianRangeVsOne { min, max, relation })
}

/// Everything the `slag` command reports for one potential.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlagAnalysis {
    pub theta_given: Option<f64>,
    pub theta: f64,
    pub residual: f64,
    pub fit: Option<ThetaFit>,
    pub solves: bool,
    pub classification: FuReport,
    pub gradient_graph: [String; 2],
    pub gradient_minimality: MinimalityReport,
    pub gradient_cr: CrClass,
    pub jacobian: JacobianRangeVsOne,
    pub errors: Vec<PointError>,
}

pub fn analyze(p: &SlagProblem, grid: &GridSpec) -> Result<SlagAnalysis> {
    let (samples, errors) = slag_samples(&p.u, grid)?;
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no sample of the grid could be evaluated".into()));
    }
    let (theta, residual, fit) = match p.theta {
        Some(t) => (t, max_residual(&samples, t).0, None),
        None => {
            let fit = fit_theta_samples(&samples);
            (fit.theta, fit.residual, Some(fit))
        }
    };
    let g = gradient_graph(p)?;
    Ok(SlagAnalysis {
        theta_given: p.theta,
        theta,
        residual,
        fit,
        solves: residual < SOLUTION_TOL,
        classification: fu_classify(p, grid, DEFAULT_FU_TOL)?,
        gradient_graph: [g.f1.to_string(), g.f2.to_string()],
        gradient_minimality: grid_minimality_report(&g, grid, DEFAULT_MINIMAL_TOL)?,
        gradient_cr: classify_cr(&g, grid, DEFAULT_CR_TOL)?.classification,
        jacobian: jacobian_vs_one(&g, grid, 1e-12)?,
        errors,
    })
}
