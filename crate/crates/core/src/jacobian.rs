//! Jacobian of `f`, its Wirtinger decomposition, Cauchy–Riemann
//! classification and sampled evidence about the range of `J_f`.
//!
//! Whether `J_f` takes every real value cannot be decided by sampling; the
//! range verdicts here are evidence only.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Jet2Map, JetSource};
use crate::grid::{sweep, GridSpec, PointError};

pub const DEFAULT_CR_TOL: f64 = 1e-8;
pub const DEFAULT_RANGE_TOL: f64 = 1e-8;
pub const DEFAULT_GROWTH: f64 = 10.0;

/// `det(df) = f₁ₓ f₂_y − f₁_y f₂ₓ`.
pub fn jacobian(j: &Jet2Map) -> f64 {
    j.f1.d_x * j.f2.d_y - j.f1.d_y * j.f2.d_x
}

/// Wirtinger derivatives of `f = f₁ + i f₂` with respect to `z = x + iy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WirtingerPair {
    pub f_z: Complex64,
    pub f_zbar: Complex64,
}

impl WirtingerPair {
    /// `|f_z|² − |f_z̄|²`, equal to `det(df)`.
    pub fn jacobian(&self) -> f64 {
        self.f_z.norm_sqr() - self.f_zbar.norm_sqr()
    }
}

pub fn wirtinger(j: &Jet2Map) -> WirtingerPair {
    let (a, b) = (j.f1.d_x, j.f1.d_y);
    let (c, d) = (j.f2.d_x, j.f2.d_y);
    WirtingerPair {
        f_z: Complex64::new(0.5 * (a + d), 0.5 * (c - b)),
        f_zbar: Complex64::new(0.5 * (a - d), 0.5 * (c + b)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CrClass {
    Holomorphic,
    AntiHolomorphic,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrReport {
    pub classification: CrClass,
    pub max_abs_fz: f64,
    pub max_abs_fzbar: f64,
    pub tolerance: f64,
    pub jacobian_min: f64,
    pub jacobian_max: f64,
    /// Sampled `J` has the sign forced by the classification (`≥ 0` for
    /// holomorphic, `≤ 0` for anti-holomorphic); always true for `Neither`.
    pub sign_consistent: bool,
    pub evaluated: usize,
    pub note: Option<String>,
    pub errors: Vec<PointError>,
}

pub fn classify_cr<S: JetSource + ?Sized>(f: &S, grid: &GridSpec, tol: f64) -> Result<CrReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let pts = grid.points();
    let samples = sweep(&pts, |p| {
        f.jets_at(p[0], p[1])
            .map(|j| (wirtinger(&j), jacobian(&j)))
            .map_err(|e| PointError::new(p, &e))
    });
    let mut rep = CrReport {
        classification: CrClass::Neither,
        max_abs_fz: 0.0,
        max_abs_fzbar: 0.0,
        tolerance: tol,
        jacobian_min: f64::INFINITY,
        jacobian_max: f64::NEG_INFINITY,
        sign_consistent: true,
        evaluated: 0,
        note: None,
        errors: Vec::new(),
    };
    for s in samples {
        match s {
            Ok((w, jac)) => {
                rep.evaluated += 1;
                rep.max_abs_fz = rep.max_abs_fz.max(w.f_z.norm());
                rep.max_abs_fzbar = rep.max_abs_fzbar.max(w.f_zbar.norm());
                rep.jacobian_min = rep.jacobian_min.min(jac);
                rep.jacobian_max = rep.jacobian_max.max(jac);
            }
            Err(e) => rep.errors.push(e),
        }
    }
    if rep.evaluated == 0 {
        rep.jacobian_min = 0.0;
        rep.jacobian_max = 0.0;
        rep.note = Some("no sample could be evaluated".into());
        return Ok(rep);
    }
    let holo = rep.max_abs_fzbar < tol;
    let anti = rep.max_abs_fz < tol;
    rep.classification = match (holo, anti) {
        (true, true) => {
            rep.note = Some("degenerate (affine): f_z and f_zbar both vanish, f is constant".into());
            CrClass::Holomorphic
        }
        (true, false) => CrClass::Holomorphic,
        (false, true) => CrClass::AntiHolomorphic,
        (false, false) => CrClass::Neither,
    };
    // allow rounding of |f_z|² − |f_z̄|² around zero
    let slack = tol * tol.max(rep.max_abs_fz.max(rep.max_abs_fzbar));
    rep.sign_consistent = match rep.classification {
        CrClass::Holomorphic => rep.jacobian_min >= -slack,
        CrClass::AntiHolomorphic => rep.jacobian_max <= slack,
        CrClass::Neither => true,
    };
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RangeVerdict {
    OneSidedNonNegative,
    OneSidedNonPositive,
    BoundedWindow,
    FullRangeEvidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusRange {
    pub radius: f64,
    /// Minimum over all samples with radius up to this one.
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangeEvidence {
    pub sampled_min: f64,
    pub sampled_max: f64,
    pub radii: Vec<f64>,
    pub resolution: usize,
    pub per_radius: Vec<RadiusRange>,
    /// Some sample evaluated to exactly `0.0`. Says nothing about whether
    /// the infimum is attained off the lattice.
    pub zero_attained: bool,
    pub tolerance: f64,
    pub growth_factor: f64,
    pub verdict: RangeVerdict,
    pub errors: Vec<PointError>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeOptions {
    pub tolerance: f64,
    pub growth_factor: f64,
}

impl Default for RangeOptions {
    fn default() -> Self {
        RangeOptions {
            tolerance: DEFAULT_RANGE_TOL,
            growth_factor: DEFAULT_GROWTH,
        }
    }
}

/// Sampled `J_f` on each `[-r, r]²` with `resolution²` points.
pub fn jacobian_samples<S: JetSource + ?Sized>(
    f: &S,
    radius: f64,
    resolution: usize,
) -> Result<Vec<Result<([f64; 2], f64), PointError>>> {
    let grid = GridSpec::square(radius, resolution)?;
    let pts = grid.points();
    Ok(sweep(&pts, |p| {
        f.jets_at(p[0], p[1])
            .map(|j| (p, jacobian(&j)))
            .map_err(|e| PointError::new(p, &e))
    }))
}

pub fn jacobian_range<S: JetSource + ?Sized>(f: &S, radii: &[f64], resolution: usize) -> Result<RangeEvidence> {
    jacobian_range_with(f, radii, resolution, RangeOptions::default())
}

pub fn jacobian_range_with<S: JetSource + ?Sized>(
    f: &S,
    radii: &[f64],
    resolution: usize,
    opts: RangeOptions,
) -> Result<RangeEvidence> {
    if radii.is_empty() {
        return Err(Error::EmptyRadii);
    }
    if radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("radii must be positive and increasing".into()));
    }
    let mut per_radius = Vec::with_capacity(radii.len());
    let mut errors = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut zero_attained = false;
    for &r in radii {
        for s in jacobian_samples(f, r, resolution)? {
            match s {
                Ok((_, jac)) => {
                    lo = lo.min(jac);
                    hi = hi.max(jac);
                    zero_attained |= jac == 0.0;
                }
                Err(e) => errors.push(e),
            }
        }
        per_radius.push(RadiusRange { radius: r, min: lo, max: hi });
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(
            "no sample of the Jacobian could be evaluated".into(),
        ));
    }
    let first = per_radius[0];
    let scale = lo.abs().max(hi.abs()).max(1.0);
    let eps = opts.tolerance * scale;
    let verdict = if hi - lo <= eps {
        // constant Jacobian: affine map, the graph is a plane
        RangeVerdict::BoundedWindow
    } else if lo >= -eps {
        RangeVerdict::OneSidedNonNegative
    } else if hi <= eps {
        RangeVerdict::OneSidedNonPositive
    } else if lo.abs() > opts.growth_factor * first.min.abs()
        && hi.abs() > opts.growth_factor * first.max.abs()
    {
        RangeVerdict::FullRangeEvidence
    } else {
        RangeVerdict::BoundedWindow
    };
    Ok(RangeEvidence {
        sampled_min: lo,
        sampled_max: hi,
        radii: radii.to_vec(),
        resolution,
        per_radius,
        zero_attained,
        tolerance: opts.tolerance,
        growth_factor: opts.growth_factor,
        verdict,
        errors,
    })
}
