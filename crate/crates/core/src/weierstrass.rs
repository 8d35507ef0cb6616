//! Minimal graphs built from holomorphic seed data `(h, a, b)`.
//!
//! With `d = 1 + (a − ib)²` the quadruple
//!
//! ```text
//! φ₁ = 1,  φ₂ = a − ib,  φ₃ = ½(h − d/h),  φ₄ = (i/2)(h + d/h)
//! ```
//!
//! satisfies `Σ φₖ² = 0`, and the surface
//! `X(u, v) = (u, au + bv, Re∫φ₃, Re∫φ₄)` is a minimal graph over the
//! `(x, y)` plane. Integration runs along straight segments from `w = 0`;
//! the value at the origin is fixed by [`HoloData::origin_offset`].

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{CJet1, Expr, Jet2, Mode};
use crate::geometry::{minimal_residual, norm2, Jet2Map, JetSource, MapExpr};
use crate::grid::{sweep, GridSpec, PointError};
use crate::jacobian::jacobian;
use crate::quadrature::GaussLegendre;

pub const DEFAULT_QUAD_ORDER: usize = 8;
pub const MIN_QUAD_ORDER: usize = 4;
/// Quadrature panels per unit length of the integration segment.
pub const PANELS_PER_UNIT: f64 = 4.0;
/// `h` counts as vanishing when `|h| < ZERO_TOL · (1 + |d|)`.
pub const ZERO_TOL: f64 = 1e-13;

/// Seed documented for the identity suite: `(h, a, b)`.
pub const SEEDS: [(&str, f64, f64); 5] = [
    ("exp(w)", 0.0, 2.0),
    ("exp(w) + 2", 0.7, 1.3),
    ("w^2 + 5", -1.5, 0.5),
    ("exp(w)", 1.9, 2.8),
    ("w^2 + 5", -0.4, 3.0),
];

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `1 + (a − ib)²`.
pub fn shear_d(a: f64, b: f64) -> Complex64 {
    let s = Complex64::new(a, -b);
    Complex64::new(1.0, 0.0) + s * s
}

/// Weierstrass seed: a holomorphic, nowhere-vanishing `h(w)` and shear
/// constants `a` and `b > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HoloData {
    h: Expr,
    a: f64,
    b: f64,
    d: Complex64,
    origin_offset: [f64; 2],
}

impl HoloData {
    pub fn new(h: Expr, a: f64, b: f64) -> Result<Self> {
        if h.mode() != Mode::Complex1 {
            return Err(Error::ModeMismatch {
                expected: Mode::Complex1.name(),
                found: h.mode().name(),
            });
        }
        if !a.is_finite() {
            return Err(Error::InvalidArgument(format!("a must be finite, got {a}")));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidArgument(format!("b must be positive and finite, got {b}")));
        }
        Ok(HoloData {
            h,
            a,
            b,
            d: shear_d(a, b),
            origin_offset: [0.0, 0.0],
        })
    }

    pub fn parse(h: &str, a: f64, b: f64) -> Result<Self> {
        HoloData::new(Expr::complex(h)?, a, b)
    }

    /// One of the [`SEEDS`].
    pub fn seed(index: usize) -> Self {
        let (h, a, b) = SEEDS[index];
        HoloData::parse(h, a, b).expect("built-in seed is valid")
    }

    /// Values of `(f₁, f₂)` at `w = 0`.
    pub fn with_offset(mut self, offset: [f64; 2]) -> Self {
        self.origin_offset = offset;
        self
    }

    pub fn h(&self) -> &Expr {
        &self.h
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn d(&self) -> Complex64 {
        self.d
    }

    pub fn origin_offset(&self) -> [f64; 2] {
        self.origin_offset
    }

    fn zero_threshold(&self) -> f64 {
        ZERO_TOL * (1.0 + self.d.norm())
    }

    fn h_value(&self, w: Complex64) -> Result<Complex64> {
        let h = self.h.eval_complex(w)?;
        if h.norm() < self.zero_threshold() {
            return Err(Error::ZeroOfH { re: w.re, im: w.im });
        }
        Ok(h)
    }

    fn h_jet(&self, w: Complex64) -> Result<CJet1> {
        let h = self.h.eval_cjet(w)?;
        if h.value.norm() < self.zero_threshold() {
            return Err(Error::ZeroOfH { re: w.re, im: w.im });
        }
        Ok(h)
    }

    /// `(1/4b)(|d|²/|h|² − |h|²)`, the Jacobian of the reconstructed graph.
    pub fn closed_form_jacobian(&self, w: Complex64) -> Result<f64> {
        let h2 = self.h_value(w)?.norm_sqr();
        Ok((self.d.norm_sqr() / h2 - h2) / (4.0 * self.b))
    }

    /// Points of the `w`-plane grid where `h` vanishes or cannot be evaluated.
    pub fn check_nonvanishing(&self, grid: &GridSpec) -> Vec<PointError> {
        let pts = grid.points();
        sweep(&pts, |p| self.h_value(Complex64::new(p[0], p[1])).err().map(|e| PointError::new(p, &e)))
            .into_iter()
            .flatten()
            .collect()
    }
}

/// The holomorphic quadruple at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiQuad {
    pub phi1: Complex64,
    pub phi2: Complex64,
    pub phi3: Complex64,
    pub phi4: Complex64,
}

impl PhiQuad {
    fn from_h(a: f64, b: f64, d: Complex64, h: Complex64) -> PhiQuad {
        let q = d / h;
        PhiQuad {
            phi1: Complex64::new(1.0, 0.0),
            phi2: Complex64::new(a, -b),
            phi3: 0.5 * (h - q),
            phi4: 0.5 * I * (h + q),
        }
    }

    pub fn quadratic_sum(&self) -> Complex64 {
        self.phi1 * self.phi1 + self.phi2 * self.phi2 + self.phi3 * self.phi3 + self.phi4 * self.phi4
    }

    /// `(φ₃ − iφ₄)(φ₃ + iφ₄)`, which should equal `−d`.
    pub fn factorization(&self) -> Complex64 {
        (self.phi3 - I * self.phi4) * (self.phi3 + I * self.phi4)
    }
}

pub fn phi_components(data: &HoloData, w: Complex64) -> Result<PhiQuad> {
    let h = data.h_value(w)?;
    Ok(PhiQuad::from_h(data.a, data.b, data.d, h))
}

/// Derivatives of one coordinate function with respect to the isothermal
/// parameters `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct UvJet {
    pub value: f64,
    pub d_u: f64,
    pub d_v: f64,
    pub d_uu: f64,
    pub d_uv: f64,
    pub d_vv: f64,
}

impl UvJet {
    /// From `g = ∂_u − i∂_v` of the coordinate and its complex derivative.
    fn from_holomorphic(g: Complex64, g_prime: Complex64) -> UvJet {
        let d_uu = g_prime.re;
        UvJet {
            value: 0.0,
            d_u: g.re,
            d_v: -g.im,
            d_uu,
            d_uv: -g_prime.im,
            d_vv: -d_uu,
        }
    }

    /// Re-express in `(x, y)` where `x = u`, `y = au + bv`.
    fn to_xy(self, a: f64, b: f64) -> Jet2 {
        let k = a / b;
        Jet2 {
            value: self.value,
            d_x: self.d_u - k * self.d_v,
            d_y: self.d_v / b,
            d_xx: self.d_uu - 2.0 * k * self.d_uv + k * k * self.d_vv,
            d_xy: self.d_uv / b - k * self.d_vv / b,
            d_yy: self.d_vv / (b * b),
        }
    }
}

/// `(φ₃, φ₄)`-derived `(u, v)` jets without the zeroth-order values.
fn uv_derivatives(data: &HoloData, w: Complex64) -> Result<(PhiQuad, [UvJet; 2])> {
    let h = data.h_jet(w)?;
    let quad = PhiQuad::from_h(data.a, data.b, data.d, h.value);
    let t = data.d * h.deriv / (h.value * h.value);
    let phi3p = 0.5 * (h.deriv + t);
    let phi4p = 0.5 * I * (h.deriv - t);
    Ok((
        quad,
        [
            UvJet::from_holomorphic(quad.phi3, phi3p),
            UvJet::from_holomorphic(quad.phi4, phi4p),
        ],
    ))
}

/// `(φ, ψ)` and their `(u, v)` derivatives through order two at `w`.
pub fn isothermal_jets(data: &HoloData, w: Complex64, quad_order: usize) -> Result<[UvJet; 2]> {
    let (_, mut jets) = uv_derivatives(data, w)?;
    let p = integrate_surface(data, w, quad_order)?;
    jets[0].value = p[2];
    jets[1].value = p[3];
    Ok(jets)
}

fn panels_for(w: Complex64) -> usize {
    ((PANELS_PER_UNIT * w.norm()).ceil() as usize).max(1)
}

fn check_order(quad_order: usize) -> Result<()> {
    if quad_order < MIN_QUAD_ORDER {
        return Err(Error::InvalidArgument(format!(
            "quadrature order must be at least {MIN_QUAD_ORDER}, got {quad_order}"
        )));
    }
    Ok(())
}

fn integrate_segment(
    data: &HoloData,
    rule: &GaussLegendre,
    z0: Complex64,
    z1: Complex64,
    panels: usize,
) -> Result<[Complex64; 2]> {
    let out = rule.integrate_segment(z0, z1, panels, |z| {
        let q = phi_components(data, z)?;
        Ok::<_, Error>([q.phi3, q.phi4])
    })?;
    if !(out[0].is_finite() && out[1].is_finite()) {
        return Err(Error::NonFiniteQuadrature { re: z1.re, im: z1.im });
    }
    Ok(out)
}

/// `(x, y, f₁, f₂)` for the parameter `w = u + iv`, integrating along the
/// straight segment `[0, w]` with a panel count proportional to `|w|`.
pub fn integrate_surface(data: &HoloData, w: Complex64, quad_order: usize) -> Result<[f64; 4]> {
    integrate_surface_panels(data, w, quad_order, panels_for(w))
}

/// As [`integrate_surface`] with an explicit panel count.
pub fn integrate_surface_panels(data: &HoloData, w: Complex64, quad_order: usize, panels: usize) -> Result<[f64; 4]> {
    check_order(quad_order)?;
    if !w.is_finite() {
        return Err(Error::InvalidArgument(format!("parameter must be finite, got {w}")));
    }
    let x = w.re;
    let y = data.a * w.re + data.b * w.im;
    let [o1, o2] = data.origin_offset;
    if w == Complex64::new(0.0, 0.0) {
        return Ok([x, y, o1, o2]);
    }
    let rule = GaussLegendre::new(quad_order);
    let [i3, i4] = integrate_segment(data, &rule, Complex64::new(0.0, 0.0), w, panels)?;
    Ok([x, y, o1 + i3.re, o2 + i4.re])
}

/// `(f₁, f₂)` integrated from `0` through each vertex of a polyline in turn.
pub fn integrate_polyline(data: &HoloData, vertices: &[Complex64], quad_order: usize) -> Result<[f64; 2]> {
    check_order(quad_order)?;
    let rule = GaussLegendre::new(quad_order);
    let mut acc = data.origin_offset;
    let mut from = Complex64::new(0.0, 0.0);
    for &to in vertices {
        let [i3, i4] = integrate_segment(data, &rule, from, to, panels_for(to - from))?;
        acc[0] += i3.re;
        acc[1] += i4.re;
        from = to;
    }
    Ok(acc)
}

fn parameter_of(data: &HoloData, x: f64, y: f64) -> Complex64 {
    Complex64::new(x, (y - data.a * x) / data.b)
}

fn jets_from_uv(data: &HoloData, point: [f64; 2], uv: [UvJet; 2]) -> Jet2Map {
    Jet2Map {
        point,
        f1: uv[0].to_xy(data.a, data.b),
        f2: uv[1].to_xy(data.a, data.b),
    }
}

/// Second-order jet of the reconstructed graph `f(x, y)`. Derivatives come
/// from the closed-form `φ₃, φ₄` and their `w`-derivatives; only the values
/// use quadrature.
pub fn graph_jets(data: &HoloData, x: f64, y: f64) -> Result<Jet2Map> {
    graph_jets_with(data, x, y, DEFAULT_QUAD_ORDER)
}

pub fn graph_jets_with(data: &HoloData, x: f64, y: f64, quad_order: usize) -> Result<Jet2Map> {
    let w = parameter_of(data, x, y);
    Ok(jets_from_uv(data, [x, y], isothermal_jets(data, w, quad_order)?))
}

impl JetSource for HoloData {
    fn jets_at(&self, x: f64, y: f64) -> Result<Jet2Map> {
        graph_jets(self, x, y)
    }
}

/// Acceptance thresholds for the algebraic identities of the construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityTolerances {
    pub quadratic: f64,
    pub factorization: f64,
    pub h_identity: f64,
    pub phi_jacobian: f64,
    pub closed_form: f64,
    pub residual: f64,
}

impl Default for IdentityTolerances {
    fn default() -> Self {
        IdentityTolerances {
            quadratic: 1e-12,
            factorization: 1e-12,
            h_identity: 1e-12,
            phi_jacobian: 1e-9,
            closed_form: 1e-9,
            residual: 1e-9,
        }
    }
}

/// Worst-case identity deviations over a `w`-plane grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstructionReport {
    pub h: String,
    pub a: f64,
    pub b: f64,
    pub d: [f64; 2],
    pub points: usize,
    pub evaluated: usize,
    /// `|Σ φₖ²|`
    pub max_quadratic: f64,
    /// `|(φ₃ − iφ₄)(φ₃ + iφ₄) + d|`
    pub max_factorization: f64,
    /// `|φ₃ − iφ₄ − h|`
    pub max_h_identity: f64,
    /// `|Im(φ₃ φ̄₄) − b·J_f|`
    pub max_phi_jacobian: f64,
    /// `|J_f − (1/4b)(|d|²/|h|² − |h|²)|`
    pub max_closed_form: f64,
    pub max_residual: f64,
    pub jacobian_min: f64,
    pub jacobian_max: f64,
    pub tolerances: IdentityTolerances,
    pub pass: bool,
    pub errors: Vec<PointError>,
}

struct IdentitySample {
    quadratic: f64,
    factorization: f64,
    h_identity: f64,
    phi_jacobian: f64,
    closed_form: f64,
    residual: f64,
    jacobian: f64,
}

fn identity_sample(data: &HoloData, w: Complex64) -> Result<IdentitySample> {
    let (q, uv) = uv_derivatives(data, w)?;
    let h = data.h_value(w)?;
    let x = w.re;
    let j = jets_from_uv(data, [x, data.a * x + data.b * w.im], uv);
    let jac = jacobian(&j);
    Ok(IdentitySample {
        quadratic: q.quadratic_sum().norm(),
        factorization: (q.factorization() + data.d).norm(),
        h_identity: (q.phi3 - I * q.phi4 - h).norm(),
        phi_jacobian: ((q.phi3 * q.phi4.conj()).im - data.b * jac).abs(),
        closed_form: (jac - data.closed_form_jacobian(w)?).abs(),
        residual: norm2(minimal_residual(&j)),
        jacobian: jac,
    })
}

/// Check every identity of the construction at the points of a `w`-plane
/// grid. Evaluation failures are collected per point.
pub fn verify_construction(data: &HoloData, grid: &GridSpec) -> Result<ConstructionReport> {
    verify_construction_with(data, grid, IdentityTolerances::default())
}

pub fn verify_construction_with(
    data: &HoloData,
    grid: &GridSpec,
    tolerances: IdentityTolerances,
) -> Result<ConstructionReport> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let pts = grid.points();
    let samples = sweep(&pts, |p| {
        identity_sample(data, Complex64::new(p[0], p[1])).map_err(|e| PointError::new(p, &e))
    });
    let mut r = ConstructionReport {
        h: data.h.to_string(),
        a: data.a,
        b: data.b,
        d: [data.d.re, data.d.im],
        points: pts.len(),
        evaluated: 0,
        max_quadratic: 0.0,
        max_factorization: 0.0,
        max_h_identity: 0.0,
        max_phi_jacobian: 0.0,
        max_closed_form: 0.0,
        max_residual: 0.0,
        jacobian_min: f64::INFINITY,
        jacobian_max: f64::NEG_INFINITY,
        tolerances,
        pass: false,
        errors: Vec::new(),
    };
    for s in samples {
        match s {
            Ok(s) => {
                r.evaluated += 1;
                r.max_quadratic = r.max_quadratic.max(s.quadratic);
                r.max_factorization = r.max_factorization.max(s.factorization);
                r.max_h_identity = r.max_h_identity.max(s.h_identity);
                r.max_phi_jacobian = r.max_phi_jacobian.max(s.phi_jacobian);
                r.max_closed_form = r.max_closed_form.max(s.closed_form);
                r.max_residual = r.max_residual.max(s.residual);
                r.jacobian_min = r.jacobian_min.min(s.jacobian);
                r.jacobian_max = r.jacobian_max.max(s.jacobian);
            }
            Err(e) => r.errors.push(e),
        }
    }
    if r.evaluated == 0 {
        r.jacobian_min = 0.0;
        r.jacobian_max = 0.0;
    }
    let t = &r.tolerances;
    r.pass = r.evaluated > 0
        && r.errors.is_empty()
        && r.max_quadratic < t.quadratic
        && r.max_factorization < t.factorization
        && r.max_h_identity < t.h_identity
        && r.max_phi_jacobian < t.phi_jacobian
        && r.max_closed_form < t.closed_form
        && r.max_residual < t.residual;
    Ok(r)
}

/// One sampled point `(u, v) ↦ (x, y, f₁, f₂)` with its jet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceSample {
    pub u: f64,
    pub v: f64,
    pub x: f64,
    pub y: f64,
    pub f1: f64,
    pub f2: f64,
    pub jacobian: f64,
    pub jets: Jet2Map,
}

/// Immutable sampling of a constructed surface over a `w`-plane grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructedSurface {
    pub seed: HoloData,
    pub quad_order: usize,
    pub samples: Vec<SurfaceSample>,
    pub errors: Vec<PointError>,
}

impl ConstructedSurface {
    /// CSV with header `u,v,x,y,f1,f2,J`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,v,x,y,f1,f2,J\n");
        for s in &self.samples {
            let _ = writeln!(out, "{},{},{},{},{},{},{}", s.u, s.v, s.x, s.y, s.f1, s.f2, s.jacobian);
        }
        out
    }
}

pub fn construct_surface(data: &HoloData, grid: &GridSpec, quad_order: usize) -> Result<ConstructedSurface> {
    check_order(quad_order)?;
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let pts = grid.points();
    let results = sweep(&pts, |p| {
        let w = Complex64::new(p[0], p[1]);
        let sample = || -> Result<SurfaceSample> {
            let uv = isothermal_jets(data, w, quad_order)?;
            let (x, y) = (p[0], data.a * p[0] + data.b * p[1]);
            let jets = jets_from_uv(data, [x, y], uv);
            Ok(SurfaceSample {
                u: p[0],
                v: p[1],
                x,
                y,
                f1: uv[0].value,
                f2: uv[1].value,
                jacobian: jacobian(&jets),
                jets,
            })
        };
        sample().map_err(|e| PointError::new(p, &e))
    });
    let mut samples = Vec::with_capacity(results.len());
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(s) => samples.push(s),
            Err(e) => errors.push(e),
        }
    }
    Ok(ConstructedSurface {
        seed: data.clone(),
        quad_order,
        samples,
        errors,
    })
}

/// How a reconstructed graph compares with an explicit map over an
/// `(x, y)` grid. Informational: the two may differ by constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapComparison {
    pub points: usize,
    pub evaluated: usize,
    pub max_jacobian_diff: f64,
    pub max_value_diff: [f64; 2],
    pub max_gradient_diff: f64,
    pub errors: Vec<PointError>,
}

pub fn compare_with_map(data: &HoloData, target: &MapExpr, grid: &GridSpec) -> Result<MapComparison> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let pts = grid.points();
    let results = sweep(&pts, |p| {
        let pair = || -> Result<(Jet2Map, Jet2Map)> { Ok((graph_jets(data, p[0], p[1])?, target.jets(p[0], p[1])?)) };
        pair().map_err(|e| PointError::new(p, &e))
    });
    let mut c = MapComparison {
        points: pts.len(),
        evaluated: 0,
        max_jacobian_diff: 0.0,
        max_value_diff: [0.0, 0.0],
        max_gradient_diff: 0.0,
        errors: Vec::new(),
    };
    for r in results {
        match r {
            Ok((g, t)) => {
                c.evaluated += 1;
                c.max_jacobian_diff = c.max_jacobian_diff.max((jacobian(&g) - jacobian(&t)).abs());
                c.max_value_diff[0] = c.max_value_diff[0].max((g.f1.value - t.f1.value).abs());
                c.max_value_diff[1] = c.max_value_diff[1].max((g.f2.value - t.f2.value).abs());
                for (a, b) in [(g.f1, t.f1), (g.f2, t.f2)] {
                    c.max_gradient_diff = c.max_gradient_diff.max((a.d_x - b.d_x).abs()).max((a.d_y - b.d_y).abs());
                }
            }
            Err(e) => c.errors.push(e),
        }
    }
    Ok(c)
}
