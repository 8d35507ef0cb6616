//! First and second fundamental forms, mean curvature and the minimal
//! surface equation for graphs `X(x, y) = (x, y, f₁(x, y), f₂(x, y))` in R⁴.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Expr, Jet2, Mode};
use crate::grid::{sweep, GridSpec, PointError};

pub type Vec4 = [f64; 4];

/// Default tolerance on the residual norm for the "minimal" verdict.
pub const DEFAULT_MINIMAL_TOL: f64 = 1e-8;

/// Tolerance used when checking that a vector is a unit normal.
pub const NORMAL_TOL: f64 = 1e-8;

/// A pair of real expressions `f = (f₁, f₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MapExpr {
    pub f1: Expr,
    pub f2: Expr,
}

impl MapExpr {
    pub fn new(f1: Expr, f2: Expr) -> Result<Self> {
        for e in [&f1, &f2] {
            if e.mode() != Mode::Real2 {
                return Err(Error::ModeMismatch {
                    expected: Mode::Real2.name(),
                    found: e.mode().name(),
                });
            }
        }
        Ok(MapExpr { f1, f2 })
    }

    pub fn parse(f1: &str, f2: &str) -> Result<Self> {
        MapExpr::new(Expr::real(f1)?, Expr::real(f2)?)
    }

    pub fn jets(&self, x: f64, y: f64) -> Result<Jet2Map> {
        Ok(Jet2Map {
            point: [x, y],
            f1: self.f1.eval_jet2(x, y)?,
            f2: self.f2.eval_jet2(x, y)?,
        })
    }
}

/// Anything that can produce the second-order jet of a map `R² → R²` at a
/// point: parsed expressions, Weierstrass seeds.
pub trait JetSource: Sync {
    fn jets_at(&self, x: f64, y: f64) -> Result<Jet2Map>;
}

impl JetSource for MapExpr {
    fn jets_at(&self, x: f64, y: f64) -> Result<Jet2Map> {
        self.jets(x, y)
    }
}

/// Both component jets of `f` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jet2Map {
    pub point: [f64; 2],
    pub f1: Jet2,
    pub f2: Jet2,
}

impl Jet2Map {
    pub fn f_x(&self) -> [f64; 2] {
        [self.f1.d_x, self.f2.d_x]
    }

    pub fn f_y(&self) -> [f64; 2] {
        [self.f1.d_y, self.f2.d_y]
    }

    pub fn f_xx(&self) -> [f64; 2] {
        [self.f1.d_xx, self.f2.d_xx]
    }

    pub fn f_xy(&self) -> [f64; 2] {
        [self.f1.d_xy, self.f2.d_xy]
    }

    pub fn f_yy(&self) -> [f64; 2] {
        [self.f1.d_yy, self.f2.d_yy]
    }

    /// `X_x = (1, 0, f₁ₓ, f₂ₓ)`.
    pub fn tangent_x(&self) -> Vec4 {
        [1.0, 0.0, self.f1.d_x, self.f2.d_x]
    }

    /// `X_y = (0, 1, f₁_y, f₂_y)`.
    pub fn tangent_y(&self) -> Vec4 {
        [0.0, 1.0, self.f1.d_y, self.f2.d_y]
    }
}

fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn dot4(a: &Vec4, b: &Vec4) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

fn axpy(v: &mut Vec4, k: f64, u: &Vec4) {
    for i in 0..4 {
        v[i] += k * u[i];
    }
}

fn normalize(v: Vec4) -> Vec4 {
    let n = dot4(&v, &v).sqrt();
    [v[0] / n, v[1] / n, v[2] / n, v[3] / n]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricCoeffs {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
}

impl MetricCoeffs {
    pub fn det(&self) -> f64 {
        self.g11 * self.g22 - self.g12 * self.g12
    }

    /// Smaller eigenvalue of the metric.
    pub fn lambda_min(&self) -> f64 {
        let tr = self.g11 + self.g22;
        let disc = ((self.g11 - self.g22).powi(2) + 4.0 * self.g12 * self.g12).sqrt();
        0.5 * (tr - disc)
    }
}

pub fn first_fundamental_form(j: &Jet2Map) -> MetricCoeffs {
    let (fx, fy) = (j.f_x(), j.f_y());
    MetricCoeffs {
        g11: 1.0 + dot2(fx, fx),
        g12: dot2(fx, fy),
        g22: 1.0 + dot2(fy, fy),
    }
}

/// Orthonormal frame of the normal plane: Gram–Schmidt of `e₃`, then `e₄`,
/// against an orthonormal basis of the tangent plane.
pub fn normal_frame(j: &Jet2Map) -> [Vec4; 2] {
    let t1 = normalize(j.tangent_x());
    let mut t2 = j.tangent_y();
    for _ in 0..2 {
        let k = dot4(&t2, &t1);
        axpy(&mut t2, -k, &t1);
    }
    let t2 = normalize(t2);

    let project_out = |mut v: Vec4, basis: &[Vec4]| -> Vec4 {
        // two passes keep the result orthogonal to working precision
        for _ in 0..2 {
            for b in basis {
                let k = dot4(&v, b);
                axpy(&mut v, -k, b);
            }
        }
        normalize(v)
    };
    let n1 = project_out([0.0, 0.0, 1.0, 0.0], &[t1, t2]);
    let n2 = project_out([0.0, 0.0, 0.0, 1.0], &[t1, t2, n1]);
    [n1, n2]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondFormCoeffs {
    pub b11: f64,
    pub b12: f64,
    pub b22: f64,
    pub normal: Vec4,
}

/// Largest violation of `|ξ| = 1`, `ξ ⊥ X_x`, `ξ ⊥ X_y` (the tangency terms
/// are relative to the tangent length).
pub fn normality_defect(j: &Jet2Map, xi: &Vec4) -> f64 {
    let (tx, ty) = (j.tangent_x(), j.tangent_y());
    let unit = (dot4(xi, xi).sqrt() - 1.0).abs();
    let ox = dot4(xi, &tx).abs() / dot4(&tx, &tx).sqrt();
    let oy = dot4(xi, &ty).abs() / dot4(&ty, &ty).sqrt();
    unit.max(ox).max(oy)
}

pub fn second_fundamental_form(j: &Jet2Map, xi: &Vec4) -> Result<SecondFormCoeffs> {
    let defect = normality_defect(j, xi);
    if !(defect <= NORMAL_TOL) {
        return Err(Error::NotNormal { defect });
    }
    // X_xx = (0, 0, f₁ₓₓ, f₂ₓₓ) etc.
    let n = [xi[2], xi[3]];
    Ok(SecondFormCoeffs {
        b11: dot2(j.f_xx(), n),
        b12: dot2(j.f_xy(), n),
        b22: dot2(j.f_yy(), n),
        normal: *xi,
    })
}

pub fn mean_curvature(j: &Jet2Map, xi: &Vec4) -> Result<f64> {
    let g = first_fundamental_form(j);
    let b = second_fundamental_form(j, xi)?;
    Ok((g.g22 * b.b11 - 2.0 * g.g12 * b.b12 + g.g11 * b.b22) / (2.0 * g.det()))
}

/// Left-hand side of the minimal surface equation,
/// `(1+|f_y|²) f_xx − 2⟨f_x, f_y⟩ f_xy + (1+|f_x|²) f_yy`.
pub fn minimal_residual(j: &Jet2Map) -> [f64; 2] {
    let g = first_fundamental_form(j);
    let (xx, xy, yy) = (j.f_xx(), j.f_xy(), j.f_yy());
    [
        g.g22 * xx[0] - 2.0 * g.g12 * xy[0] + g.g11 * yy[0],
        g.g22 * xx[1] - 2.0 * g.g12 * xy[1] + g.g11 * yy[1],
    ]
}

pub(crate) fn norm2(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Per-point values used by the minimality report and the CSV dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimalitySample {
    pub x: f64,
    pub y: f64,
    pub residual: [f64; 2],
    pub mean_curvature: [f64; 2],
    pub metric_det: f64,
}

pub fn minimality_sample(j: &Jet2Map) -> Result<MinimalitySample> {
    let [n1, n2] = normal_frame(j);
    Ok(MinimalitySample {
        x: j.point[0],
        y: j.point[1],
        residual: minimal_residual(j),
        mean_curvature: [mean_curvature(j, &n1)?, mean_curvature(j, &n2)?],
        metric_det: first_fundamental_form(j).det(),
    })
}

pub fn minimality_samples<S: JetSource + ?Sized>(f: &S, grid: &GridSpec) -> Vec<Result<MinimalitySample, PointError>> {
    let pts = grid.points();
    sweep(&pts, |p| {
        f.jets_at(p[0], p[1])
            .and_then(|j| minimality_sample(&j))
            .map_err(|e| PointError::new(p, &e))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MinimalityVerdict {
    Minimal,
    NonMinimal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalityReport {
    pub points: usize,
    pub evaluated: usize,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub max_abs_h1: f64,
    pub max_abs_h2: f64,
    pub worst_point: Option<[f64; 2]>,
    pub min_metric_det: f64,
    pub max_metric_det: f64,
    pub tolerance: f64,
    pub verdict: MinimalityVerdict,
    pub errors: Vec<PointError>,
}

impl MinimalityReport {
    pub fn from_samples(samples: &[Result<MinimalitySample, PointError>], tolerance: f64) -> Self {
        let mut r = MinimalityReport {
            points: samples.len(),
            evaluated: 0,
            max_residual: 0.0,
            mean_residual: 0.0,
            max_abs_h1: 0.0,
            max_abs_h2: 0.0,
            worst_point: None,
            min_metric_det: f64::INFINITY,
            max_metric_det: 0.0,
            tolerance,
            verdict: MinimalityVerdict::NonMinimal,
            errors: Vec::new(),
        };
        let mut sum = 0.0;
        for s in samples {
            match s {
                Ok(s) => {
                    let n = norm2(s.residual);
                    r.evaluated += 1;
                    sum += n;
                    if r.worst_point.is_none() || n > r.max_residual {
                        r.max_residual = n;
                        r.worst_point = Some([s.x, s.y]);
                    }
                    r.max_abs_h1 = r.max_abs_h1.max(s.mean_curvature[0].abs());
                    r.max_abs_h2 = r.max_abs_h2.max(s.mean_curvature[1].abs());
                    r.min_metric_det = r.min_metric_det.min(s.metric_det);
                    r.max_metric_det = r.max_metric_det.max(s.metric_det);
                }
                Err(e) => r.errors.push(e.clone()),
            }
        }
        if r.evaluated > 0 {
            r.mean_residual = sum / r.evaluated as f64;
            if r.max_residual < tolerance {
                r.verdict = MinimalityVerdict::Minimal;
            }
        } else {
            r.min_metric_det = 0.0;
        }
        r
    }

    pub fn is_minimal(&self) -> bool {
        self.verdict == MinimalityVerdict::Minimal
    }
}

pub fn grid_minimality_report<S: JetSource + ?Sized>(f: &S, grid: &GridSpec, tolerance: f64) -> Result<MinimalityReport> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(MinimalityReport::from_samples(&minimality_samples(f, grid), tolerance))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::examples::{osserman, osserman_jacobian};

    fn jet(f1: &str, f2: &str, x: f64, y: f64) -> Jet2Map {
        MapExpr::parse(f1, f2).unwrap().jets(x, y).unwrap()
    }

    fn j2(value: f64, d: [f64; 5]) -> Jet2 {
        Jet2 {
            value,
            d_x: d[0],
            d_y: d[1],
            d_xx: d[2],
            d_xy: d[3],
            d_yy: d[4],
        }
    }

    fn arb_jet() -> impl Strategy<Value = Jet2Map> {
        let comp = (-10.0f64..10.0, prop::array::uniform5(-10.0f64..10.0)).prop_map(|(v, d)| j2(v, d));
        (comp.clone(), comp).prop_map(|(f1, f2)| Jet2Map {
            point: [0.0, 0.0],
            f1,
            f2,
        })
    }

    #[test]
    fn flat_plane() {
        let j = jet("0", "0", 0.3, -0.2);
        assert_eq!(
            first_fundamental_form(&j),
            MetricCoeffs {
                g11: 1.0,
                g12: 0.0,
                g22: 1.0
            }
        );
        let [n1, n2] = normal_frame(&j);
        assert_eq!(n1, [0.0, 0.0, 1.0, 0.0]);
        assert_eq!(n2, [0.0, 0.0, 0.0, 1.0]);
        for n in [n1, n2] {
            let b = second_fundamental_form(&j, &n).unwrap();
            assert_eq!((b.b11, b.b12, b.b22), (0.0, 0.0, 0.0));
            assert_eq!(mean_curvature(&j, &n).unwrap(), 0.0);
        }
        assert_eq!(minimal_residual(&j), [0.0, 0.0]);
    }

    #[test]
    fn osserman_metric_at_origin() {
        let f = osserman();
        let j = f.jets(0.0, 0.0).unwrap();
        assert_eq!(j.f_x(), [2.0, 0.0]);
        assert!((j.f_y()[0]).abs() < 1e-16 && (j.f_y()[1] - 0.5).abs() < 1e-16);
        let g = first_fundamental_form(&j);
        assert_eq!((g.g11, g.g12, g.g22), (5.0, 0.0, 1.25));
    }

    #[test]
    fn osserman_metric_is_conformal_after_shear() {
        let f = osserman();
        for p in GridSpec::square(2.0, 21).unwrap().points() {
            let g = first_fundamental_form(&f.jets(p[0], p[1]).unwrap());
            assert!((g.g11 - 4.0 * g.g22).abs() < 1e-12 * g.g11, "{p:?}");
            assert!(g.g12.abs() < 1e-12 * g.g11, "{p:?}");
        }
        // sanity on the shared fixture
        assert_eq!(osserman_jacobian(0.0), 1.0);
    }

    #[test]
    fn paraboloid_second_form_and_mean_curvature() {
        let j = jet("x^2 + y^2", "0", 0.0, 0.0);
        let [n1, n2] = normal_frame(&j);
        assert_eq!(n1, [0.0, 0.0, 1.0, 0.0]);
        let b = second_fundamental_form(&j, &n1).unwrap();
        assert_eq!((b.b11, b.b12, b.b22), (2.0, 0.0, 2.0));
        assert_eq!(mean_curvature(&j, &n1).unwrap(), 2.0);
        assert_eq!(mean_curvature(&j, &n2).unwrap(), 0.0);
    }

    #[test]
    fn residual_by_hand() {
        let j = jet("x^2", "y^2", 1.0, 1.0);
        assert_eq!(minimal_residual(&j), [10.0, 10.0]);
    }

    #[test]
    fn rejects_non_normal_vectors() {
        let j = jet("x^2 + y", "x*y", 0.5, 0.5);
        assert!(matches!(
            second_fundamental_form(&j, &[0.0, 0.0, 1.0, 0.0]),
            Err(Error::NotNormal { .. })
        ));
        let [n1, _] = normal_frame(&j);
        let scaled = [2.0 * n1[0], 2.0 * n1[1], 2.0 * n1[2], 2.0 * n1[3]];
        assert!(matches!(second_fundamental_form(&j, &scaled), Err(Error::NotNormal { .. })));
    }

    #[test]
    fn osserman_is_minimal_on_grid() {
        let rep = grid_minimality_report(&osserman(), &GridSpec::default(), DEFAULT_MINIMAL_TOL).unwrap();
        assert_eq!(rep.verdict, MinimalityVerdict::Minimal);
        assert_eq!(rep.evaluated, 41 * 41);
        assert!(rep.max_residual < 1e-9, "{}", rep.max_residual);
        assert!(rep.max_abs_h1 < 1e-9 && rep.max_abs_h2 < 1e-9);
        assert!(rep.errors.is_empty());
    }

    #[test]
    fn non_minimal_report_records_worst_point() {
        let f = MapExpr::parse("x^2", "y^2").unwrap();
        let rep = grid_minimality_report(&f, &GridSpec::default(), DEFAULT_MINIMAL_TOL).unwrap();
        assert_eq!(rep.verdict, MinimalityVerdict::NonMinimal);
        let w = rep.worst_point.unwrap();
        // |residual| = 2(1+4y², 1+4x²) grows toward the corners
        assert_eq!(w.map(f64::abs), [2.0, 2.0]);
        assert!((rep.max_residual - 2.0 * 17.0 * 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn domain_errors_are_collected_not_fatal() {
        let f = MapExpr::parse("log(x)", "0").unwrap();
        let g = GridSpec::square(1.0, 5).unwrap();
        let rep = grid_minimality_report(&f, &g, DEFAULT_MINIMAL_TOL).unwrap();
        assert_eq!(rep.points, 25);
        assert_eq!(rep.evaluated, 10);
        assert_eq!(rep.errors.len(), 15);
    }

    #[test]
    fn equivalence_of_residual_and_mean_curvature() {
        // minimal examples: both vanish; non-minimal: both are large
        let cases = [
            (osserman(), true),
            (MapExpr::parse("x^2 - y^2", "2*x*y").unwrap(), true),
            (MapExpr::parse("exp(x)*cos(y)", "-exp(x)*sin(y)").unwrap(), true),
            (MapExpr::parse("x^2", "y^2").unwrap(), false),
            (MapExpr::parse("x^2 + y^2", "x*y").unwrap(), false),
        ];
        for (f, minimal) in cases {
            for p in GridSpec::square(1.5, 9).unwrap().points() {
                let j = f.jets(p[0], p[1]).unwrap();
                let g = first_fundamental_form(&j);
                let r = norm2(minimal_residual(&j));
                let [n1, n2] = normal_frame(&j);
                let h = [mean_curvature(&j, &n1).unwrap(), mean_curvature(&j, &n2).unwrap()];
                let bound = 1e-10 / (2.0 * g.lambda_min());
                let h_small = h[0].abs() < bound && h[1].abs() < bound;
                assert_eq!(r < 1e-10, minimal, "{p:?}: {r}");
                assert_eq!(h_small, minimal, "{p:?}: {h:?}");
                // H(ξ) is the normal component of the residual over 2 det g
                for (n, hv) in [(n1, h[0]), (n2, h[1])] {
                    let rr = minimal_residual(&j);
                    let expect = (rr[0] * n[2] + rr[1] * n[3]) / (2.0 * g.det());
                    assert!((hv - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
                }
            }
        }
    }

    #[test]
    fn metric_determinant_is_one_exactly_for_flat_jets() {
        let j = Jet2Map {
            point: [0.0, 0.0],
            f1: j2(3.0, [0.0, 0.0, 1.0, 2.0, 3.0]),
            f2: j2(-1.0, [0.0, 0.0, 4.0, 5.0, 6.0]),
        };
        assert_eq!(first_fundamental_form(&j).det(), 1.0);
    }

    proptest! {
        #[test]
        fn frame_is_orthonormal_and_normal(j in arb_jet()) {
            let [n1, n2] = normal_frame(&j);
            prop_assert!((dot4(&n1, &n1) - 1.0).abs() < 1e-12);
            prop_assert!((dot4(&n2, &n2) - 1.0).abs() < 1e-12);
            prop_assert!(dot4(&n1, &n2).abs() < 1e-12);
            for n in [n1, n2] {
                prop_assert!(dot4(&n, &j.tangent_x()).abs() < 1e-10);
                prop_assert!(dot4(&n, &j.tangent_y()).abs() < 1e-10);
            }
        }

        #[test]
        fn second_form_is_linear_in_the_normal(j in arb_jet(), t in 0.0f64..std::f64::consts::TAU) {
            let [n1, n2] = normal_frame(&j);
            let (c, s) = (t.cos(), t.sin());
            let xi = [0, 1, 2, 3].map(|k| c * n1[k] + s * n2[k]);
            let b = second_fundamental_form(&j, &xi).unwrap();
            let b1 = second_fundamental_form(&j, &n1).unwrap();
            let b2 = second_fundamental_form(&j, &n2).unwrap();
            let scale = 1.0 + b1.b11.abs().max(b2.b11.abs()).max(b1.b22.abs()).max(b2.b22.abs()).max(b1.b12.abs()).max(b2.b12.abs());
            prop_assert!((b.b11 - (c * b1.b11 + s * b2.b11)).abs() < 1e-12 * scale);
            prop_assert!((b.b12 - (c * b1.b12 + s * b2.b12)).abs() < 1e-12 * scale);
            prop_assert!((b.b22 - (c * b1.b22 + s * b2.b22)).abs() < 1e-12 * scale);
        }

        #[test]
        fn mean_curvature_norm_is_frame_invariant(j in arb_jet(), t in 0.0f64..std::f64::consts::TAU) {
            let [n1, n2] = normal_frame(&j);
            let (c, s) = (t.cos(), t.sin());
            let r1 = [0, 1, 2, 3].map(|k| c * n1[k] + s * n2[k]);
            let r2 = [0, 1, 2, 3].map(|k| -s * n1[k] + c * n2[k]);
            let h = |n: &Vec4| mean_curvature(&j, n).unwrap();
            let before = h(&n1).powi(2) + h(&n2).powi(2);
            let after = h(&r1).powi(2) + h(&r2).powi(2);
            prop_assert!((before - after).abs() <= 1e-12 * before.max(1e-300));
        }

        #[test]
        fn metric_is_positive_definite(j in arb_jet()) {
            let g = first_fundamental_form(&j);
            prop_assert!(g.g11 >= 1.0 && g.g22 >= 1.0);
            prop_assert!(g.det() >= 1.0);
            prop_assert!(g.det() > 1.0 || (j.f_x() == [0.0, 0.0] && j.f_y() == [0.0, 0.0]));
        }
    }
}
