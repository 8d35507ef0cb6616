//! End-to-end acceptance criteria. Runs without the libtest harness so the
//! one-line verdicts are always printed; exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use minigraph::examples::{osserman, CONJ_Z_SQUARED, Z_SQUARED};
use minigraph::geometry::{grid_minimality_report, Jet2Map, MapExpr};
use minigraph::isothermal::{default_fit_grid, fit_shear, harmonicity_check, DEFAULT_MAX_ITER, DEFAULT_STARTS};
use minigraph::jacobian::{classify_cr, jacobian_range, CrClass, RangeVerdict};
use minigraph::slag::{fit_theta, fu_classify, gradient_graph, slag_samples, FuClass, SlagProblem};
use minigraph::weierstrass::{graph_jets, integrate_surface_panels, phi_components, verify_construction, HoloData, SEEDS};
use minigraph::{Expr, GridSpec};

const OSS_F1: &str = "0.5*(exp(x)-3*exp(-x))*cos(y/2)";
const OSS_F2: &str = "-0.5*(exp(x)-3*exp(-x))*sin(y/2)";

/// `−(e^{2x} − 9e^{−2x})/8`, written out independently of the library.
fn osserman_j(x: f64) -> f64 {
    -((2.0 * x).exp() - 9.0 * (-2.0 * x).exp()) / 8.0
}

fn jac(j: &Jet2Map) -> f64 {
    j.f1.d_x * j.f2.d_y - j.f1.d_y * j.f2.d_x
}

/// `g₂₂ f_xx − 2g₁₂ f_xy + g₁₁ f_yy` from raw jet entries.
fn residual_norm(j: &Jet2Map) -> f64 {
    let (a, b) = (j.f1, j.f2);
    let g11 = 1.0 + a.d_x * a.d_x + b.d_x * b.d_x;
    let g12 = a.d_x * a.d_y + b.d_x * b.d_y;
    let g22 = 1.0 + a.d_y * a.d_y + b.d_y * b.d_y;
    let r1 = g22 * a.d_xx - 2.0 * g12 * a.d_xy + g11 * a.d_yy;
    let r2 = g22 * b.d_xx - 2.0 * g12 * b.d_xy + g11 * b.d_yy;
    r1.hypot(r2)
}

struct Outcome {
    pass: bool,
    detail: String,
}

struct Checks {
    failures: Vec<String>,
    summary: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks {
            failures: Vec::new(),
            summary: Vec::new(),
        }
    }

    fn below(&mut self, name: &str, value: f64, tol: f64) {
        self.summary.push(format!("{name}={value:.2e}"));
        if !(value < tol) {
            self.failures.push(format!("{name} = {value:e} (limit {tol:e})"));
        }
    }

    fn holds(&mut self, name: &str, ok: bool) {
        if !ok {
            self.failures.push(name.to_string());
        }
    }

    fn within(&mut self, name: &str, elapsed: Duration, limit: Duration) {
        self.summary.push(format!("{name}={:.2}s", elapsed.as_secs_f64()));
        if elapsed >= limit {
            self.failures.push(format!("{name} took {elapsed:?} (limit {limit:?})"));
        }
    }

    fn done(self) -> Outcome {
        Outcome {
            pass: self.failures.is_empty(),
            detail: if self.failures.is_empty() {
                self.summary.join(", ")
            } else {
                self.failures.join("; ")
            },
        }
    }
}

fn c1_osserman_minimality() -> Outcome {
    let mut c = Checks::new();
    let t = Instant::now();
    let grid = GridSpec::new(-2.0, 2.0, 41, -2.0, 2.0, 41).unwrap();
    let r = grid_minimality_report(&osserman(), &grid, 1e-9).unwrap();
    let elapsed = t.elapsed();
    c.holds("all 1681 points evaluated", r.evaluated == 1681 && r.errors.is_empty());
    c.below("max_residual", r.max_residual, 1e-9);
    c.below("max|H1|", r.max_abs_h1, 1e-9);
    c.below("max|H2|", r.max_abs_h2, 1e-9);
    // independent residual from raw jets
    let f = osserman();
    let worst = grid
        .points()
        .iter()
        .map(|p| residual_norm(&f.jets(p[0], p[1]).unwrap()))
        .fold(0.0, f64::max);
    c.below("independent_residual", worst, 1e-9);
    c.within("runtime", elapsed, Duration::from_secs(1));
    c.done()
}

fn c2_osserman_jacobian() -> Outcome {
    let mut c = Checks::new();
    let f = MapExpr::parse(OSS_F1, OSS_F2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (x, y) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let want = osserman_j(x);
        let got = jac(&f.jets(x, y).unwrap());
        worst = worst.max((got - want).abs() / want.abs());
    }
    c.below("max_relative_error", worst, 1e-10);
    let ev = jacobian_range(&f, &[1.0, 2.0, 3.0], 41).unwrap();
    c.summary.push(format!("range=[{:.1}, {:.1}]", ev.sampled_min, ev.sampled_max));
    c.holds("sampled min < -50", ev.sampled_min < -50.0);
    c.holds("sampled max > 400", ev.sampled_max > 400.0);
    c.holds("verdict FullRangeEvidence", ev.verdict == RangeVerdict::FullRangeEvidence);
    c.done()
}

/// `h` evaluated without the expression engine, for the documented seeds.
fn h_direct(h: &str, w: Complex64) -> Complex64 {
    match h {
        "exp(w)" => w.exp(),
        "exp(w) + 2" => w.exp() + 2.0,
        "w^2 + 5" => w * w + 5.0,
        _ => unreachable!("undocumented seed {h}"),
    }
}

fn c3_weierstrass_identities() -> Outcome {
    let mut c = Checks::new();
    let t = Instant::now();
    let grid = GridSpec::square(2.0, 41).unwrap();
    let i = Complex64::new(0.0, 1.0);
    let (mut quad, mut fact, mut phij, mut closed, mut resid) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (k, (h, a, b)) in SEEDS.iter().enumerate() {
        let seed = HoloData::seed(k);
        let report = verify_construction(&seed, &grid).unwrap();
        c.holds(&format!("seed {k} report passes"), report.pass);
        let d = Complex64::new(1.0, 0.0) + Complex64::new(*a, -b) * Complex64::new(*a, -b);
        for p in grid.points() {
            let w = Complex64::new(p[0], p[1]);
            let hv = h_direct(h, w);
            let q = phi_components(&seed, w).unwrap();
            let sum = q.phi1 * q.phi1 + q.phi2 * q.phi2 + q.phi3 * q.phi3 + q.phi4 * q.phi4;
            quad = quad.max(sum.norm());
            fact = fact.max(((q.phi3 - i * q.phi4) * (q.phi3 + i * q.phi4) + d).norm());
            let (x, y) = (p[0], a * p[0] + b * p[1]);
            let j = graph_jets(&seed, x, y).unwrap();
            let jf = jac(&j);
            phij = phij.max(((q.phi3 * q.phi4.conj()).im - b * jf).abs());
            let cf = (-hv.norm_sqr() + d.norm_sqr() / hv.norm_sqr()) / (4.0 * b);
            closed = closed.max((jf - cf).abs());
            resid = resid.max(residual_norm(&j));
        }
    }
    let elapsed = t.elapsed();
    c.below("|sum phi^2|", quad, 1e-12);
    c.below("|factorization+d|", fact, 1e-12);
    c.below("|Im(phi3 conj phi4)-bJ|", phij, 1e-9);
    c.below("|J-closed form|", closed, 1e-9);
    c.below("minimal_residual", resid, 1e-9);
    c.within("runtime", elapsed, Duration::from_secs(10));
    c.done()
}

fn c4_osserman_reconstruction() -> Outcome {
    let mut c = Checks::new();
    let seed = HoloData::parse("exp(w)", 0.0, 2.0).unwrap();
    c.holds("d = -3", seed.d() == Complex64::new(-3.0, 0.0));
    let cf = |u: f64| {
        let h2 = (2.0 * u).exp();
        (-h2 + 9.0 / h2) / 8.0
    };
    let j00 = jac(&graph_jets(&seed, 0.0, 0.0).unwrap());
    c.below("|J(0,0)-1|", (j00 - 1.0).abs(), 1e-12);
    c.holds("closed form J(0,0) = 1", cf(0.0) == 1.0 && osserman_j(0.0) == 1.0);
    let (mut closed_forms, mut computed) = (0.0f64, 0.0f64);
    for k in 0..=120 {
        let u = -3.0 + 0.05 * k as f64;
        closed_forms = closed_forms.max((cf(u) - osserman_j(u)).abs());
        computed = computed.max((jac(&graph_jets(&seed, u, 0.0).unwrap()) - osserman_j(u)).abs());
    }
    c.below("closed_forms_on_u_axis", closed_forms, 1e-9);
    c.below("constructed_J_on_u_axis", computed, 1e-9);
    c.done()
}

fn c5_isothermal_fit() -> Outcome {
    let mut c = Checks::new();
    let t = Instant::now();
    let g = default_fit_grid();
    for (name, f, a, b) in [
        ("osserman", MapExpr::parse(OSS_F1, OSS_F2).unwrap(), 0.0, 2.0),
        ("plane", MapExpr::parse("0", "0").unwrap(), 0.0, 1.0),
        ("z^2", MapExpr::parse("x^2-y^2", "2*x*y").unwrap(), 0.0, 1.0),
    ] {
        let p = fit_shear(&f, &g, DEFAULT_STARTS, DEFAULT_MAX_ITER).unwrap().best;
        c.below(&format!("{name}_param_error"), (p.a - a).abs().max((p.b - b).abs()), 1e-4);
        c.below(&format!("{name}_harmonicity"), harmonicity_check(&f, &p, &g).unwrap(), 1e-9);
    }
    c.within("runtime", t.elapsed(), Duration::from_secs(5));
    c.done()
}

fn c6_classification() -> Outcome {
    let mut c = Checks::new();
    let g = GridSpec::square(2.0, 41).unwrap();
    let z2 = classify_cr(&MapExpr::parse(Z_SQUARED.0, Z_SQUARED.1).unwrap(), &g, 1e-8).unwrap();
    let cz2 = classify_cr(&MapExpr::parse(CONJ_Z_SQUARED.0, CONJ_Z_SQUARED.1).unwrap(), &g, 1e-8).unwrap();
    let oss = classify_cr(&osserman(), &g, 1e-8).unwrap();
    c.holds("z^2 Holomorphic", z2.classification == CrClass::Holomorphic);
    c.holds("z^2 J >= 0", z2.jacobian_min >= 0.0);
    c.holds("conj(z)^2 AntiHolomorphic", cz2.classification == CrClass::AntiHolomorphic);
    c.holds("conj(z)^2 J <= 0", cz2.jacobian_max <= 0.0);
    c.holds("osserman Neither", oss.classification == CrClass::Neither);
    c.holds("osserman J takes both signs", oss.jacobian_min < 0.0 && oss.jacobian_max > 0.0);
    c.summary.push(format!(
        "z2 J>={:.1}, conj J<={:.1}, osserman J in [{:.1}, {:.1}]",
        z2.jacobian_min, cz2.jacobian_max, oss.jacobian_min, oss.jacobian_max
    ));
    c.done()
}

fn c7_slag() -> Outcome {
    let mut c = Checks::new();
    let g = GridSpec::square(2.0, 41).unwrap();
    let quad = SlagProblem::parse("x^2 + y^2", None).unwrap();
    let fq = fit_theta(&quad, &g).unwrap();
    c.below("x2y2_theta_error", (fq.theta - 4.0f64.atan2(3.0)).abs(), 1e-12);
    c.below("x2y2_residual", fq.residual, 1e-12);
    c.holds("x2y2 Quadratic", fu_classify(&quad, &g, 1e-8).unwrap().classification == FuClass::Quadratic);

    let harm = SlagProblem::parse("exp(x)*cos(y)", None).unwrap();
    let fh = fit_theta(&harm, &g).unwrap();
    c.holds("e^x cos y theta = 0", fh.theta == 0.0);
    c.holds("e^x cos y Harmonic", fu_classify(&harm, &g, 1e-8).unwrap().classification == FuClass::Harmonic);
    let grad = gradient_graph(&harm).unwrap();
    c.holds(
        "gradient graph AntiHolomorphic",
        classify_cr(&grad, &g, 1e-8).unwrap().classification == CrClass::AntiHolomorphic,
    );
    let worst = g
        .points()
        .iter()
        .map(|p| residual_norm(&grad.jets(p[0], p[1]).unwrap()))
        .fold(0.0, f64::max);
    c.below("gradient_graph_residual", worst, 1e-9);

    let quartic = SlagProblem::parse("x^4", None).unwrap();
    c.holds("x^4 Other", fu_classify(&quartic, &g, 1e-8).unwrap().classification == FuClass::Other);
    let (samples, _) = slag_samples(&quartic.u, &g).unwrap();
    let mut smallest = f64::INFINITY;
    let mut k = 0;
    while (k as f64) * 1e-3 < PI {
        let t = k as f64 * 1e-3;
        let r = samples
            .iter()
            .map(|s| (t.cos() * s.laplacian - t.sin() * s.det_minus_one).abs())
            .fold(0.0, f64::max);
        smallest = smallest.min(r);
        k += 1;
    }
    c.summary.push(format!("x4_min_over_theta={smallest:.3e}"));
    c.holds("x^4 residual positive for every theta", smallest > 0.0);
    c.done()
}

/// Damped random expressions: leaves `x`, `y` and constants, composed so
/// that fourth derivatives stay moderate on `[-2, 2]²`.
fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..3) {
            0 => "x".into(),
            1 => "y".into(),
            _ => ["0.5", "1.5", "2"][rng.gen_range(0..3)].into(),
        };
    }
    let a = random_expr(rng, depth - 1);
    match rng.gen_range(0..12) {
        0 => format!("({a}) + ({})", random_expr(rng, depth - 1)),
        1 => format!("({a}) - ({})", random_expr(rng, depth - 1)),
        2 => format!("0.5*({a})*({})", random_expr(rng, depth - 1)),
        3 => format!("({a})/(2 + ({})^2)", random_expr(rng, depth - 1)),
        4 => format!("sin(0.7*({a}))"),
        5 => format!("cos(0.7*({a}))"),
        6 => format!("exp(0.5*sin({a}))"),
        7 => format!("log(1 + ({a})^2)"),
        8 => format!("sqrt(1 + ({a})^2)"),
        9 => format!("-0.25*({a})^2"),
        10 => format!("(2 + sin({a}))^1.5"),
        _ => format!("sinh(0.5*cos({a}))*cosh(0.5*sin({a}))"),
    }
}

fn c8_numerics_hygiene() -> Outcome {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = 1e-4;
    let mut worst = 0.0f64;
    let mut worst_case = String::new();
    for _ in 0..1000 {
        let src = random_expr(&mut rng, 3);
        let e = Expr::real(&src).unwrap();
        let (x, y) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let f = |dx: f64, dy: f64| e.eval_real(x + dx, y + dy).unwrap();
        let j = e.eval_jet2(x, y).unwrap();
        let f0 = f(0.0, 0.0);
        let fd = [
            (f(h, 0.0) - f(-h, 0.0)) / (2.0 * h),
            (f(0.0, h) - f(0.0, -h)) / (2.0 * h),
            (f(h, 0.0) - 2.0 * f0 + f(-h, 0.0)) / (h * h),
            (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h),
            (f(0.0, h) - 2.0 * f0 + f(0.0, -h)) / (h * h),
        ];
        let jets = [j.d_x, j.d_y, j.d_xx, j.d_xy, j.d_yy];
        let err = fd.iter().zip(jets).map(|(a, b)| (a - b).abs()).fold((j.value - f0).abs(), f64::max);
        if err > worst {
            worst = err;
            worst_case = format!("{src} at ({x:.3}, {y:.3})");
        }
    }
    c.below("max_jet_vs_fd", worst, 1e-6);
    if worst >= 1e-6 {
        c.failures.push(format!("worst case: {worst_case}"));
    }

    // Gauss–Legendre order 4 against the exact antiderivative of φ₃ for the
    // seed exp(w), a = 0, b = 2: ½(e^w − 3e^{−w}) + 1.
    let seed = HoloData::parse("exp(w)", 0.0, 2.0).unwrap();
    let mut decay_ok = true;
    let mut ratios = Vec::new();
    for w in [Complex64::new(2.5, 1.5), Complex64::new(-2.0, -2.5), Complex64::new(0.5, 3.0)] {
        let exact = (0.5 * (w.exp() - 3.0 * (-w).exp()) + 1.0).re;
        let errs: Vec<f64> = [1usize, 2, 4, 8, 16, 32]
            .iter()
            .map(|&n| (integrate_surface_panels(&seed, w, 4, n).unwrap()[2] - exact).abs())
            .collect();
        for k in 1..errs.len() {
            if errs[k] >= 1e-13 {
                let r = errs[k - 1] / errs[k];
                ratios.push(r);
                decay_ok &= r >= 64.0;
            }
        }
        decay_ok &= *errs.last().unwrap() < 1e-12;
    }
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    c.summary.push(format!("min_decay_ratio={min_ratio:.0}"));
    c.holds("quadrature error decays >= 2^6 per doubling down to 1e-13", decay_ok);
    c.done()
}

fn c9_determinism() -> Outcome {
    let mut c = Checks::new();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_minigraph"))
            .arg("selftest")
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    c.holds("selftest exit 0", a.status.success() && b.status.success());
    c.holds("non-empty JSON", !a.stdout.is_empty());
    c.holds("byte-identical stdout", a.stdout == b.stdout);
    c.summary.push(format!("{} bytes", a.stdout.len()));
    c.done()
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("Osserman example minimality", c1_osserman_minimality),
        ("Osserman Jacobian closed form and range", c2_osserman_jacobian),
        ("Weierstrass identity suite", c3_weierstrass_identities),
        ("Osserman reconstruction", c4_osserman_reconstruction),
        ("Isothermal fit", c5_isothermal_fit),
        ("Classification", c6_classification),
        ("Special Lagrangian suite", c7_slag),
        ("Numerics hygiene", c8_numerics_hygiene),
        ("Determinism", c9_determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {} {:<40} {}  [{:.2}s] {}",
            k + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("{}/{} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
