//! Built-in reference examples with known answers, run by `minigraph selftest`.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::Result;
use crate::examples::{osserman, osserman_jacobian, CONJ_Z_SQUARED, Z_SQUARED};
use crate::geometry::{grid_minimality_report, MapExpr};
use crate::grid::GridSpec;
use crate::isothermal::{default_fit_grid, fit_shear, harmonicity_check, DEFAULT_MAX_ITER, DEFAULT_STARTS};
use crate::jacobian::{classify_cr, jacobian, jacobian_range, CrClass, RangeVerdict};
use crate::report::{AnalysisReport, Check};
use crate::slag::{fit_theta, fu_classify, gradient_graph, FuClass, SlagProblem};
use crate::weierstrass::{phi_components, verify_construction, HoloData, SEEDS};

fn push(r: &mut AnalysisReport, name: &str, outcome: Result<Vec<Check>>) {
    match outcome {
        Ok(cs) => r.checks.extend(cs),
        Err(e) => {
            r.checks.push(Check::holds(name, false));
            r.notes.push(format!("{name}: {e}"));
        }
    }
}

fn osserman_minimal() -> Result<Vec<Check>> {
    let m = grid_minimality_report(&osserman(), &GridSpec::square(2.0, 41)?, 1e-9)?;
    Ok(vec![
        Check::below("osserman: minimal residual on [-2,2]^2", m.max_residual, 1e-9),
        Check::below("osserman: |H| along both normals", m.max_abs_h1.max(m.max_abs_h2), 1e-9),
    ])
}

fn osserman_jacobian_checks() -> Result<Vec<Check>> {
    let f = osserman();
    let mut worst = 0.0f64;
    for p in GridSpec::square(3.0, 13)?.points() {
        let want = osserman_jacobian(p[0]);
        let got = jacobian(&f.jets(p[0], p[1])?);
        worst = worst.max((got - want).abs() / want.abs().max(1e-300));
    }
    let ev = jacobian_range(&f, &[1.0, 2.0, 3.0], 41)?;
    Ok(vec![
        Check::below("osserman: J = -(e^2x - 9e^-2x)/8 (relative)", worst, 1e-10),
        Check::holds("osserman: J range shows values < -50 and > 400", ev.sampled_min < -50.0 && ev.sampled_max > 400.0),
        Check::holds("osserman: J range verdict is full-range evidence", ev.verdict == RangeVerdict::FullRangeEvidence),
    ])
}

fn classification_checks() -> Result<Vec<Check>> {
    let g = GridSpec::square(2.0, 21)?;
    let z2 = classify_cr(&MapExpr::parse(Z_SQUARED.0, Z_SQUARED.1)?, &g, 1e-8)?;
    let cz2 = classify_cr(&MapExpr::parse(CONJ_Z_SQUARED.0, CONJ_Z_SQUARED.1)?, &g, 1e-8)?;
    let oss = classify_cr(&osserman(), &g, 1e-8)?;
    let not_minimal = grid_minimality_report(&MapExpr::parse("x^2", "y^2")?, &g, 1e-8)?;
    Ok(vec![
        Check::holds(
            "z^2: holomorphic with J >= 0",
            z2.classification == CrClass::Holomorphic && z2.jacobian_min >= 0.0,
        ),
        Check::holds(
            "conj(z)^2: anti-holomorphic with J <= 0",
            cz2.classification == CrClass::AntiHolomorphic && cz2.jacobian_max <= 0.0,
        ),
        Check::holds("osserman: neither holomorphic nor anti-holomorphic", oss.classification == CrClass::Neither),
        Check::holds("(x^2, y^2): not minimal", !not_minimal.is_minimal()),
    ])
}

fn weierstrass_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let q = phi_components(&HoloData::parse("exp(w)", 0.0, 2.0)?, Complex64::new(0.0, 0.0))?;
    out.push(Check::holds(
        "seed exp(w), a=0, b=2: phi3(0) = 2, phi4(0) = -i",
        q.phi3 == Complex64::new(2.0, 0.0) && q.phi4 == Complex64::new(0.0, -1.0),
    ));
    let grid = GridSpec::square(2.0, 41)?;
    for (k, (h, a, b)) in SEEDS.iter().enumerate() {
        let r = verify_construction(&HoloData::seed(k), &grid)?;
        out.push(Check::holds(format!("seed {h}, a={a}, b={b}: all identities hold"), r.pass));
    }
    let s = HoloData::parse("exp(w)", 0.0, 2.0)?;
    let j0 = s.closed_form_jacobian(Complex64::new(0.0, 0.0))?;
    out.push(Check::below("seed exp(w), a=0, b=2: J(0,0) = 1", (j0 - 1.0).abs(), 1e-15));
    let mut axis = 0.0f64;
    for i in 0..=60 {
        let u = -3.0 + 0.1 * i as f64;
        axis = axis.max((s.closed_form_jacobian(Complex64::new(u, 0.0))? - osserman_jacobian(u)).abs());
    }
    out.push(Check::below("seed exp(w), a=0, b=2: J matches osserman along the u-axis", axis, 1e-9));
    Ok(out)
}

fn isothermal_checks() -> Result<Vec<Check>> {
    let g = default_fit_grid();
    let mut out = Vec::new();
    for (name, f, a, b) in [
        ("osserman", osserman(), 0.0, 2.0),
        ("plane", MapExpr::parse("0", "0")?, 0.0, 1.0),
        ("z^2", MapExpr::parse(Z_SQUARED.0, Z_SQUARED.1)?, 0.0, 1.0),
    ] {
        let p = fit_shear(&f, &g, DEFAULT_STARTS, DEFAULT_MAX_ITER)?.best;
        let err = (p.a - a).abs().max((p.b - b).abs());
        out.push(Check::below(format!("{name}: fitted (a, b) = ({a}, {b})"), err, 1e-4));
        out.push(Check::below(format!("{name}: harmonic in fitted coordinates"), harmonicity_check(&f, &p, &g)?, 1e-9));
    }
    Ok(out)
}

fn slag_checks() -> Result<Vec<Check>> {
    let g = GridSpec::square(2.0, 21)?;
    let quad = SlagProblem::parse("x^2 + y^2", None)?;
    let harm = SlagProblem::parse("exp(x)*cos(y)", None)?;
    let quartic = SlagProblem::parse("x^4", None)?;
    let fq = fit_theta(&quad, &g)?;
    let fh = fit_theta(&harm, &g)?;
    let grad = gradient_graph(&harm)?;
    let grad_min = grid_minimality_report(&grad, &g, 1e-9)?;
    Ok(vec![
        Check::below("x^2+y^2: theta = atan2(4,3)", (fq.theta - 4.0f64.atan2(3.0)).abs(), 1e-12),
        Check::below("x^2+y^2: residual at fitted theta", fq.residual, 1e-12),
        Check::holds(
            "x^2+y^2: quadratic",
            fu_classify(&quad, &g, 1e-8)?.classification == FuClass::Quadratic,
        ),
        Check::below("e^x cos y: theta = 0", fh.theta.abs(), 1e-15),
        Check::holds(
            "e^x cos y: harmonic",
            fu_classify(&harm, &g, 1e-8)?.classification == FuClass::Harmonic,
        ),
        Check::holds(
            "e^x cos y: gradient graph anti-holomorphic",
            classify_cr(&grad, &g, 1e-8)?.classification == CrClass::AntiHolomorphic,
        ),
        Check::below("e^x cos y: gradient graph minimal", grad_min.max_residual, 1e-9),
        Check::holds(
            "x^4: other",
            fu_classify(&quartic, &g, 1e-8)?.classification == FuClass::Other,
        ),
        Check::holds("x^4: no phase solves the equation", fit_theta(&quartic, &g)?.residual > 1e-3),
    ])
}

/// Run every reference example and collect the checks.
pub fn run(argv: &[String]) -> AnalysisReport {
    let mut r = AnalysisReport::new("selftest", argv);
    push(&mut r, "osserman minimality", osserman_minimal());
    push(&mut r, "osserman jacobian", osserman_jacobian_checks());
    push(&mut r, "classification", classification_checks());
    push(&mut r, "weierstrass", weierstrass_checks());
    push(&mut r, "isothermal", isothermal_checks());
    push(&mut r, "special lagrangian", slag_checks());
    r.success = r.all_checks_pass();
    let failed = r.checks.iter().filter(|c| !c.pass).count();
    r.verdict = if failed == 0 {
        "all-pass".into()
    } else {
        format!("{failed}-failed")
    };
    r
}

/// Human-readable pass/fail table.
pub fn table(r: &AnalysisReport) -> String {
    let width = r.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for c in &r.checks {
        let pad = width - c.name.chars().count();
        let value = match c.tolerance {
            Some(t) => format!("{:.3e} (< {t:e})", c.value),
            None => String::new(),
        };
        let _ = writeln!(
            out,
            "{}  {}{}  {value}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            " ".repeat(pad)
        );
    }
    let passed = r.checks.iter().filter(|c| c.pass).count();
    let _ = writeln!(out, "{passed}/{} checks passed", r.checks.len());
    out
}
