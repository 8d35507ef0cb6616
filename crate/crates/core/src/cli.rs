//! Command-line front end. [`run`] does all the work and returns the exit
//! code with captured output, so it can be driven in-process by tests.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::geometry::{minimality_samples, MapExpr, MinimalityReport, DEFAULT_MINIMAL_TOL};
use crate::grid::{sweep, GridSpec};
use crate::isothermal::{default_fit_grid, fit_shear, harmonicity_check, DEFAULT_MAX_ITER, DEFAULT_STARTS};
use crate::jacobian::{
    classify_cr, jacobian, jacobian_range, jacobian_samples, wirtinger, CrClass, DEFAULT_CR_TOL,
};
use crate::report::{details, AnalysisReport, Check};
use crate::selftest;
use crate::slag::{analyze, slag_samples, SlagProblem, SOLUTION_TOL};
use crate::weierstrass::{construct_surface, verify_construction, HoloData, DEFAULT_QUAD_ORDER};

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_VERDICT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "minigraph", version, about = "Checks and constructions for two-dimensional minimal graphs in R^4")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the minimal surface equation and mean curvature of f = (f1, f2)
    Verify(MapArgs),
    /// Cauchy-Riemann classification: holomorphic, anti-holomorphic or neither
    Classify(MapArgs),
    /// Sample the Jacobian on growing squares and report range evidence
    Jrange(RangeArgs),
    /// Build a minimal graph from seed data (h, a, b) and check its identities
    Construct(ConstructArgs),
    /// Fit the shear (a, b) that makes x = u, y = au + bv isothermal
    FitIsothermal(FitArgs),
    /// Special Lagrangian equation checks for a potential u
    Slag(SlagArgs),
    /// Run the built-in reference examples
    Selftest,
}

#[derive(Debug, Args)]
struct MapArgs {
    /// First component f1(x, y)
    #[arg(long, allow_hyphen_values = true)]
    f1: String,
    /// Second component f2(x, y)
    #[arg(long, allow_hyphen_values = true)]
    f2: String,
    /// Sampling grid "X0:X1:NX,Y0:Y1:NY"
    #[arg(long, allow_hyphen_values = true, default_value_t = GridSpec::default())]
    grid: GridSpec,
    /// Tolerance; defaults to 1e-8
    #[arg(long)]
    tol: Option<f64>,
    /// Write per-point values as CSV
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RangeArgs {
    #[arg(long, allow_hyphen_values = true)]
    f1: String,
    #[arg(long, allow_hyphen_values = true)]
    f2: String,
    /// Comma-separated increasing half-widths of the sampled squares
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 3.0])]
    radii: Vec<f64>,
    /// Samples per side of each square
    #[arg(long, default_value_t = 41)]
    resolution: usize,
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConstructArgs {
    /// Holomorphic, nowhere-vanishing h(w)
    #[arg(long, allow_hyphen_values = true)]
    h: String,
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    /// Must be positive
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    /// Grid in the w = u + iv plane
    #[arg(long, allow_hyphen_values = true, default_value_t = GridSpec::default())]
    grid: GridSpec,
    /// Gauss-Legendre nodes per panel (at least 4)
    #[arg(long, default_value_t = DEFAULT_QUAD_ORDER)]
    order: usize,
    /// Values of (f1, f2) at w = 0, as "F1,F2"
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', num_args = 2, default_values_t = [0.0, 0.0])]
    offset: Vec<f64>,
    /// Write u,v,x,y,f1,f2,J as CSV
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long, allow_hyphen_values = true)]
    f1: String,
    #[arg(long, allow_hyphen_values = true)]
    f2: String,
    /// Fitting grid; defaults to "-1.5:1.5:21,-1.5:1.5:21"
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<GridSpec>,
    /// Number of lattice starts (at most 15 are distinct)
    #[arg(long, default_value_t = DEFAULT_STARTS)]
    starts: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Write one CSV row per start
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SlagArgs {
    /// Potential u(x, y)
    #[arg(long, allow_hyphen_values = true)]
    u: String,
    /// Phase in radians; fitted when absent
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = GridSpec::default())]
    grid: GridSpec,
    #[arg(long)]
    dump: Option<PathBuf>,
}

/// Exit code and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(message: impl Into<String>) -> Outcome {
        let mut stderr = message.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr,
        }
    }

    fn report(r: &AnalysisReport, stderr: String) -> Outcome {
        Outcome {
            code: if r.success { EXIT_SUCCESS } else { EXIT_VERDICT_FAILURE },
            stdout: r.to_json(),
            stderr,
        }
    }
}

/// Parse `argv` (program name first) and execute the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let echo: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome::usage(text)
            } else {
                Outcome {
                    code: EXIT_SUCCESS,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let result = match cli.command {
        Command::Verify(a) => verify(a, &echo),
        Command::Classify(a) => classify(a, &echo),
        Command::Jrange(a) => jrange(a, &echo),
        Command::Construct(a) => construct(a, &echo),
        Command::FitIsothermal(a) => fit(a, &echo),
        Command::Slag(a) => slag(a, &echo),
        Command::Selftest => {
            let r = selftest::run(&echo);
            return Outcome::report(&r, selftest::table(&r));
        }
    };
    match result {
        Ok((report, stderr)) => Outcome::report(&report, stderr),
        Err(e) => Outcome::usage(format!("error: {e}")),
    }
}

type CommandResult = Result<(AnalysisReport, String)>;

fn write_dump(path: &Option<PathBuf>, csv: impl FnOnce() -> String) -> Result<String> {
    match path {
        None => Ok(String::new()),
        Some(p) => {
            std::fs::write(p, csv()).map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", p.display())))?;
            Ok(format!("wrote {}\n", p.display()))
        }
    }
}

fn unevaluated_note(r: &mut AnalysisReport, failed: usize) {
    if failed > 0 {
        r.notes.push(format!("{failed} sample point(s) could not be evaluated"));
    }
}

fn verify(a: MapArgs, argv: &[String]) -> CommandResult {
    let f = MapExpr::parse(&a.f1, &a.f2)?;
    let tol = a.tol.unwrap_or(DEFAULT_MINIMAL_TOL);
    let samples = minimality_samples(&f, &a.grid);
    let m = MinimalityReport::from_samples(&samples, tol);
    let mut r = AnalysisReport::new("verify", argv);
    r.input("f1", &f.f1).input("f2", &f.f2).input("grid", a.grid).input("tol", tol);
    r.check(Check::below("max_residual", m.max_residual, tol))
        .check(Check::below("max_abs_h1", m.max_abs_h1, tol))
        .check(Check::below("max_abs_h2", m.max_abs_h2, tol));
    r.verdict = if m.is_minimal() { "minimal" } else { "non-minimal" }.into();
    r.success = m.is_minimal() && m.evaluated > 0;
    unevaluated_note(&mut r, m.errors.len());
    r.errors = m.errors.clone();
    r.details = details(&m);
    let stderr = write_dump(&a.dump, || {
        let mut csv = String::from("x,y,res1,res2,H1,H2\n");
        for s in samples.iter().flatten() {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                s.x, s.y, s.residual[0], s.residual[1], s.mean_curvature[0], s.mean_curvature[1]
            );
        }
        csv
    })?;
    Ok((r, stderr))
}

fn classify(a: MapArgs, argv: &[String]) -> CommandResult {
    let f = MapExpr::parse(&a.f1, &a.f2)?;
    let tol = a.tol.unwrap_or(DEFAULT_CR_TOL);
    let c = classify_cr(&f, &a.grid, tol)?;
    let mut r = AnalysisReport::new("classify", argv);
    r.input("f1", &f.f1).input("f2", &f.f2).input("grid", a.grid).input("tol", tol);
    let expected_sign = match c.classification {
        CrClass::Holomorphic => "J >= 0 at all samples",
        CrClass::AntiHolomorphic => "J <= 0 at all samples",
        CrClass::Neither => "no sign constraint",
    };
    r.check(Check::holds(format!("sign_consistent ({expected_sign})"), c.sign_consistent));
    r.verdict = format!("{:?}", c.classification);
    r.success = c.evaluated > 0 && c.sign_consistent;
    if let Some(n) = &c.note {
        r.notes.push(n.clone());
    }
    unevaluated_note(&mut r, c.errors.len());
    r.errors = c.errors.clone();
    r.details = details(&c);
    let stderr = write_dump(&a.dump, || {
        let mut csv = String::from("x,y,fz_re,fz_im,fzbar_re,fzbar_im,J\n");
        let pts = a.grid.points();
        for (p, j) in pts.iter().zip(sweep(&pts, |p| f.jets(p[0], p[1]))) {
            if let Ok(j) = j {
                let w = wirtinger(&j);
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{}",
                    p[0],
                    p[1],
                    w.f_z.re,
                    w.f_z.im,
                    w.f_zbar.re,
                    w.f_zbar.im,
                    jacobian(&j)
                );
            }
        }
        csv
    })?;
    Ok((r, stderr))
}

fn jrange(a: RangeArgs, argv: &[String]) -> CommandResult {
    let f = MapExpr::parse(&a.f1, &a.f2)?;
    let ev = jacobian_range(&f, &a.radii, a.resolution)?;
    let mut r = AnalysisReport::new("jrange", argv);
    let radii: Vec<String> = a.radii.iter().map(|x| x.to_string()).collect();
    r.input("f1", &f.f1)
        .input("f2", &f.f2)
        .input("radii", radii.join(","))
        .input("resolution", a.resolution);
    r.verdict = format!("{:?}", ev.verdict);
    r.success = true;
    r.notes.push(
        "range verdicts are sampled evidence; whether J attains its infimum cannot be decided by sampling".into(),
    );
    if ev.zero_attained {
        r.notes.push("J evaluated to exactly 0 at some sample".into());
    }
    unevaluated_note(&mut r, ev.errors.len());
    r.errors = ev.errors.clone();
    r.details = details(&ev);
    let stderr = write_dump(&a.dump, || {
        let mut csv = String::from("radius,x,y,J\n");
        for &rad in &a.radii {
            if let Ok(samples) = jacobian_samples(&f, rad, a.resolution) {
                for (p, j) in samples.into_iter().flatten() {
                    let _ = writeln!(csv, "{rad},{},{},{j}", p[0], p[1]);
                }
            }
        }
        csv
    })?;
    Ok((r, stderr))
}

fn construct(a: ConstructArgs, argv: &[String]) -> CommandResult {
    let seed = HoloData::parse(&a.h, a.a, a.b)?.with_offset([a.offset[0], a.offset[1]]);
    if a.order < crate::weierstrass::MIN_QUAD_ORDER {
        return Err(Error::InvalidArgument(format!("quadrature order must be at least 4, got {}", a.order)));
    }
    let v = verify_construction(&seed, &a.grid)?;
    let mut r = AnalysisReport::new("construct", argv);
    r.input("h", seed.h())
        .input("a", a.a)
        .input("b", a.b)
        .input("grid", a.grid)
        .input("order", a.order)
        .input("offset", format!("{},{}", a.offset[0], a.offset[1]));
    let t = v.tolerances;
    r.check(Check::below("quadratic_relation", v.max_quadratic, t.quadratic))
        .check(Check::below("factorization", v.max_factorization, t.factorization))
        .check(Check::below("h_identity", v.max_h_identity, t.h_identity))
        .check(Check::below("im_phi3_conj_phi4_vs_b_jacobian", v.max_phi_jacobian, t.phi_jacobian))
        .check(Check::below("jacobian_closed_form", v.max_closed_form, t.closed_form))
        .check(Check::below("minimal_residual", v.max_residual, t.residual));
    r.verdict = if v.pass { "identities-hold" } else { "identity-violation" }.into();
    r.success = v.pass;
    if !v.errors.is_empty() {
        r.notes.push(format!(
            "{} point(s) failed, typically because h vanishes there; seeds must be nowhere zero on the grid",
            v.errors.len()
        ));
    }
    r.errors = v.errors.clone();
    r.details = details(&v);
    let stderr = match &a.dump {
        None => String::new(),
        Some(_) => {
            let surf = construct_surface(&seed, &a.grid, a.order)?;
            write_dump(&a.dump, || surf.to_csv())?
        }
    };
    Ok((r, stderr))
}

fn fit(a: FitArgs, argv: &[String]) -> CommandResult {
    let f = MapExpr::parse(&a.f1, &a.f2)?;
    let grid = a.grid.unwrap_or_else(default_fit_grid);
    let fit = fit_shear(&f, &grid, a.starts, a.max_iter)?;
    let harm = harmonicity_check(&f, &fit.best, &grid)?;
    let mut r = AnalysisReport::new("fit-isothermal", argv);
    r.input("f1", &f.f1)
        .input("f2", &f.f2)
        .input("grid", grid)
        .input("starts", a.starts)
        .input("max_iter", a.max_iter);
    r.check(Check::below("defect", fit.best.defect, crate::isothermal::CONVERGED_DEFECT))
        .check(Check::below("harmonicity", harm, DEFAULT_MINIMAL_TOL));
    r.verdict = if fit.best.converged { "converged" } else { "not-converged" }.into();
    r.success = fit.best.converged;
    if let Some(w) = &fit.warning {
        r.notes.push(w.clone());
    }
    if fit.candidates.len() > 1 {
        r.notes.push(format!(
            "{} distinct minima within a factor 10 of the best defect; uniqueness is not asserted",
            fit.candidates.len()
        ));
    }
    unevaluated_note(&mut r, fit.errors.len());
    r.errors = fit.errors.clone();
    r.details = serde_json::json!({
        "a": fit.best.a,
        "b": fit.best.b,
        "defect": fit.best.defect,
        "converged": fit.best.converged,
        "harmonicity": harm,
        "fit": details(&fit),
    });
    let stderr = write_dump(&a.dump, || {
        let mut csv = String::from("start_a,start_log_b,a,b,defect,iterations\n");
        for s in &fit.starts {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                s.start[0], s.start[1], s.params.a, s.params.b, s.params.defect, s.iterations
            );
        }
        csv
    })?;
    Ok((r, stderr))
}

fn slag(a: SlagArgs, argv: &[String]) -> CommandResult {
    let p = SlagProblem::parse(&a.u, a.theta)?;
    let an = analyze(&p, &a.grid)?;
    let mut r = AnalysisReport::new("slag", argv);
    r.input("u", &p.u).input("grid", a.grid);
    if let Some(t) = a.theta {
        r.input("theta", t);
    }
    r.check(Check::below("slag_residual", an.residual, SOLUTION_TOL))
        .check(Check::below(
            "gradient_graph_minimal_residual",
            an.gradient_minimality.max_residual,
            DEFAULT_MINIMAL_TOL,
        ));
    r.verdict = if an.solves { "solution" } else { "not-a-solution" }.into();
    r.success = an.solves;
    for n in [&an.classification.note, &an.classification.warning].into_iter().flatten() {
        r.notes.push(n.clone());
    }
    if let Some(n) = an.fit.as_ref().and_then(|f| f.note.clone()) {
        r.notes.push(n);
    }
    r.notes.push(
        "minimality of the gradient graph is checked for solutions; the converse direction is not tested".into(),
    );
    unevaluated_note(&mut r, an.errors.len());
    r.errors = an.errors.clone();
    r.details = details(&an);
    let theta = an.theta;
    let stderr = write_dump(&a.dump, || {
        let mut csv = String::from("x,y,laplacian,det_hess_minus_one,residual\n");
        if let Ok((samples, _)) = slag_samples(&p.u, &a.grid) {
            for s in samples {
                let _ = writeln!(csv, "{},{},{},{},{}", s.x, s.y, s.laplacian, s.det_minus_one, s.residual(theta));
            }
        }
        csv
    })?;
    Ok((r, stderr))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("minigraph").chain(args.iter().copied()))
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_args(&[]).code, EXIT_USAGE);
        assert_eq!(run_args(&["frobnicate"]).code, EXIT_USAGE);
        assert_eq!(run_args(&["verify", "--f1", "x"]).code, EXIT_USAGE);
        let o = run_args(&["verify", "--f1", "x +", "--f2", "y"]);
        assert_eq!(o.code, EXIT_USAGE);
        assert!(o.stderr.contains("error"), "{}", o.stderr);
        assert!(o.stdout.is_empty());
        assert_eq!(run_args(&["verify", "--f1", "x", "--f2", "y", "--grid", "0:1:1,0:1:3"]).code, EXIT_USAGE);
        assert_eq!(run_args(&["construct", "--h", "exp(w)", "--a", "0", "--b", "-1"]).code, EXIT_USAGE);
    }

    #[test]
    fn help_goes_to_stdout() {
        let o = run_args(&["--help"]);
        assert_eq!(o.code, EXIT_SUCCESS);
        assert!(o.stdout.contains("verify"));
    }

    #[test]
    fn hyphenated_values_parse() {
        let o = run_args(&["verify", "--f1", "-x", "--f2", "-y", "--grid", "-1:1:5,-1:1:5"]);
        assert_eq!(o.code, EXIT_SUCCESS, "{}", o.stderr);
    }
}
