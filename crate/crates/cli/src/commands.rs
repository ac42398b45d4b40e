//! One runner per subcommand. Each returns a JSON report, a short text
//! rendering and the exit code.

use std::path::{Path, PathBuf};

use algco::ce::{build_ce_complex, cohomology, CEComplex};
use algco::cylinder::CylinderComplex;
use algco::error::Error;
use algco::flows::{
    bracket_invariance_check, defect_curve, exact_homotopy_check, flow_derivation_check, integrate_homotopy,
    integrate_linear, is_bitwise_constant, main_theorem_check, semidirect_flow_check, triviality_check, Curve,
};
use algco::homological::{cech_ce_double, mv_report};
use algco::io::{
    load, matrix_from_rows, rationals, CoverFile, CurveKind, CylinderFile, FlowCheck, FlowsFile, HomotopyFile, RepRef,
    Resolver,
};
use algco::kunneth::kunneth_crosscheck;
use algco::liealg::check_representation;
use algco::par::{self, Exec};
use algco::qlinalg::{format_rational, parse_rational};
use algco::{LieAlgebra, LieMorphism, Rational, Representation};
use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_FLATNESS: i32 = 3;
pub const EXIT_ROUTES: i32 = 4;

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_STEPS: usize = 1000;

/// Settings shared by all subcommands.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    pub tol: Option<f64>,
    pub steps: Option<usize>,
    pub representatives: bool,
    /// Directory that relative input paths are resolved against.
    pub base: PathBuf,
}

impl Settings {
    pub fn path(&self, p: &Path) -> PathBuf {
        self.base.join(p)
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Value,
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn new(report: Value, text: String, code: i32) -> Self {
        Self { report, text, code }
    }

    pub fn from_error(e: &Error) -> Self {
        let code = exit_code(e);
        Outcome::new(json!({ "error": e.to_string(), "exit_code": code }), format!("error: {e}"), code)
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::FlatnessViolated { .. } => EXIT_FLATNESS,
        Error::Parse(_)
        | Error::DimensionMismatch(_)
        | Error::InvalidLieAlgebra(_)
        | Error::InvalidMorphism(_)
        | Error::InvalidRepresentation(_)
        | Error::InvalidInput(_) => EXIT_INPUT,
        _ => EXIT_FAILED,
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn code_for(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn vectors_json(vs: &[Vec<Rational>]) -> Value {
    vs.iter()
        .map(|v| v.iter().map(format_rational).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .into()
}

/// Algebra from a path or a built-in name.
fn algebra_arg(s: &Settings, arg: &str) -> algco::Result<LieAlgebra> {
    let r = algco::io::AlgebraRef::Named(arg.to_string());
    Resolver::new(s.base.clone()).algebra(&r)
}

fn rep_arg(s: &Settings, arg: Option<&str>, g: &LieAlgebra) -> algco::Result<Representation> {
    let r = arg.map(|a| RepRef::Named(a.to_string()));
    Resolver::new(s.base.clone()).rep(r.as_ref(), g)
}

/// Flatness report for a representation that failed to build a complex.
fn flatness_outcome(r: &Representation, e: &Error) -> Outcome {
    let report = check_representation(r).ok();
    let violations = report.as_ref().map(|rep| rep.violations.len()).unwrap_or(0);
    Outcome::new(
        json!({ "error": e.to_string(), "exit_code": EXIT_FLATNESS, "flatness": report }),
        format!("error: {e}\n{violations} curvature entries are nonzero"),
        EXIT_FLATNESS,
    )
}

fn build_ce(r: &Representation) -> std::result::Result<CEComplex, Outcome> {
    build_ce_complex(r.algebra(), r).map_err(|e| match e {
        Error::FlatnessViolated { .. } => flatness_outcome(r, &e),
        _ => Outcome::from_error(&e),
    })
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return Outcome::from_error(&e),
        }
    };
}

pub fn cmd_ce(s: &Settings, algebra: &str, rep: Option<&str>) -> Outcome {
    let g = tri!(algebra_arg(s, algebra));
    let r = tri!(rep_arg(s, rep, &g));
    let c = match build_ce(&r) {
        Ok(c) => c,
        Err(o) => return o,
    };
    let h = cohomology(&c);
    let mut report = json!({
        "algebra": g.name(),
        "fiber_dim": r.fiber_dim(),
        "betti": h.betti,
        "cocycle_dims": h.cocycle_dims,
        "coboundary_dims": h.coboundary_dims,
    });
    let mut text = format!("{} (fiber dim {}): betti {:?}", g.name(), r.fiber_dim(), h.betti);
    if s.representatives {
        let reps: Vec<Value> = h.representatives.iter().map(|b| vectors_json(&b.vectors)).collect();
        report["representatives"] = reps.into();
        for (k, b) in h.representatives.iter().enumerate() {
            for v in &b.vectors {
                let v: Vec<String> = v.iter().map(format_rational).collect();
                text.push_str(&format!("\n  H^{k}: [{}]", v.join(", ")));
            }
        }
    }
    Outcome::new(report, text, EXIT_OK)
}

pub fn cmd_kunneth(s: &Settings, a: &str, rep_a: Option<&str>, b: &str, rep_b: Option<&str>) -> Outcome {
    let g = tri!(algebra_arg(s, a));
    let h = tri!(algebra_arg(s, b));
    let re = tri!(rep_arg(s, rep_a, &g));
    let rf = tri!(rep_arg(s, rep_b, &h));
    for r in [&re, &rf] {
        if let Err(o) = build_ce(r) {
            return o;
        }
    }
    let report = tri!(kunneth_crosscheck(&g, &h, &re, &rf));
    let code = if !report.matches {
        EXIT_ROUTES
    } else {
        code_for(report.passed())
    };
    let text = format!(
        "{} x {}: direct {:?}, convolution {:?}, match {}\nchain map {}, bijective {}, closed to closed {}, classes span {}",
        g.name(),
        h.name(),
        report.direct,
        report.convolution,
        report.matches,
        verdict(report.chain_map),
        verdict(report.bijective),
        verdict(report.closed_to_closed),
        verdict(report.classes_span)
    );
    Outcome::new(tri!(serde_json::to_value(&report).map_err(|e| Error::Parse(e.to_string()))), text, code)
}

struct Cover {
    file: CoverFile,
    resolver: Resolver,
    algebra: LieAlgebra,
    rep: Representation,
}

fn load_cover(s: &Settings, path: &Path) -> algco::Result<Cover> {
    let path = s.path(path);
    let file: CoverFile = load(&path)?;
    let resolver = Resolver::for_file(&path);
    let algebra = resolver.algebra(&file.algebra)?;
    let rep = resolver.rep(file.rep.as_ref(), &algebra)?;
    Ok(Cover { file, resolver, algebra, rep })
}

fn mv_section(cover: &Cover) -> algco::Result<Option<(Value, bool, String)>> {
    let Some(pair) = &cover.file.mv else {
        return Ok(None);
    };
    let u = cover.resolver.simplicial(&pair.u)?;
    let v = cover.resolver.simplicial(&pair.v)?;
    let ce = build_ce_complex(&cover.algebra, &cover.rep)?;
    let r = mv_report(&u, &v, Some(&ce))?;
    let ok = r.les.exact && r.les.euler_additive;
    let text = format!(
        "mayer-vietoris: glued {:?}, long exact sequence {}, euler additive {}",
        r.glued_betti,
        verdict(r.les.exact),
        verdict(r.les.euler_additive)
    );
    let value = serde_json::to_value(&r).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(Some((value, ok, text)))
}

pub fn cmd_glue(s: &Settings, cover: &Path) -> Outcome {
    let c = tri!(load_cover(s, cover));
    if let Err(o) = build_ce(&c.rep) {
        return o;
    }
    let nerve = tri!(c.resolver.simplicial(&c.file.nerve));
    let (_, _, g) = tri!(cech_ce_double(&nerve, &c.algebra, &c.rep));
    let mut report = json!({ "glue": g });
    let mut text = format!(
        "total {:?}, convolution {:?} of nerve {:?} and CE {:?}, routes agree {}, double complex {}",
        g.total_betti,
        g.convolution,
        g.nerve_betti,
        g.ce_betti,
        g.routes_agree,
        verdict(g.double_complex_valid)
    );
    let mut ok = g.double_complex_valid;
    if let Some((value, mv_ok, mv_text)) = tri!(mv_section(&c)) {
        report["mayer_vietoris"] = value;
        text.push('\n');
        text.push_str(&mv_text);
        ok &= mv_ok;
    }
    let code = if !g.routes_agree { EXIT_ROUTES } else { code_for(ok) };
    Outcome::new(report, text, code)
}

pub fn cmd_mv(s: &Settings, cover: &Path) -> Outcome {
    let c = tri!(load_cover(s, cover));
    if let Err(o) = build_ce(&c.rep) {
        return o;
    }
    match tri!(mv_section(&c)) {
        Some((value, ok, text)) => Outcome::new(value, text, code_for(ok)),
        None => Outcome::from_error(&Error::Parse(format!(
            "{}: field `mv` with subcomplexes `u` and `v` is required",
            cover.display()
        ))),
    }
}

fn curve_from(file: &algco::io::CurveFile, dim: usize) -> algco::Result<(Curve, Option<Vec<Vec<Rational>>>)> {
    let floats = file
        .data
        .iter()
        .map(|row| row.iter().map(|x| x.to_f64()).collect::<algco::Result<Vec<_>>>())
        .collect::<algco::Result<Vec<_>>>()?;
    match file.kind {
        CurveKind::Poly => {
            let exact = file
                .data
                .iter()
                .map(|row| row.iter().map(|x| x.to_rational()).collect::<Option<Vec<_>>>())
                .collect::<Option<Vec<_>>>();
            Ok((Curve::poly(dim, floats)?, exact))
        }
        CurveKind::Samples => Ok((Curve::samples(dim, floats)?, None)),
    }
}

fn dmatrix(rows: &[Vec<f64>]) -> algco::Result<DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::Parse("matrix rows have different lengths".into()));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

pub fn cmd_homotopy(s: &Settings, input: &Path) -> Outcome {
    let path = s.path(input);
    let file: HomotopyFile = tri!(load(&path));
    let resolver = Resolver::for_file(&path);
    let g = tri!(resolver.algebra(&file.source));
    let h = tri!(resolver.algebra(&file.target));
    let psi0 = tri!(LieMorphism::new(g, h.clone(), tri!(matrix_from_rows(&file.psi0))));
    let steps = s.steps.or(file.steps).unwrap_or(DEFAULT_STEPS);
    let tol = s.tol.or(file.tol).unwrap_or(DEFAULT_TOL);

    if let Some(control) = &file.control {
        let m = tri!(dmatrix(control));
        let sol = tri!(integrate_linear(&psi0, &m, steps));
        let curve = defect_curve(&sol);
        let defect = curve.iter().copied().fold(0.0, f64::max);
        let ok = defect <= tol;
        let report = json!({
            "kind": "linear_control",
            "steps": steps,
            "tol": tol,
            "morphism_defect": defect,
            "defect_curve": curve,
            "passed": ok,
        });
        let text = format!("control flow psi' = M psi: morphism defect {defect:.3e} (tol {tol:.1e}) {}", verdict(ok));
        return Outcome::new(report, text, code_for(ok));
    }

    let (curve, exact_curve) = tri!(curve_from(&file.curve, h.dim()));
    let rep = tri!(resolver.rep(file.rep.as_ref(), &h));
    if let Err(o) = build_ce(&rep) {
        return o;
    }
    let sol = tri!(integrate_homotopy(&psi0, &curve, steps));
    let dcurve = defect_curve(&sol);
    let defect = dcurve.iter().copied().fold(0.0, f64::max);
    let triv = triviality_check(&sol, tol);
    let constant = is_bitwise_constant(&sol);
    let main = tri!(main_theorem_check(&psi0, &curve, &rep, steps, tol));

    let mut ok = defect <= tol && triv.passed && main.passed;
    let mut lines = vec![
        format!("morphism defect {defect:.3e} {}", verdict(defect <= tol)),
        format!("trivial deformation residual {:.3e} {}", triv.max_residual, verdict(triv.passed)),
        format!(
            "gauge residual {:.3e}, cohomology residual {:.3e} {}",
            main.gauge_residual,
            main.cohomology_residual,
            verdict(main.passed)
        ),
    ];
    if h.is_abelian() {
        ok &= constant;
        lines.push(format!("abelian target, psi bitwise constant {}", verdict(constant)));
    }
    if let Some(w) = &main.conditioning_warning {
        lines.push(format!("warning: {w}"));
    }
    let exact = match &exact_curve {
        Some(c) => match exact_homotopy_check(&psi0, c) {
            Ok(r) => {
                let e_ok = r.morphism_at_samples && r.trivial_deformation;
                ok &= e_ok;
                lines.push(format!("exact rational route {}", verdict(e_ok)));
                serde_json::to_value(&r).unwrap_or(Value::Null)
            }
            // not nilpotent along this curve: the numeric route stands alone
            Err(Error::InvalidInput(_)) => Value::Null,
            Err(e) => return Outcome::from_error(&e),
        },
        None => Value::Null,
    };
    let report = json!({
        "kind": "homotopy",
        "steps": steps,
        "tol": tol,
        "morphism_defect": defect,
        "defect_curve": dcurve,
        "psi_constant": constant,
        "triviality": triv,
        "main_theorem": main,
        "exact": exact,
        "passed": ok,
    });
    Outcome::new(report, lines.join("\n"), code_for(ok))
}

pub fn cmd_flows(s: &Settings, input: &Path) -> Outcome {
    let path = s.path(input);
    let file: FlowsFile = tri!(load(&path));
    let resolver = Resolver::for_file(&path);
    let tol = s.tol.or(file.tol).unwrap_or(DEFAULT_TOL);
    // series checks use the tighter series tolerance unless overridden
    let series_tol = s.tol.unwrap_or(1e-10);
    let mut results = Vec::new();
    let mut lines = Vec::new();
    let mut ok = true;
    for (i, check) in file.checks.iter().enumerate() {
        let (value, passed, line) = match check {
            FlowCheck::Derivation { d, e, h } => {
                let d = tri!(dmatrix(d));
                let e = DVector::from_column_slice(e);
                let r = tri!(flow_derivation_check(&d, &e, *h, tol));
                let line = format!(
                    "derivation: relative error {:.3e}, order {} {}",
                    r.rel_error,
                    r.order.map_or("n/a".to_string(), |p| format!("{p:.2}")),
                    verdict(r.passed)
                );
                (serde_json::to_value(&r), r.passed, line)
            }
            FlowCheck::BracketInvariance { algebra, a, lambda, terms } => {
                let g = tri!(resolver.algebra(algebra));
                let r = tri!(bracket_invariance_check(
                    &g,
                    &tri!(rationals(a)),
                    &tri!(parse_rational(lambda)),
                    terms.unwrap_or(30),
                    series_tol
                ));
                let line = format!(
                    "bracket invariance on {}: residual {:.3e}{} {}",
                    g.name(),
                    r.max_residual,
                    if r.exact { " (exact)" } else { "" },
                    verdict(r.passed)
                );
                (serde_json::to_value(&r), r.passed, line)
            }
            FlowCheck::Semidirect { algebra, rep, a, b, e, lambda, terms } => {
                let g = tri!(resolver.algebra(algebra));
                let r = tri!(resolver.rep(Some(rep), &g));
                let rep_r = tri!(semidirect_flow_check(
                    &r,
                    &tri!(rationals(a)),
                    &tri!(rationals(b)),
                    &tri!(rationals(e)),
                    &tri!(parse_rational(lambda)),
                    terms.unwrap_or(30),
                    series_tol
                ));
                let line = format!(
                    "semidirect flow on {}: residual {:.3e}{} {}",
                    g.name(),
                    rep_r.max_residual,
                    if rep_r.exact { " (exact)" } else { "" },
                    verdict(rep_r.passed)
                );
                (serde_json::to_value(&rep_r), rep_r.passed, line)
            }
        };
        let mut value = value.unwrap_or(Value::Null);
        value["index"] = i.into();
        results.push(value);
        lines.push(line);
        ok &= passed;
    }
    Outcome::new(json!({ "checks": results, "passed": ok }), lines.join("\n"), code_for(ok))
}

pub fn cmd_cylinder(s: &Settings, input: &Path, exec: Exec) -> Outcome {
    let path = s.path(input);
    let file: CylinderFile = tri!(load(&path));
    let resolver = Resolver::for_file(&path);
    let g = tri!(resolver.algebra(&file.algebra));
    let r = tri!(resolver.rep(file.rep.as_ref(), &g));
    let ce = match build_ce(&r) {
        Ok(c) => c,
        Err(o) => return o,
    };
    let cyl = CylinderComplex::from_ce(ce);
    let mut forms = Vec::new();
    for f in &file.forms {
        let f = tri!(f.build());
        if f.degree > cyl.top_degree() {
            return Outcome::from_error(&Error::Parse(format!("form degree {} exceeds {}", f.degree, cyl.top_degree())));
        }
        tri!(cyl.check_shape(&f));
        forms.push(f);
    }
    if let Some(rf) = &file.random {
        forms.extend(cyl.random_forms(rf.seed, rf.count, rf.max_exp));
    }
    let times = tri!(rationals(&file.inclusion_times));

    let reports = cyl.verify_batch(&forms, exec);
    let per_form: Vec<(bool, bool, bool, bool)> = par::map(exec, forms.iter().collect(), |f| {
        let df = cyl.differential(f);
        let dd = cyl.differential(&df).is_zero();
        let i0 = cyl.incl_pullback(&Rational::zero(), f);
        let retract = times
            .iter()
            .all(|t| cyl.incl_pullback(t, &cyl.proj_pullback(&i0)) == i0);
        let intertwines = times.iter().all(|t| {
            let lhs = cyl.incl_pullback(t, &df);
            let rhs = cyl.ce().apply_d(&cyl.incl_pullback(t, f));
            lhs.coords == rhs.coords || (lhs.is_zero() && rhs.is_zero())
        });
        let primitive = cyl.primitive(&df).is_some();
        (dd, retract, intertwines, primitive)
    });
    let count = |sel: fn(&(bool, bool, bool, bool)) -> bool| per_form.iter().filter(|x| sel(x)).count();
    let identity_ok = reports.iter().filter(|r| r.zero).count();
    let first_failure = reports.iter().find(|r| !r.zero).cloned();
    let d2 = count(|x| x.0);
    let retract = count(|x| x.1);
    let intertwine = count(|x| x.2);
    let primitive = count(|x| x.3);
    let n = forms.len();
    let stabilization = match file.truncation {
        Some(d) => {
            let (cylb, ceb) = tri!(cyl.stabilization(d));
            Some(json!({ "truncation": d, "truncated_betti": cylb, "ce_betti": ceb, "equal": cylb == ceb }))
        }
        None => None,
    };
    let stab_ok = stabilization.as_ref().is_none_or(|v| v["equal"] == true);
    let ok = identity_ok == n && d2 == n && retract == n && intertwine == n && primitive == n && stab_ok;
    let report = json!({
        "forms": n,
        "identity_zero": identity_ok,
        "d_squared_zero": d2,
        "retraction": retract,
        "intertwining": intertwine,
        "primitives": primitive,
        "first_failure": first_failure,
        "stabilization": stabilization,
        "passed": ok,
    });
    let mut text = format!(
        "{n} forms: homotopy identity {identity_ok}/{n}, d^2 = 0 {d2}/{n}, I_t* Pr* = id {retract}/{n}, \
         I_t* d = d I_t* {intertwine}/{n}, primitives {primitive}/{n}"
    );
    if let Some(st) = &stabilization {
        text.push_str(&format!(
            "\ntruncated cohomology {} vs CE {} {}",
            st["truncated_betti"], st["ce_betti"], verdict(st["equal"] == true)
        ));
    }
    if let Some(f) = &first_failure {
        text.push_str(&format!("\nfirst nonzero residual: {:?}", f.first_nonzero));
    }
    Outcome::new(report, text, code_for(ok))
}
