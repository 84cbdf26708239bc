//! Subcommands behind the `cpn-surface` binary. Each one turns a config text
//! into output files and an exit code; nothing here touches the filesystem.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::basis::BasisKind;
use crate::config::{config_hash, matrix_from_rows, ConfigError, Resolved, RunConfig, SymmetryAction};
use crate::geometry::{sample_grid, surface_jet, topological_charge, willmore};
use crate::immersion::{immerse_by_path, immerse_holomorphic, ImmersionField, PathSpec};
use crate::matrix::{c, C};
use crate::model::{dc_residual_at, el_residual_at, holomorphy_check, scalar_invariants_at, AffineSolution, SolutionClass};
use crate::solutions::Catalog;
use crate::su3frame::{gauss_weingarten, moving_frame};
use crate::symmetry::{apply_generalized_su2, apply_projective, generator_list, infinitesimal_symmetry_order, Generator};

/// Version tag written into every output.
pub const SCHEMA_VERSION: u32 = 1;
pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => EXIT_USAGE,
            CliError::Compute(_) => EXIT_TOLERANCE,
        }
    }
}

fn compute(e: impl std::fmt::Display) -> CliError {
    CliError::Compute(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Check,
    Geom,
    Immerse,
    Frame,
    Charge,
    Willmore,
    Symmetry,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Geom => "geom",
            Command::Immerse => "immerse",
            Command::Frame => "frame",
            Command::Charge => "charge",
            Command::Willmore => "willmore",
            Command::Symmetry => "symmetry",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub artifacts: Vec<Artifact>,
    /// One line for the terminal.
    pub summary: String,
}

impl Outcome {
    fn failed(e: CliError) -> Outcome {
        Outcome {
            code: e.exit_code(),
            artifacts: Vec::new(),
            summary: format!("error: {e}"),
        }
    }
}

/// Header shared by all JSON outputs.
fn envelope(kind: &str, hash: &str, generated: u64, pass: bool, body: Value) -> String {
    let mut v = json!({
        "schema": format!("cpn-surface/{kind}/{SCHEMA_VERSION}"),
        "config_sha256": hash,
        "generated_unix": generated,
        "pass": pass,
    });
    if let (Value::Object(m), Value::Object(b)) = (&mut v, body) {
        m.extend(b);
    }
    serde_json::to_string_pretty(&v).expect("serializable") + "\n"
}

fn csv_header(kind: &str, hash: &str, generated: u64, columns: &[String]) -> String {
    format!(
        "# generated_unix={generated}\n# schema=cpn-surface/{kind}/{SCHEMA_VERSION}\n# config_sha256={hash}\n{}\n",
        columns.join(",")
    )
}

fn cz(z: C) -> Value {
    json!([z.re, z.im])
}

/// Largest value and where it occurs; NaN counts as worst.
fn worst(points: &[C], values: &[f64]) -> (f64, Option<C>) {
    let mut out = (0.0, None);
    for (z, &v) in points.iter().zip(values) {
        if out.1.is_none() || v > out.0 || v.is_nan() {
            out = (if v.is_nan() { f64::INFINITY } else { v }, Some(*z));
        }
    }
    out
}

fn located(points: &[C], values: &[f64]) -> Value {
    let (v, at) = worst(points, values);
    json!({ "max": v, "at": at.map(cz) })
}

/// Runs one subcommand on a config text.
pub fn run(cmd: Command, text: &str, generated: u64) -> Outcome {
    let resolved = RunConfig::from_text(text).and_then(|c| c.resolve(text));
    let r = match resolved {
        Ok(r) => r,
        Err(e) => return Outcome::failed(e.into()),
    };
    let result = match cmd {
        Command::Check => cmd_check(&r, generated),
        Command::Geom => cmd_geom(&r, generated),
        Command::Immerse => cmd_immerse(&r, generated),
        Command::Frame => cmd_frame(&r, generated),
        Command::Charge => cmd_charge(&r, generated),
        Command::Willmore => cmd_willmore(&r, generated),
        Command::Symmetry => cmd_symmetry(&r, generated),
    };
    result.unwrap_or_else(Outcome::failed)
}

fn finish(cmd: Command, pass: bool, artifact: Artifact, detail: String) -> Outcome {
    Outcome {
        code: if pass { EXIT_OK } else { EXIT_TOLERANCE },
        summary: format!("{} {}: {detail}", cmd.name(), if pass { "ok" } else { "FAILED" }),
        artifacts: vec![artifact],
    }
}

fn class_name(c: SolutionClass) -> &'static str {
    match c {
        SolutionClass::Holomorphic => "holomorphic",
        SolutionClass::AntiHolomorphic => "anti-holomorphic",
        SolutionClass::Mixed => "mixed",
    }
}

pub fn cmd_check(r: &Resolved, generated: u64) -> Result<Outcome, CliError> {
    let s = &r.solution;
    let pts = r.points();
    if pts.is_empty() {
        return Err(CliError::Usage("the grid has no points outside the singularities".into()));
    }
    let class = holomorphy_check(s, &pts).map_err(compute)?;
    let per: Vec<(f64, f64, Option<String>)> = pts
        .par_iter()
        .map(|&z| match (el_residual_at(s, z), dc_residual_at(s, z)) {
            (Ok(el), Ok(dc)) => (el.max(), dc, None),
            (Err(e), _) | (_, Err(e)) => (f64::INFINITY, f64::INFINITY, Some(format!("{z}: {e}"))),
        })
        .collect();
    let el: Vec<f64> = per.iter().map(|p| p.0).collect();
    let dc: Vec<f64> = per.iter().map(|p| p.1).collect();
    let errors: Vec<&String> = per.iter().filter_map(|p| p.2.as_ref()).collect();
    let tol = &r.config.tolerances;
    let (el_max, el_at) = worst(&pts, &el);
    let (dc_max, _) = worst(&pts, &dc);
    let el_ok = el_max < tol.el;
    let dc_ok = tol.dc.is_none_or(|t| dc_max < t);
    let pass = el_ok && dc_ok && errors.is_empty();
    let body = json!({
        "n": r.n,
        "samples": pts.len(),
        "classification": class_name(class.class),
        "holomorphy": { "max_dbar_w": class.max_dbar_w, "max_d_w": class.max_d_w },
        "el_residual": located(&pts, &el),
        "dc_residual": { "enforced": tol.dc.is_some(), "max": dc_max, "at": worst(&pts, &dc).1.map(cz) },
        "errors": errors,
    });
    let mut detail = format!("{} samples, {}, max residual {el_max:.3e}", pts.len(), class_name(class.class));
    if let (false, Some(z)) = (el_ok, el_at) {
        let _ = write!(detail, " at ξ = {z}");
    }
    let art = Artifact {
        file_name: "check.json".into(),
        contents: envelope("check", &r.hash, generated, pass, body),
    };
    Ok(finish(Command::Check, pass, art, detail))
}

fn num(x: f64) -> String {
    format!("{x}")
}

pub fn cmd_geom(r: &Resolved, generated: u64) -> Result<Outcome, CliError> {
    let columns = ["xi1", "xi2", "q", "re_j", "im_j", "k", "h_norm", "det_g"].map(String::from);
    let mut out = csv_header("geom", &r.hash, generated, &columns);
    let samples = sample_grid(&r.solution, &r.grid);
    let mut failures = Vec::new();
    let mut k_err: f64 = 0.0;
    for (z, smp) in r.points().iter().zip(samples) {
        match smp {
            Ok(smp) => {
                let j = smp.metric.j();
                let h = smp.mean_norm().map(num).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    num(z.re),
                    num(z.im),
                    num(smp.metric.q()),
                    num(j.re),
                    num(j.im),
                    num(smp.gaussian),
                    h,
                    num(smp.metric.det)
                );
                if let Some(k) = r.config.geom.expect_curvature {
                    k_err = k_err.max((smp.gaussian - k).abs());
                }
            }
            Err(e) => failures.push(format!("{z}: {e}")),
        }
    }
    let k_ok = r.config.geom.expect_curvature.is_none() || k_err < r.config.tolerances.curvature;
    let pass = failures.is_empty() && k_ok;
    let mut detail = format!("{} rows", r.points().len() - failures.len());
    if r.config.geom.expect_curvature.is_some() {
        let _ = write!(detail, ", max |K − K₀| {k_err:.3e}");
    }
    if let Some(f) = failures.first() {
        let _ = write!(detail, ", {} failed points, first {f}", failures.len());
    }
    let art = Artifact {
        file_name: "geom.csv".into(),
        contents: out,
    };
    Ok(finish(Command::Geom, pass, art, detail))
}

fn default_basis(n: usize) -> Option<BasisKind> {
    match n {
        2 => Some(BasisKind::Pauli),
        3 => Some(BasisKind::GellMann),
        _ => None,
    }
}

pub fn cmd_immerse(r: &Resolved, generated: u64) -> Result<Outcome, CliError> {
    let s = &r.solution;
    let pts = r.points();
    let basis = r.config.basis.or_else(|| default_basis(r.n));
    let relation = r.config.immerse.relation;
    if let Some(rel) = relation {
        if rel.basis().dim() != r.n {
            return Err(CliError::Usage(format!("relation {rel:?} needs N = {}", rel.basis().dim())));
        }
    }
    let class = holomorphy_check(s, &pts).map_err(compute)?.class;
    let anchor = match (&r.config.immerse.anchor, basis) {
        (None, _) => None,
        (Some(a), Some(b)) if a.len() == b.len() => {
            Some(b.reconstruct(&a.iter().map(|v| c(v[0], v[1])).collect::<Vec<_>>()))
        }
        (Some(_), Some(b)) => return Err(CliError::Usage(format!("anchor needs {} coordinates", b.len()))),
        (Some(_), None) => return Err(CliError::Usage("an anchor needs a coordinate basis".into())),
    };
    let base = r.base_point();
    let sing = r.singularities();
    let tol = &r.config.tolerances;
    let fields: Vec<Result<ImmersionField, String>> = pts
        .par_iter()
        .map(|&z| {
            if class == SolutionClass::Mixed {
                let path = PathSpec::straight(base, z).with_tol(tol.path).excluding(&sing, 1e-6);
                immerse_by_path(s, &path, anchor.as_ref()).map(|p| p.field)
            } else {
                immerse_holomorphic(s, z)
            }
            .map_err(|e| format!("{z}: {e}"))
        })
        .collect();
    let mut columns = vec!["xi1".to_string(), "xi2".to_string()];
    match basis {
        Some(b) => columns.extend((1..=b.len()).map(|k| format!("x{k}"))),
        None => {
            for i in 0..r.n {
                for j in i..r.n {
                    columns.push(format!("re_x{}{}", i + 1, j + 1));
                    columns.push(format!("im_x{}{}", i + 1, j + 1));
                }
            }
        }
    }
    if relation.is_some() {
        columns.push("relation_residual".into());
    }
    let mut out = csv_header("immerse", &r.hash, generated, &columns);
    let mut failures = Vec::new();
    let mut rel_max: f64 = 0.0;
    for (z, f) in pts.iter().zip(fields) {
        let f = match f {
            Ok(f) => f,
            Err(e) => {
                failures.push(e);
                continue;
            }
        };
        let mut row = vec![num(z.re), num(z.im)];
        match basis {
            Some(b) => {
                let x = f.coordinates(b).map_err(compute)?;
                row.extend(x.iter().map(|v| num(v.re)));
                if let Some(rel) = relation {
                    let res = rel.residual(&x);
                    rel_max = rel_max.max(if res.is_nan() { f64::INFINITY } else { res });
                    row.push(num(res));
                }
            }
            None => {
                let x = f.relative();
                for i in 0..r.n {
                    for j in i..r.n {
                        row.push(num(x[(i, j)].re));
                        row.push(num(x[(i, j)].im));
                    }
                }
            }
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    let pass = failures.is_empty() && rel_max < tol.relation;
    let mut detail = format!("{} rows, {}", pts.len() - failures.len(), class_name(class));
    if relation.is_some() {
        let _ = write!(detail, ", max relation residual {rel_max:.3e}");
    }
    if let Some(f) = failures.first() {
        let _ = write!(detail, ", {} failed points, first {f}", failures.len());
    }
    let art = Artifact {
        file_name: "immerse.csv".into(),
        contents: out,
    };
    Ok(finish(Command::Immerse, pass, art, detail))
}

pub fn cmd_frame(r: &Resolved, generated: u64) -> Result<Outcome, CliError> {
    if r.n != 3 {
        return Err(CliError::Usage(format!("the moving frame needs N = 3, config has N = {}", r.n)));
    }
    let s = &r.solution;
    let phi = r.config.frame.phi;
    let pts: Vec<C> = if r.config.frame.points.is_empty() {
        r.points()
    } else {
        r.config.frame.points.iter().map(|p| c(p[0], p[1])).collect()
    };
    if holomorphy_check(s, &pts).map_err(compute)?.class != SolutionClass::Holomorphic {
        return Err(CliError::Usage("the moving frame needs a holomorphic solution".into()));
    }
    let tol = &r.config.tolerances;
    let rows: Vec<Result<(Value, bool), String>> = pts
        .par_iter()
        .map(|&z| {
            let err = |e: &dyn std::fmt::Display| format!("{z}: {e}");
            let frame = moving_frame(s, z, phi).map_err(|e| err(&e))?;
            let jet = surface_jet(s, z).map_err(|e| err(&e))?;
            let gw = gauss_weingarten(s, z, phi).map_err(|e| err(&e))?;
            let p = &frame.params;
            let tie = (0.5 * p.u.exp() - jet.q.value()).norm();
            let ortho = frame.orthonormality_defect();
            let tangency = frame.tangency_defect(&jet);
            let ok = ortho < tol.orthonormality
                && tangency < tol.orthonormality
                && tie < tol.orthonormality
                && gw.second_residual < tol.frame
                && gw.mixed_residual < tol.frame
                && gw.normal_residual < tol.frame;
            let eta: Vec<Value> = frame
                .eta
                .iter()
                .map(|m| Value::Array(m.transpose().iter().flat_map(|v| [json!(v.re), json!(v.im)]).collect()))
                .collect();
            Ok((
                json!({
                    "xi": cz(z),
                    "u": p.u,
                    "alpha": p.alpha,
                    "phi": p.phi,
                    "a1": cz(p.a1), "b1": cz(p.b1), "a2": cz(p.a2), "b2": cz(p.b2),
                    "eta": eta,
                    "orthonormality": ortho,
                    "tangency": tangency,
                    "metric_tie": tie,
                    "gauss_weingarten": {
                        "second": gw.second_residual,
                        "mixed": gw.mixed_residual,
                        "normal": gw.normal_residual,
                        "antisymmetry": gw.antisymmetry,
                    },
                    "pass": ok,
                }),
                ok,
            ))
        })
        .collect();
    let mut points = Vec::new();
    let mut failures = Vec::new();
    let mut bad = 0usize;
    for row in rows {
        match row {
            Ok((v, ok)) => {
                bad += usize::from(!ok);
                points.push(v);
            }
            Err(e) => failures.push(e),
        }
    }
    let pass = failures.is_empty() && bad == 0;
    let body = json!({ "points": points, "errors": failures });
    let detail = format!("{} points, {} over tolerance, {} errors", pts.len(), bad, failures.len());
    let art = Artifact {
        file_name: "frame.json".into(),
        contents: envelope("frame", &r.hash, generated, pass, body),
    };
    Ok(finish(Command::Frame, pass, art, detail))
}

fn levels_json(levels: &[(usize, C)]) -> Value {
    Value::Array(levels.iter().map(|(n, v)| json!({ "panels": n, "value": cz(*v) })).collect())
}

pub fn cmd_charge(r: &Resolved, generated: u64) -> Result<Outcome, CliError> {
    let rep = topological_charge(&r.solution, r.config.charge.resolution, r.config.measure).map_err(compute)?;
    let body = json!({
        "charge": rep.charge,
        "measure": r.config.measure,
        "levels": levels_json(&rep.refinement.levels),
        "relative_change": rep.relative_change,
        "warnings": rep.warnings,
    });
    let detail = format!("Q = {} (relative change {:.2e})", rep.charge, rep.relative_change);
    let art = Artifact {
        file_name: "charge.json".into(),
        contents: envelope("charge", &r.hash, generated, true, body),
    };
    Ok(finish(Command::Charge, true, art, detail))
}

pub fn cmd_willmore(r: &Resolved, generated: u64) -> Result<Outcome, CliError> {
    let region = r.config.willmore.region.clone().unwrap_or_else(|| r.grid.clone());
    let rep = willmore(&r.solution, &region, r.config.willmore.resolution, r.config.measure).map_err(compute)?;
    let body = json!({
        "value": cz(rep.value),
        "integral": cz(rep.integral),
        "measure": r.config.measure,
        "region": { "center": region.center, "half_width": region.half_width },
        "levels": levels_json(&rep.refinement.levels),
        "relative_change": rep.relative_change,
    });
    let detail = format!("W = {} (relative change {:.2e})", rep.value, rep.relative_change);
    let art = Artifact {
        file_name: "willmore.json".into(),
        contents: envelope("willmore", &r.hash, generated, true, body),
    };
    Ok(finish(Command::Willmore, true, art, detail))
}

fn expressions(s: &AffineSolution) -> Value {
    json!({
        "w": s.w().iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "wbar": s.wbar().iter().map(|e| e.to_string()).collect::<Vec<_>>(),
    })
}

/// Max EL residual of `t` and max |q_t − q_s| over the points.
fn invariance(s: &AffineSolution, t: &AffineSolution, pts: &[C]) -> Result<(f64, f64), CliError> {
    let per: Vec<Result<(f64, f64), String>> = pts
        .par_iter()
        .map(|&z| {
            let el = el_residual_at(t, z).map_err(|e| e.to_string())?.max();
            let q0 = scalar_invariants_at(s, z).map_err(|e| e.to_string())?.q;
            let q1 = scalar_invariants_at(t, z).map_err(|e| e.to_string())?.q;
            Ok((el, (q1 - q0).abs()))
        })
        .collect();
    let mut out = (0.0f64, 0.0f64);
    for p in per {
        let p = p.map_err(CliError::Compute)?;
        out = (out.0.max(p.0), out.1.max(p.1));
    }
    Ok(out)
}

pub fn cmd_symmetry(r: &Resolved, generated: u64) -> Result<Outcome, CliError> {
    let action = r
        .config
        .symmetry
        .as_ref()
        .ok_or_else(|| CliError::Usage("the config has no [symmetry] section".into()))?;
    let s = &r.solution;
    let pts = r.points();
    let tol = &r.config.tolerances;
    let (pass, body, detail) = match action {
        SymmetryAction::Generator { generator, epsilon } => {
            let gens: Vec<Generator> = if generator == "all" {
                generator_list(r.n)
            } else {
                vec![generator.parse().map_err(|e| CliError::Usage(format!("{e}")))?]
            };
            let mut reports = Vec::new();
            let mut worst_slope = f64::INFINITY;
            let mut all_ok = true;
            for g in &gens {
                let field = g.field(s).map_err(|e| CliError::Usage(e.to_string()))?;
                let moved = field.apply(s, *epsilon).map_err(compute)?;
                let rep = infinitesimal_symmetry_order(&field, s, &pts).map_err(compute)?;
                let ok = rep.is_exact() || rep.slope >= tol.slope;
                if !rep.is_exact() {
                    worst_slope = worst_slope.min(rep.slope);
                }
                all_ok &= ok;
                reports.push(json!({
                    "generator": g.to_string(),
                    "epsilon": epsilon,
                    "transformed": expressions(&moved),
                    "slope": rep.slope,
                    "samples": rep.samples.iter().map(|(e, r)| json!([e, r])).collect::<Vec<_>>(),
                    "base_residual": rep.base_residual,
                    "exact": rep.is_exact(),
                    "pass": ok,
                }));
            }
            (
                all_ok,
                json!({ "action": "generator", "generators": reports }),
                format!("{} generators, smallest non-exact slope {worst_slope:.3}", gens.len()),
            )
        }
        SymmetryAction::Projective { u } => {
            let m = matrix_from_rows(u)?;
            let t = apply_projective(&m, s).map_err(|e| CliError::Usage(e.to_string()))?;
            let (el, dq) = invariance(s, &t, &pts)?;
            (
                el < tol.el && dq < tol.invariance,
                json!({ "action": "projective", "transformed": expressions(&t), "el_residual": el, "q_change": dq }),
                format!("residual {el:.3e}, max |Δq| {dq:.3e}"),
            )
        }
        SymmetryAction::Su2 { a, b } => {
            if r.n != 3 {
                return Err(CliError::Usage("the generalized SU(2) action needs N = 3".into()));
            }
            let t = apply_generalized_su2(c(a[0], a[1]), c(b[0], b[1]), s).map_err(|e| CliError::Usage(e.to_string()))?;
            let (el, dq) = invariance(s, &t, &pts)?;
            (
                el < tol.el && dq < tol.invariance,
                json!({ "action": "su2", "transformed": expressions(&t), "el_residual": el, "q_change": dq }),
                format!("residual {el:.3e}, max |Δq| {dq:.3e}"),
            )
        }
    };
    let art = Artifact {
        file_name: "symmetry.json".into(),
        contents: envelope("symmetry", &r.hash, generated, pass, body),
    };
    Ok(finish(Command::Symmetry, pass, art, detail))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogAction {
    List,
    Verify,
    Export,
}

/// Built-in catalog plus the entries of an optional catalog text, each
/// validated on registration.
pub fn run_catalog(action: CatalogAction, extra: Option<&str>, generated: u64) -> Outcome {
    let hash = config_hash(extra.unwrap_or(""));
    let mut cat = Catalog::builtin();
    if let Some(text) = extra {
        let more = match Catalog::from_text(text) {
            Ok(m) => m,
            Err(e) => return Outcome::failed(CliError::Usage(e.to_string())),
        };
        for e in more.entries {
            if let Err(err) = cat.register(e) {
                return Outcome::failed(compute(err));
            }
        }
    }
    match action {
        CatalogAction::List => {
            let entries: Vec<Value> = cat
                .entries
                .iter()
                .map(|e| json!({ "name": e.name, "n": e.n, "w": e.w, "classification": e.classification }))
                .collect();
            let art = Artifact {
                file_name: "catalog.json".into(),
                contents: envelope("catalog", &hash, generated, true, json!({ "entries": entries })),
            };
            finish_catalog(true, art, format!("{} entries", cat.entries.len()))
        }
        CatalogAction::Verify => {
            let results = cat.verify();
            let mut failed = 0usize;
            let entries: Vec<Value> = results
                .iter()
                .map(|(name, v)| match v {
                    Ok(v) => {
                        failed += usize::from(!v.passed());
                        json!({
                            "name": name,
                            "samples": v.samples,
                            "el_residual": v.el_residual,
                            "classification_ok": v.classification_ok,
                            "closed_form_error": v.closed_form_error,
                            "curvature_error": v.curvature_error,
                            "pass": v.passed(),
                        })
                    }
                    Err(e) => {
                        failed += 1;
                        json!({ "name": name, "error": e.to_string(), "pass": false })
                    }
                })
                .collect();
            let pass = failed == 0;
            let art = Artifact {
                file_name: "catalog.json".into(),
                contents: envelope("catalog", &hash, generated, pass, json!({ "entries": entries })),
            };
            finish_catalog(pass, art, format!("{} entries, {failed} failed", results.len()))
        }
        CatalogAction::Export => match cat.to_text() {
            Ok(text) => {
                let art = Artifact {
                    file_name: "catalog.toml".into(),
                    contents: format!("# generated_unix={generated}\n# config_sha256={hash}\n{text}"),
                };
                finish_catalog(true, art, format!("{} entries", cat.entries.len()))
            }
            Err(e) => Outcome::failed(compute(e)),
        },
    }
}

fn finish_catalog(pass: bool, artifact: Artifact, detail: String) -> Outcome {
    Outcome {
        code: if pass { EXIT_OK } else { EXIT_TOLERANCE },
        summary: format!("catalog {}: {detail}", if pass { "ok" } else { "FAILED" }),
        artifacts: vec![artifact],
    }
}

/// Drops the timestamp lines so two outputs can be compared.
pub fn strip_timestamp(contents: &str) -> String {
    contents
        .lines()
        .filter(|l| !l.contains("generated_unix"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPECIAL: &str = "w = [\"xi\", \"xi^2/2\"]\n[grid]\ncenter = [0.0, 0.0]\nhalf_width = 1.5\nresolution = 5\n";

    #[test]
    fn check_exit_codes() {
        assert_eq!(run(Command::Check, "entry = \"soliton\"\n", 0).code, EXIT_OK);
        let broken = "w = [\"xi\", \"xi*xibar\"]\n[grid]\ncenter = [0.3, 0.2]\nhalf_width = 0.5\nresolution = 3\n";
        let out = run(Command::Check, broken, 0);
        assert_eq!(out.code, EXIT_TOLERANCE);
        assert!(out.summary.contains("at ξ"), "{}", out.summary);
        assert_eq!(run(Command::Check, "w = [", 0).code, EXIT_USAGE);
    }

    #[test]
    fn geom_csv_shape_and_determinism() {
        let text = format!("{SPECIAL}[geom]\nexpect_curvature = 2.0\n");
        let a = run(Command::Geom, &text, 1);
        let b = run(Command::Geom, &text, 2);
        assert_eq!(a.code, EXIT_OK, "{}", a.summary);
        let csv = &a.artifacts[0].contents;
        assert_eq!(csv.lines().count(), 4 + 25);
        assert!(csv.lines().nth(3).unwrap().starts_with("xi1,xi2,q"));
        assert_ne!(csv, &b.artifacts[0].contents);
        assert_eq!(strip_timestamp(csv), strip_timestamp(&b.artifacts[0].contents));
    }

    #[test]
    fn immerse_sphere() {
        let text = "w = [\"xi\"]\n[grid]\ncenter = [0.0, 0.0]\nhalf_width = 1.0\nresolution = 5\n[immerse]\nrelation = \"sphere\"\n";
        let out = run(Command::Immerse, text, 0);
        assert_eq!(out.code, EXIT_OK, "{}", out.summary);
    }

    #[test]
    fn frame_needs_cp2() {
        let text = "w = [\"xi\"]\n[grid]\ncenter = [0.0, 0.0]\nhalf_width = 1.0\nresolution = 3\n";
        assert_eq!(run(Command::Frame, text, 0).code, EXIT_USAGE);
        let text = format!("{SPECIAL}[frame]\npoints = [[1.0, 0.5]]\n");
        let out = run(Command::Frame, &text, 0);
        assert_eq!(out.code, EXIT_OK, "{}", out.summary);
        let v: Value = serde_json::from_str(&out.artifacts[0].contents).unwrap();
        assert_eq!(v["points"][0]["eta"].as_array().unwrap().len(), 8);
        assert_eq!(v["points"][0]["eta"][0].as_array().unwrap().len(), 18);
    }

    #[test]
    fn symmetry_and_catalog() {
        let text = format!("{SPECIAL}[symmetry]\naction = \"su2\"\na = [0.6, 0.0]\nb = [0.0, 0.8]\n");
        assert_eq!(run(Command::Symmetry, &text, 0).code, EXIT_OK);
        assert_eq!(run(Command::Symmetry, SPECIAL, 0).code, EXIT_USAGE);
        let out = run_catalog(CatalogAction::List, None, 0);
        assert_eq!(out.code, EXIT_OK);
        assert_eq!(run_catalog(CatalogAction::List, Some("entry = 3"), 0).code, EXIT_USAGE);
    }
}
