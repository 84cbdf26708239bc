//! Solution families and the built-in catalog, with closed-form metrics,
//! curvatures and coordinates attached where they are known.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{conjugate_expression, differentiate, evaluate, parse, Bindings, EvalPoint, Expr, ExprError, Var};
use crate::geometry::{gaussian_curvature_at, metric_at, GeometryError};
use crate::grid::Grid;
use crate::immersion::{
    surface_relation_residuals, CoordinateAnchor, ImmersionError, RelationReport, SurfaceRelation,
};
use crate::matrix::{c, C};
use crate::model::{el_residual_at, holomorphy_check, AffineSolution, ModelError, SolutionClass};

/// Registration threshold on the equations-of-motion residual.
pub const REGISTRATION_TOL: f64 = 1e-9;
/// Agreement required between attached closed forms and computed values.
pub const CLOSED_FORM_TOL: f64 = 1e-9;
/// Agreement required for a declared constant curvature.
pub const CURVATURE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolutionError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Immersion(#[from] ImmersionError),
    #[error("g_{index} depends on xibar; the construction needs holomorphic input")]
    NotHolomorphic { index: usize },
    #[error("f_3 vanishes identically")]
    DegenerateWronskian,
    #[error("N = {n} is outside the supported range {min}..={max}")]
    UnsupportedN { n: usize, min: usize, max: usize },
    #[error("{count} constants c_j given, expected {expected}")]
    ConstantCount { count: usize, expected: usize },
    #[error("entry `{name}` failed validation: {reason}")]
    Invalid { name: String, reason: String },
    #[error("an entry named `{0}` is already registered")]
    Duplicate(String),
    #[error("no entry named `{0}`")]
    Unknown(String),
    #[error("catalog text: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Holomorphic,
    AntiHolomorphic,
    Mixed,
    /// Mixed, subject to w_i w̄_i = 1.
    NonSplitting,
}

impl Classification {
    fn matches(self, observed: SolutionClass) -> bool {
        matches!(
            (self, observed),
            (Classification::Holomorphic, SolutionClass::Holomorphic)
                | (Classification::AntiHolomorphic, SolutionClass::AntiHolomorphic)
                | (Classification::Mixed, SolutionClass::Mixed)
                | (Classification::NonSplitting, SolutionClass::Mixed)
        )
    }
}

/// Closed forms the computed geometry is checked against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ClosedForm {
    /// (a₁ξ^m, a₂ξ^n).
    Monomial { a1: [f64; 2], a2: [f64; 2], m: f64, n: f64 },
    /// w₁ = F/F̄, w_{j+1} = (c_j/c̄_j) F^{e^{iψ}}/F̄^{e^{−iψ}}.
    NonSplitting {
        n: usize,
        f: String,
        c: Vec<[f64; 2]>,
        psi: f64,
    },
    /// The sech/tanh pair.
    Soliton,
}

fn cx(v: [f64; 2]) -> C {
    c(v[0], v[1])
}

/// F, F′ and F̄ at ξ.
fn f_values(f: &str, xi: C) -> Result<(C, C, C), SolutionError> {
    let e = parse(f)?;
    let p = EvalPoint::new(xi);
    let fv = evaluate(&e, &p)?;
    let dv = evaluate(&differentiate(&e, Var::Xi), &p)?;
    let fb = evaluate(&conjugate_expression(&e), &p)?;
    Ok((fv, dv, fb))
}

impl ClosedForm {
    /// (J, q) with g_ξξ = −J and g_ξξ̄ = q.
    pub fn metric(&self, xi: C) -> Result<(C, f64), SolutionError> {
        match self {
            ClosedForm::Monomial { a1, a2, m, n } => {
                let (b1, b2) = (cx(*a1).norm_sqr(), cx(*a2).norm_sqr());
                let r2 = xi.norm_sqr();
                let (pm, pn) = (r2.powf(*m), r2.powf(*n));
                let num = b1 * pm * (m * m + b2 * (m - n).powi(2) * pn) + b2 * n * n * pn;
                let den = r2 * (1.0 + b1 * pm + b2 * pn).powi(2);
                Ok((c(0.0, 0.0), num / den / 2.0))
            }
            ClosedForm::NonSplitting { n, f, .. } => {
                let (fv, dv, _) = f_values(f, xi)?;
                let nn = *n as f64;
                let ratio = dv / fv;
                Ok((ratio * ratio * ((nn - 3.0) / (nn * nn)), ratio.norm_sqr() * (2.0 * nn - 3.0) / (nn * nn)))
            }
            ClosedForm::Soliton => {
                let x = xi.re;
                Ok((c(0.0, 0.0), 1.0 / (1.0 + (2.0 * x).cosh())))
            }
        }
    }

    /// |J|² − q².
    pub fn determinant(&self, xi: C) -> Result<f64, SolutionError> {
        if let ClosedForm::NonSplitting { n, f, .. } = self {
            let (fv, dv, _) = f_values(f, xi)?;
            let nn = *n as f64;
            return Ok(-3.0 * (nn - 2.0) / nn.powi(3) * (dv / fv).norm_sqr().powi(2));
        }
        let (j, q) = self.metric(xi)?;
        Ok(j.norm_sqr() - q * q)
    }

    pub fn curvature(&self, xi: C) -> Option<f64> {
        match self {
            ClosedForm::Monomial { a1, a2, m, n } => {
                let (b1, b2) = (cx(*a1).norm_sqr(), cx(*a2).norm_sqr());
                let r2 = xi.norm_sqr();
                let (pm, pn) = (r2.powf(*m), r2.powf(*n));
                let a = 1.0 + b1 * pm + b2 * pn;
                let s = b1 * pm * (m * m + b2 * (m - n).powi(2) * pn) + b2 * n * n * pn;
                let top = 2.0 * b1 * b2 * (m * n * (m - n)).powi(2) * r2.powf(m + n) * a.powi(3);
                Some(4.0 - top / s.powi(3))
            }
            ClosedForm::NonSplitting { n, .. } => (*n >= 3).then_some(0.0),
            ClosedForm::Soliton => Some(1.0),
        }
    }

    /// Gell-Mann coordinates, where a closed form is known.
    pub fn coordinates(&self, xi: C) -> Result<Option<Vec<C>>, SolutionError> {
        match self {
            ClosedForm::NonSplitting { n: 3, f, c: cs, psi } if (psi - PI / 3.0).abs() < 1e-12 => {
                let (fv, _, fb) = f_values(f, xi)?;
                Ok(Some(nonsplitting_coordinates(fv, fb, cx(cs[0]), *psi)))
            }
            ClosedForm::Soliton => {
                let (s, d) = (xi.re, c(0.0, xi.im));
                let sech = 1.0 / s.cosh();
                let z = c(0.0, 0.0);
                Ok(Some(vec![
                    d.cosh() * sech,
                    z,
                    z,
                    z,
                    z,
                    c(0.0, 1.0) * d.sinh() * sech,
                    c(-s.tanh(), 0.0),
                    z,
                ]))
            }
            _ => Ok(None),
        }
    }
}

/// X₁ … X₈ of the N = 3 non-splitting surface at F, F̄ (gauge ψ = π/3).
pub fn nonsplitting_coordinates(f: C, fb: C, cc: C, psi: f64) -> Vec<C> {
    let r3 = 3f64.sqrt();
    let e = C::from_polar(1.0, psi);
    let abs_f = (f * fb).sqrt();
    let ln_abs = abs_f.ln();
    let pre = (e * ln_abs * -2.0).exp();
    let modf = (c(0.0, 2.0 * r3) * ln_abs).exp();
    let ac = cc.norm_sqr();
    let cb = cc.conj();
    let k = 1.0 / (6.0 * r3 * ac);
    let (lf, lfb) = (f.ln(), fb.ln());
    let i = c(0.0, 1.0);
    let f2 = f * f;
    let fb2 = fb * fb;
    let m2 = f * fb;
    vec![
        i * k * pre * (cb * cb * f - cc * cc * fb * modf),
        -k * pre * (cb * cb * f + cc * cc * fb * modf),
        (c(1.0, -r3) * lf + c(1.0, r3) * lfb) / 6.0,
        -(c(r3, 1.0) * lf + c(r3, -1.0) * lfb) / 6.0,
        -(f2 + fb2) / (6.0 * r3 * m2),
        k * pre * (cb * cb * fb + cc * cc * f * modf),
        i * (f2 - fb2) / (6.0 * r3 * m2),
        i * k * pre * (cb * cb * fb - cc * cc * f * modf),
    ]
}

/// A named solution with the properties it is expected to have.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub n: usize,
    /// w₁ … w_{N−1}.
    pub w: Vec<String>,
    /// Parameter defaults as [re, im].
    #[serde(default)]
    pub params: BTreeMap<String, [f64; 2]>,
    /// Poles and branch points to keep off the test grid.
    #[serde(default)]
    pub singularities: Vec<[f64; 2]>,
    pub classification: Classification,
    #[serde(default)]
    pub curvature: Option<f64>,
    #[serde(default)]
    pub relation: Option<SurfaceRelation>,
    pub grid: Grid,
    #[serde(default)]
    pub closed_form: Option<ClosedForm>,
}

impl CatalogEntry {
    pub fn bindings(&self) -> Bindings {
        let mut b = Bindings::new();
        for (k, v) in &self.params {
            b.insert(k, cx(*v));
        }
        b
    }

    pub fn solution(&self) -> Result<AffineSolution, SolutionError> {
        let w: Vec<&str> = self.w.iter().map(String::as_str).collect();
        let s = AffineSolution::parse(&w, self.bindings())?;
        if s.n() != self.n {
            return Err(SolutionError::Invalid {
                name: self.name.clone(),
                reason: format!("declares N = {} but has {} fields", self.n, w.len()),
            });
        }
        Ok(s)
    }

    pub fn points(&self) -> Vec<C> {
        let mut g = self.grid.clone();
        g.exclude.extend(self.singularities.iter().copied());
        g.points()
    }

    /// Anchor for path-integrated relations, from the closed-form coordinates.
    pub fn anchor(&self) -> Result<Option<CoordinateAnchor>, SolutionError> {
        let Some(cf) = &self.closed_form else { return Ok(None) };
        let xi = c(self.grid.center[0], self.grid.center[1]);
        Ok(cf.coordinates(xi)?.map(|coordinates| CoordinateAnchor { xi, coordinates }))
    }

    /// Residual of the declared coordinate relation on a coarse subgrid.
    pub fn relation_report(&self, resolution: usize, path_tol: f64) -> Result<Option<RelationReport>, SolutionError> {
        let Some(relation) = self.relation else { return Ok(None) };
        let s = self.solution()?;
        let mut g = self.grid.clone();
        g.resolution = resolution;
        g.exclude.extend(self.singularities.iter().copied());
        let anchor = self.anchor()?;
        Ok(Some(surface_relation_residuals(&s, relation, &g.points(), anchor.as_ref(), path_tol)?))
    }

    pub fn validate(&self) -> Result<Validation, SolutionError> {
        let s = self.solution()?;
        let pts = self.points();
        let observed = holomorphy_check(&s, &pts)?.class;
        let per_point: Vec<Result<[f64; 3], SolutionError>> = pts
            .par_iter()
            .map(|&z| {
                let el = el_residual_at(&s, z)?.max();
                let mut metric: f64 = 0.0;
                let mut curv: f64 = 0.0;
                if let Some(cf) = &self.closed_form {
                    let m = metric_at(&s, z)?;
                    let (j, q) = cf.metric(z)?;
                    let scale = 1.0 + q.abs();
                    metric = ((m.j() - j).norm().max((m.q() - q).abs())) / scale;
                }
                if let Some(k) = self.curvature {
                    curv = (gaussian_curvature_at(&s, z)? - k).abs() / (1.0 + k.abs());
                }
                Ok([el, metric, curv])
            })
            .collect();
        let mut worst = [0.0f64; 3];
        for r in per_point {
            let r = r?;
            for k in 0..3 {
                worst[k] = worst[k].max(r[k]);
            }
        }
        Ok(Validation {
            name: self.name.clone(),
            samples: pts.len(),
            el_residual: worst[0],
            observed,
            classification_ok: self.classification.matches(observed),
            closed_form_error: self.closed_form.as_ref().map(|_| worst[1]),
            curvature_error: self.curvature.map(|_| worst[2]),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Validation {
    pub name: String,
    pub samples: usize,
    pub el_residual: f64,
    pub observed: SolutionClass,
    pub classification_ok: bool,
    pub closed_form_error: Option<f64>,
    pub curvature_error: Option<f64>,
}

impl Validation {
    pub fn passed(&self) -> bool {
        self.el_residual < REGISTRATION_TOL
            && self.classification_ok
            && self.closed_form_error.is_none_or(|e| e < CLOSED_FORM_TOL)
            && self.curvature_error.is_none_or(|e| e < CURVATURE_TOL)
    }

    pub fn failure(&self) -> Option<String> {
        if self.passed() {
            return None;
        }
        Some(format!(
            "residual {:.3e}, class {:?} ({}), closed form {:?}, curvature {:?}",
            self.el_residual,
            self.observed,
            if self.classification_ok { "ok" } else { "mismatch" },
            self.closed_form_error,
            self.curvature_error
        ))
    }
}

fn fmt_num(x: f64) -> String {
    let s = format!("{x}");
    if s.contains('e') { format!("({s})") } else { s }
}

fn fmt_complex(z: C) -> String {
    match (z.re, z.im) {
        (re, im) if im == 0.0 => fmt_num(re),
        (re, im) if re == 0.0 => format!("{}*i", fmt_num(im)),
        (re, im) => format!("({}+{}*i)", fmt_num(re), fmt_num(im)),
    }
}

/// (a₁ξ^m, a₂ξ^n).
pub fn monomial_family(a1: C, a2: C, m: f64, n: f64) -> CatalogEntry {
    let term = |a: C, p: f64| {
        if a == c(0.0, 0.0) {
            "0".to_string()
        } else {
            format!("{}*xi^{}", fmt_complex(a), fmt_num(p))
        }
    };
    CatalogEntry {
        name: format!("monomial-{}-{}", fmt_num(m), fmt_num(n)),
        n: 3,
        w: vec![term(a1, m), term(a2, n)],
        params: BTreeMap::new(),
        singularities: if m.fract() != 0.0 || n.fract() != 0.0 || m < 0.0 || n < 0.0 {
            vec![[0.0, 0.0]]
        } else {
            Vec::new()
        },
        classification: Classification::Holomorphic,
        curvature: None,
        relation: Some(SurfaceRelation::AffineSphere),
        grid: Grid::square(c(0.2, 0.1), 1.2, 9),
        closed_form: Some(ClosedForm::Monomial {
            a1: [a1.re, a1.im],
            a2: [a2.re, a2.im],
            m,
            n,
        }),
    }
}

/// f_i = Σ_{k≠i} ḡ_k G_{ki} with G_{ij} = g_i∂g_j − g_j∂g_i, returned as
/// (f₁/f₃, f₂/f₃).
pub fn wronskian_fields(g: [&Expr; 3]) -> Result<[Expr; 2], SolutionError> {
    for (k, e) in g.iter().enumerate() {
        if e.depends_on(Var::XiBar) {
            return Err(SolutionError::NotHolomorphic { index: k + 1 });
        }
    }
    let dg: Vec<Expr> = g.iter().map(|e| differentiate(e, Var::Xi)).collect();
    let gb: Vec<Expr> = g.iter().map(|e| conjugate_expression(e)).collect();
    let wr = |i: usize, j: usize| Expr::sub(&Expr::mul(g[i], &dg[j]), &Expr::mul(g[j], &dg[i]));
    let f = |i: usize| {
        (0..3)
            .filter(|&k| k != i)
            .map(|k| Expr::mul(&gb[k], &wr(k, i)))
            .reduce(|a, b| Expr::add(&a, &b))
            .expect("two terms")
    };
    let f3 = f(2);
    let probes = [c(0.31, 0.17), c(-0.53, 0.41), c(0.77, -0.62)];
    let vanishes = probes
        .iter()
        .all(|&z| evaluate(&f3, &EvalPoint::new(z)).map(|v| v.norm() < 1e-300).unwrap_or(false));
    if f3.is_zero() || vanishes {
        return Err(SolutionError::DegenerateWronskian);
    }
    Ok([Expr::div(&f(0), &f3), Expr::div(&f(1), &f3)])
}

pub fn wronskian_mixed(name: &str, g: [&str; 3]) -> Result<CatalogEntry, SolutionError> {
    let e = [parse(g[0])?, parse(g[1])?, parse(g[2])?];
    let [w1, w2] = wronskian_fields([&e[0], &e[1], &e[2]])?;
    Ok(CatalogEntry {
        name: name.to_string(),
        n: 3,
        w: vec![w1.to_string(), w2.to_string()],
        params: BTreeMap::new(),
        singularities: Vec::new(),
        classification: Classification::Mixed,
        curvature: None,
        relation: None,
        grid: Grid::square(c(0.2, 0.1), 0.8, 7),
        closed_form: None,
    })
}

/// The scaling-invariant family w₁ = F/F̄, w_{j+1} = (c_j/c̄_j) F^{e^{iψ}}/F̄^{e^{−iψ}}
/// with ψ = sign·π/3 + 2πm. It solves the equations of motion for N = 2, 3.
pub fn nonsplitting_family(n: usize, f: &str, cs: &[C], sign: f64, m: i64) -> Result<CatalogEntry, SolutionError> {
    if !(2..=8).contains(&n) {
        return Err(SolutionError::UnsupportedN { n, min: 2, max: 8 });
    }
    if cs.len() != n - 2 {
        return Err(SolutionError::ConstantCount {
            count: cs.len(),
            expected: n - 2,
        });
    }
    let fe = parse(f)?;
    let fb = conjugate_expression(&fe);
    let psi = sign.signum() * PI / 3.0 + 2.0 * PI * m as f64;
    let e = C::from_polar(1.0, psi);
    let mut w = vec![format!("({fe})/({fb})")];
    for cj in cs {
        let ratio = cj / cj.conj();
        w.push(format!(
            "{}*({fe})^{}/({fb})^{}",
            fmt_complex(ratio),
            fmt_complex(e),
            fmt_complex(e.conj())
        ));
    }
    Ok(CatalogEntry {
        name: format!("nonsplitting-{n}"),
        n,
        w,
        params: BTreeMap::new(),
        singularities: vec![[0.0, 0.0]],
        classification: if n == 2 { Classification::Mixed } else { Classification::NonSplitting },
        curvature: (n >= 3).then_some(0.0),
        relation: (n == 3).then_some(SurfaceRelation::NonSplitting),
        grid: Grid::square(c(1.5, 0.3), 0.8, 7),
        closed_form: Some(ClosedForm::NonSplitting {
            n,
            f: f.to_string(),
            c: cs.iter().map(|z| [z.re, z.im]).collect(),
            psi,
        }),
    })
}

/// w_k = exp(a_k ln F − ā_k ln F̄) with a_k = (ω^k − 1)/(ω − 1), ω = e^{2πi/N}.
/// Each w_k has unit modulus and the family solves the equations of motion
/// for every N; for N = 3 it is the non-splitting solution with c = 1.
pub fn polygon_family(n: usize, f: &str) -> Result<CatalogEntry, SolutionError> {
    if !(2..=8).contains(&n) {
        return Err(SolutionError::UnsupportedN { n, min: 2, max: 8 });
    }
    let fe = parse(f)?;
    let fb = conjugate_expression(&fe);
    let omega = C::from_polar(1.0, 2.0 * PI / n as f64);
    let w = (1..n)
        .map(|k| {
            let a = (omega.powi(k as i32) - 1.0) / (omega - 1.0);
            format!("exp({}*ln({fe})-{}*ln({fb}))", fmt_complex(a), fmt_complex(a.conj()))
        })
        .collect();
    Ok(CatalogEntry {
        name: format!("polygon-{n}"),
        n,
        w,
        params: BTreeMap::new(),
        singularities: vec![[0.0, 0.0]],
        classification: if n == 2 { Classification::Mixed } else { Classification::NonSplitting },
        curvature: (n >= 3).then_some(0.0),
        relation: None,
        grid: Grid::square(c(1.5, 0.3), 0.8, 7),
        closed_form: None,
    })
}

fn soliton_entry() -> CatalogEntry {
    CatalogEntry {
        name: "soliton".into(),
        n: 3,
        w: vec![
            "tanh((xi-xibar)/2)".into(),
            "-(tanh(xi)+tanh(xibar))/(sech(xi)+sech(xibar))".into(),
        ],
        params: BTreeMap::new(),
        singularities: vec![[0.0, PI / 2.0], [0.0, -PI / 2.0]],
        classification: Classification::Mixed,
        curvature: Some(1.0),
        relation: Some(SurfaceRelation::Soliton),
        grid: Grid::square(c(0.0, 0.0), 1.2, 9),
        closed_form: Some(ClosedForm::Soliton),
    }
}

fn holomorphic_cp1(name: &str, w: &str, curvature: Option<f64>) -> CatalogEntry {
    CatalogEntry {
        name: name.into(),
        n: 2,
        w: vec![w.into()],
        params: BTreeMap::new(),
        singularities: Vec::new(),
        classification: Classification::Holomorphic,
        curvature,
        relation: Some(SurfaceRelation::Sphere),
        grid: Grid::square(c(0.2, 0.1), 1.2, 9),
        closed_form: None,
    }
}

/// A named set of validated entries.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    #[serde(default, rename = "entry")]
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    /// The families above at representative parameters. Built without
    /// validation; `verify` re-checks every entry.
    pub fn builtin() -> Catalog {
        let mut entries = vec![
            holomorphic_cp1("cp1-identity", "xi", Some(4.0)),
            holomorphic_cp1("cp1-square", "xi^2", None),
        ];
        let mut special = monomial_family(c(1.0, 0.0), c(0.5, 0.0), 1.0, 2.0);
        special.name = "cp2-special".into();
        special.curvature = Some(2.0);
        entries.push(special);
        let mut squared = monomial_family(c(2f64.sqrt(), 0.0), c(1.0, 0.0), 2.0, 4.0);
        squared.name = "cp2-special-squared".into();
        squared.curvature = Some(2.0);
        squared.singularities = vec![[0.0, 0.0]];
        entries.push(squared);
        entries.push(monomial_family(c(1.0, 0.0), c(1.0, 0.0), 1.0, 3.0));
        let mut reduced = monomial_family(c(1.0, 0.0), c(0.0, 0.0), 1.0, 2.0);
        reduced.name = "cp2-reduced".into();
        reduced.curvature = Some(4.0);
        entries.push(reduced);
        entries.push(soliton_entry());
        let mut poly = wronskian_mixed("wronskian-polynomial", ["1", "xi", "xi^2"]).expect("builtin");
        poly.singularities = vec![[0.0, 0.0]];
        entries.push(poly);
        let mut tangent = CatalogEntry {
            name: "real-tangent".into(),
            n: 2,
            w: vec!["sin(xi+xibar)/cos(xi+xibar)".into()],
            params: BTreeMap::new(),
            singularities: Vec::new(),
            classification: Classification::Mixed,
            curvature: None,
            relation: None,
            grid: Grid::square(c(0.1, 0.0), 0.3, 5),
            closed_form: None,
        };
        tangent.grid.resolution = 5;
        entries.push(tangent);
        entries.push(nonsplitting_family(2, "xi", &[], 1.0, 0).expect("builtin"));
        entries.push(nonsplitting_family(3, "xi", &[c(1.3, 0.4)], 1.0, 0).expect("builtin"));
        entries.push(polygon_family(4, "xi").expect("builtin"));
        entries.push(polygon_family(5, "xi").expect("builtin"));
        Catalog { entries }
    }

    pub fn get(&self, name: &str) -> Result<&CatalogEntry, SolutionError> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| SolutionError::Unknown(name.to_string()))
    }

    /// Adds an entry after validating it.
    pub fn register(&mut self, entry: CatalogEntry) -> Result<Validation, SolutionError> {
        if self.entries.iter().any(|e| e.name == entry.name) {
            return Err(SolutionError::Duplicate(entry.name));
        }
        let v = entry.validate()?;
        if let Some(reason) = v.failure() {
            return Err(SolutionError::Invalid {
                name: entry.name,
                reason,
            });
        }
        self.entries.push(entry);
        Ok(v)
    }

    /// Validates every entry, in parallel.
    pub fn verify(&self) -> Vec<(String, Result<Validation, SolutionError>)> {
        self.entries
            .par_iter()
            .map(|e| (e.name.clone(), e.validate()))
            .collect()
    }

    pub fn to_text(&self) -> Result<String, SolutionError> {
        toml::to_string(self).map_err(|e| SolutionError::Format(e.to_string()))
    }

    pub fn from_text(text: &str) -> Result<Catalog, SolutionError> {
        toml::from_str(text).map_err(|e| SolutionError::Format(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersion::{immerse_by_path, PathSpec};

    #[test]
    fn builtin_entries_validate() {
        for (name, v) in Catalog::builtin().verify() {
            let v = v.unwrap();
            assert!(v.passed(), "{name}: {:?}", v.failure());
        }
    }

    #[test]
    fn wronskian_of_sech_tanh_is_the_soliton() {
        let built = wronskian_mixed("w", ["1", "sech(xi)", "tanh(xi)"]).unwrap().solution().unwrap();
        let printed = soliton_entry().solution().unwrap();
        for z in [c(0.3, 0.4), c(-0.7, 0.2)] {
            let (a, b) = (built.fields_at(z, 0).unwrap(), printed.fields_at(z, 0).unwrap());
            for k in 0..2 {
                assert!((a.w[k].value() - b.w[k].value()).norm() < 1e-14);
            }
        }
        assert!(matches!(
            wronskian_mixed("w", ["1", "xibar", "xi"]),
            Err(SolutionError::NotHolomorphic { index: 2 })
        ));
        assert!(matches!(wronskian_mixed("w", ["1", "1", "1"]), Err(SolutionError::DegenerateWronskian)));
    }

    #[test]
    fn paper_family_fails_equations_beyond_three() {
        let e = nonsplitting_family(4, "xi", &[c(1.0, 0.0), c(0.5, 0.2)], 1.0, 0).unwrap();
        let v = e.validate().unwrap();
        assert!(v.el_residual > 1e-2);
        assert!(v.closed_form_error.unwrap() < 1e-12);
        assert!(v.curvature_error.unwrap() < 1e-8);
    }

    #[test]
    fn monomial_oracles() {
        let e = monomial_family(c(0.7, 0.2), c(-0.4, 0.9), 1.0, 3.0);
        let s = e.solution().unwrap();
        let cf = e.closed_form.as_ref().unwrap();
        for z in [c(0.4, 0.3), c(-0.9, 0.5)] {
            let k = gaussian_curvature_at(&s, z).unwrap();
            assert!((k - cf.curvature(z).unwrap()).abs() < 1e-9, "{k} {:?}", cf.curvature(z));
        }
    }

    #[test]
    fn nonsplitting_metric_for_exp() {
        let e = nonsplitting_family(5, "exp(xi)", &[c(1.0, 0.0), c(0.3, 0.7), c(-1.0, 0.5)], 1.0, 0).unwrap();
        let s = e.solution().unwrap();
        let cf = e.closed_form.as_ref().unwrap();
        let z = c(0.4, 0.2);
        let m = metric_at(&s, z).unwrap();
        let (j, q) = cf.metric(z).unwrap();
        assert!((m.j() - j).norm() < 1e-10 && (m.q() - q).abs() < 1e-10);
        assert!((m.det - cf.determinant(z).unwrap()).abs() < 1e-10);
        assert!((q - 7.0 / 25.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_coordinates_follow_the_surface() {
        let cat = Catalog::builtin();
        for name in ["nonsplitting-3", "soliton"] {
            let e = cat.get(name).unwrap();
            let s = e.solution().unwrap();
            let anchor = e.anchor().unwrap().unwrap();
            let cf = e.closed_form.as_ref().unwrap();
            let x0 = crate::basis::BasisKind::GellMann.reconstruct(&anchor.coordinates);
            let target = anchor.xi + c(0.35, -0.25);
            let path = PathSpec::straight(anchor.xi, target).with_tol(1e-11);
            let x = immerse_by_path(&s, &path, Some(&x0)).unwrap().field;
            let got = x.coordinates(crate::basis::BasisKind::GellMann).unwrap();
            let want = cf.coordinates(target).unwrap().unwrap();
            for k in 0..8 {
                assert!((got[k] - want[k]).norm() < 1e-8, "{name} X{}: {} vs {}", k + 1, got[k], want[k]);
            }
            let rel = e.relation_report(3, 1e-10).unwrap().unwrap();
            assert!(rel.max_residual < 1e-8, "{name}: {rel:?}");
        }
    }

    #[test]
    fn nonsplitting_metric_is_flat_in_x3_x4() {
        // I = (3/2)(dX₃² + dX₄²): the dξ² and dξdξ̄ coefficients of the
        // pullback are (3/2)Σ(∂X_k)² and (3/2)·2Σ|∂X_k|², against −J and 2q.
        let e = Catalog::builtin().get("nonsplitting-3").unwrap().clone();
        let s = e.solution().unwrap();
        let r3 = 3f64.sqrt();
        for z in [c(1.2, 0.5), c(1.9, -0.3), c(0.9, 0.1)] {
            let dlog = 1.0 / z;
            let dx3 = c(1.0, -r3) * dlog / 6.0;
            let dx4 = -c(r3, 1.0) * dlog / 6.0;
            let m = metric_at(&s, z).unwrap();
            assert!((1.5 * (dx3 * dx3 + dx4 * dx4) + m.j()).norm() < 1e-13);
            assert!((3.0 * (dx3.norm_sqr() + dx4.norm_sqr()) - 2.0 * m.q()).abs() < 1e-13);
        }
    }

    #[test]
    fn catalog_text_round_trip() {
        let cat = Catalog::builtin();
        let text = cat.to_text().unwrap();
        assert_eq!(Catalog::from_text(&text).unwrap(), cat);
        let mut fresh = Catalog::default();
        fresh.register(cat.get("soliton").unwrap().clone()).unwrap();
        assert!(matches!(fresh.register(cat.get("soliton").unwrap().clone()), Err(SolutionError::Duplicate(_))));
        let mut bad = cat.get("cp2-special").unwrap().clone();
        bad.name = "bad".into();
        bad.w[1] = "xi^2/2 + xibar".into();
        bad.closed_form = None;
        assert!(matches!(fresh.register(bad), Err(SolutionError::Invalid { .. })));
    }
}
