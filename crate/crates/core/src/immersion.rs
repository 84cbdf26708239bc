//! The immersion X(ξ, ξ̄) ∈ su(N): closed form for (anti-)holomorphic
//! solutions, path integration of dX = i(K†dξ + K dξ̄) in general, and real
//! coordinates in the Pauli and Gell-Mann bases.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basis::BasisKind;
use crate::jet::Jet;
use crate::matrix::{anti_hermitian_defect, c, identity, outer, Mat, C};
use crate::model::{
    dc_residual_from_fields, el_residual_from_fields, holomorphy_check, AffineSolution, ModelError,
    SolutionClass,
};
use crate::quadrature::{integrate_adaptive, AdaptiveFailure, AdaptiveOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ImmersionError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("closed-form immersion needs a holomorphic or anti-holomorphic solution, found a mixed one")]
    NotHolomorphic,
    #[error("path has no waypoints")]
    EmptyPath,
    #[error("segment {segment} passes within {distance:e} of the excluded point {point}")]
    Singularity { segment: usize, point: C, distance: f64 },
    #[error("quadrature did not converge on segment {segment} for t in [{lo}, {hi}] (estimate {estimate:e})")]
    NonConvergent {
        segment: usize,
        lo: f64,
        hi: f64,
        estimate: f64,
    },
    #[error("differential constraint violated at xi = {xi}: residual {residual:e}")]
    ConstraintViolated { xi: C, residual: f64 },
    #[error("the {basis:?} basis needs N = {expected}, got N = {n}")]
    UnsupportedBasis {
        basis: BasisKind,
        expected: usize,
        n: usize,
    },
    #[error("relation {relation:?} does not apply: {reason}")]
    NotApplicable {
        relation: SurfaceRelation,
        reason: String,
    },
}

/// A point of the surface. `origin` is subtracted before taking coordinates;
/// for the closed form it is the value at w = 0, so the coordinates carry
/// no integration constants.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmersionField {
    pub x: Mat,
    pub base: Option<C>,
    pub origin: Mat,
}

impl ImmersionField {
    pub fn relative(&self) -> Mat {
        &self.x - &self.origin
    }

    pub fn anti_hermitian_defect(&self) -> f64 {
        anti_hermitian_defect(&self.x)
    }

    /// Coordinates as complex numbers; real up to rounding for literal
    /// solutions.
    pub fn coordinates(&self, basis: BasisKind) -> Result<Vec<C>, ImmersionError> {
        let n = self.x.nrows();
        if n != basis.dim() {
            return Err(ImmersionError::UnsupportedBasis {
                basis,
                expected: basis.dim(),
                n,
            });
        }
        Ok(basis.coefficients(&self.relative()))
    }
}

pub fn real_coordinates(x: &ImmersionField, basis: BasisKind) -> Result<Vec<f64>, ImmersionError> {
    Ok(x.coordinates(basis)?.into_iter().map(|z| z.re).collect())
}

/// diag(0, 1, …, 1), the projector at w = 0.
pub fn vacuum_projector(n: usize) -> Mat {
    let mut p = identity(n);
    p[(0, 0)] = c(0.0, 0.0);
    p
}

/// X = −iP for holomorphic solutions and X = +iP for anti-holomorphic ones.
pub fn immerse_holomorphic(s: &AffineSolution, xi: C) -> Result<ImmersionField, ImmersionError> {
    let sign = match holomorphy_check(s, &[xi])?.class {
        SolutionClass::Holomorphic => -1.0,
        SolutionClass::AntiHolomorphic => 1.0,
        SolutionClass::Mixed => return Err(ImmersionError::NotHolomorphic),
    };
    let lf = s.fields_at(xi, 0)?;
    let factor = c(0.0, sign);
    Ok(ImmersionField {
        x: lf.projector().value() * factor,
        base: None,
        origin: vacuum_projector(lf.n()) * factor,
    })
}

/// Polyline from the base point to the end point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub waypoints: Vec<[f64; 2]>,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default = "default_depth")]
    pub max_depth: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub exclusions: Vec<[f64; 2]>,
    #[serde(default = "default_exclusion_radius")]
    pub exclusion_radius: f64,
}

fn default_order() -> usize {
    15
}
fn default_depth() -> usize {
    12
}
fn default_tol() -> f64 {
    1e-10
}
fn default_exclusion_radius() -> f64 {
    1e-6
}

impl PathSpec {
    pub fn polyline(points: &[C]) -> PathSpec {
        PathSpec {
            waypoints: points.iter().map(|z| [z.re, z.im]).collect(),
            order: default_order(),
            max_depth: default_depth(),
            tol: default_tol(),
            exclusions: Vec::new(),
            exclusion_radius: default_exclusion_radius(),
        }
    }

    pub fn straight(from: C, to: C) -> PathSpec {
        PathSpec::polyline(&[from, to])
    }

    pub fn with_tol(mut self, tol: f64) -> PathSpec {
        self.tol = tol;
        self
    }

    pub fn excluding(mut self, points: &[C], radius: f64) -> PathSpec {
        self.exclusions.extend(points.iter().map(|z| [z.re, z.im]));
        self.exclusion_radius = radius;
        self
    }

    pub fn points(&self) -> Vec<C> {
        self.waypoints.iter().map(|p| c(p[0], p[1])).collect()
    }

    pub fn start(&self) -> Option<C> {
        self.points().first().copied()
    }

    pub fn end(&self) -> Option<C> {
        self.points().last().copied()
    }

    fn check(&self) -> Result<Vec<C>, ImmersionError> {
        let pts = self.points();
        if pts.is_empty() {
            return Err(ImmersionError::EmptyPath);
        }
        for (k, seg) in pts.windows(2).enumerate() {
            for e in &self.exclusions {
                let e = c(e[0], e[1]);
                let d = distance_to_segment(e, seg[0], seg[1]);
                if d < self.exclusion_radius {
                    return Err(ImmersionError::Singularity {
                        segment: k,
                        point: e,
                        distance: d,
                    });
                }
            }
        }
        if pts.len() == 1 {
            for e in &self.exclusions {
                let e = c(e[0], e[1]);
                let d = (pts[0] - e).norm();
                if d < self.exclusion_radius {
                    return Err(ImmersionError::Singularity {
                        segment: 0,
                        point: e,
                        distance: d,
                    });
                }
            }
        }
        Ok(pts)
    }

    fn options(&self, segments: usize) -> AdaptiveOptions {
        AdaptiveOptions {
            order: self.order,
            max_depth: self.max_depth,
            tol: self.tol / segments.max(1) as f64,
        }
    }
}

fn distance_to_segment(p: C, a: C, b: C) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathImmersion {
    pub field: ImmersionField,
    /// Sum of the per-interval error estimates.
    pub error_estimate: f64,
    pub evaluations: usize,
    /// Largest equation-of-motion residual at the waypoints and segment
    /// midpoints; a closed 1-form needs it to vanish.
    pub max_el_residual: f64,
}

/// Integrates the matrix 1-form `form(ξ, dξ)` along the path.
fn integrate_form<F>(
    path: &PathSpec,
    form: F,
) -> Result<(Mat, f64, usize), ImmersionError>
where
    F: Fn(C, C) -> Result<Mat, ImmersionError>,
{
    let pts = path.check()?;
    let segments = pts.len().saturating_sub(1);
    let opts = path.options(segments);
    let mut total: Option<Mat> = None;
    let mut err = 0.0;
    let mut evals = 0;
    for (k, seg) in pts.windows(2).enumerate() {
        let (a, b) = (seg[0], seg[1]);
        let dz = b - a;
        let r = integrate_adaptive(|t| form(a + dz * t, dz), 0.0, 1.0, &opts).map_err(|e| match e {
            AdaptiveFailure::Integrand(e) => e,
            AdaptiveFailure::NonConvergent { lo, hi, estimate } => ImmersionError::NonConvergent {
                segment: k,
                lo,
                hi,
                estimate,
            },
        })?;
        err += r.error;
        evals += r.evaluations;
        total = Some(match total {
            Some(m) => m + r.value,
            None => r.value,
        });
    }
    let value = match total {
        Some(m) => m,
        None => {
            let n = form(pts[0], c(0.0, 0.0))?.nrows();
            Mat::zeros(n, n)
        }
    };
    Ok((value, err, evals))
}

/// X(ξ) = anchor + i∫(K†dξ + K dξ̄) along `path`.
pub fn immerse_by_path(
    s: &AffineSolution,
    path: &PathSpec,
    anchor: Option<&Mat>,
) -> Result<PathImmersion, ImmersionError> {
    let form = |z: C, dz: C| -> Result<Mat, ImmersionError> {
        let lf = s.fields_at(z, 1)?;
        let (k, kd) = lf.k_pair();
        Ok((kd.value() * dz + k.value() * dz.conj()) * c(0.0, 1.0))
    };
    let (integral, error_estimate, evaluations) = integrate_form(path, form)?;
    let n = integral.nrows();
    let x = match anchor {
        Some(a) => a + integral,
        None => integral,
    };
    let pts = path.points();
    let mut probes = pts.clone();
    probes.extend(pts.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    let mut max_el: f64 = 0.0;
    for z in probes {
        max_el = max_el.max(el_residual_from_fields(&s.fields_at(z, 2)?).max());
    }
    Ok(PathImmersion {
        field: ImmersionField {
            x,
            base: path.start(),
            origin: Mat::zeros(n, n),
        },
        error_estimate,
        evaluations,
        max_el_residual: max_el,
    })
}

/// The two closed forms available under the differential constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct DcImmersion {
    /// i∫(L₁†dξ + L₁dξ̄).
    pub l_form: Mat,
    /// i∫(M₁†dξ + M₁dξ̄).
    pub m_form: Mat,
    /// i(P(ξ) − P(ξ₀)): the integrated total divergence separating the two.
    pub total_divergence: Mat,
    pub error_estimate: f64,
    /// Largest constraint residual met at a quadrature node.
    pub max_dc_residual: f64,
}

impl DcImmersion {
    /// ‖(M-form − L-form) − i(P − P₀)‖.
    pub fn divergence_defect(&self) -> f64 {
        crate::matrix::frob(&(&self.m_form - &self.l_form - &self.total_divergence))
    }
}

/// Integrates the L₁ and M₁ forms. With g = f̄ (column), the row f and
/// Π = g fᵀ/A:
/// L₁ = (∂̄g fᵀ − (f·∂̄g) Π)/A,  M₁ = −(g ∂̄fᵀ − (f·∂̄g) Π)/A,
/// and their daggers with ∂ in place of ∂̄ and the roles of f and g swapped.
pub fn immerse_dc_simplified(
    s: &AffineSolution,
    path: &PathSpec,
    dc_tol: f64,
) -> Result<DcImmersion, ImmersionError> {
    let max_dc = std::sync::Mutex::new(0.0f64);
    let forms = |z: C| -> Result<(Mat, Mat, Mat, Mat), ImmersionError> {
        let lf = s.fields_at(z, 1)?;
        let r = dc_residual_from_fields(&lf);
        {
            let mut m = max_dc.lock().expect("poisoned");
            *m = m.max(r);
        }
        if r > dc_tol {
            return Err(ImmersionError::ConstraintViolated { xi: z, residual: r });
        }
        let f = lf.f();
        let g = lf.fbar();
        let val = |v: &[Jet]| v.iter().map(|j| j.value()).collect::<Vec<_>>();
        let d = |v: &[Jet]| v.iter().map(|j| j.get(1, 0)).collect::<Vec<_>>();
        let db = |v: &[Jet]| v.iter().map(|j| j.get(0, 1)).collect::<Vec<_>>();
        let dot = |u: &[C], v: &[C]| u.iter().zip(v).map(|(x, y)| x * y).sum::<C>();
        let (fv, gv) = (val(&f), val(&g));
        let a = dot(&fv, &gv);
        let pi = outer(&gv, &fv) / a;
        let (df, dbf, dg, dbg) = (d(&f), db(&f), d(&g), db(&g));
        let l = (outer(&dbg, &fv) - &pi * dot(&fv, &dbg)) / a;
        let ld = (outer(&gv, &df) - &pi * dot(&gv, &df)) / a;
        let m = -(outer(&gv, &dbf) - &pi * dot(&fv, &dbg)) / a;
        let md = -(outer(&dg, &fv) - &pi * dot(&gv, &df)) / a;
        Ok((l, ld, m, md))
    };
    let i = c(0.0, 1.0);
    let (l_form, e1, _) = integrate_form(path, |z, dz| {
        let (l, ld, _, _) = forms(z)?;
        Ok((ld * dz + l * dz.conj()) * i)
    })?;
    let (m_form, e2, _) = integrate_form(path, |z, dz| {
        let (_, _, m, md) = forms(z)?;
        Ok((md * dz + m * dz.conj()) * i)
    })?;
    let pts = path.points();
    let p_end = s.fields_at(*pts.last().expect("checked"), 0)?.projector().value().clone();
    let p_start = s.fields_at(pts[0], 0)?.projector().value().clone();
    let max_dc_residual = *max_dc.lock().expect("poisoned");
    Ok(DcImmersion {
        l_form,
        m_form,
        total_divergence: (p_end - p_start) * i,
        error_estimate: e1 + e2,
        max_dc_residual,
    })
}

/// Algebraic relations satisfied by the coordinates of particular surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceRelation {
    /// X₁² + X₂² + (X₃ + ½)² = ¼ (holomorphic, N = 2).
    Sphere,
    /// 4X₁² + 4X₂² + 4X₃² + (2/√3)X₄ + X₅² + X₆² + X₇² + X₈² = 0
    /// (holomorphic, N = 3).
    AffineSphere,
    /// X₁² + X₆² + X₇² = 1 with the other coordinates zero.
    Soliton,
    /// X₁² + X₂² = X₅² + X₇² = X₆² + X₈² = 1/27.
    NonSplitting,
}

impl SurfaceRelation {
    pub fn basis(self) -> BasisKind {
        match self {
            SurfaceRelation::Sphere => BasisKind::Pauli,
            _ => BasisKind::GellMann,
        }
    }

    /// Residual of the relation at one coordinate vector (1-based X_k in
    /// slot k − 1).
    pub fn residual(self, x: &[C]) -> f64 {
        let sq = |k: usize| x[k - 1] * x[k - 1];
        match self {
            SurfaceRelation::Sphere => {
                let h = x[2] + 0.5;
                (sq(1) + sq(2) + h * h - 0.25).norm()
            }
            SurfaceRelation::AffineSphere => {
                let v = (sq(1) + sq(2) + sq(3)) * 4.0
                    + x[3] * (2.0 / 3f64.sqrt())
                    + sq(5)
                    + sq(6)
                    + sq(7)
                    + sq(8);
                v.norm()
            }
            SurfaceRelation::Soliton => {
                let main = (sq(1) + sq(6) + sq(7) - 1.0).norm();
                [2, 3, 4, 5, 8].iter().map(|&k| x[k - 1].norm()).fold(main, f64::max)
            }
            SurfaceRelation::NonSplitting => {
                let t = 1.0 / 27.0;
                [(1, 2), (5, 7), (6, 8)]
                    .iter()
                    .map(|&(a, b)| (sq(a) + sq(b) - t).norm())
                    .fold(0.0, f64::max)
            }
        }
    }

    fn needs_closed_form(self) -> bool {
        matches!(self, SurfaceRelation::Sphere | SurfaceRelation::AffineSphere)
    }
}

/// Where the coordinates of a non-holomorphic surface are pinned down.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateAnchor {
    pub xi: C,
    /// Coordinates at `xi` in the relation's basis.
    pub coordinates: Vec<C>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationReport {
    pub relation: SurfaceRelation,
    pub max_residual: f64,
    pub worst_point: Option<C>,
    pub samples: usize,
}

/// Largest residual of `relation` over `points`. Holomorphic relations use
/// the closed form; the others integrate straight segments from the anchor.
pub fn surface_relation_residuals(
    s: &AffineSolution,
    relation: SurfaceRelation,
    points: &[C],
    anchor: Option<&CoordinateAnchor>,
    path_tol: f64,
) -> Result<RelationReport, ImmersionError> {
    let basis = relation.basis();
    if s.n() != basis.dim() {
        return Err(ImmersionError::NotApplicable {
            relation,
            reason: format!("needs N = {}, solution has N = {}", basis.dim(), s.n()),
        });
    }
    let residuals: Vec<Result<f64, ImmersionError>> = if relation.needs_closed_form() {
        if holomorphy_check(s, points)?.class != SolutionClass::Holomorphic {
            return Err(ImmersionError::NotApplicable {
                relation,
                reason: "the solution is not holomorphic".into(),
            });
        }
        points
            .par_iter()
            .map(|&z| Ok(relation.residual(&immerse_holomorphic(s, z)?.coordinates(basis)?)))
            .collect()
    } else {
        let anchor = anchor.ok_or_else(|| ImmersionError::NotApplicable {
            relation,
            reason: "an anchor point with known coordinates is required".into(),
        })?;
        let x0 = basis.reconstruct(&anchor.coordinates);
        points
            .par_iter()
            .map(|&z| {
                let path = PathSpec::straight(anchor.xi, z).with_tol(path_tol);
                let r = immerse_by_path(s, &path, Some(&x0))?;
                Ok(relation.residual(&r.field.coordinates(basis)?))
            })
            .collect()
    };
    let mut report = RelationReport {
        relation,
        max_residual: 0.0,
        worst_point: None,
        samples: points.len(),
    };
    for (z, r) in points.iter().zip(residuals) {
        let r = r?;
        if report.worst_point.is_none() || r > report.max_residual {
            report.max_residual = r;
            report.worst_point = Some(*z);
        }
    }
    Ok(report)
}
