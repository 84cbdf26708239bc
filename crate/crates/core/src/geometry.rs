//! Induced metric, curvatures, second fundamental form, and the Willmore
//! and topological-charge integrals of the immersed surface.

use rayon::prelude::*;
use thiserror::Error;

use crate::grid::Grid;
use crate::jet::Jet;
use crate::matrix::{c, frob, pairing, Mat, C};
use crate::model::{
    holomorphy_check, invariant_towers, AffineSolution, ModelError, SolutionClass,
};
use crate::quadrature::{integrate_rectangle, refine, GaussLegendre, Refinement};

/// |J| below this multiple of (1 + q) selects the conformal formula.
pub const CONFORMAL_TOL: f64 = 1e-12;
/// Smallest q accepted as a non-degenerate metric.
pub const DEGENERATE_Q: f64 = 1e-10;
/// Default constant in dξdξ̄ = c dξ¹dξ².
pub const DEFAULT_MEASURE: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("degenerate metric at xi = {xi}: q = {q:e}")]
    DegenerateMetric { xi: C, q: f64 },
    #[error("degenerate metric at xi = {xi}: |J|^2 - q^2 = {det:e}")]
    DegenerateDeterminant { xi: C, det: f64 },
    #[error("sample at xi = {xi} is not conformal (|J| = {j:e})")]
    NotConformal { xi: C, j: f64 },
    #[error("{operation} needs a holomorphic solution")]
    NotHolomorphic { operation: &'static str },
    #[error("non-finite integrand at xi = {xi}")]
    NonFinite { xi: C },
}

/// Components of the induced metric in (ξ, ξ̄).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSample {
    /// g_ξξ = −J.
    pub g_xixi: C,
    /// g_ξ̄ξ̄ = −J̄.
    pub g_xibarxibar: C,
    /// g_ξξ̄ = q.
    pub g_xixibar: f64,
    /// |J|² − q².
    pub det: f64,
}

impl MetricSample {
    pub fn j(&self) -> C {
        -self.g_xixi
    }

    pub fn q(&self) -> f64 {
        self.g_xixibar
    }

    /// (E, F, G) of E dξ¹² + 2F dξ¹dξ² + G dξ²².
    pub fn real_form(&self) -> [f64; 3] {
        let (q, j) = (self.q(), self.j());
        [2.0 * q - 2.0 * j.re, 2.0 * j.im, 2.0 * q + 2.0 * j.re]
    }

    pub fn is_conformal(&self) -> bool {
        self.j().norm() < CONFORMAL_TOL * (1.0 + self.q().abs())
    }
}

pub fn metric_at(s: &AffineSolution, xi: C) -> Result<MetricSample, GeometryError> {
    let lf = s.fields_at(xi, 1)?;
    let (k, kd) = lf.k_pair();
    let (q, j, jbar) = invariant_towers(&k, &kd);
    let (q, j, jbar) = (q.value(), j.value(), jbar.value());
    Ok(MetricSample {
        g_xixi: -j,
        g_xibarxibar: -jbar,
        g_xixibar: q.re,
        det: (j * jbar - q * q).re,
    })
}

/// Towers of q, J and J̄ to second order.
fn invariant_jets(s: &AffineSolution, xi: C) -> Result<(Jet, Jet, Jet), GeometryError> {
    let lf = s.fields_at(xi, 3)?;
    let (k, kd) = lf.k_pair();
    Ok(invariant_towers(&k, &kd))
}

fn curvature_from_jets(xi: C, q: &Jet, j: &Jet, jbar: &Jet) -> Result<f64, GeometryError> {
    let q0 = q.value();
    if q0.re <= DEGENERATE_Q {
        return Err(GeometryError::DegenerateMetric { xi, q: q0.re });
    }
    let j0 = j.value();
    if j0.norm() < CONFORMAL_TOL * (1.0 + q0.norm()) {
        // −q⁻¹ ∂∂̄ ln q
        let k = -(q0 * q.get(1, 1) - q.get(1, 0) * q.get(0, 1)) / (q0 * q0 * q0);
        return Ok(k.re);
    }
    let g = *j * *jbar - *q * *q;
    let g0 = g.value();
    if g0.norm() <= DEGENERATE_Q * q0.norm_sqr() {
        return Err(GeometryError::DegenerateDeterminant { xi, det: g0.re });
    }
    // ½ g^{-1/2} ∂̄[q g^{-1/2} ∂ ln(−q²/J)] expanded so no square root of g
    // is taken.
    let l = q.get(1, 0) * 2.0 / q0 - j.get(1, 0) / j0;
    let dbar_l = (q.get(1, 1) * q0 - q.get(1, 0) * q.get(0, 1)) * 2.0 / (q0 * q0)
        - (j.get(1, 1) * j0 - j.get(1, 0) * j.get(0, 1)) / (j0 * j0);
    let k = ((q.get(0, 1) / g0 - q0 * g.get(0, 1) / (g0 * g0 * 2.0)) * l + q0 / g0 * dbar_l) * 0.5;
    Ok(k.re)
}

pub fn gaussian_curvature_at(s: &AffineSolution, xi: C) -> Result<f64, GeometryError> {
    let (q, j, jbar) = invariant_jets(s, xi)?;
    curvature_from_jets(xi, &q, &j, &jbar)
}

/// −q⁻¹ ∂∂̄ ln q with ∂∂̄ = Δ/4 taken from a five-point stencil of ln q.
/// Independent of the jet machinery above beyond first derivatives.
pub fn curvature_fd_oracle(s: &AffineSolution, xi: C) -> Result<f64, GeometryError> {
    let h = 1e-4 * (1.0 + xi.norm());
    let lnq = |z: C| -> Result<f64, GeometryError> { Ok(metric_at(s, z)?.q().ln()) };
    let centre = lnq(xi)?;
    let lap = (lnq(xi + h)? + lnq(xi - h)? + lnq(xi + c(0.0, h))? + lnq(xi - c(0.0, h))? - 4.0 * centre)
        / (h * h);
    Ok(-lap / 4.0 / centre.exp())
}

/// X and its derivatives at a point, all in su(N) (up to the complexified
/// case): ∂X = iK†, ∂̄X = iK, ∂²X = i∂K†, ∂∂̄X = i∂K, ∂̄²X = i∂̄K.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceJet {
    pub d: Mat,
    pub db: Mat,
    pub dd: Mat,
    pub d_db: Mat,
    pub db_db: Mat,
    /// i∂̄K†, equal to `d_db` when the equations of motion hold.
    pub d_db_alt: Mat,
    pub q: Jet,
    pub j: C,
}

pub fn surface_jet(s: &AffineSolution, xi: C) -> Result<SurfaceJet, GeometryError> {
    let lf = s.fields_at(xi, 2)?;
    let (k, kd) = lf.k_pair();
    let (q, j, _) = invariant_towers(&k, &kd);
    let i = c(0.0, 1.0);
    Ok(SurfaceJet {
        d: kd.value() * i,
        db: k.value() * i,
        dd: kd.get(1, 0) * i,
        d_db: k.get(1, 0) * i,
        db_db: k.get(0, 1) * i,
        d_db_alt: kd.get(0, 1) * i,
        q,
        j: j.value(),
    })
}

fn conformal_jet(s: &AffineSolution, xi: C) -> Result<SurfaceJet, GeometryError> {
    let sj = surface_jet(s, xi)?;
    let q0 = sj.q.value();
    if q0.re <= DEGENERATE_Q {
        return Err(GeometryError::DegenerateMetric { xi, q: q0.re });
    }
    if sj.j.norm() >= 1e-9 * (1.0 + q0.norm()) {
        return Err(GeometryError::NotConformal { xi, j: sj.j.norm() });
    }
    Ok(sj)
}

/// H = (2/q) ∂∂̄X on a conformal sample.
pub fn mean_curvature_at(s: &AffineSolution, xi: C) -> Result<Mat, GeometryError> {
    let sj = conformal_jet(s, xi)?;
    Ok(&sj.d_db * (2.0 / sj.q.value()))
}

/// Coefficient matrices of II. `xixibar` is the tensor component ∂∂̄X; the
/// form itself carries it as 2∂∂̄X dξdξ̄, matching I = 2q dξdξ̄.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondFundamentalForm {
    pub xixi: Mat,
    pub xixibar: Mat,
    pub xibarxibar: Mat,
}

impl SecondFundamentalForm {
    pub fn dxi_dxibar_coefficient(&self) -> Mat {
        &self.xixibar * c(2.0, 0.0)
    }
}

pub fn second_fundamental_form_at(
    s: &AffineSolution,
    xi: C,
) -> Result<SecondFundamentalForm, GeometryError> {
    let sj = conformal_jet(s, xi)?;
    let q0 = sj.q.value();
    Ok(SecondFundamentalForm {
        xixi: &sj.dd - &sj.d * (sj.q.get(1, 0) / q0),
        xixibar: sj.d_db.clone(),
        xibarxibar: &sj.db_db - &sj.db * (sj.q.get(0, 1) / q0),
    })
}

/// Everything curvature-related at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSample {
    pub xi: C,
    pub metric: MetricSample,
    pub gaussian: f64,
    /// H on conformal samples.
    pub mean: Option<Mat>,
    /// Γ¹₁₁ = ∂q/q and Γ²₂₂ = ∂̄q/q of the conformal metric.
    pub christoffel: (C, C),
}

impl CurvatureSample {
    pub fn mean_norm(&self) -> Option<f64> {
        self.mean.as_ref().map(frob)
    }
}

pub fn curvature_sample_at(s: &AffineSolution, xi: C) -> Result<CurvatureSample, GeometryError> {
    let metric = metric_at(s, xi)?;
    let (q, j, jbar) = invariant_jets(s, xi)?;
    let gaussian = curvature_from_jets(xi, &q, &j, &jbar)?;
    let q0 = q.value();
    let mean = if metric.is_conformal() {
        Some(mean_curvature_at(s, xi)?)
    } else {
        None
    };
    Ok(CurvatureSample {
        xi,
        metric,
        gaussian,
        mean,
        christoffel: (q.get(1, 0) / q0, q.get(0, 1) / q0),
    })
}

/// Samples over the grid in grid order, in parallel.
pub fn sample_grid(s: &AffineSolution, grid: &Grid) -> Vec<Result<CurvatureSample, GeometryError>> {
    grid.points().par_iter().map(|&z| curvature_sample_at(s, z)).collect()
}

/// (1/q)[∂P, ∂̄P]², the raw matrix under the Willmore integral.
pub fn willmore_integrand_matrix(s: &AffineSolution, xi: C) -> Result<Mat, GeometryError> {
    let lf = s.fields_at(xi, 1)?;
    let p = lf.projector();
    let comm = p.get(1, 0) * p.get(0, 1) - p.get(0, 1) * p.get(1, 0);
    let (k, kd) = lf.k_pair();
    let q = invariant_towers(&k, &kd).0.value();
    if q.re <= DEGENERATE_Q {
        return Err(GeometryError::DegenerateMetric { xi, q: q.re });
    }
    Ok(&comm * &comm / q)
}

/// The integrand scalarized by the pairing −½tr.
pub fn willmore_density(s: &AffineSolution, xi: C) -> Result<C, GeometryError> {
    let m = willmore_integrand_matrix(s, xi)?;
    Ok(-m.trace() * 0.5)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WillmoreReport {
    /// −4i · c · ∫ density dξ¹dξ².
    pub value: C,
    /// ∫ density dξ¹dξ² at the finest level.
    pub integral: C,
    pub refinement: Refinement,
    pub relative_change: f64,
}

/// Square regions, resolution = panels per side at the coarsest of three
/// levels.
pub fn willmore(
    s: &AffineSolution,
    region: &Grid,
    resolution: usize,
    measure: f64,
) -> Result<WillmoreReport, GeometryError> {
    let (cx, cy, hw) = (region.center[0], region.center[1], region.half_width);
    let probes = [
        c(cx, cy),
        c(cx - hw, cy - hw),
        c(cx + hw, cy - hw),
        c(cx - hw, cy + hw),
        c(cx + hw, cy + hw),
    ];
    if holomorphy_check(s, &probes)?.class != SolutionClass::Holomorphic {
        return Err(GeometryError::NotHolomorphic {
            operation: "the Willmore functional",
        });
    }
    let rule = GaussLegendre::new(6);
    let f = |x: f64, y: f64| -> Result<C, GeometryError> {
        let z = c(x, y);
        let v = willmore_density(s, z)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(GeometryError::NonFinite { xi: z });
        }
        Ok(v)
    };
    let refinement = refine(resolution.max(1), 3, |n| {
        integrate_rectangle(f, (cx - hw, cx + hw), (cy - hw, cy + hw), n, &rule)
    })?;
    let integral = refinement.value();
    Ok(WillmoreReport {
        value: c(0.0, -4.0) * measure * integral,
        integral,
        relative_change: refinement.relative_change(),
        refinement,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChargeReport {
    pub charge: f64,
    /// Q at each refinement level.
    pub refinement: Refinement,
    pub relative_change: f64,
    pub warnings: Vec<String>,
}

/// Q = −(c/8π) ∫ q dξ¹dξ² over the sphere: the unit disk in polar
/// coordinates plus the inverted chart ζ = 1/ξ, where the integrand picks up
/// |ζ|⁻⁴.
pub fn topological_charge(
    s: &AffineSolution,
    resolution: usize,
    measure: f64,
) -> Result<ChargeReport, GeometryError> {
    let probes = [c(0.3, 0.2), c(-0.7, 0.4), c(1.5, -0.9)];
    if holomorphy_check(s, &probes)?.class != SolutionClass::Holomorphic {
        return Err(GeometryError::NotHolomorphic {
            operation: "the topological charge",
        });
    }
    let mut warnings = Vec::new();
    if !s.w().iter().all(|e| e.is_rational()) {
        warnings.push("solution is not rational; the sphere integral may not exist".to_string());
    }
    let rule = GaussLegendre::new(8);
    let tau = 2.0 * std::f64::consts::PI;
    let inner = |r: f64, t: f64| -> Result<C, GeometryError> {
        let z = C::from_polar(r, t);
        Ok(c(metric_at(s, z)?.q() * r, 0.0))
    };
    let outer = |r: f64, t: f64| -> Result<C, GeometryError> {
        let z = C::from_polar(1.0 / r, -t);
        Ok(c(metric_at(s, z)?.q() / (r * r * r), 0.0))
    };
    let scale = -measure / (8.0 * std::f64::consts::PI);
    let refinement = refine(resolution.max(1), 3, |n| -> Result<C, GeometryError> {
        let a = integrate_rectangle(inner, (0.0, 1.0), (0.0, tau), n, &rule)?;
        let b = integrate_rectangle(outer, (0.0, 1.0), (0.0, tau), n, &rule)?;
        Ok((a + b) * scale)
    })?;
    Ok(ChargeReport {
        charge: refinement.value().re,
        relative_change: refinement.relative_change(),
        refinement,
        warnings,
    })
}

/// ⟨A, B⟩ on the tangent vectors, for tying the metric to the immersion.
pub fn pairing_metric(jet: &SurfaceJet) -> (C, C, C) {
    (pairing(&jet.d, &jet.d), pairing(&jet.d, &jet.db), pairing(&jet.db, &jet.db))
}
