//! Moving frame η₁ … η₈ for holomorphic CP² solutions, built as φ†s_jφ with
//! φ ∈ SU(3) factored into three SU(2) blocks.

use thiserror::Error;

use crate::basis::{gell_mann, y_minus, y_plus};
use crate::geometry::{surface_jet, GeometryError, SurfaceJet};
use crate::matrix::{c, dagger, frob, max_abs, outer, pairing, Mat, C};
use crate::model::{holomorphy_check, AffineSolution, ModelError, SolutionClass};

/// Agreement required between the explicit η₁ and i e^{u/2} φ†y₋φ.
const FRAME_MATCH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("the moving frame is built for CP^2 only (got N = {n})")]
    NotCp2 { n: usize },
    #[error("the moving frame needs a holomorphic solution")]
    NotHolomorphic,
    #[error("branch point at xi = {xi}: rho = {rho:e}")]
    BranchPoint { xi: C, rho: f64 },
    #[error("degenerate frame angle at xi = {xi}: {which} alpha vanishes")]
    DegenerateAngle { xi: C, which: &'static str },
    #[error("no sign of b1 reproduces eta1 at xi = {xi} (defect {defect:e})")]
    Inconsistent { xi: C, defect: f64 },
    #[error("the closed-form normals are singular at xi = 0")]
    AppendixOrigin,
}

/// Tangent part of the frame, from the first jets of (w₁, w₂).
#[derive(Debug, Clone, PartialEq)]
pub struct FrameTangents {
    pub eta1: Mat,
    pub eta2: Mat,
    /// ln(ρ/A²).
    pub u: f64,
    pub rho: f64,
    /// A = 1 + |w₁|² + |w₂|².
    pub norm: f64,
    pub delta: C,
    pub beta: C,
    pub gamma: C,
    /// w₂∂w₁ − w₁∂w₂.
    pub wronskian: C,
    pub dw: [C; 2],
}

fn check_solution(s: &AffineSolution, xi: C) -> Result<(), FrameError> {
    if s.n() != 3 {
        return Err(FrameError::NotCp2 { n: s.n() });
    }
    if holomorphy_check(s, &[xi])?.class != SolutionClass::Holomorphic {
        return Err(FrameError::NotHolomorphic);
    }
    Ok(())
}

pub fn frame_tangents(s: &AffineSolution, xi: C) -> Result<FrameTangents, FrameError> {
    check_solution(s, xi)?;
    let lf = s.fields_at(xi, 1)?;
    let (w1, w2) = (lf.w[0].value(), lf.w[1].value());
    let (d1, d2) = (lf.w[0].get(1, 0), lf.w[1].get(1, 0));
    let a = 1.0 + w1.norm_sqr() + w2.norm_sqr();
    let delta = w1.conj() * d1 + w2.conj() * d2;
    let beta = w1 * w2.conj() * d2 - d1 * (1.0 + w2.norm_sqr());
    let gamma = w1.conj() * w2 * d1 - d2 * (1.0 + w1.norm_sqr());
    let wronskian = w2 * d1 - w1 * d2;
    let rho = d1.norm_sqr() + d2.norm_sqr() + wronskian.norm_sqr();
    if rho <= 1e-300 {
        return Err(FrameError::BranchPoint { xi, rho });
    }
    let row = [delta, beta, gamma];
    let col = [c(1.0, 0.0), w1.conj(), w2.conj()];
    let scale = c(0.0, -1.0 / (a * a));
    let eta1 = outer(&col, &row) * scale;
    let row_conj: Vec<C> = row.iter().map(|z| z.conj()).collect();
    let eta2 = outer(&row_conj, &[c(1.0, 0.0), w1, w2]) * scale;
    Ok(FrameTangents {
        eta1,
        eta2,
        u: (rho / (a * a)).ln(),
        rho,
        norm: a,
        delta,
        beta,
        gamma,
        wronskian,
        dw: [d1, d2],
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameParams {
    pub a1: C,
    pub b1: C,
    pub a2: C,
    pub b2: C,
    pub alpha: f64,
    /// Gauge phase.
    pub phi: f64,
    pub u: f64,
}

impl FrameParams {
    /// (||a₁|² + |b₁|² − 1|, ||a₂|² + |b₂|² − 1|).
    pub fn unit_defects(&self) -> (f64, f64) {
        (
            (self.a1.norm_sqr() + self.b1.norm_sqr() - 1.0).abs(),
            (self.a2.norm_sqr() + self.b2.norm_sqr() - 1.0).abs(),
        )
    }

    /// φ = m(a₁, b₁) · r(α, φ) · m(a₂, b₂).
    pub fn su3(&self) -> Mat {
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let block = |a: C, b: C| Mat::from_row_slice(3, 3, &[one, z, z, z, a, b, z, -b.conj(), a.conj()]);
        let (sa, ca) = self.alpha.sin_cos();
        let e = C::from_polar(1.0, self.phi);
        let rot = Mat::from_row_slice(3, 3, &[e * ca, c(-sa, 0.0), z, c(sa, 0.0), e.conj() * ca, z, z, z, one]);
        block(self.a1, self.b1) * rot * block(self.a2, self.b2)
    }

    /// (i e^{u/2} φ†y₋φ, i e^{u/2} φ†y₊φ).
    pub fn tangents(&self) -> (Mat, Mat) {
        let p = self.su3();
        let pd = dagger(&p);
        let k = c(0.0, (self.u / 2.0).exp());
        (&pd * y_minus() * &p * k, &pd * y_plus() * &p * k)
    }
}

/// Frame parameters at gauge φ. b₁ comes from a square root; its sign is
/// chosen so the frame reproduces the explicit η₁.
pub fn frame_params(s: &AffineSolution, xi: C, phi: f64) -> Result<FrameParams, FrameError> {
    let t = frame_tangents(s, xi)?;
    params_from_tangents(xi, &t, phi)
}

fn params_from_tangents(xi: C, t: &FrameTangents, phi: f64) -> Result<FrameParams, FrameError> {
    let [d1, d2] = t.dw;
    let sin2 = (d1.norm_sqr() + d2.norm_sqr()) / t.rho;
    let cos2 = t.wronskian.norm_sqr() / t.rho;
    let (sa, ca) = (sin2.sqrt(), cos2.sqrt());
    if sa < 1e-14 {
        return Err(FrameError::DegenerateAngle { xi, which: "sin" });
    }
    if ca < 1e-14 {
        return Err(FrameError::DegenerateAngle { xi, which: "cos" });
    }
    let alpha = sa.atan2(ca);
    let e = C::from_polar(1.0, phi);
    let kappa = t.delta * ca / t.wronskian * e.conj();
    let damp = (-t.u / 4.0).exp() / (t.norm * sa);
    let a1 = (t.delta * kappa).sqrt() * damp;
    let b1 = (t.delta / kappa).sqrt() * damp;
    let a2 = -e * d2.conj() * t.wronskian / (t.rho * sa * ca);
    let b2 = e * d1.conj() * t.wronskian / (t.rho * sa * ca);
    let mut p = FrameParams {
        a1,
        b1,
        a2,
        b2,
        alpha,
        phi,
        u: t.u,
    };
    let scale = 1.0 + max_abs(&t.eta1);
    let defect = |p: &FrameParams| max_abs(&(p.tangents().0 - &t.eta1)) / scale;
    if defect(&p) > FRAME_MATCH_TOL {
        p.b1 = -p.b1;
        let d = defect(&p);
        if d > FRAME_MATCH_TOL {
            return Err(FrameError::Inconsistent { xi, defect: d });
        }
    }
    Ok(p)
}

/// η₃ … η₈ = φ†s_jφ.
pub fn frame_normals(params: &FrameParams) -> Vec<Mat> {
    let p = params.su3();
    let pd = dagger(&p);
    gell_mann()[2..].iter().map(|s| &pd * s * &p).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MovingFrame {
    pub xi: C,
    pub params: FrameParams,
    /// η₁ … η₈ in order.
    pub eta: Vec<Mat>,
}

impl MovingFrame {
    pub fn normals(&self) -> &[Mat] {
        &self.eta[2..]
    }

    /// max |⟨η_j, η_k⟩ − δ_jk| over the normals.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.normals();
        let mut worst: f64 = 0.0;
        for (j, a) in n.iter().enumerate() {
            for (k, b) in n.iter().enumerate() {
                let want = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((pairing(a, b) - want).norm());
            }
        }
        worst
    }

    /// max |⟨∂X, η_j⟩|, |⟨∂̄X, η_j⟩| over the normals.
    pub fn tangency_defect(&self, jet: &SurfaceJet) -> f64 {
        self.normals()
            .iter()
            .flat_map(|e| [pairing(&jet.d, e).norm(), pairing(&jet.db, e).norm()])
            .fold(0.0, f64::max)
    }
}

pub fn moving_frame(s: &AffineSolution, xi: C, phi: f64) -> Result<MovingFrame, FrameError> {
    let t = frame_tangents(s, xi)?;
    let params = params_from_tangents(xi, &t, phi)?;
    Ok(assemble(xi, t, params))
}

fn assemble(xi: C, t: FrameTangents, params: FrameParams) -> MovingFrame {
    let mut eta = vec![t.eta1, t.eta2];
    eta.extend(frame_normals(&params));
    MovingFrame { xi, params, eta }
}

/// Frame whose square-root branches sit closest to `reference`, so nearby
/// frames vary smoothly. Flipping (a₁, b₁) together leaves η₁, η₂ unchanged
/// and negates η₅ … η₈.
fn aligned_frame(s: &AffineSolution, xi: C, reference: &FrameParams) -> Result<MovingFrame, FrameError> {
    let t = frame_tangents(s, xi)?;
    let mut p = params_from_tangents(xi, &t, reference.phi)?;
    if (p.a1 + reference.a1).norm() + (p.b1 + reference.b1).norm()
        < (p.a1 - reference.a1).norm() + (p.b1 - reference.b1).norm()
    {
        p.a1 = -p.a1;
        p.b1 = -p.b1;
    }
    Ok(assemble(xi, t, p))
}

/// Closed-form normals η₃ … η₈ for (w₁, w₂) = (ξ, ξ²/2) at gauge φ, with
/// Γ_j = j + |ξ|² and principal square roots.
pub fn appendix_normals(xi: C, phi: f64) -> Result<Vec<Mat>, FrameError> {
    if xi.norm() == 0.0 {
        return Err(FrameError::AppendixOrigin);
    }
    let xb = xi.conj();
    let r2 = xi.norm_sqr();
    let r = xi.norm();
    let g = |j: f64| c(j + r2, 0.0);
    let (g1, g2, g3, g5) = (g(1.0), g(2.0), g(3.0), g(5.0));
    let e = C::from_polar(1.0, 3.0 * phi);
    let (sx, sxb) = (xi.sqrt(), xb.sqrt());
    let (x32, xb32) = (xi * sx, xb * sxb);
    let two = c(2.0, 0.0);
    let four = c(4.0, 0.0);
    let s3 = 3f64.sqrt();
    let g22 = g2 * g2;
    let dd = g1 * g22;
    let m = |v: [C; 9]| Mat::from_row_slice(3, 3, &v);

    let e3 = m([
        four * (r2 - 1.0) / g22,
        two * xi * (four + r2 * g1) / (g1 * g22),
        two * xi * xi * g5 / (g1 * g22),
        two * xb * (four + r2 * g1) / (g1 * g22),
        (four + r2 * r2 * (5.0 + r2 * g2)) / (g1 * g1 * g22),
        -four * xi * (r2 - 1.0) / (g1 * g1 * g22),
        two * xb * xb * g5 / (g1 * g22),
        -four * xb * (r2 - 1.0) / (g1 * g1 * g22),
        r2 * (four - r2 * g3 * g3) / (g1 * g1 * g22),
    ]);
    let e4 = m([
        two * (2.0 + r2 * (2.0 - r2)) / (s3 * g22),
        two * s3 * r2 * xi / g22,
        -two * s3 * xi * xi / g22,
        two * s3 * r2 * xb / g22,
        c(4.0 + r2 * (r2 - 8.0), 0.0) / (s3 * g22),
        four * s3 * xi / g22,
        -two * s3 * xb * xb / g22,
        four * s3 * xb / g22,
        (r2 * g(4.0) - 8.0) / (s3 * g22),
    ]);
    let x2 = xi * xi;
    let xb2 = xb * xb;
    let p = two + r2 * g1;
    let e5 = m([
        two * r * (e * x2 - xb2) / g22,
        -sx * (four * e * x2 * g1 + xb2 * p) / (sxb * dd),
        two * x32 * (two * e * xi * g1 - xb2 * xb) / (xb32 * dd),
        sxb * (four * xb2 * g1 + e * x2 * p) / (sx * dd),
        -two * (e * x2 - xb2) * p / (r * dd),
        two * sx * (two * xb2 * xb + e * xi * p) / (xb32 * dd),
        two * xb32 * (e * x2 * xi - two * xb * g1) / (x32 * dd),
        -two * sxb * (two * e * x2 * xi + xb * p) / (x32 * dd),
        four * (e * x2 - xb2) / (r * dd),
    ]);
    let e6 = m([
        -two * r * (e * xi - xb) / g22,
        two * x32 * (two * e * g1 - xb2) / (sxb * dd),
        -x32 * (four * e * g1 + r2 * xb2 * g3) / (xb32 * dd),
        -two * xb32 * (two - e * x2 + 2.0 * r2) / (sx * dd),
        -four * r * (e * xi - xb) / dd,
        two * x32 * (two * e + xb2 * g3) / (sxb * dd),
        xb32 * (four + 4.0 * r2 + e * r2 * x2 * g3) / (x32 * dd),
        -two * xb32 * (two + e * x2 * g3) / (sx * dd),
        two * r * (e * xi - xb) * g3 / dd,
    ]);
    let e7 = m([
        -two * r * (e * x2 + xb2) / g22,
        sx * (four * e * x2 * g1 - xb2 * p) / (sxb * dd),
        -two * x32 * (xb2 * xb + two * e * xi * g1) / (xb32 * dd),
        sxb * (four * xb2 * g1 - e * x2 * p) / (sx * dd),
        two * (e * x2 + xb2) * p / (r * dd),
        two * sx * (two * xb2 * xb - e * xi * p) / (xb32 * dd),
        -two * xb32 * (e * x2 * xi + two * xb * g1) / (x32 * dd),
        two * sxb * (two * e * x2 * xi - xb * p) / (x32 * dd),
        -four * (e * x2 + xb2) / (r * dd),
    ]);
    let e8 = m([
        two * r * (e * xi + xb) / g22,
        -two * x32 * (xb2 + two * e * g1) / (sxb * dd),
        x32 * (four * e * g1 - r2 * xb2 * g3) / (xb32 * dd),
        -two * xb32 * (two + e * x2 + 2.0 * r2) / (sx * dd),
        four * r * (e * xi + xb) / dd,
        -two * x32 * (two * e - xb2 * g3) / (sxb * dd),
        xb32 * (four + 4.0 * r2 - e * r2 * x2 * g3) / (x32 * dd),
        two * xb32 * (e * x2 * g3 - two) / (sx * dd),
        -two * r * (e * xi + xb) * g3 / dd,
    ]);
    let i = c(0.0, 1.0);
    let half = C::from_polar(1.0, -1.5 * phi);
    Ok(vec![
        e3 * i,
        e4 * i,
        e5 * (i * half),
        e6 * (i * half),
        e7 * half,
        e8 * half,
    ])
}

/// Distance between the orthogonal projectors onto span(a) and span(b),
/// for families orthonormal under ⟨·,·⟩. Zero iff the spans coincide, so it
/// is blind to rotations within the normal space.
pub fn normal_span_defect(a: &[Mat], b: &[Mat]) -> f64 {
    let n = a.first().map_or(0, |m| m.nrows());
    let mut worst: f64 = 0.0;
    for probe in gell_mann() {
        if probe.nrows() != n {
            return f64::INFINITY;
        }
        let project = |fam: &[Mat]| fam.iter().fold(Mat::zeros(n, n), |acc, e| acc + e * pairing(&probe, e));
        worst = worst.max(frob(&(project(a) - project(b))));
    }
    worst
}

/// Coefficients of the Gauss–Weingarten equations in the normal frame
/// η₃ … η₈ and the residuals of the three structure equations.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussWeingarten {
    /// ⟨∂²X, η_j⟩.
    pub j: Vec<C>,
    /// ⟨∂∂̄X, η_j⟩.
    pub h: Vec<C>,
    /// S_jk = ⟨∂η_j, η_k⟩.
    pub s: Vec<Vec<C>>,
    /// |∂²X − (∂q/q)∂X − J_jη_j|.
    pub second_residual: f64,
    /// |∂∂̄X − H_jη_j|.
    pub mixed_residual: f64,
    /// max_j |∂η_j + (H_j∂X + J_j∂̄X)/q − S_jkη_k|.
    pub normal_residual: f64,
    /// max |S_jk + S_kj|.
    pub antisymmetry: f64,
}

impl GaussWeingarten {
    /// Σ|J_j|² + |H_j|², unchanged by the gauge phase.
    pub fn coefficient_norm(&self) -> f64 {
        self.j.iter().chain(&self.h).map(|z| z.norm_sqr()).sum()
    }
}

/// ∂ of the normals by a fourth-order central stencil in both real
/// directions, with the frame branches pinned to the centre's.
fn normal_derivatives(s: &AffineSolution, frame: &MovingFrame) -> Result<Vec<Mat>, FrameError> {
    let h = 1e-3 * (1.0 + frame.xi.norm()).min(10.0);
    let at = |dz: C| -> Result<Vec<Mat>, FrameError> {
        Ok(aligned_frame(s, frame.xi + dz, &frame.params)?.eta[2..].to_vec())
    };
    let stencil = |dir: C| -> Result<Vec<Mat>, FrameError> {
        let (p1, m1, p2, m2) = (at(dir * h)?, at(-dir * h)?, at(dir * 2.0 * h)?, at(-dir * 2.0 * h)?);
        Ok((0..6)
            .map(|k| (&m2[k] - &p2[k] + (&p1[k] - &m1[k]) * c(8.0, 0.0)) / c(12.0 * h, 0.0))
            .collect())
    };
    let dx = stencil(c(1.0, 0.0))?;
    let dy = stencil(c(0.0, 1.0))?;
    Ok(dx.iter().zip(&dy).map(|(a, b)| (a - b * c(0.0, 1.0)) * c(0.5, 0.0)).collect())
}

pub fn gauss_weingarten(s: &AffineSolution, xi: C, phi: f64) -> Result<GaussWeingarten, FrameError> {
    let frame = moving_frame(s, xi, phi)?;
    let jet = surface_jet(s, xi)?;
    let q = jet.q.value();
    let normals = frame.normals();
    let j: Vec<C> = normals.iter().map(|e| pairing(&jet.dd, e)).collect();
    let h: Vec<C> = normals.iter().map(|e| pairing(&jet.d_db, e)).collect();
    let combine = |coef: &[C]| normals.iter().zip(coef).fold(Mat::zeros(3, 3), |acc, (e, k)| acc + e * *k);

    let second_residual = frob(&(&jet.dd - &jet.d * (jet.q.get(1, 0) / q) - combine(&j)));
    let mixed_residual = frob(&(&jet.d_db - combine(&h)));

    let deta = normal_derivatives(s, &frame)?;
    let smat: Vec<Vec<C>> = deta
        .iter()
        .map(|d| normals.iter().map(|e| pairing(d, e)).collect())
        .collect();
    let mut normal_residual: f64 = 0.0;
    let mut antisymmetry: f64 = 0.0;
    for a in 0..6 {
        let predicted = (&jet.d * h[a] + &jet.db * j[a]) * (-1.0 / q) + combine(&smat[a]);
        normal_residual = normal_residual.max(frob(&(&deta[a] - predicted)));
        for b in 0..6 {
            antisymmetry = antisymmetry.max((smat[a][b] + smat[b][a]).norm());
        }
    }
    Ok(GaussWeingarten {
        j,
        h,
        s: smat,
        second_residual,
        mixed_residual,
        normal_residual,
        antisymmetry,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Bindings;
    use crate::geometry::metric_at;
    use crate::model::k_matrices_at;

    fn special() -> AffineSolution {
        AffineSolution::parse(&["xi", "xi^2/2"], Bindings::new()).unwrap()
    }

    #[test]
    fn tangents_at_one() {
        let t = frame_tangents(&special(), c(1.0, 0.0)).unwrap();
        assert!((t.u - (4.0f64 / 9.0).ln()).abs() < 1e-14);
        assert!((t.rho - 2.25).abs() < 1e-14);
        let p = frame_params(&special(), c(1.0, 0.0), 0.0).unwrap();
        assert!((p.alpha.cos().powi(2) - 1.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn origin_tangent_has_one_entry() {
        let t = frame_tangents(&special(), c(0.0, 0.0)).unwrap();
        assert_eq!(t.delta, c(0.0, 0.0));
        assert_eq!(t.beta, c(-1.0, 0.0));
        let nonzero = t.eta1.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn k_is_minus_i_eta2_and_metric_ties() {
        let s = special();
        for z in [c(0.3, 0.4), c(-1.1, 0.2), c(0.9, -0.7)] {
            let t = frame_tangents(&s, z).unwrap();
            let k = k_matrices_at(&s, z).unwrap().k;
            assert!(max_abs(&(&k - &t.eta2 * c(0.0, -1.0))) < 1e-12);
            let q = metric_at(&s, z).unwrap().q();
            assert!((0.5 * t.u.exp() - q).abs() < 1e-12);
        }
    }

    #[test]
    fn frame_is_orthonormal_and_normal() {
        let s = special();
        for z in [c(0.3, 0.4), c(-1.1, 0.2), c(0.9, -0.7)] {
            for phi in [0.0, 0.8] {
                let f = moving_frame(&s, z, phi).unwrap();
                let (d1, d2) = f.params.unit_defects();
                assert!(d1 < 1e-10 && d2 < 1e-10);
                let p = f.params.su3();
                assert!(max_abs(&(dagger(&p) * &p - Mat::identity(3, 3))) < 1e-12);
                assert!((p.determinant() - 1.0).norm() < 1e-12);
                assert!(f.orthonormality_defect() < 1e-10);
                assert!(f.tangency_defect(&surface_jet(&s, z).unwrap()) < 1e-10);
            }
        }
    }

    #[test]
    fn appendix_third_and_fourth_normals_match() {
        let s = special();
        let ap = appendix_normals(c(1.0, 0.0), 0.0).unwrap();
        assert!(ap[0][(0, 0)].norm() < 1e-15);
        assert!(ap[0][(1, 2)].norm() < 1e-15);
        assert!((ap[1][(1, 2)] - c(0.0, 4.0 * 3f64.sqrt() / 9.0)).norm() < 1e-15);
        assert!(ap[1].trace().norm() < 1e-12);
        for k in 0..8 {
            let th = -3.0 + 0.75 * k as f64;
            let z = C::from_polar(1.0, th);
            let f = moving_frame(&s, z, 0.3).unwrap();
            let ap = appendix_normals(z, 0.3).unwrap();
            assert!(max_abs(&(&f.normals()[0] - &ap[0])) < 1e-9);
            assert!(max_abs(&(&f.normals()[1] - &ap[1])) < 1e-9);
        }
    }

    #[test]
    fn gauss_weingarten_closes() {
        let s = special();
        let a = gauss_weingarten(&s, c(0.6, 0.3), 0.0).unwrap();
        assert!(a.second_residual < 1e-7);
        assert!(a.mixed_residual < 1e-8);
        assert!(a.antisymmetry < 1e-8, "{}", a.antisymmetry);
        assert!(a.normal_residual < 1e-7, "{}", a.normal_residual);
        let b = gauss_weingarten(&s, c(0.6, 0.3), 1.1).unwrap();
        assert!((a.coefficient_norm() - b.coefficient_norm()).abs() < 1e-9);
    }

    #[test]
    fn rejects_wrong_dimension_and_mixed() {
        let s = AffineSolution::parse(&["xi"], Bindings::new()).unwrap();
        assert!(matches!(frame_tangents(&s, c(0.5, 0.0)), Err(FrameError::NotCp2 { n: 2 })));
        let m = AffineSolution::parse(&["xi", "xibar"], Bindings::new()).unwrap();
        assert!(matches!(frame_tangents(&m, c(0.5, 0.0)), Err(FrameError::NotHolomorphic)));
        assert!(matches!(frame_params(&special(), c(0.0, 0.0), 0.0), Err(FrameError::DegenerateAngle { which: "cos", .. })));
    }

    #[test]
    fn closed_form_third_normal_leaves_normal_space_off_unit_circle() {
        let s = special();
        let z = c(0.7, 0.0);
        let ap = appendix_normals(z, 0.0).unwrap();
        let jet = surface_jet(&s, z).unwrap();
        assert!((pairing(&ap[0], &ap[0]) - 1.0).norm() < 1e-12);
        assert!(pairing(&ap[0], &jet.d).norm() > 1e-2);
        let f = moving_frame(&s, z, 0.0).unwrap();
        assert!(max_abs(&(&f.normals()[1] - &ap[1])) < 1e-12);
    }
}
