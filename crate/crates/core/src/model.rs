//! The CP^(N-1) model at a point: homogeneous fields, projector, the
//! currents K and K†, equation-of-motion residuals and scalar invariants.
//!
//! Conventions. With f = (1, w_1, …, w_{N-1}) and A = Σ f̄_i f_i the projector
//! is P_ij = δ_ij − f̄_i f_j / A, K = [∂̄P, P] and K† = −[∂P, P]. Every
//! quantity is computed from the towers of w and of the formal conjugates w̄,
//! never by numerically conjugating w, so complexified pairs (w, w̄) produced
//! by symmetry flows are handled by the same code.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{
    conjugate_expression, derivative_trees, parse, Bindings, EvalPoint, Expr, ExprError, Tape,
};
use crate::jet::{slot, Jet, MatJet, MAX_ORDER};
use crate::matrix::{dagger, frob, identity, outer, Mat};

type C = Complex64;

/// Tolerance for the pointwise w̄ = conj(w) check on literal solutions.
pub const CONJUGATE_TOL: f64 = 1e-12;
/// Threshold used to classify a solution as (anti-)holomorphic.
pub const HOLOMORPHY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("a solution needs at least one affine field (N >= 2)")]
    NoFields,
    #[error("{w} affine fields but {wbar} conjugate fields")]
    LengthMismatch { w: usize, wbar: usize },
    #[error("{fields} affine fields but {constants} constraint constants")]
    ConstraintCount { fields: usize, constants: usize },
    #[error("conjugate field {index} deviates from conj(w_{index}) by {deviation:e} at xi = {xi}")]
    ConjugateMismatch { index: usize, xi: C, deviation: f64 },
    #[error("{operation} requires {requirement}")]
    Unsupported {
        operation: &'static str,
        requirement: String,
    },
}

/// How the conjugate fields relate to w.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConjugatePairing {
    /// w̄ must equal conj(w) at every evaluated point; checked on evaluation.
    Literal,
    /// w̄ is an independent partner (complexified solution, e.g. after a
    /// symmetry flow with real ε applied to both members).
    Formal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionClass {
    Holomorphic,
    AntiHolomorphic,
    Mixed,
}

#[derive(Debug)]
struct FieldTape {
    order: usize,
    per_field: usize,
    tape: Tape,
}

/// N − 1 affine fields w_i and their conjugate partners w̄_i.
#[derive(Debug, Clone)]
pub struct AffineSolution {
    w: Vec<Expr>,
    wbar: Vec<Expr>,
    params: Bindings,
    pairing: ConjugatePairing,
    tapes: Arc<[OnceLock<FieldTape>; MAX_ORDER + 1]>,
}

impl AffineSolution {
    /// Solution whose conjugate fields are generated by formal conjugation.
    pub fn new(w: Vec<Expr>, params: Bindings) -> Result<AffineSolution, ModelError> {
        let wbar = w.iter().map(conjugate_expression).collect();
        AffineSolution::build(w, wbar, params, ConjugatePairing::Literal)
    }

    /// Solution with user-supplied conjugate fields. They are still checked to
    /// be the literal conjugates wherever the solution is evaluated.
    pub fn with_conjugates(
        w: Vec<Expr>,
        wbar: Vec<Expr>,
        params: Bindings,
    ) -> Result<AffineSolution, ModelError> {
        AffineSolution::build(w, wbar, params, ConjugatePairing::Literal)
    }

    /// Complexified pair: w̄ is not required to be the conjugate of w.
    pub fn complexified(
        w: Vec<Expr>,
        wbar: Vec<Expr>,
        params: Bindings,
    ) -> Result<AffineSolution, ModelError> {
        AffineSolution::build(w, wbar, params, ConjugatePairing::Formal)
    }

    /// Parses the affine fields; conjugates are generated.
    pub fn parse(w: &[&str], params: Bindings) -> Result<AffineSolution, ModelError> {
        let w = w.iter().map(|t| parse(t)).collect::<Result<Vec<_>, _>>()?;
        AffineSolution::new(w, params)
    }

    fn build(
        w: Vec<Expr>,
        wbar: Vec<Expr>,
        params: Bindings,
        pairing: ConjugatePairing,
    ) -> Result<AffineSolution, ModelError> {
        if w.is_empty() {
            return Err(ModelError::NoFields);
        }
        if w.len() != wbar.len() {
            return Err(ModelError::LengthMismatch {
                w: w.len(),
                wbar: wbar.len(),
            });
        }
        Ok(AffineSolution {
            w,
            wbar,
            params,
            pairing,
            tapes: Arc::new(Default::default()),
        })
    }

    /// Size N of the homogeneous vector.
    pub fn n(&self) -> usize {
        self.w.len() + 1
    }

    pub fn w(&self) -> &[Expr] {
        &self.w
    }

    pub fn wbar(&self) -> &[Expr] {
        &self.wbar
    }

    pub fn params(&self) -> &Bindings {
        &self.params
    }

    pub fn pairing(&self) -> ConjugatePairing {
        self.pairing
    }

    pub fn with_params(&self, params: Bindings) -> AffineSolution {
        AffineSolution {
            params,
            tapes: Arc::new(Default::default()),
            ..self.clone()
        }
    }

    /// The solution with w and w̄ exchanged (the conjugate solution).
    pub fn conjugate(&self) -> AffineSolution {
        AffineSolution {
            w: self.wbar.clone(),
            wbar: self.w.clone(),
            tapes: Arc::new(Default::default()),
            ..self.clone()
        }
    }

    fn tape(&self, order: usize) -> &FieldTape {
        self.tapes[order].get_or_init(|| {
            let mut roots = Vec::new();
            for e in self.w.iter().chain(self.wbar.iter()) {
                roots.extend(derivative_trees(e, order));
            }
            FieldTape {
                order,
                per_field: slot(order, 0) + order + 1,
                tape: Tape::compile(&roots),
            }
        })
    }

    pub fn point(&self, xi: C) -> EvalPoint {
        EvalPoint::with_params(xi, self.params.clone())
    }

    /// Towers of all w_i and w̄_i at ξ up to `order`.
    pub fn fields_at(&self, xi: C, order: usize) -> Result<LocalFields, ModelError> {
        assert!(order <= MAX_ORDER);
        let ft = self.tape(order);
        let vals = ft.tape.eval(&self.point(xi))?;
        let m = self.w.len();
        let jet_of = |k: usize| {
            let mut j = Jet::constant(C::new(0.0, 0.0), ft.order);
            j.d[..ft.per_field].copy_from_slice(&vals[k * ft.per_field..(k + 1) * ft.per_field]);
            j
        };
        let w: Vec<Jet> = (0..m).map(jet_of).collect();
        let wbar: Vec<Jet> = (m..2 * m).map(jet_of).collect();
        if self.pairing == ConjugatePairing::Literal {
            for (i, (a, b)) in w.iter().zip(&wbar).enumerate() {
                let dev = (b.value() - a.value().conj()).norm();
                if dev > CONJUGATE_TOL * (1.0 + a.value().norm()) {
                    return Err(ModelError::ConjugateMismatch {
                        index: i + 1,
                        xi,
                        deviation: dev,
                    });
                }
            }
        }
        Ok(LocalFields { order, w, wbar })
    }
}

/// Towers of the affine fields and their partners at one point.
#[derive(Debug, Clone)]
pub struct LocalFields {
    pub order: usize,
    pub w: Vec<Jet>,
    pub wbar: Vec<Jet>,
}

impl LocalFields {
    pub fn n(&self) -> usize {
        self.w.len() + 1
    }

    fn one(&self) -> Jet {
        Jet::constant(C::new(1.0, 0.0), self.order)
    }

    /// Homogeneous vector f = (1, w_1, …).
    pub fn f(&self) -> Vec<Jet> {
        std::iter::once(self.one()).chain(self.w.iter().copied()).collect()
    }

    pub fn fbar(&self) -> Vec<Jet> {
        std::iter::once(self.one()).chain(self.wbar.iter().copied()).collect()
    }

    /// A = f̄ · f = 1 + Σ w̄_i w_i.
    pub fn norm2(&self) -> Jet {
        self.w
            .iter()
            .zip(&self.wbar)
            .fold(self.one(), |acc, (w, wb)| acc + *w * *wb)
    }

    /// P_ij = δ_ij − f̄_i f_j / A.
    pub fn projector(&self) -> MatJet {
        let (f, fb) = (self.f(), self.fbar());
        let inv = self.norm2().recip();
        let one = self.one();
        MatJet::from_entries(self.n(), |r, c| {
            let delta = if r == c { one } else { one.scale(C::new(0.0, 0.0)) };
            delta - fb[r] * f[c] * inv
        })
    }

    /// (K, K†) one order below the field towers.
    pub fn k_pair(&self) -> (MatJet, MatJet) {
        k_pair_from_projector(&self.projector())
    }
}

pub fn k_pair_from_projector(p: &MatJet) -> (MatJet, MatJet) {
    let k = p.db().commutator(p);
    let kd = p.d().commutator(p).scale(C::new(-1.0, 0.0));
    (k, kd)
}

/// Towers of q = ½ tr(K†K), J = −½ tr(K†K†) and J̄ = −½ tr(KK).
pub fn invariant_towers(k: &MatJet, kd: &MatJet) -> (Jet, Jet, Jet) {
    let half = C::new(0.5, 0.0);
    let q = kd.trace_product(k).scale(half);
    let j = kd.trace_product(kd).scale(-half);
    let jbar = k.trace_product(k).scale(-half);
    (q, j, jbar)
}

/// Projector at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorValue {
    pub p: Mat,
}

impl ProjectorValue {
    pub fn hermitian_defect(&self) -> f64 {
        frob(&(&self.p - dagger(&self.p)))
    }

    pub fn idempotent_defect(&self) -> f64 {
        frob(&(&self.p * &self.p - &self.p))
    }

    pub fn trace(&self) -> C {
        self.p.trace()
    }
}

pub fn projector_at(s: &AffineSolution, xi: C) -> Result<ProjectorValue, ModelError> {
    let lf = s.fields_at(xi, 0)?;
    Ok(ProjectorValue {
        p: lf.projector().value().clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KPair {
    pub k: Mat,
    pub kd: Mat,
    /// Frobenius distance between the commutator form [∂̄P, P] and the
    /// explicit formula in terms of the homogeneous field.
    pub crosscheck: f64,
}

impl KPair {
    /// ‖K† − (K)†‖, meaningful for literal solutions only.
    pub fn dagger_defect(&self) -> f64 {
        frob(&(&self.kd - dagger(&self.k)))
    }
}

/// K from the field directly: with g = f̄ and g^T-partner f,
/// K = (∂̄g fᵀ − g ∂̄fᵀ)/A + g fᵀ (∂̄fᵀ g − fᵀ ∂̄g)/A².
fn k_explicit(lf: &LocalFields) -> Mat {
    let f = lf.f();
    let fb = lf.fbar();
    let val = |v: &[Jet]| v.iter().map(|j| j.value()).collect::<Vec<_>>();
    let dbar = |v: &[Jet]| v.iter().map(|j| j.get(0, 1)).collect::<Vec<_>>();
    let (g, row) = (val(&fb), val(&f));
    let (dg, drow) = (dbar(&fb), dbar(&f));
    let a: C = g.iter().zip(&row).map(|(x, y)| x * y).sum();
    let dot = |u: &[C], v: &[C]| u.iter().zip(v).map(|(x, y)| x * y).sum::<C>();
    let scalar = dot(&drow, &g) - dot(&row, &dg);
    (outer(&dg, &row) - outer(&g, &drow)) / a + outer(&g, &row) * (scalar / (a * a))
}

pub fn k_matrices_at(s: &AffineSolution, xi: C) -> Result<KPair, ModelError> {
    let lf = s.fields_at(xi, 1)?;
    let (k, kd) = lf.k_pair();
    let crosscheck = frob(&(k.value() - k_explicit(&lf)));
    Ok(KPair {
        k: k.value().clone(),
        kd: kd.value().clone(),
        crosscheck,
    })
}

/// K = M + L with M = (I − P)∂̄P and L = −∂̄P (I − P).
pub fn k_decomposition_at(s: &AffineSolution, xi: C) -> Result<(Mat, Mat), ModelError> {
    let lf = s.fields_at(xi, 1)?;
    let p = lf.projector();
    let q = identity(lf.n()) - p.value();
    let dbp = p.get(0, 1);
    Ok((&q * dbp, -(dbp * &q)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElResidual {
    /// ‖∂K − ∂̄K†‖ (Frobenius).
    pub conservation: f64,
    /// Largest modulus over the affine equations for w_i and for w̄_i.
    pub affine: f64,
}

impl ElResidual {
    pub fn max(&self) -> f64 {
        self.conservation.max(self.affine)
    }
}

/// Affine equations ∂∂̄w_i − (1/A) Σ_j w̄_j (∂w_i ∂̄w_j + ∂̄w_i ∂w_j) = 0,
/// and the same with the roles of w and w̄ exchanged.
pub fn affine_residuals(lf: &LocalFields) -> Vec<C> {
    let a = lf.norm2().value();
    let mut out = Vec::with_capacity(2 * lf.w.len());
    for (w, wb) in [(&lf.w, &lf.wbar), (&lf.wbar, &lf.w)] {
        for wi in w.iter() {
            let mut s = C::new(0.0, 0.0);
            for (wj, wbj) in w.iter().zip(wb.iter()) {
                s += wbj.value() * (wi.get(1, 0) * wj.get(0, 1) + wi.get(0, 1) * wj.get(1, 0));
            }
            out.push(wi.get(1, 1) - s / a);
        }
    }
    out
}

pub fn el_residual_from_fields(lf: &LocalFields) -> ElResidual {
    let (k, kd) = lf.k_pair();
    let conservation = frob(&(k.get(1, 0) - kd.get(0, 1)));
    let affine = affine_residuals(lf)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    ElResidual {
        conservation,
        affine,
    }
}

pub fn el_residual_at(s: &AffineSolution, xi: C) -> Result<ElResidual, ModelError> {
    Ok(el_residual_from_fields(&s.fields_at(xi, 2)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarInvariants {
    pub j: C,
    pub jbar: C,
    /// (∂X, ∂̄X); real for literal solutions.
    pub q: f64,
    /// Integrand of the action in its projector form; equals 2q.
    pub action_density: f64,
}

pub fn scalar_invariants_at(s: &AffineSolution, xi: C) -> Result<ScalarInvariants, ModelError> {
    let lf = s.fields_at(xi, 1)?;
    let (k, kd) = lf.k_pair();
    let (q, j, jbar) = invariant_towers(&k, &kd);
    Ok(ScalarInvariants {
        j: j.value(),
        jbar: jbar.value(),
        q: q.value().re,
        action_density: action_density(&lf).re,
    })
}

/// (∂(f̄)ᵀ P̃ ∂̄f + ∂̄(f̄)ᵀ P̃ ∂f) / A with P̃ = I − f f̄ᵀ/A, the projector
/// acting on the column f.
pub fn action_density(lf: &LocalFields) -> C {
    let f = lf.f();
    let fb = lf.fbar();
    let a = lf.norm2().value();
    let fv: Vec<C> = f.iter().map(|j| j.value()).collect();
    let fbv: Vec<C> = fb.iter().map(|j| j.value()).collect();
    let pt = identity(lf.n()) - outer(&fv, &fbv) / a;
    let form = |row: Vec<C>, col: Vec<C>| -> C {
        let mut s = C::new(0.0, 0.0);
        for r in 0..row.len() {
            for c in 0..col.len() {
                s += row[r] * pt[(r, c)] * col[c];
            }
        }
        s
    };
    let d = |v: &[Jet]| v.iter().map(|j| j.get(1, 0)).collect::<Vec<_>>();
    let db = |v: &[Jet]| v.iter().map(|j| j.get(0, 1)).collect::<Vec<_>>();
    (form(d(&fb), db(&f)) + form(db(&fb), d(&f))) / a
}

/// max(|f̄·∂f − ∂f̄·f|, |f̄·∂̄f − ∂̄f̄·f|).
pub fn dc_residual_at(s: &AffineSolution, xi: C) -> Result<f64, ModelError> {
    let lf = s.fields_at(xi, 1)?;
    Ok(dc_residual_from_fields(&lf))
}

pub fn dc_residual_from_fields(lf: &LocalFields) -> f64 {
    let (f, fb) = (lf.f(), lf.fbar());
    let mut r1 = C::new(0.0, 0.0);
    let mut r2 = C::new(0.0, 0.0);
    for (x, y) in f.iter().zip(&fb) {
        r1 += y.value() * x.get(1, 0) - y.get(1, 0) * x.value();
        r2 += y.value() * x.get(0, 1) - y.get(0, 1) * x.value();
    }
    r1.norm().max(r2.norm())
}

/// max_i |w_i w̄_i − D_i| for the algebraic constraints w_i w̄_i = D_i.
pub fn modulus_constraint_residual(s: &AffineSolution, xi: C, d: &[f64]) -> Result<f64, ModelError> {
    if d.len() != s.n() - 1 {
        return Err(ModelError::ConstraintCount {
            fields: s.n() - 1,
            constants: d.len(),
        });
    }
    let lf = s.fields_at(xi, 0)?;
    Ok(lf
        .w
        .iter()
        .zip(&lf.wbar)
        .zip(d)
        .map(|((w, wb), di)| (w.value() * wb.value() - di).norm())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolomorphyReport {
    pub max_dbar_w: f64,
    pub max_d_w: f64,
    pub class: SolutionClass,
}

pub fn holomorphy_check(s: &AffineSolution, points: &[C]) -> Result<HolomorphyReport, ModelError> {
    let mut max_dbar_w: f64 = 0.0;
    let mut max_d_w: f64 = 0.0;
    for &xi in points {
        let lf = s.fields_at(xi, 1)?;
        for w in &lf.w {
            max_dbar_w = max_dbar_w.max(w.get(0, 1).norm());
            max_d_w = max_d_w.max(w.get(1, 0).norm());
        }
    }
    let class = if max_dbar_w < HOLOMORPHY_TOL {
        SolutionClass::Holomorphic
    } else if max_d_w < HOLOMORPHY_TOL {
        SolutionClass::AntiHolomorphic
    } else {
        SolutionClass::Mixed
    };
    Ok(HolomorphyReport {
        max_dbar_w,
        max_d_w,
        class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    fn sol(w: &[&str]) -> AffineSolution {
        AffineSolution::parse(w, Bindings::new()).unwrap()
    }

    #[test]
    fn projector_examples() {
        let p = projector_at(&sol(&["0"]), c(0.7, 0.1)).unwrap();
        assert_eq!(p.p, Mat::from_row_slice(2, 2, &[c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]));
        let p = projector_at(&sol(&["xi", "xi^2/2"]), c(0.0, 0.0)).unwrap();
        assert!(frob(&(p.p - Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0., 0.), c(1., 0.), c(1., 0.)])))) < 1e-15);
        let p = projector_at(&sol(&["xi"]), c(1.0, 0.0)).unwrap();
        let want = Mat::from_row_slice(2, 2, &[c(0.5, 0.), c(-0.5, 0.), c(-0.5, 0.), c(0.5, 0.)]);
        assert!(frob(&(p.p - want)) < 1e-15);
    }

    #[test]
    fn k_at_origin_for_identity_map() {
        let kp = k_matrices_at(&sol(&["xi"]), c(0.0, 0.0)).unwrap();
        let want = Mat::from_row_slice(2, 2, &[c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.)]);
        assert!(frob(&(kp.k - want)) < 1e-15);
        assert!(kp.crosscheck < 1e-15);
    }

    #[test]
    fn non_solution_has_large_residual() {
        // For w = |ξ|² the residual along the real axis is 1 − 2r⁴/(1 + r⁴),
        // which happens to vanish on the unit circle.
        let s = sol(&["xibar*xi"]);
        let r = el_residual_at(&s, c(0.5, 0.0)).unwrap();
        assert!((r.affine - (1.0 - 2.0 * 0.0625 / 1.0625)).abs() < 1e-14, "{r:?}");
        assert!(r.conservation > 1e-2);
        assert!(el_residual_at(&s, c(1.0, 0.0)).unwrap().max() < 1e-14);
    }

    #[test]
    fn special_solution_q_at_origin() {
        let inv = scalar_invariants_at(&sol(&["xi", "xi^2/2"]), c(0.0, 0.0)).unwrap();
        assert!((inv.q - 0.5).abs() < 1e-15);
        assert!(inv.j.norm() < 1e-15);
        assert!((inv.action_density - 2.0 * inv.q).abs() < 1e-15);
    }

    #[test]
    fn dc_residual_for_identity_map() {
        let r = dc_residual_at(&sol(&["xi"]), c(1.0, 0.0)).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn conjugate_override_is_checked() {
        let w = vec![parse("xi").unwrap()];
        let bad = vec![parse("xi").unwrap()];
        let s = AffineSolution::with_conjugates(w, bad, Bindings::new()).unwrap();
        assert!(matches!(
            s.fields_at(c(0.3, 0.4), 0),
            Err(ModelError::ConjugateMismatch { index: 1, .. })
        ));
    }

    #[test]
    fn classification() {
        let pts = [c(0.3, 0.2), c(-0.5, 0.7)];
        assert_eq!(holomorphy_check(&sol(&["xi", "xi^2/2"]), &pts).unwrap().class, SolutionClass::Holomorphic);
        assert_eq!(holomorphy_check(&sol(&["xibar", "xibar^2"]), &pts).unwrap().class, SolutionClass::AntiHolomorphic);
        assert_eq!(holomorphy_check(&sol(&["xi/xibar"]), &pts).unwrap().class, SolutionClass::Mixed);
    }

    #[test]
    fn modulus_constraint_holds_on_quotient_family() {
        let s = sol(&["xi/xibar", "xi^(1/2+i*sqrt(3)/2)/xibar^(1/2-i*sqrt(3)/2)"]);
        let r = modulus_constraint_residual(&s, C::new(0.8, -1.3), &[1.0, 1.0]).unwrap();
        assert!(r < 1e-14);
        // The printed differential constraints fail on the same family.
        assert!(dc_residual_at(&s, C::new(0.8, -1.3)).unwrap() > 1e-2);
        assert!(matches!(
            modulus_constraint_residual(&s, C::new(0.8, -1.3), &[1.0]),
            Err(ModelError::ConstraintCount { .. })
        ));
    }
}
