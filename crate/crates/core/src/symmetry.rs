//! Lie-point symmetries of the affine equations: the generators, their
//! first-order flows on solutions, and the finite U(N) actions.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::expr::{differentiate, parse, Expr, ExprError, Var};
use crate::matrix::{c, dagger, max_abs, Mat, C};
use crate::model::{el_residual_at, AffineSolution, ConjugatePairing, ModelError};

/// Step sizes of the residual-order test.
pub const SLOPE_STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];
/// Residual a base solution must stay under before slopes mean anything.
pub const BASE_RESIDUAL_TOL: f64 = 1e-10;
/// Residuals below this are treated as round-off.
pub const ROUND_OFF_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetryError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("generator index out of range: {generator} for N = {n}")]
    IndexOutOfRange { generator: String, n: usize },
    #[error("cannot parse generator `{0}`")]
    BadGenerator(String),
    #[error("{generator} needs eta depending on {variable} only")]
    BadCoefficient { generator: String, variable: &'static str },
    #[error("base solution is not a solution: residual {residual:e} at xi = {xi}")]
    BaseNotSolution { xi: C, residual: f64 },
    #[error("transformation is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },
    #[error("matrix is {rows}x{cols} but the solution needs {n}x{n}")]
    WrongSize { rows: usize, cols: usize, n: usize },
    #[error("first row of u vanishes: the image leaves the f1 != 0 chart")]
    ChartBreakdown,
    #[error("|a|^2 + |b|^2 = {norm} (must be 1)")]
    NotUnitPair { norm: f64 },
    #[error("the generalized SU(2) action is defined for CP^2 only (got N = {n})")]
    NotCp2 { n: usize },
    #[error("no sample points")]
    NoPoints,
}

/// A generator of the symmetry algebra. Indices are 1-based as in the
/// affine fields w₁ … w_{N−1}.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// η(ξ)∂.
    X1(Expr),
    /// η(ξ̄)∂̄.
    X2(Expr),
    /// w_i∂_{w_i} − w̄_i∂_{w̄_i}.
    S(usize),
    /// w_i∂_{w_j} − w̄_j∂_{w̄_i}, i ≠ j.
    T(usize, usize),
    /// w_i²∂_{w_i} + Σ_{j≠i} w_iw_j∂_{w_j} + ∂_{w̄_i}.
    Y(usize),
    /// The conjugate of Y_i.
    Z(usize),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::X1(e) => write!(f, "X1:{e}"),
            Generator::X2(e) => write!(f, "X2:{e}"),
            Generator::S(i) => write!(f, "S{i}"),
            Generator::T(i, j) => write!(f, "T{i}_{j}"),
            Generator::Y(i) => write!(f, "Y{i}"),
            Generator::Z(i) => write!(f, "Z{i}"),
        }
    }
}

impl FromStr for Generator {
    type Err = SymmetryError;

    /// `S2`, `T1_3`, `Y1`, `Z2`, `X1:xi^2`, `X2:xibar`.
    fn from_str(text: &str) -> Result<Generator, SymmetryError> {
        let bad = || SymmetryError::BadGenerator(text.to_string());
        let t = text.trim();
        if let Some(eta) = t.strip_prefix("X1:") {
            return Ok(Generator::X1(parse(eta)?));
        }
        if let Some(eta) = t.strip_prefix("X2:") {
            return Ok(Generator::X2(parse(eta)?));
        }
        let mut chars = t.chars();
        let head = chars.next().ok_or_else(bad)?;
        let rest = chars.as_str();
        let index = |s: &str| s.parse::<usize>().map_err(|_| bad());
        match head {
            'S' => Ok(Generator::S(index(rest)?)),
            'Y' => Ok(Generator::Y(index(rest)?)),
            'Z' => Ok(Generator::Z(index(rest)?)),
            'T' => {
                let (i, j) = rest.split_once('_').ok_or_else(bad)?;
                Ok(Generator::T(index(i)?, index(j)?))
            }
            _ => Err(bad()),
        }
    }
}

impl Generator {
    pub fn is_finite_dimensional(&self) -> bool {
        !matches!(self, Generator::X1(_) | Generator::X2(_))
    }

    fn check_indices(&self, n: usize) -> Result<(), SymmetryError> {
        let ok = |i: usize| (1..n).contains(&i);
        let valid = match self {
            Generator::X1(_) | Generator::X2(_) => true,
            Generator::S(i) | Generator::Y(i) | Generator::Z(i) => ok(*i),
            Generator::T(i, j) => ok(*i) && ok(*j) && i != j,
        };
        if valid {
            Ok(())
        } else {
            Err(SymmetryError::IndexOutOfRange {
                generator: self.to_string(),
                n,
            })
        }
    }

    /// Components of the vector field on (w, w̄) along solution `s`.
    pub fn field(&self, s: &AffineSolution) -> Result<VectorField, SymmetryError> {
        let n = s.n();
        self.check_indices(n)?;
        let (w, wb) = (s.w(), s.wbar());
        let mut dw = vec![Expr::zero(); n - 1];
        let mut dwb = vec![Expr::zero(); n - 1];
        match self {
            Generator::X1(eta) | Generator::X2(eta) => {
                let (var, other, name) = match self {
                    Generator::X1(_) => (Var::Xi, Var::XiBar, "xi"),
                    _ => (Var::XiBar, Var::Xi, "xibar"),
                };
                if eta.depends_on(other) {
                    return Err(SymmetryError::BadCoefficient {
                        generator: self.to_string(),
                        variable: name,
                    });
                }
                for k in 0..n - 1 {
                    dw[k] = Expr::mul(eta, &differentiate(&w[k], var));
                    dwb[k] = Expr::mul(eta, &differentiate(&wb[k], var));
                }
            }
            Generator::S(i) => {
                dw[i - 1] = w[i - 1].clone();
                dwb[i - 1] = Expr::neg(&wb[i - 1]);
            }
            Generator::T(i, j) => {
                dw[j - 1] = w[i - 1].clone();
                dwb[i - 1] = Expr::neg(&wb[j - 1]);
            }
            Generator::Y(i) | Generator::Z(i) => {
                let (a, da, db) = match self {
                    Generator::Y(_) => (w, &mut dw, &mut dwb),
                    _ => (wb, &mut dwb, &mut dw),
                };
                for k in 0..n - 1 {
                    da[k] = Expr::mul(&a[i - 1], &a[k]);
                }
                db[i - 1] = Expr::one();
            }
        }
        Ok(VectorField { dw, dwbar: dwb })
    }
}

/// All generators for CP^{N−1}. The two base generators carry the
/// representative coefficients η = ξ² and η = ξ̄².
pub fn generator_list(n: usize) -> Vec<Generator> {
    let mut out = vec![
        Generator::X1(Expr::pow(&Expr::xi(), &Expr::real(2.0))),
        Generator::X2(Expr::pow(&Expr::xibar(), &Expr::real(2.0))),
    ];
    let m = n.saturating_sub(1);
    out.extend((1..=m).map(Generator::S));
    for i in 1..=m {
        for j in 1..=m {
            if i != j {
                out.push(Generator::T(i, j));
            }
        }
    }
    out.extend((1..=m).map(Generator::Y));
    out.extend((1..=m).map(Generator::Z));
    out
}

/// First-order displacement (δw, δw̄) of a flow.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub dw: Vec<Expr>,
    pub dwbar: Vec<Expr>,
}

impl VectorField {
    /// w → w + εδw, w̄ → w̄ + εδw̄. The result is a complexified pair: the
    /// flows of Y_i and Z_i do not respect complex conjugation.
    pub fn apply(&self, s: &AffineSolution, eps: f64) -> Result<AffineSolution, SymmetryError> {
        let e = Expr::real(eps);
        let shift = |base: &[Expr], d: &[Expr]| -> Vec<Expr> {
            base.iter()
                .zip(d)
                .map(|(b, d)| if d.is_zero() { b.clone() } else { Expr::add(b, &Expr::mul(&e, d)) })
                .collect()
        };
        Ok(AffineSolution::complexified(
            shift(s.w(), &self.dw),
            shift(s.wbar(), &self.dwbar),
            s.params().clone(),
        )?)
    }
}

pub fn apply_generator(g: &Generator, s: &AffineSolution, eps: f64) -> Result<AffineSolution, SymmetryError> {
    g.field(s)?.apply(s, eps)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeReport {
    /// (ε, max residual over the points).
    pub samples: Vec<(f64, f64)>,
    /// Least-squares slope of log r against log ε.
    pub slope: f64,
    pub base_residual: f64,
}

impl SlopeReport {
    /// Every perturbed residual is at round-off, so the flow keeps the
    /// solution exact and the slope carries no information.
    pub fn is_exact(&self) -> bool {
        self.samples.iter().all(|&(_, r)| r < ROUND_OFF_FLOOR)
    }
}

fn max_residual(s: &AffineSolution, points: &[C]) -> Result<(f64, C), SymmetryError> {
    let rs: Vec<Result<(f64, C), ModelError>> = points
        .par_iter()
        .map(|&z| Ok((el_residual_at(s, z)?.max(), z)))
        .collect();
    let mut worst = (0.0, points[0]);
    for r in rs {
        let r = r?;
        if r.0 > worst.0 || r.0.is_nan() {
            worst = r;
        }
    }
    Ok(worst)
}

/// Order in ε of the equations-of-motion residual along the flow: about 2
/// for a symmetry, about 1 otherwise.
pub fn infinitesimal_symmetry_order(
    field: &VectorField,
    s: &AffineSolution,
    points: &[C],
) -> Result<SlopeReport, SymmetryError> {
    if points.is_empty() {
        return Err(SymmetryError::NoPoints);
    }
    let (base_residual, xi) = max_residual(s, points)?;
    if base_residual > BASE_RESIDUAL_TOL {
        return Err(SymmetryError::BaseNotSolution {
            xi,
            residual: base_residual,
        });
    }
    let mut samples = Vec::with_capacity(SLOPE_STEPS.len());
    for eps in SLOPE_STEPS {
        let moved = field.apply(s, eps)?;
        samples.push((eps, max_residual(&moved, points)?.0));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|(e, r)| (e.ln(), r.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(SlopeReport {
        samples,
        slope: sxy / sxx,
        base_residual,
    })
}

/// f → uf, read back in the chart f₁ = 1.
pub fn apply_projective(u: &Mat, s: &AffineSolution) -> Result<AffineSolution, SymmetryError> {
    let n = s.n();
    if u.nrows() != n || u.ncols() != n {
        return Err(SymmetryError::WrongSize {
            rows: u.nrows(),
            cols: u.ncols(),
            n,
        });
    }
    let defect = max_abs(&(dagger(u) * u - Mat::identity(n, n)));
    if defect > 1e-12 {
        return Err(SymmetryError::NotUnitary { defect });
    }
    if (0..n).all(|j| u[(0, j)] == c(0.0, 0.0)) {
        return Err(SymmetryError::ChartBreakdown);
    }
    let image = |fields: &[Expr], m: &Mat| -> Vec<Expr> {
        let row = |r: usize| {
            let mut acc = Expr::constant(m[(r, 0)]);
            for (k, w) in fields.iter().enumerate() {
                let coef = m[(r, k + 1)];
                if coef != c(0.0, 0.0) {
                    acc = Expr::add(&acc, &Expr::mul(&Expr::constant(coef), w));
                }
            }
            acc
        };
        let den = row(0);
        (1..n).map(|r| Expr::div(&row(r), &den)).collect()
    };
    let w = image(s.w(), u);
    let wbar = image(s.wbar(), &u.map(|z| z.conj()));
    let params = s.params().clone();
    Ok(match s.pairing() {
        ConjugatePairing::Literal => AffineSolution::with_conjugates(w, wbar, params)?,
        ConjugatePairing::Formal => AffineSolution::complexified(w, wbar, params)?,
    })
}

/// The spin-one image of (a, b) ∈ SU(2) acting on f = (1, u₁, u₂).
pub fn generalized_su2_matrix(a: C, b: C) -> Mat {
    let r2 = 2f64.sqrt();
    let (ac, bc) = (a.conj(), b.conj());
    Mat::from_row_slice(
        3,
        3,
        &[
            c(a.norm_sqr() - b.norm_sqr(), 0.0),
            a * bc * r2,
            ac * b * r2,
            -a * b * r2,
            a * a,
            -b * b,
            -ac * bc * r2,
            -bc * bc,
            ac * ac,
        ],
    )
}

pub fn apply_generalized_su2(a: C, b: C, s: &AffineSolution) -> Result<AffineSolution, SymmetryError> {
    if s.n() != 3 {
        return Err(SymmetryError::NotCp2 { n: s.n() });
    }
    let norm = a.norm_sqr() + b.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(SymmetryError::NotUnitPair { norm });
    }
    apply_projective(&generalized_su2_matrix(a, b), s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Bindings;
    use crate::geometry::metric_at;

    fn sol(w: &[&str]) -> AffineSolution {
        AffineSolution::parse(w, Bindings::new()).unwrap()
    }

    fn ring() -> Vec<C> {
        (0..6).map(|k| C::from_polar(0.8 + 0.1 * k as f64, 0.3 + 1.1 * k as f64)).collect()
    }

    #[test]
    fn generator_counts() {
        for n in 2..=6 {
            let g = generator_list(n);
            assert_eq!(g.len(), n * n + 1);
            assert_eq!(g.iter().filter(|g| g.is_finite_dimensional()).count(), n * n - 1);
        }
        let g4 = generator_list(4);
        let t = g4.iter().filter(|g| matches!(g, Generator::T(..))).count();
        assert_eq!((g4.len() - 2 - t, t), (9, 6));
    }

    #[test]
    fn generator_names_round_trip() {
        for g in generator_list(4) {
            let back: Generator = g.to_string().parse().unwrap();
            assert_eq!(back.to_string(), g.to_string());
        }
        assert!("Q1".parse::<Generator>().is_err());
        assert!(Generator::T(1, 1).field(&sol(&["xi", "xi"])).is_err());
    }

    #[test]
    fn scaling_flow_on_xi() {
        let s = sol(&["xi"]);
        let t = apply_generator(&Generator::S(1), &s, 0.1).unwrap();
        let lf = t.fields_at(c(0.5, 0.2), 0).unwrap();
        assert!((lf.w[0].value() - c(0.5, 0.2) * 1.1).norm() < 1e-15);
        assert!((lf.wbar[0].value() - c(0.5, -0.2) * 0.9).norm() < 1e-15);
    }

    #[test]
    fn y_flow_components() {
        let s = sol(&["xi", "xi^2/2"]);
        let f = Generator::Y(1).field(&s).unwrap();
        let z = c(0.3, 0.4);
        let pt = s.point(z);
        let ev = |e: &Expr| crate::expr::evaluate(e, &pt).unwrap();
        assert!((ev(&f.dw[0]) - z * z).norm() < 1e-15);
        assert!((ev(&f.dw[1]) - z * z * z / 2.0).norm() < 1e-15);
        assert!((ev(&f.dwbar[0]) - 1.0).norm() < 1e-15);
        assert!(ev(&f.dwbar[1]).norm() < 1e-15);
    }

    #[test]
    fn true_symmetries_have_slope_two() {
        let s = sol(&["xi/xibar"]);
        for g in generator_list(2) {
            let r = infinitesimal_symmetry_order(&g.field(&s).unwrap(), &s, &ring()).unwrap();
            assert!((r.slope - 2.0).abs() < 0.1, "{g}: {:?}", r.samples);
        }
    }

    #[test]
    fn negative_control_has_slope_one() {
        let s = sol(&["xi/xibar"]);
        let w = s.w()[0].clone();
        let field = VectorField {
            dw: vec![Expr::mul(&w, &w)],
            dwbar: vec![Expr::zero()],
        };
        let r = infinitesimal_symmetry_order(&field, &s, &ring()).unwrap();
        assert!(r.slope < 1.2, "{:?}", r.samples);
    }

    #[test]
    fn projective_actions_preserve_solutions() {
        let s = sol(&["xi", "xi^2/2"]);
        let one = c(1.0, 0.0);
        let z = c(0.0, 0.0);
        let swap = Mat::from_row_slice(3, 3, &[one, z, z, z, z, one, z, one, z]);
        let t = apply_projective(&swap, &s).unwrap();
        let lf = t.fields_at(c(0.4, 0.1), 0).unwrap();
        assert!((lf.w[0].value() - c(0.4, 0.1).powi(2) / 2.0).norm() < 1e-15);
        let phases = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C::from_polar(1.0, 0.3),
            C::from_polar(1.0, -1.0),
            C::from_polar(1.0, 2.0),
        ]));
        let d = apply_projective(&phases, &s).unwrap();
        for p in ring() {
            assert!(el_residual_at(&t, p).unwrap().max() < 1e-10);
            let (q0, q1) = (metric_at(&s, p).unwrap().q(), metric_at(&d, p).unwrap().q());
            assert!((q0 - q1).abs() < 1e-12);
        }
        assert!(matches!(apply_projective(&(swap * c(2.0, 0.0)), &s), Err(SymmetryError::NotUnitary { .. })));
    }

    #[test]
    fn generalized_su2_keeps_solutions() {
        let a = C::from_polar(0.6, 0.4);
        let b = C::from_polar(0.8, -1.3);
        let m = generalized_su2_matrix(a, b);
        assert!(max_abs(&(dagger(&m) * &m - Mat::identity(3, 3))) < 1e-15);
        let s = sol(&["tanh((xi-xibar)/2)", "-(tanh(xi)+tanh(xibar))/(sech(xi)+sech(xibar))"]);
        let t = apply_generalized_su2(a, b, &s).unwrap();
        for p in ring() {
            assert!(el_residual_at(&t, p * 0.5).unwrap().max() < 1e-9);
        }
        let id = apply_generalized_su2(c(1.0, 0.0), c(0.0, 0.0), &s).unwrap();
        let p = c(0.3, 0.2);
        assert!((id.fields_at(p, 0).unwrap().w[0].value() - s.fields_at(p, 0).unwrap().w[0].value()).norm() < 1e-15);
        assert!(matches!(apply_generalized_su2(c(1.0, 0.0), c(1.0, 0.0), &s), Err(SymmetryError::NotUnitPair { .. })));
    }
}
