//! Small dense complex matrices and the su(N) pairing.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C = Complex64;
pub type Mat = DMatrix<C>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn identity(n: usize) -> Mat {
    Mat::identity(n, n)
}

pub fn dagger(m: &Mat) -> Mat {
    m.adjoint()
}

pub fn commutator(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

/// Frobenius norm.
pub fn frob(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry modulus.
pub fn max_abs(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// ⟨A, B⟩ = −½ tr(AB); real and positive definite on su(N).
pub fn pairing(a: &Mat, b: &Mat) -> C {
    -(a * b).trace() * 0.5
}

/// Column-times-row product u vᵀ (no conjugation).
pub fn outer(u: &[C], v: &[C]) -> Mat {
    Mat::from_fn(u.len(), v.len(), |r, k| u[r] * v[k])
}

/// ‖X + X†‖, zero for anti-Hermitian X.
pub fn anti_hermitian_defect(x: &Mat) -> f64 {
    frob(&(x + dagger(x)))
}

pub fn hermitian_defect(x: &Mat) -> f64 {
    frob(&(x - dagger(x)))
}
