//! Orthonormal bases of su(2) and su(3) and the coordinate maps built on them.

use serde::{Deserialize, Serialize};

use crate::matrix::{c, pairing, Mat, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    /// X = i(X₁σ₁ + X₂σ₂ + X₃σ₃), N = 2.
    Pauli,
    /// X = X₂s₂ + X₅s₅ + X₆s₆ − (X₁s₁ + X₃s₃ + X₄s₄ + X₇s₇ + X₈s₈), N = 3.
    GellMann,
}

impl BasisKind {
    pub fn dim(self) -> usize {
        match self {
            BasisKind::Pauli => 2,
            BasisKind::GellMann => 3,
        }
    }

    pub fn len(self) -> usize {
        match self {
            BasisKind::Pauli => 3,
            BasisKind::GellMann => 8,
        }
    }

    /// The anti-Hermitian matrices e_k with X = Σ X_k e_k.
    pub fn elements(self) -> Vec<Mat> {
        match self {
            BasisKind::Pauli => pauli().iter().map(|s| s * c(0.0, 1.0)).collect(),
            BasisKind::GellMann => gell_mann()
                .into_iter()
                .zip(GELL_MANN_SIGN)
                .map(|(s, sign)| s * c(sign, 0.0))
                .collect(),
        }
    }

    /// Real coordinates of `y` (the elements are orthonormal under −½tr).
    pub fn coefficients(self, y: &Mat) -> Vec<C> {
        self.elements().iter().map(|e| pairing(y, e)).collect()
    }

    pub fn reconstruct(self, coeffs: &[C]) -> Mat {
        let n = self.dim();
        self.elements()
            .iter()
            .zip(coeffs)
            .fold(Mat::zeros(n, n), |acc, (e, x)| acc + e * *x)
    }
}

pub fn pauli() -> [Mat; 3] {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        Mat::from_row_slice(2, 2, &[z, one, one, z]),
        Mat::from_row_slice(2, 2, &[z, -i, i, z]),
        Mat::from_row_slice(2, 2, &[one, z, z, -one]),
    ]
}

/// Sign with which s_k enters the coordinate decomposition.
pub const GELL_MANN_SIGN: [f64; 8] = [-1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0];

/// s₁ … s₈, anti-Hermitian with tr(s_j s_k) = −2δ_jk.
pub fn gell_mann() -> Vec<Mat> {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let r3 = 3f64.sqrt();
    let m = |v: [C; 9]| Mat::from_row_slice(3, 3, &v);
    vec![
        m([z, z, z, z, z, -i, z, -i, z]),
        m([z, z, z, z, z, -one, z, one, z]),
        m([z, z, z, z, -i, z, z, z, i]),
        m([-i * (2.0 / r3), z, z, z, i / r3, z, z, z, i / r3]),
        m([z, -one, z, one, z, z, z, z, z]),
        m([z, z, -one, z, z, z, one, z, z]),
        m([z, i, z, i, z, z, z, z, z]),
        m([z, z, i, z, z, z, i, z, z]),
    ]
}

/// (i/2)(s₁ − i s₂): the single entry (3,2).
pub fn y_minus() -> Mat {
    let s = gell_mann();
    (&s[0] - &s[1] * c(0.0, 1.0)) * c(0.0, 0.5)
}

/// (i/2)(s₁ + i s₂): the single entry (2,3).
pub fn y_plus() -> Mat {
    let s = gell_mann();
    (&s[0] + &s[1] * c(0.0, 1.0)) * c(0.0, 0.5)
}
