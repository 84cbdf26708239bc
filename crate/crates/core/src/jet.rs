//! Wirtinger derivative towers ∂^a ∂̄^b up to total order 3, with Leibniz
//! arithmetic for scalars and matrices.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub const MAX_ORDER: usize = 3;
pub const SLOTS: usize = 10;

type C = Complex64;

const BINOM: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0],
    [1.0, 3.0, 3.0, 1.0],
];

/// Slot of ∂^a ∂̄^b in the flat storage, grouped by total order.
pub const fn slot(a: usize, b: usize) -> usize {
    let t = a + b;
    t * (t + 1) / 2 + b
}

/// All (a, b) with a + b ≤ order, in slot order.
pub fn multi_indices(order: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=order).flat_map(|t| (0..=t).map(move |b| (t - b, b)))
}

fn zero() -> C {
    C::new(0.0, 0.0)
}

/// Scalar tower: `d[slot(a,b)] = ∂^a ∂̄^b f`, valid for a + b ≤ `order`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub order: usize,
    pub d: [C; SLOTS],
}

impl Jet {
    pub fn constant(value: C, order: usize) -> Jet {
        let mut d = [zero(); SLOTS];
        d[0] = value;
        Jet { order, d }
    }

    pub fn value(&self) -> C {
        self.d[0]
    }

    /// ∂^a ∂̄^b; panics when a + b exceeds the tower order.
    pub fn get(&self, a: usize, b: usize) -> C {
        assert!(a + b <= self.order, "jet of order {} has no ({a},{b}) entry", self.order);
        self.d[slot(a, b)]
    }

    pub fn set(&mut self, a: usize, b: usize, v: C) {
        self.d[slot(a, b)] = v;
    }

    /// Tower of ∂f, one order shorter.
    pub fn d(&self) -> Jet {
        self.shift(1, 0)
    }

    /// Tower of ∂̄f, one order shorter.
    pub fn db(&self) -> Jet {
        self.shift(0, 1)
    }

    fn shift(&self, da: usize, db: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let order = self.order - 1;
        let mut out = Jet::constant(zero(), order);
        for (a, b) in multi_indices(order) {
            out.d[slot(a, b)] = self.d[slot(a + da, b + db)];
        }
        out
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        let mut out = Jet::constant(zero(), order);
        for (a, b) in multi_indices(order) {
            out.d[slot(a, b)] = self.d[slot(a, b)];
        }
        out
    }

    pub fn scale(&self, s: C) -> Jet {
        let mut out = *self;
        for v in out.d.iter_mut() {
            *v *= s;
        }
        out
    }

    pub fn recip(&self) -> Jet {
        let f0 = self.d[0];
        let mut g = Jet::constant(f0.inv(), self.order);
        // f g = 1: solve for the (a, b) entry of g in increasing order.
        for (a, b) in multi_indices(self.order).skip(1) {
            let mut acc = zero();
            for i in 0..=a {
                for j in 0..=b {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    acc += BINOM[a][i] * BINOM[b][j] * self.d[slot(i, j)] * g.d[slot(a - i, b - j)];
                }
            }
            g.d[slot(a, b)] = -acc / f0;
        }
        g
    }

    pub fn div(&self, other: &Jet) -> Jet {
        *self * other.recip()
    }

    /// Swaps the roles of ξ and ξ̄ and conjugates: the tower of the conjugate
    /// function when `self` describes a real-analytic f.
    pub fn conj(&self) -> Jet {
        let mut out = Jet::constant(zero(), self.order);
        for (a, b) in multi_indices(self.order) {
            out.d[slot(a, b)] = self.d[slot(b, a)].conj();
        }
        out
    }
}

fn leibniz<T, F>(order: usize, mut term: F, init: impl Fn() -> T, out: &mut [T])
where
    T: Add<Output = T>,
    F: FnMut(usize, usize, usize, usize, f64) -> T,
{
    for (a, b) in multi_indices(order) {
        let mut acc = init();
        for i in 0..=a {
            for j in 0..=b {
                acc = acc + term(i, j, a - i, b - j, BINOM[a][i] * BINOM[b][j]);
            }
        }
        out[slot(a, b)] = acc;
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let order = self.order.min(o.order);
        let mut out = Jet::constant(zero(), order);
        for (a, b) in multi_indices(order) {
            let s = slot(a, b);
            out.d[s] = self.d[s] + o.d[s];
        }
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(C::new(-1.0, 0.0))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let order = self.order.min(o.order);
        let mut out = Jet::constant(zero(), order);
        leibniz(
            order,
            |i, j, k, l, c| self.d[slot(i, j)] * o.d[slot(k, l)] * c,
            zero,
            &mut out.d,
        );
        out
    }
}

/// Matrix-valued tower with the same slot layout as [`Jet`].
#[derive(Debug, Clone, PartialEq)]
pub struct MatJet {
    pub order: usize,
    pub d: Vec<DMatrix<C>>,
}

impl MatJet {
    pub fn zeros(n: usize, order: usize) -> MatJet {
        MatJet {
            order,
            d: vec![DMatrix::zeros(n, n); SLOTS],
        }
    }

    pub fn dim(&self) -> usize {
        self.d[0].nrows()
    }

    pub fn value(&self) -> &DMatrix<C> {
        &self.d[0]
    }

    pub fn get(&self, a: usize, b: usize) -> &DMatrix<C> {
        assert!(a + b <= self.order, "matrix jet of order {} has no ({a},{b}) entry", self.order);
        &self.d[slot(a, b)]
    }

    /// Assembles a matrix tower from per-entry scalar towers.
    pub fn from_entries(n: usize, entry: impl Fn(usize, usize) -> Jet) -> MatJet {
        let mut out: Option<MatJet> = None;
        for r in 0..n {
            for c in 0..n {
                let e = entry(r, c);
                let m = out.get_or_insert_with(|| MatJet::zeros(n, e.order));
                m.order = m.order.min(e.order);
                for s in 0..SLOTS {
                    m.d[s][(r, c)] = e.d[s];
                }
            }
        }
        out.expect("empty matrix jet")
    }

    pub fn entry(&self, r: usize, c: usize) -> Jet {
        let mut j = Jet::constant(zero(), self.order);
        for (a, b) in multi_indices(self.order) {
            j.d[slot(a, b)] = self.d[slot(a, b)][(r, c)];
        }
        j
    }

    pub fn d(&self) -> MatJet {
        self.shift(1, 0)
    }

    pub fn db(&self) -> MatJet {
        self.shift(0, 1)
    }

    fn shift(&self, da: usize, db: usize) -> MatJet {
        assert!(self.order >= 1, "cannot differentiate an order-0 matrix jet");
        let order = self.order - 1;
        let mut out = MatJet::zeros(self.dim(), order);
        for (a, b) in multi_indices(order) {
            out.d[slot(a, b)] = self.d[slot(a + da, b + db)].clone();
        }
        out
    }

    pub fn matmul(&self, o: &MatJet) -> MatJet {
        let order = self.order.min(o.order);
        let n = self.dim();
        let mut out = MatJet::zeros(n, order);
        leibniz(
            order,
            |i, j, k, l, c| (&self.d[slot(i, j)] * &o.d[slot(k, l)]) * C::new(c, 0.0),
            || DMatrix::zeros(n, n),
            &mut out.d,
        );
        out
    }

    pub fn scale_jet(&self, s: &Jet) -> MatJet {
        let order = self.order.min(s.order);
        let n = self.dim();
        let mut out = MatJet::zeros(n, order);
        leibniz(
            order,
            |i, j, k, l, c| &self.d[slot(i, j)] * (s.d[slot(k, l)] * c),
            || DMatrix::zeros(n, n),
            &mut out.d,
        );
        out
    }

    pub fn scale(&self, s: C) -> MatJet {
        MatJet {
            order: self.order,
            d: self.d.iter().map(|m| m * s).collect(),
        }
    }

    pub fn add(&self, o: &MatJet) -> MatJet {
        let order = self.order.min(o.order);
        let mut out = MatJet::zeros(self.dim(), order);
        for (a, b) in multi_indices(order) {
            let s = slot(a, b);
            out.d[s] = &self.d[s] + &o.d[s];
        }
        out
    }

    pub fn sub(&self, o: &MatJet) -> MatJet {
        self.add(&o.scale(C::new(-1.0, 0.0)))
    }

    /// [A, B] = AB − BA.
    pub fn commutator(&self, o: &MatJet) -> MatJet {
        self.matmul(o).sub(&o.matmul(self))
    }

    pub fn trace(&self) -> Jet {
        let mut j = Jet::constant(zero(), self.order);
        for (a, b) in multi_indices(self.order) {
            j.d[slot(a, b)] = self.d[slot(a, b)].trace();
        }
        j
    }

    /// Entry-wise trace of the product, tr(AB), as a tower.
    pub fn trace_product(&self, o: &MatJet) -> Jet {
        self.matmul(o).trace()
    }

    pub fn truncate(&self, order: usize) -> MatJet {
        let order = order.min(self.order);
        let mut out = self.clone();
        out.order = order;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet_of_xi(x: C) -> Jet {
        let mut j = Jet::constant(x, 3);
        j.set(1, 0, C::new(1.0, 0.0));
        j
    }

    fn jet_of_xibar(x: C) -> Jet {
        let mut j = Jet::constant(x.conj(), 3);
        j.set(0, 1, C::new(1.0, 0.0));
        j
    }

    #[test]
    fn slots_cover_all_indices_once() {
        let v: Vec<usize> = multi_indices(3).map(|(a, b)| slot(a, b)).collect();
        assert_eq!(v, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn product_of_xi_and_xibar() {
        let x = C::new(0.3, -0.8);
        let p = jet_of_xi(x) * jet_of_xibar(x);
        assert_eq!(p.get(1, 1), C::new(1.0, 0.0));
        assert_eq!(p.get(1, 0), x.conj());
        assert_eq!(p.get(2, 1), C::new(0.0, 0.0));
    }

    #[test]
    fn reciprocal_of_one_plus_abs2() {
        // 1/(1+ξξ̄): ∂∂̄ = -1/(1+r²)² + 2 r²/(1+r²)³ … check at ξ=0.
        let x = C::new(0.0, 0.0);
        let a = Jet::constant(C::new(1.0, 0.0), 3) + jet_of_xi(x) * jet_of_xibar(x);
        let r = a.recip();
        assert!((r.get(1, 1) + 1.0).norm() < 1e-15);
        assert!((r.get(2, 1)).norm() < 1e-15);
        let back = a * r;
        for (i, j) in multi_indices(3).skip(1) {
            assert!(back.get(i, j).norm() < 1e-14);
        }
    }

    #[test]
    fn cube_third_derivative() {
        let x = C::new(0.7, 0.2);
        let z = jet_of_xi(x);
        let c = z * z * z;
        assert!((c.get(3, 0) - 6.0).norm() < 1e-14);
        assert!((c.get(2, 0) - 6.0 * x).norm() < 1e-14);
    }
}
