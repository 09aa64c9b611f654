//! Dense complex linear algebra on small square operators.
//!
//! Everything here is sized for local (single-party) operators and for
//! full state vectors of a handful of parties. Matrices are stored
//! row-major; all routines are pure and allocate their results.

mod bloch;
mod eigen;
mod product;

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

pub use bloch::{bloch_to_operator, conjugation_rotation, gram_from_bloch, operator_to_bloch, BlochVector};
pub(crate) use bloch::{rotate, rotate_transpose};
pub use eigen::{hermitian_eigen, matrix_sqrt_psd, normal_eigen, principal_sqrt, Spectral};
pub use product::{apply_local, apply_product, tensor_product, ProductOperator};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[inline]
pub fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// A square complex matrix acting on one party's Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperator<T> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> LocalOperator<T> {
    pub fn new(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::NotSquare { dim, len: entries.len() });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::NotSquare { dim, len: row.len() * dim });
            }
            entries.extend_from_slice(row);
        }
        Self::new(dim, entries)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for col in 0..dim {
                entries.push(f(r, col));
            }
        }
        Self { dim, entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![Complex::new(T::zero(), T::zero()); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, col| {
            if r == col {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }

    pub fn diagonal(diag: &[Complex<T>]) -> Self {
        Self::from_fn(diag.len(), |r, col| if r == col { diag[r] } else { Complex::new(T::zero(), T::zero()) })
    }

    /// Pauli operator `σ_k`, with `σ_0` the 2×2 identity.
    pub fn pauli(k: usize) -> Self {
        let o = T::zero();
        let l = T::one();
        let e = |re: T, im: T| Complex::new(re, im);
        let entries = match k {
            0 => vec![e(l, o), e(o, o), e(o, o), e(l, o)],
            1 => vec![e(o, o), e(l, o), e(l, o), e(o, o)],
            2 => vec![e(o, o), e(o, -l), e(o, l), e(o, o)],
            3 => vec![e(l, o), e(o, o), e(o, o), e(-l, o)],
            _ => panic!("Pauli index {k} out of range 0..=3"),
        };
        Self { dim: 2, entries }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, col: usize) -> Complex<T> {
        self.entries[r * self.dim + col]
    }

    #[inline]
    pub(crate) fn set(&mut self, r: usize, col: usize, v: Complex<T>) {
        self.entries[r * self.dim + col] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Complex<T>>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, col| self.get(col, r).conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.entries[r * n + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for col in 0..n {
                    out.entries[r * n + col] += a * other.entries[k * n + col];
                }
            }
        }
        out
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self.get(i, i))
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    /// Hilbert-Schmidt inner product `tr(self† other)`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.dim, other.dim, "inner product dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
    }

    /// `self† self`.
    pub fn gram(&self) -> Self {
        self.adjoint().matmul(self)
    }

    pub fn hermitian_residual(&self) -> T {
        (self - &self.adjoint()).frobenius_norm()
    }

    pub fn unitarity_residual(&self) -> T {
        (&self.gram() - &Self::identity(self.dim)).frobenius_norm()
    }

    pub fn normality_residual(&self) -> T {
        let adj = self.adjoint();
        (&self.matmul(&adj) - &adj.matmul(self)).frobenius_norm()
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermitian_residual() < tol
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitarity_residual() < tol
    }

    /// Hermitian part `(A + A†)/2`; removes round-off asymmetry.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(T::lit(0.5))
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.dim, "apply dimension mismatch");
        (0..self.dim)
            .map(|r| {
                self.entries[r * self.dim..(r + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (a, x)| acc + a * x)
            })
            .collect()
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim;
        let scale = self.frobenius_norm().max(T::min_positive_value());
        let mut a = self.entries.clone();
        let mut inv = Self::identity(n).entries;
        for col in 0..n {
            let pivot =
                (col..n).max_by(|&i, &j| a[i * n + col].norm().partial_cmp(&a[j * n + col].norm()).unwrap()).unwrap();
            if a[pivot * n + col].norm() <= T::epsilon() * T::lit(16.0) * scale {
                return Err(Error::Singular { party: None });
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                    inv.swap(pivot * n + k, col * n + k);
                }
            }
            let p = Complex::new(T::one(), T::zero()) / a[col * n + col];
            for k in 0..n {
                a[col * n + k] *= p;
                inv[col * n + k] *= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f.norm_sqr() == T::zero() {
                    continue;
                }
                for k in 0..n {
                    let ak = a[col * n + k];
                    let ik = inv[col * n + k];
                    a[r * n + k] -= f * ak;
                    inv[r * n + k] -= f * ik;
                }
            }
        }
        Ok(Self { dim: n, entries: inv })
    }

    /// Singular values in ascending order.
    pub fn singular_values(&self) -> Vec<T> {
        hermitian_eigen(&self.gram()).values.into_iter().map(|l| l.max(T::zero()).sqrt()).collect()
    }

    pub fn min_singular_value(&self) -> T {
        self.singular_values()[0]
    }

    /// Ratio of largest to smallest singular value (infinite when singular).
    pub fn condition_number(&self) -> T {
        let sv = self.singular_values();
        let lo = sv[0];
        let hi = *sv.last().unwrap();
        if lo <= T::zero() {
            T::infinity()
        } else {
            hi / lo
        }
    }

    pub fn power(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.dim), |acc, _| acc.matmul(self))
    }

    /// Rescales so that `tr(self† self) = 1`.
    pub fn trace_normalized_factor(&self) -> Self {
        let t = self.gram().trace().re;
        self.scale_real(T::one() / t.sqrt())
    }

    pub fn cast<U: Real>(&self) -> LocalOperator<U> {
        LocalOperator {
            dim: self.dim,
            entries: self.entries.iter().map(|z| Complex::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64()))).collect(),
        }
    }
}

impl<T: Real> Add for &LocalOperator<T> {
    type Output = LocalOperator<T>;
    fn add(self, rhs: Self) -> LocalOperator<T> {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        LocalOperator { dim: self.dim, entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect() }
    }
}

impl<T: Real> Sub for &LocalOperator<T> {
    type Output = LocalOperator<T>;
    fn sub(self, rhs: Self) -> LocalOperator<T> {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        LocalOperator { dim: self.dim, entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect() }
    }
}

impl<T: Real> Mul for &LocalOperator<T> {
    type Output = LocalOperator<T>;
    fn mul(self, rhs: Self) -> LocalOperator<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Neg for &LocalOperator<T> {
    type Output = LocalOperator<T>;
    fn neg(self) -> LocalOperator<T> {
        self.scale_real(-T::one())
    }
}

/// Frobenius norm of `AB − BA`.
pub fn commutator_norm<T: Real>(a: &LocalOperator<T>, b: &LocalOperator<T>) -> Result<T> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, found: b.dim });
    }
    Ok((&a.matmul(b) - &b.matmul(a)).frobenius_norm())
}

/// Returns `λ` with `A = λ·B` when the normalized Frobenius residual
/// `‖A − λB‖ / ‖A‖` is below `tol`.
pub fn proportional<T: Real>(a: &LocalOperator<T>, b: &LocalOperator<T>, tol: T) -> Option<Complex<T>> {
    if a.dim != b.dim {
        return None;
    }
    let na = a.frobenius_norm();
    let nb = b.frobenius_norm();
    let zero = T::min_positive_value();
    match (na <= zero, nb <= zero) {
        (true, true) => return Some(Complex::new(T::one(), T::zero())),
        (false, true) => return None,
        (true, false) => return Some(Complex::new(T::zero(), T::zero())),
        _ => {}
    }
    let lambda = b.inner(a) / Complex::new(nb * nb, T::zero());
    let residual = (a - &b.scale(lambda)).frobenius_norm() / na;
    (residual < tol).then_some(lambda)
}

pub fn vector_norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// `⟨a|b⟩`.
pub fn vector_inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

pub fn normalized<T: Real>(v: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = vector_norm(v);
    v.iter().map(|z| z / n).collect()
}

/// `|⟨a|b⟩|² / (‖a‖²‖b‖²)`.
pub fn fidelity<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    let na = vector_norm(a);
    let nb = vector_norm(b);
    vector_inner(a, b).norm_sqr() / (na * na * nb * nb)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sx() -> LocalOperator<f64> {
        LocalOperator::pauli(1)
    }
    fn sz() -> LocalOperator<f64> {
        LocalOperator::pauli(3)
    }

    #[test]
    fn commutator_of_paulis() {
        assert_eq!(commutator_norm(&sz(), &sz()).unwrap(), 0.0);
        // [σ_1, σ_3] = −2iσ_2, ‖σ_2‖_F = √2
        let comm = &sx().matmul(&sz()) - &sz().matmul(&sx());
        let expected = LocalOperator::pauli(2).scale(c(0.0, -2.0));
        assert!((&comm - &expected).frobenius_norm() < 1e-15);
        assert!((commutator_norm(&sx(), &sz()).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        let diag = &LocalOperator::<f64>::identity(2).scale_real(0.5) + &sz().scale_real(0.37);
        assert_eq!(commutator_norm(&diag, &sz()).unwrap(), 0.0);
    }

    #[test]
    fn commutator_dimension_mismatch() {
        let err = commutator_norm(&sx(), &LocalOperator::identity(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn proportional_cases() {
        let two_z = sz().scale_real(2.0);
        let l = proportional(&two_z, &sz(), 1e-9).unwrap();
        assert!((l - c(2.0, 0.0)).norm() < 1e-14);
        assert!(proportional(&sx(), &sz(), 1e-9).is_none());
        assert!(proportional(&sx(), &LocalOperator::zeros(2), 1e-9).is_none());
        assert_eq!(proportional(&LocalOperator::<f64>::zeros(2), &LocalOperator::zeros(2), 1e-9), Some(c(1.0, 0.0)));
    }

    #[test]
    fn proportional_recovers_phase() {
        let m = LocalOperator::new(2, vec![c(0.3, -1.2), c(0.7, 0.1), c(-0.4, 0.9), c(1.5, 0.2)]).unwrap();
        let phase = Complex::from_polar(1.0, std::f64::consts::FRAC_PI_3);
        let l = proportional(&m.scale(phase), &m, 1e-9).unwrap();
        assert!((l - phase).norm() < 1e-14);
    }

    #[test]
    fn inverse_roundtrip_and_singular() {
        let m = LocalOperator::new(2, vec![c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0), c(3.0, 0.5)]).unwrap();
        let inv = m.inverse().unwrap();
        assert!((&m.matmul(&inv) - &LocalOperator::identity(2)).frobenius_norm() < 1e-14);
        let sing = LocalOperator::new(2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]).unwrap();
        assert!(matches!(sing.inverse(), Err(Error::Singular { .. })));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(LocalOperator::<f64>::new(2, vec![c(0.0, 0.0); 3]), Err(Error::NotSquare { .. })));
        assert_eq!(LocalOperator::<f64>::new(1, vec![c(f64::NAN, 0.0)]), Err(Error::NonFinite));
    }

    #[test]
    fn singular_values_of_diagonal() {
        let d = LocalOperator::<f64>::diagonal(&[c(3.0, 0.0), c(0.0, -0.5)]);
        let sv = d.singular_values();
        assert!((sv[0] - 0.5).abs() < 1e-14 && (sv[1] - 3.0).abs() < 1e-14);
        assert!((d.condition_number() - 6.0).abs() < 1e-12);
    }
}
