use num_complex::Complex;

use super::LocalOperator;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Bloch components of a trace-one qubit Gram operator `1/2 + v·σ`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct BlochVector<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> BlochVector<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(v: [T; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn scaled(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn distance(self, other: Self) -> T {
        let d = [self.x - other.x, self.y - other.y, self.z - other.z];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }
}

/// `1/2·σ_0 + v·σ`.
pub fn gram_from_bloch<T: Real>(v: BlochVector<T>) -> LocalOperator<T> {
    let half = LocalOperator::<T>::identity(2).scale_real(T::lit(0.5));
    let terms = [v.x, v.y, v.z];
    terms.iter().enumerate().fold(half, |acc, (k, &w)| &acc + &LocalOperator::pauli(k + 1).scale_real(w))
}

/// Positive square root `g = √(1/2 + v·σ)`, so that `g†g` has Bloch vector
/// `v` and unit trace.
pub fn bloch_to_operator<T: Real>(v: BlochVector<T>) -> Result<LocalOperator<T>> {
    let norm = v.norm();
    if !(norm < T::lit(0.5)) {
        return Err(Error::NonPositiveGram { norm: norm.as_f64() });
    }
    // 2x2 PSD root in closed form: √M = (M + √det·1) / √(tr M + 2√det)
    let gram = gram_from_bloch(v);
    let sdet = (T::lit(0.25) - norm * norm).sqrt();
    let denom = (T::one() + T::lit(2.0) * sdet).sqrt();
    let root = (&gram + &LocalOperator::identity(2).scale_real(sdet)).scale_real(T::one() / denom);
    debug_assert!((&root.matmul(&root) - &gram).frobenius_norm() < T::lit(1e-4));
    Ok(root)
}

/// Inverse of [`gram_from_bloch`]: `v_k = tr(G σ_k) / 2`.
pub fn operator_to_bloch<T: Real>(g: &LocalOperator<T>, tol: T) -> Result<BlochVector<T>> {
    if g.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: g.dim() });
    }
    let herm = g.hermitian_residual();
    if herm > tol {
        return Err(Error::NotHermitian(herm.as_f64()));
    }
    let tr = g.trace();
    if (tr - Complex::new(T::one(), T::zero())).norm() > tol {
        return Err(Error::InvalidTrace(tr.re.as_f64()));
    }
    let comp = |k: usize| g.matmul(&LocalOperator::pauli(k)).trace().re * T::lit(0.5);
    Ok(BlochVector::new(comp(1), comp(2), comp(3)))
}

/// Real 3×3 matrix `R` of the conjugation `X ↦ S† X S` on Bloch vectors:
/// `S†(v·σ)S = (R v)·σ`.
pub fn conjugation_rotation<T: Real>(s: &LocalOperator<T>) -> [[T; 3]; 3] {
    let mut r = [[T::zero(); 3]; 3];
    let sd = s.adjoint();
    for b in 0..3 {
        let image = sd.matmul(&LocalOperator::pauli(b + 1)).matmul(s);
        for (a, row) in r.iter_mut().enumerate() {
            row[b] = LocalOperator::pauli(a + 1).matmul(&image).trace().re * T::lit(0.5);
        }
    }
    r
}

pub(crate) fn rotate<T: Real>(r: &[[T; 3]; 3], v: [T; 3]) -> [T; 3] {
    let mut out = [T::zero(); 3];
    for a in 0..3 {
        out[a] = r[a][0] * v[0] + r[a][1] * v[1] + r[a][2] * v[2];
    }
    out
}

pub(crate) fn rotate_transpose<T: Real>(r: &[[T; 3]; 3], v: [T; 3]) -> [T; 3] {
    let mut out = [T::zero(); 3];
    for b in 0..3 {
        out[b] = r[0][b] * v[0] + r[1][b] * v[1] + r[2][b] * v[2];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn zero_vector_gives_scaled_identity() {
        let g = bloch_to_operator(BlochVector::<f64>::default()).unwrap();
        let expected = LocalOperator::identity(2).scale_real(std::f64::consts::FRAC_1_SQRT_2);
        assert!((&g - &expected).frobenius_norm() < 1e-15);
    }

    #[test]
    fn diagonal_case() {
        let g = bloch_to_operator(BlochVector::new(0.0, 0.0, 0.3)).unwrap();
        let expected = LocalOperator::diagonal(&[c(0.8f64.sqrt(), 0.0), c(0.2f64.sqrt(), 0.0)]);
        assert!((&g - &expected).frobenius_norm() < 1e-14);
    }

    #[test]
    fn roundtrip_through_gram() {
        let v = BlochVector::new(0.05, 0.05, 0.10);
        let g: LocalOperator<f64> = bloch_to_operator(v).unwrap();
        assert!(g.hermitian_residual() < 1e-15);
        let back = operator_to_bloch(&g.gram(), 1e-12).unwrap();
        assert!(back.distance(v) < 1e-14);
        assert!((g.gram().trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_out_of_ball() {
        let err = bloch_to_operator(BlochVector::new(0.0, 0.3, 0.4)).unwrap_err();
        assert!(matches!(err, Error::NonPositiveGram { .. }));
        assert!(err.to_string().contains("non-positive Gram operator"));
    }

    #[test]
    fn operator_to_bloch_checks() {
        let mixed = LocalOperator::<f64>::identity(2).scale_real(0.5);
        assert_eq!(operator_to_bloch(&mixed, 1e-12).unwrap(), BlochVector::default());
        let d = LocalOperator::diagonal(&[c(0.8, 0.0), c(0.2, 0.0)]);
        assert!(operator_to_bloch(&d, 1e-12).unwrap().distance(BlochVector::new(0.0, 0.0, 0.3)) < 1e-15);
        assert!(matches!(operator_to_bloch(&LocalOperator::<f64>::identity(2), 1e-9), Err(Error::InvalidTrace(_))));
        let nh = LocalOperator::new(2, vec![c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert!(matches!(operator_to_bloch(&nh, 1e-9), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn pauli_conjugation_flips_signs() {
        let r = conjugation_rotation(&LocalOperator::<f64>::pauli(3));
        let v = rotate(&r, [0.1, 0.2, 0.3]);
        assert!((v[0] + 0.1).abs() < 1e-15 && (v[1] + 0.2).abs() < 1e-15 && (v[2] - 0.3).abs() < 1e-15);
    }
}
