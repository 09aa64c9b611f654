use num_complex::Complex;

use super::LocalOperator;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Eigenvalues with the matching eigenvectors stored as columns.
#[derive(Clone, Debug)]
pub struct Spectral<T, V> {
    pub values: Vec<V>,
    pub vectors: LocalOperator<T>,
}

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
///
/// The input is symmetrized first, so tiny round-off asymmetry is harmless.
/// Eigenvalues are returned in ascending order.
pub fn hermitian_eigen<T: Real>(m: &LocalOperator<T>) -> Spectral<T, T> {
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = LocalOperator::<T>::identity(n);
    let scale = a.frobenius_norm();
    let threshold = T::epsilon() * scale.max(T::min_positive_value());

    for _sweep in 0..100 {
        let off = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .fold(T::zero(), |acc, (p, q)| acc + a.get(p, q).norm_sqr())
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let mag = apq.norm();
                if mag <= threshold * T::lit(1e-3) {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let theta = (aqq - app) / (T::lit(2.0) * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = t * cs;
                // 2x2 block J = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
                let phase = apq.conj() / Complex::new(mag, T::zero());
                let j00 = Complex::new(cs, T::zero());
                let j01 = Complex::new(sn, T::zero());
                let j10 = phase * Complex::new(-sn, T::zero());
                let j11 = phase * Complex::new(cs, T::zero());
                // A ← A J (columns p, q)
                for r in 0..n {
                    let x = a.get(r, p);
                    let y = a.get(r, q);
                    a.set(r, p, x * j00 + y * j10);
                    a.set(r, q, x * j01 + y * j11);
                    let x = v.get(r, p);
                    let y = v.get(r, q);
                    v.set(r, p, x * j00 + y * j10);
                    v.set(r, q, x * j01 + y * j11);
                }
                // A ← J† A (rows p, q)
                for col in 0..n {
                    let x = a.get(p, col);
                    let y = a.get(q, col);
                    a.set(p, col, j00.conj() * x + j10.conj() * y);
                    a.set(q, col, j01.conj() * x + j11.conj() * y);
                }
                a.set(p, q, Complex::new(T::zero(), T::zero()));
                a.set(q, p, Complex::new(T::zero(), T::zero()));
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.partial_cmp(&a.get(j, j).re).unwrap());
    let values = order.iter().map(|&i| a.get(i, i).re).collect();
    let vectors = LocalOperator::from_fn(n, |r, col| v.get(r, order[col]));
    Spectral { values, vectors }
}

/// Spectral decomposition of a normal matrix.
///
/// The Hermitian and anti-Hermitian parts commute, so a generic real
/// combination of them shares the eigenbasis of the input.
pub fn normal_eigen<T: Real>(m: &LocalOperator<T>, tol: T) -> Result<Spectral<T, Complex<T>>> {
    let scale = m.frobenius_norm().max(T::one());
    let residual = m.normality_residual();
    if residual > tol * scale * scale {
        return Err(Error::NotNormal(residual.as_f64()));
    }
    let herm = m.hermitian_part();
    let anti = (m - &m.adjoint()).scale(Complex::new(T::zero(), T::lit(-0.5)));
    for mix in [0.414_213_562_373_095_1, 0.732_050_807_568_877_3, 1.618_033_988_749_895] {
        let combo = &herm + &anti.scale_real(T::lit(mix));
        let eig = hermitian_eigen(&combo);
        let vecs = eig.vectors;
        let d = vecs.adjoint().matmul(m).matmul(&vecs);
        let n = m.dim();
        let off = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .fold(T::zero(), |acc, (p, q)| acc + d.get(p, q).norm_sqr())
            .sqrt();
        if off <= tol * scale {
            let values = (0..n).map(|i| d.get(i, i)).collect();
            return Ok(Spectral { values, vectors: vecs });
        }
    }
    Err(Error::NotNormal(residual.as_f64()))
}

fn reassemble<T: Real>(vectors: &LocalOperator<T>, diag: &[Complex<T>]) -> LocalOperator<T> {
    let scaled = LocalOperator::from_fn(vectors.dim(), |r, col| vectors.get(r, col) * diag[col]);
    scaled.matmul(&vectors.adjoint())
}

/// Hermitian positive-semidefinite square root.
///
/// Eigenvalues in `[-tol, 0)` are clamped to zero; anything more negative
/// is rejected.
pub fn matrix_sqrt_psd<T: Real>(m: &LocalOperator<T>, tol: T) -> Result<LocalOperator<T>> {
    let scale = m.frobenius_norm().max(T::one());
    let herm = m.hermitian_residual();
    if herm > tol * scale {
        return Err(Error::NotHermitian(herm.as_f64()));
    }
    let eig = hermitian_eigen(m);
    if let Some(&lo) = eig.values.first() {
        if lo < -tol * scale {
            return Err(Error::NegativeEigenvalue(lo.as_f64()));
        }
    }
    let roots: Vec<Complex<T>> = eig.values.iter().map(|&l| Complex::new(l.max(T::zero()).sqrt(), T::zero())).collect();
    Ok(reassemble(&eig.vectors, &roots).hermitian_part())
}

/// Principal square root of a normal matrix (branch cut on the negative
/// real axis).
pub fn principal_sqrt<T: Real>(m: &LocalOperator<T>, tol: T) -> Result<LocalOperator<T>> {
    let eig = normal_eigen(m, tol)?;
    let roots: Vec<Complex<T>> = eig.values.iter().map(|z| z.sqrt()).collect();
    Ok(reassemble(&eig.vectors, &roots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn jacobi_diagonalizes_complex_hermitian() {
        let m = LocalOperator::new(
            3,
            vec![
                c(2.0, 0.0),
                c(1.0, -1.0),
                c(0.0, 0.5),
                c(1.0, 1.0),
                c(-1.0, 0.0),
                c(0.3, 0.0),
                c(0.0, -0.5),
                c(0.3, 0.0),
                c(0.7, 0.0),
            ],
        )
        .unwrap();
        let eig = hermitian_eigen(&m);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        let d = eig.vectors.adjoint().matmul(&m).matmul(&eig.vectors);
        let target = LocalOperator::diagonal(&eig.values.iter().map(|&l| c(l, 0.0)).collect::<Vec<_>>());
        assert!((&d - &target).frobenius_norm() < 1e-12);
        assert!(eig.vectors.unitarity_residual() < 1e-12);
        let tr: f64 = eig.values.iter().sum();
        assert!((tr - 1.7).abs() < 1e-12);
    }

    #[test]
    fn sqrt_of_identity_and_diagonal() {
        let id = LocalOperator::<f64>::identity(3);
        assert!((&matrix_sqrt_psd(&id, 1e-9).unwrap() - &id).frobenius_norm() < 1e-14);
        let d = LocalOperator::diagonal(&[c(4.0, 0.0), c(9.0, 0.0)]);
        let r = matrix_sqrt_psd(&d, 1e-9).unwrap();
        let expected = LocalOperator::diagonal(&[c(2.0, 0.0), c(3.0, 0.0)]);
        assert!((&r - &expected).frobenius_norm() < 1e-14);
    }

    #[test]
    fn psd_sqrt_rejects_negative_and_non_hermitian() {
        let z = LocalOperator::<f64>::pauli(3);
        assert!(matches!(matrix_sqrt_psd(&z, 1e-9), Err(Error::NegativeEigenvalue(_))));
        let n = LocalOperator::new(2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(matrix_sqrt_psd(&n, 1e-9), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn principal_root_of_i_sigma_x() {
        let isx = LocalOperator::<f64>::pauli(1).scale(c(0.0, 1.0));
        let r = principal_sqrt(&isx, 1e-9).unwrap();
        assert!((&r.matmul(&r) - &isx).frobenius_norm() < 1e-12);
        // principal branch: eigenvalues e^{±iπ/4}, so R = (1 + iσ_x)/√2
        let expected = (&LocalOperator::identity(2) + &isx).scale_real(std::f64::consts::FRAC_1_SQRT_2);
        assert!((&r - &expected).frobenius_norm() < 1e-12);
    }

    #[test]
    fn principal_root_rejects_non_normal() {
        let n = LocalOperator::new(2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(principal_sqrt(&n, 1e-9), Err(Error::NotNormal(_))));
    }

    #[test]
    fn degenerate_spectrum_is_handled() {
        let m = LocalOperator::<f64>::identity(4).scale_real(2.5);
        let eig = hermitian_eigen(&m);
        assert!(eig.values.iter().all(|&l| (l - 2.5).abs() < 1e-14));
    }
}
