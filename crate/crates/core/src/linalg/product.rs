use num_complex::Complex;

use super::LocalOperator;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Kronecker product in party order (party 0 is the most significant index).
pub fn tensor_product<T: Real>(factors: &[LocalOperator<T>]) -> Result<LocalOperator<T>> {
    let (first, rest) = factors.split_first().ok_or(Error::EmptyTensorProduct)?;
    Ok(rest.iter().fold(first.clone(), |acc, f| kron(&acc, f)))
}

fn kron<T: Real>(a: &LocalOperator<T>, b: &LocalOperator<T>) -> LocalOperator<T> {
    let (da, db) = (a.dim(), b.dim());
    LocalOperator::from_fn(da * db, |r, col| a.get(r / db, col / db) * b.get(r % db, col % db))
}

/// Applies `op` to the tensor slot `party` of a party-major state vector.
pub fn apply_local<T: Real>(
    op: &LocalOperator<T>,
    party: usize,
    dims: &[usize],
    state: &[Complex<T>],
) -> Vec<Complex<T>> {
    let d = dims[party];
    assert_eq!(op.dim(), d, "local operator dimension mismatch");
    let right: usize = dims[party + 1..].iter().product();
    let left: usize = dims[..party].iter().product();
    let mut out = vec![Complex::new(T::zero(), T::zero()); state.len()];
    let mut column = vec![Complex::new(T::zero(), T::zero()); d];
    for l in 0..left {
        for r in 0..right {
            let base = l * d * right + r;
            for (a, slot) in column.iter_mut().enumerate() {
                *slot = state[base + a * right];
            }
            for a in 0..d {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (b, x) in column.iter().enumerate() {
                    acc += op.get(a, b) * x;
                }
                out[base + a * right] = acc;
            }
        }
    }
    out
}

/// Applies every factor of `g` to its slot of `state`.
pub fn apply_product<T: Real>(g: &ProductOperator<T>, state: &[Complex<T>]) -> Vec<Complex<T>> {
    let dims = g.dims();
    g.factors.iter().enumerate().fold(state.to_vec(), |acc, (party, f)| apply_local(f, party, &dims, &acc))
}

/// `g_1 ⊗ … ⊗ g_n`, kept factorized.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductOperator<T> {
    factors: Vec<LocalOperator<T>>,
}

impl<T: Real> ProductOperator<T> {
    pub fn new(factors: Vec<LocalOperator<T>>) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::InvalidState(format!(
                "product operator needs at least 2 factors, got {}",
                factors.len()
            )));
        }
        Ok(Self { factors })
    }

    pub fn identity(dims: &[usize]) -> Self {
        Self { factors: dims.iter().map(|&d| LocalOperator::identity(d)).collect() }
    }

    /// `s ⊗ s ⊗ … ⊗ s` with `n` copies.
    pub fn uniform(s: &LocalOperator<T>, n: usize) -> Self {
        Self { factors: vec![s.clone(); n] }
    }

    pub fn factors(&self) -> &[LocalOperator<T>] {
        &self.factors
    }

    pub fn factor(&self, party: usize) -> &LocalOperator<T> {
        &self.factors[party]
    }

    pub fn into_factors(self) -> Vec<LocalOperator<T>> {
        self.factors
    }

    pub fn parties(&self) -> usize {
        self.factors.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(LocalOperator::dim).collect()
    }

    pub fn with_factor(&self, party: usize, op: LocalOperator<T>) -> Self {
        let mut factors = self.factors.clone();
        factors[party] = op;
        Self { factors }
    }

    /// Factor-wise product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { factors: self.factors.iter().zip(&other.factors).map(|(a, b)| a.matmul(b)).collect() }
    }

    pub fn adjoint(&self) -> Self {
        Self { factors: self.factors.iter().map(LocalOperator::adjoint).collect() }
    }

    pub fn tensor(&self) -> LocalOperator<T> {
        tensor_product(&self.factors).expect("product operator is non-empty")
    }

    /// Trace-one Gram operators `G_i = g_i†g_i / tr(g_i†g_i)`.
    pub fn grams(&self) -> Vec<LocalOperator<T>> {
        self.factors
            .iter()
            .map(|f| {
                let g = f.gram();
                let t = g.trace().re;
                g.scale_real(T::one() / t).hermitian_part()
            })
            .collect()
    }

    /// Each factor rescaled so that its Gram operator has unit trace.
    pub fn canonical(&self) -> Self {
        Self { factors: self.factors.iter().map(LocalOperator::trace_normalized_factor).collect() }
    }

    /// Errors with the first party whose factor is numerically singular.
    pub fn check_invertible(&self, tol: T) -> Result<()> {
        for (party, f) in self.factors.iter().enumerate() {
            let scale = f.frobenius_norm();
            if !(f.min_singular_value() > tol * scale) {
                return Err(Error::Singular { party: Some(party) });
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Result<Self> {
        let factors = self
            .factors
            .iter()
            .enumerate()
            .map(|(party, f)| f.inverse().map_err(|_| Error::Singular { party: Some(party) }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { factors })
    }

    pub fn cast<U: Real>(&self) -> ProductOperator<U> {
        ProductOperator { factors: self.factors.iter().map(LocalOperator::cast).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{bloch_to_operator, c, BlochVector};

    #[test]
    fn identity_kron_identity() {
        let t = tensor_product(&[LocalOperator::<f64>::pauli(0), LocalOperator::pauli(0)]).unwrap();
        assert_eq!(t, LocalOperator::identity(4));
    }

    #[test]
    fn empty_product_errors() {
        let err = tensor_product::<f64>(&[]).unwrap_err();
        assert_eq!(err.to_string(), "empty tensor product");
    }

    #[test]
    fn kron_layout_matches_definition() {
        let a = LocalOperator::<f64>::pauli(1);
        let b = LocalOperator::<f64>::pauli(3);
        let t = tensor_product(&[a.clone(), b.clone()]).unwrap();
        for (ra, ca, rb, cb) in (0..16).map(|i| (i >> 3 & 1, i >> 2 & 1, i >> 1 & 1, i & 1)) {
            assert_eq!(t.get(2 * ra + rb, 2 * ca + cb), a.get(ra, ca) * b.get(rb, cb));
        }
    }

    #[test]
    fn bloch_factors_match_hand_expansion() {
        let x = 0.05;
        let g1 = bloch_to_operator(BlochVector::new(x, x, 2.0 * x)).unwrap();
        let g2 = bloch_to_operator(BlochVector::new(x, -x, 0.0)).unwrap();
        let t = tensor_product(&[g1.clone(), g2.clone()]).unwrap();
        let mut max_err: f64 = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                for cc in 0..2 {
                    for d in 0..2 {
                        let expected = g1.get(a, b) * g2.get(cc, d);
                        max_err = max_err.max((t.get(2 * a + cc, 2 * b + d) - expected).norm());
                    }
                }
            }
        }
        assert!(max_err < 1e-15);
    }

    #[test]
    fn apply_product_matches_full_tensor() {
        let g = ProductOperator::new(vec![
            LocalOperator::new(2, vec![c(1.0, 0.2), c(0.3, 0.0), c(-0.5, 0.1), c(0.9, -0.4)]).unwrap(),
            LocalOperator::<f64>::pauli(2),
            LocalOperator::new(2, vec![c(0.1, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(0.0, -0.3)]).unwrap(),
        ])
        .unwrap();
        let psi: Vec<_> = (0..8).map(|k| c(k as f64 * 0.1, 1.0 - k as f64 * 0.05)).collect();
        let direct = g.tensor().apply(&psi);
        let factored = apply_product(&g, &psi);
        let err: f64 = direct.iter().zip(&factored).map(|(a, b)| (a - b).norm()).sum();
        assert!(err < 1e-13);
    }

    #[test]
    fn grams_are_trace_one() {
        let g = ProductOperator::new(vec![
            LocalOperator::new(2, vec![c(3.0, 0.2), c(0.3, 0.0), c(-0.5, 0.1), c(0.9, -0.4)]).unwrap(),
            LocalOperator::<f64>::identity(3).scale_real(7.0),
        ])
        .unwrap();
        for gram in g.grams() {
            assert!((gram.trace().re - 1.0).abs() < 1e-14);
        }
        assert!(ProductOperator::new(vec![LocalOperator::<f64>::identity(2)]).is_err());
    }
}
