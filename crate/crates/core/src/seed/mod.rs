//! Seed states, their finite local stabilizers, and tracked class members.
//!
//! A seed `|Ψ_s⟩` together with its stabilizer group determines an SLOCC
//! class; every other member is tracked as a product operator `g` applied
//! to the seed. Groups can also be supplied without a state ("abstract"
//! mode) since the reachability and convertibility conditions only consume
//! the local factors of the symmetries.

mod group;
mod l_state;
mod tracked;

pub use group::{
    fit_concrete_group, make_abstract_group, verify_stabilizer, ElementCheck, GroupElement, GroupMode, StabilizerGroup,
    StabilizerReport,
};
pub use l_state::{build_l_state, build_u_gate, enumerate_l_symmetries, l_state_amplitudes, pauli_group};
pub use tracked::{SloccClass, TrackedState};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, vector_norm, LocalOperator};
use crate::scalar::Real;

/// Smallest admissible singular value of a one-party reduction.
pub const FULL_RANK_THRESHOLD: f64 = 1e-8;

/// A pure state on `C^{d_1} ⊗ … ⊗ C^{d_n}` in party-major basis order.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    party_dims: Vec<usize>,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    pub fn new(party_dims: Vec<usize>, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if party_dims.is_empty() || party_dims.contains(&0) {
            return Err(Error::InvalidState("party dimensions must be positive".into()));
        }
        let total: usize = party_dims.iter().product();
        if amplitudes.len() != total {
            return Err(Error::DimensionMismatch { expected: total, found: amplitudes.len() });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { party_dims, amplitudes })
    }

    pub fn party_dims(&self) -> &[usize] {
        &self.party_dims
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        vector_norm(&self.amplitudes)
    }

    /// One-party reduced density matrix `tr_{¬party} |ψ⟩⟨ψ|`.
    pub fn reduced_density(&self, party: usize) -> LocalOperator<T> {
        reduced_density(&self.amplitudes, &self.party_dims, party)
    }

    /// Smallest singular value of each one-party reduction.
    pub fn local_min_singular_values(&self) -> Vec<T> {
        (0..self.party_dims.len())
            .map(|p| hermitian_eigen(&self.reduced_density(p)).values[0].max(T::zero()).sqrt())
            .collect()
    }
}

pub(crate) fn reduced_density<T: Real>(amps: &[Complex<T>], dims: &[usize], party: usize) -> LocalOperator<T> {
    let d = dims[party];
    let right: usize = dims[party + 1..].iter().product();
    let left: usize = dims[..party].iter().product();
    LocalOperator::from_fn(d, |a, b| {
        let mut acc = Complex::new(T::zero(), T::zero());
        for l in 0..left {
            for r in 0..right {
                let base = l * d * right + r;
                acc += amps[base + a * right] * amps[base + b * right].conj();
            }
        }
        acc
    })
}

/// A normalized, truly multipartite seed together with its verified
/// stabilizer.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedState<T> {
    state: StateVector<T>,
    stabilizer: StabilizerGroup<T>,
}

impl<T: Real> SeedState<T> {
    pub fn new(state: StateVector<T>, stabilizer: StabilizerGroup<T>, tol: T) -> Result<Self> {
        let norm = state.norm();
        if (norm - T::one()).abs() > tol {
            return Err(Error::InvalidState(format!("amplitudes not normalized (norm {norm})")));
        }
        for (party, s) in state.local_min_singular_values().into_iter().enumerate() {
            if !(s > T::lit(FULL_RANK_THRESHOLD)) {
                return Err(Error::InvalidState(format!(
                    "reduced state of party {} is rank deficient (smallest singular value {:e})",
                    party + 1,
                    s.as_f64()
                )));
            }
        }
        let report = verify_stabilizer(&stabilizer, Some(&state), tol)?;
        if let Some(bad) = report.first_failure() {
            return Err(Error::SymmetryVerification { element: bad.index, residual: bad.worst_residual().as_f64() });
        }
        let stabilizer = stabilizer.with_mode(GroupMode::Concrete);
        Ok(Self { state, stabilizer })
    }

    pub fn state(&self) -> &StateVector<T> {
        &self.state
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        self.state.amplitudes()
    }

    pub fn party_dims(&self) -> &[usize] {
        self.state.party_dims()
    }

    pub fn stabilizer(&self) -> &StabilizerGroup<T> {
        &self.stabilizer
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn product_state_is_rejected_as_seed() {
        let mut amps = vec![c(0.0, 0.0); 4];
        amps[0] = c(1.0, 0.0);
        let state = StateVector::new(vec![2, 2], amps).unwrap();
        let group =
            make_abstract_group(vec![2, 2], vec![crate::linalg::ProductOperator::identity(&[2, 2])], 1e-9).unwrap();
        let err = SeedState::new(state, group, 1e-9).unwrap_err();
        assert!(err.to_string().contains("rank deficient"));
    }

    #[test]
    fn bell_pair_reduction_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let state = StateVector::new(vec![2, 2], vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap();
        let rho = state.reduced_density(1);
        assert!((&rho - &LocalOperator::identity(2).scale_real(0.5)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn state_length_must_match_dims() {
        assert!(matches!(
            StateVector::<f64>::new(vec![2, 3], vec![c(0.0, 0.0); 5]),
            Err(Error::DimensionMismatch { expected: 6, found: 5 })
        ));
    }
}
