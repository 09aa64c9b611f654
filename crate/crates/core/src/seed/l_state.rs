use num_complex::Complex;

use super::group::fit_concrete_group;
use super::{make_abstract_group, SeedState, StabilizerGroup, StateVector};
use crate::error::Result;
use crate::linalg::{principal_sqrt, LocalOperator, ProductOperator};
use crate::scalar::Real;

/// `U = √(iσ_y)·√(iσ_x)` with principal roots. Equals
/// `(1 + i(σ_x + σ_y + σ_z))/2`, an order-3 rotation about `(1,1,1)/√3`
/// with `U³ = −1`.
pub fn build_u_gate<T: Real>() -> LocalOperator<T> {
    let i = Complex::new(T::zero(), T::one());
    let tol = T::lit(1e-6);
    let ry = principal_sqrt(&LocalOperator::pauli(2).scale(i), tol).expect("iσ_y is unitary");
    let rx = principal_sqrt(&LocalOperator::pauli(1).scale(i), tol).expect("iσ_x is unitary");
    ry.matmul(&rx)
}

fn two_qubit<T: Real>(amps: [f64; 4]) -> [Complex<T>; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    amps.map(|a| Complex::new(T::lit(a * s), T::zero()))
}

/// Amplitudes of
/// `(|φ⁻⟩|φ⁻⟩ + e^{iπ/3}|φ⁺⟩|φ⁺⟩ + e^{2iπ/3}|ψ⁺⟩|ψ⁺⟩)/√3`
/// in party-major order.
pub fn l_state_amplitudes<T: Real>() -> Vec<Complex<T>> {
    let phi_minus = two_qubit::<T>([1.0, 0.0, 0.0, -1.0]);
    let phi_plus = two_qubit::<T>([1.0, 0.0, 0.0, 1.0]);
    let psi_plus = two_qubit::<T>([0.0, 1.0, 1.0, 0.0]);
    let third = std::f64::consts::PI / 3.0;
    let terms = [
        (Complex::new(T::one(), T::zero()), phi_minus),
        (Complex::from_polar(T::one(), T::lit(third)), phi_plus),
        (Complex::from_polar(T::one(), T::lit(2.0 * third)), psi_plus),
    ];
    let norm = T::one() / T::lit(3.0).sqrt();
    (0..16)
        .map(|idx| {
            let (hi, lo) = (idx >> 2, idx & 3);
            terms.iter().fold(Complex::new(T::zero(), T::zero()), |acc, (w, pair)| acc + w * pair[hi] * pair[lo]) * norm
        })
        .collect()
}

/// Local candidates `{1, U, U²} × {σ_0, σ_1, σ_2, σ_3}` in that order.
fn l_local_symmetries<T: Real>() -> Vec<LocalOperator<T>> {
    let u = build_u_gate::<T>();
    let powers = [LocalOperator::identity(2), u.clone(), u.matmul(&u)];
    powers.iter().flat_map(|p| (0..4).map(move |k| p.matmul(&LocalOperator::pauli(k)))).collect()
}

/// The twelve symmetries `s^{⊗4}` of the L-state with fitted phases.
pub fn enumerate_l_symmetries<T: Real>(tol: T) -> Result<StabilizerGroup<T>> {
    let state = StateVector::new(vec![2; 4], l_state_amplitudes())?;
    let candidates = l_local_symmetries::<T>().iter().map(|s| ProductOperator::uniform(s, 4)).collect();
    fit_concrete_group(&state, candidates, tol)
}

pub fn build_l_state<T: Real>(tol: T) -> Result<SeedState<T>> {
    let state = StateVector::new(vec![2; 4], l_state_amplitudes())?;
    let group = enumerate_l_symmetries(tol)?;
    SeedState::new(state, group, tol)
}

/// Abstract group `{σ_k^{⊗n}}_{k=0..3}`.
pub fn pauli_group<T: Real>(n: usize, tol: T) -> Result<StabilizerGroup<T>> {
    let elements = (0..4).map(|k| ProductOperator::uniform(&LocalOperator::pauli(k), n)).collect();
    make_abstract_group(vec![2; n], elements, tol)
}
