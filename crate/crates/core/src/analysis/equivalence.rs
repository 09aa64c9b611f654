use crate::error::{Error, Result};
use crate::linalg::LocalOperator;
use crate::scalar::Real;
use crate::seed::{StabilizerGroup, TrackedState};

/// Index of a symmetry `S` with `G_i = S_i† H_i S_i` on every party, where
/// `G` and `H` are the trace-one Gram operators of the two states.
///
/// `g|Ψ⟩` and `h|Ψ⟩` are LU-equivalent exactly when `h S g⁻¹` is
/// proportional to a unitary for some stabilizer element `S`, which is the
/// condition checked here.
pub fn lu_witness<T: Real>(
    g: &[LocalOperator<T>],
    h: &[LocalOperator<T>],
    group: &StabilizerGroup<T>,
    tol: T,
) -> Option<usize> {
    if g.len() != h.len() || g.len() != group.parties() {
        return None;
    }
    group.elements().iter().position(|e| {
        e.operator.factors().iter().zip(g.iter().zip(h)).all(|(s, (gi, hi))| {
            let conj = s.adjoint().matmul(hi).matmul(s);
            (gi - &conj).frobenius_norm() < tol
        })
    })
}

pub fn lu_equivalent<T: Real>(a: &TrackedState<T>, b: &TrackedState<T>, tol: T) -> Result<Option<usize>> {
    if !a.same_class(b) {
        return Err(Error::SeedMismatch);
    }
    Ok(lu_witness(&a.grams(), &b.grams(), a.group(), tol))
}
