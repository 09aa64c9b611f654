use num_complex::Complex;

use super::StateVector;
use crate::error::{Error, Result};
use crate::linalg::{apply_product, proportional, vector_inner, vector_norm, ProductOperator};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupMode {
    /// Verified against an explicit seed vector.
    Concrete,
    /// Supplied without a state; only closure and unitarity are checked.
    Abstract,
}

/// One stabilizer element `S` with the phase `φ` such that `φ·S|Ψ_s⟩ = |Ψ_s⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<T> {
    pub operator: ProductOperator<T>,
    pub phase: Complex<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerGroup<T> {
    party_dims: Vec<usize>,
    elements: Vec<GroupElement<T>>,
    mode: GroupMode,
}

impl<T: Real> StabilizerGroup<T> {
    /// Builds a group without any verification. Use [`make_abstract_group`]
    /// or [`verify_stabilizer`] to check it.
    pub fn from_elements(party_dims: Vec<usize>, elements: Vec<GroupElement<T>>, mode: GroupMode) -> Self {
        Self { party_dims, elements, mode }
    }

    pub(crate) fn with_mode(mut self, mode: GroupMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn party_dims(&self) -> &[usize] {
        &self.party_dims
    }

    pub fn parties(&self) -> usize {
        self.party_dims.len()
    }

    pub fn elements(&self) -> &[GroupElement<T>] {
        &self.elements
    }

    pub fn element(&self, index: usize) -> &GroupElement<T> {
        &self.elements[index]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn mode(&self) -> GroupMode {
        self.mode
    }

    /// Index of the element whose factors are all proportional to the identity.
    pub fn identity_index(&self, tol: T) -> Option<usize> {
        self.elements.iter().position(|e| {
            e.operator
                .factors()
                .iter()
                .all(|f| proportional(f, &crate::linalg::LocalOperator::identity(f.dim()), tol).is_some())
        })
    }

    /// Index of the element equal to `op` up to a global scalar, compared
    /// factor by factor.
    pub fn find(&self, op: &ProductOperator<T>, tol: T) -> Option<usize> {
        self.elements.iter().position(|e| {
            e.operator
                .factors()
                .iter()
                .zip(op.factors())
                .all(|(a, b)| matches!(proportional(b, a, tol), Some(l) if l.norm() > T::lit(0.5)))
        })
    }

    /// `table[a][b]` is the index of the element matching `S_a · S_b`.
    pub fn closure_table(&self, tol: T) -> Vec<Vec<Option<usize>>> {
        self.elements
            .iter()
            .map(|a| self.elements.iter().map(|b| self.find(&a.operator.compose(&b.operator), tol)).collect())
            .collect()
    }

    /// Index of the inverse of element `index` (up to phase).
    pub fn inverse_index(&self, index: usize, tol: T) -> Option<usize> {
        self.find(&self.elements[index].operator.adjoint(), tol)
    }
}

#[derive(Clone, Debug)]
pub struct ElementCheck<T> {
    pub index: usize,
    /// `‖φ·S|Ψ_s⟩ − |Ψ_s⟩‖`, absent for abstract checks.
    pub stabilization_residual: Option<T>,
    /// `‖S^{(i)†}S^{(i)} − 1‖` per party.
    pub unitarity_residuals: Vec<T>,
    pub passed: bool,
}

impl<T: Real> ElementCheck<T> {
    pub fn worst_residual(&self) -> T {
        self.unitarity_residuals.iter().copied().chain(self.stabilization_residual).fold(T::zero(), T::max)
    }
}

#[derive(Clone, Debug)]
pub struct StabilizerReport<T> {
    pub elements: Vec<ElementCheck<T>>,
    pub closure: Vec<Vec<Option<usize>>>,
    pub identity_index: Option<usize>,
    pub tol: T,
}

impl<T: Real> StabilizerReport<T> {
    pub fn closure_holds(&self) -> bool {
        self.closure.iter().flatten().all(Option::is_some)
    }

    pub fn closure_failures(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, row) in self.closure.iter().enumerate() {
            for (b, entry) in row.iter().enumerate() {
                if entry.is_none() {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn first_failure(&self) -> Option<&ElementCheck<T>> {
        self.elements.iter().find(|e| !e.passed)
    }

    pub fn passed(&self) -> bool {
        self.identity_index.is_some() && self.closure_holds() && self.elements.iter().all(|e| e.passed)
    }
}

/// Checks unitarity of every factor, stabilization of `state` (when given)
/// with the recorded phases, and closure up to phase.
pub fn verify_stabilizer<T: Real>(
    group: &StabilizerGroup<T>,
    state: Option<&StateVector<T>>,
    tol: T,
) -> Result<StabilizerReport<T>> {
    for e in group.elements() {
        if e.operator.dims() != group.party_dims() {
            return Err(Error::InvalidState(format!(
                "element dimensions {:?} do not match group dimensions {:?}",
                e.operator.dims(),
                group.party_dims()
            )));
        }
    }
    if let Some(s) = state {
        if s.party_dims() != group.party_dims() {
            let total: usize = group.party_dims().iter().product();
            return Err(Error::DimensionMismatch { expected: total, found: s.amplitudes().len() });
        }
    }
    let elements = group
        .elements()
        .iter()
        .enumerate()
        .map(|(index, e)| {
            let unitarity_residuals: Vec<T> = e.operator.factors().iter().map(|f| f.unitarity_residual()).collect();
            let stabilization_residual = state.map(|s| {
                let image = apply_product(&e.operator, s.amplitudes());
                image
                    .iter()
                    .zip(s.amplitudes())
                    .fold(T::zero(), |acc, (x, y)| acc + (x * e.phase - y).norm_sqr())
                    .sqrt()
            });
            let passed = unitarity_residuals.iter().all(|&r| r < tol) && stabilization_residual.is_none_or(|r| r < tol);
            ElementCheck { index, stabilization_residual, unitarity_residuals, passed }
        })
        .collect();
    Ok(StabilizerReport { elements, closure: group.closure_table(tol), identity_index: group.identity_index(tol), tol })
}

/// Validates a symmetry group supplied without a seed vector.
pub fn make_abstract_group<T: Real>(
    party_dims: Vec<usize>,
    elements: Vec<ProductOperator<T>>,
    tol: T,
) -> Result<StabilizerGroup<T>> {
    for (element, op) in elements.iter().enumerate() {
        if op.dims() != party_dims {
            return Err(Error::InvalidState(format!(
                "element {} has dimensions {:?}, expected {:?}",
                element + 1,
                op.dims(),
                party_dims
            )));
        }
        if let Some(party) = op.factors().iter().position(|f| !f.is_unitary(tol)) {
            return Err(Error::NonUnitary { element, party });
        }
    }
    let one = Complex::new(T::one(), T::zero());
    let group = StabilizerGroup {
        party_dims,
        elements: elements.into_iter().map(|operator| GroupElement { operator, phase: one }).collect(),
        mode: GroupMode::Abstract,
    };
    if group.identity_index(tol).is_none() {
        return Err(Error::MissingIdentity);
    }
    check_closure(&group, tol)?;
    Ok(group)
}

pub(crate) fn check_closure<T: Real>(group: &StabilizerGroup<T>, tol: T) -> Result<()> {
    for (left, row) in group.closure_table(tol).iter().enumerate() {
        if let Some(right) = row.iter().position(Option::is_none) {
            return Err(Error::ClosureViolation { left, right });
        }
    }
    Ok(())
}

/// Fits `φ = ⟨Ψ|S|Ψ⟩* / |⟨Ψ|S|Ψ⟩|` for each candidate and returns a
/// concrete group, failing on the first candidate that does not stabilize
/// the state up to phase.
pub fn fit_concrete_group<T: Real>(
    state: &StateVector<T>,
    candidates: Vec<ProductOperator<T>>,
    tol: T,
) -> Result<StabilizerGroup<T>> {
    let psi = state.amplitudes();
    let norm = vector_norm(psi);
    let mut elements = Vec::with_capacity(candidates.len());
    for (element, operator) in candidates.into_iter().enumerate() {
        let image = apply_product(&operator, psi);
        let overlap = vector_inner(psi, &image) / Complex::new(norm * norm, T::zero());
        let mag = overlap.norm();
        let phase = if mag > T::zero() {
            overlap.conj() / Complex::new(mag, T::zero())
        } else {
            Complex::new(T::one(), T::zero())
        };
        let residual = image.iter().zip(psi).fold(T::zero(), |acc, (x, y)| acc + (x * phase - y).norm_sqr()).sqrt();
        if !(residual < tol) {
            return Err(Error::SymmetryVerification { element, residual: residual.as_f64() });
        }
        elements.push(GroupElement { operator, phase });
    }
    let group = StabilizerGroup { party_dims: state.party_dims().to_vec(), elements, mode: GroupMode::Concrete };
    check_closure(&group, tol)?;
    Ok(group)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::LocalOperator;

    fn pp(a: usize, b: usize) -> ProductOperator<f64> {
        ProductOperator::new(vec![LocalOperator::pauli(a), LocalOperator::pauli(b)]).unwrap()
    }

    #[test]
    fn singleton_identity_group() {
        let g = make_abstract_group(vec![2, 2], vec![pp(0, 0)], 1e-9).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.identity_index(1e-9), Some(0));
    }

    #[test]
    fn closure_table_detects_missing_product() {
        assert!(make_abstract_group(vec![2, 2], vec![pp(0, 0), pp(1, 3)], 1e-9).is_ok());
        // (σ_1⊗σ_3)(σ_3⊗σ_1) = σ_2⊗σ_2 up to phase, which is absent
        let err = make_abstract_group(vec![2, 2], vec![pp(0, 0), pp(1, 3), pp(3, 1)], 1e-9).unwrap_err();
        assert_eq!(err, Error::ClosureViolation { left: 1, right: 2 });
        let full = make_abstract_group(vec![2, 2], vec![pp(0, 0), pp(1, 3), pp(3, 1), pp(2, 2)], 1e-9).unwrap();
        let table = full.closure_table(1e-9);
        assert_eq!(table[1][2], Some(3));
        assert_eq!(table[3][3], Some(0));
    }

    #[test]
    fn missing_identity_and_non_unitary_rejected() {
        assert_eq!(make_abstract_group(vec![2, 2], vec![pp(1, 1)], 1e-9).unwrap_err(), Error::MissingIdentity);
        let bad =
            ProductOperator::new(vec![LocalOperator::pauli(0), LocalOperator::<f64>::identity(2).scale_real(2.0)])
                .unwrap();
        let err = make_abstract_group(vec![2, 2], vec![pp(0, 0), bad], 1e-9).unwrap_err();
        assert_eq!(err.to_string(), "non-unitary factor at element 2, party 2");
    }
}
