use std::sync::Arc;

use num_complex::Complex;

use super::{SeedState, StabilizerGroup};
use crate::error::{Error, Result};
use crate::linalg::{apply_product, operator_to_bloch, vector_norm, BlochVector, LocalOperator, ProductOperator};
use crate::scalar::Real;

/// An SLOCC class: a verified seed, or just its symmetry group.
#[derive(Clone, Debug, PartialEq)]
pub enum SloccClass<T> {
    Concrete(SeedState<T>),
    Abstract(StabilizerGroup<T>),
}

impl<T: Real> SloccClass<T> {
    pub fn group(&self) -> &StabilizerGroup<T> {
        match self {
            Self::Concrete(seed) => seed.stabilizer(),
            Self::Abstract(group) => group,
        }
    }

    pub fn seed(&self) -> Option<&SeedState<T>> {
        match self {
            Self::Concrete(seed) => Some(seed),
            Self::Abstract(_) => None,
        }
    }

    pub fn party_dims(&self) -> &[usize] {
        self.group().party_dims()
    }
}

/// The ray `g|Ψ_s⟩ / ‖g|Ψ_s⟩‖`, stored as its canonical product operator.
#[derive(Clone, Debug)]
pub struct TrackedState<T> {
    g: ProductOperator<T>,
    class: Arc<SloccClass<T>>,
    normalization: Option<T>,
}

impl<T: Real> TrackedState<T> {
    /// Validates dimensions and invertibility, then canonicalizes every
    /// factor to `tr(g_i†g_i) = 1`.
    pub fn new(g: ProductOperator<T>, class: Arc<SloccClass<T>>, tol: T) -> Result<Self> {
        if g.dims() != class.party_dims() {
            return Err(Error::InvalidState(format!(
                "operator dimensions {:?} do not match class dimensions {:?}",
                g.dims(),
                class.party_dims()
            )));
        }
        g.check_invertible(tol)?;
        Ok(Self::from_parts(g, class))
    }

    pub(crate) fn from_parts(g: ProductOperator<T>, class: Arc<SloccClass<T>>) -> Self {
        let g = g.canonical();
        let normalization = class.seed().map(|seed| vector_norm(&apply_product(&g, seed.amplitudes())));
        Self { g, class, normalization }
    }

    pub fn g(&self) -> &ProductOperator<T> {
        &self.g
    }

    pub fn class(&self) -> &Arc<SloccClass<T>> {
        &self.class
    }

    pub fn group(&self) -> &StabilizerGroup<T> {
        self.class.group()
    }

    pub fn parties(&self) -> usize {
        self.g.parties()
    }

    pub fn party_dims(&self) -> Vec<usize> {
        self.g.dims()
    }

    /// `‖g|Ψ_s⟩‖` for the canonical `g`; `None` in abstract classes.
    pub fn normalization(&self) -> Option<T> {
        self.normalization
    }

    /// Trace-one Gram operators `G_i`.
    pub fn grams(&self) -> Vec<LocalOperator<T>> {
        self.g.grams()
    }

    pub fn bloch_vectors(&self) -> Option<Vec<BlochVector<T>>> {
        self.grams().iter().map(|gram| operator_to_bloch(gram, T::lit(1e-6)).ok()).collect()
    }

    /// Normalized amplitudes of the represented state.
    pub fn amplitudes(&self) -> Result<Vec<Complex<T>>> {
        let seed = self.class.seed().ok_or(Error::RequiresConcreteSeed)?;
        let v = apply_product(&self.g, seed.amplitudes());
        let n = self.normalization.unwrap_or_else(|| vector_norm(&v));
        Ok(v.into_iter().map(|z| z / n).collect())
    }

    pub fn same_class(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.class, &other.class) || *self.class == *other.class
    }

    /// Left-multiplies factor `party` by `op`.
    pub fn apply_local(&self, party: usize, op: &LocalOperator<T>) -> Self {
        let g = self.g.with_factor(party, op.matmul(self.g.factor(party)));
        Self::from_parts(g, self.class.clone())
    }
}
