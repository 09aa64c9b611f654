use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{commutator_norm, matrix_sqrt_psd, proportional, LocalOperator, ProductOperator};
use crate::protocol::{LoccNode, LoccRound, Outcome};
use crate::scalar::{Real, Tolerances};
use crate::seed::{SloccClass, StabilizerGroup, TrackedState};

/// A symmetry `S` and party `j` with `[H_j, S_j] ≠ 0` while `[H_i, S_i] = 0`
/// for every other party.
#[derive(Clone, Debug, PartialEq)]
pub struct ReachabilityCertificate<T> {
    pub symmetry_index: usize,
    pub distinguished_party: usize,
    /// `‖[H_i, S_i]‖_F` for every party.
    pub commuting_residuals: Vec<T>,
}

fn commutators<T: Real>(grams: &[LocalOperator<T>], s: &ProductOperator<T>) -> Result<Vec<T>> {
    grams.iter().zip(s.factors()).map(|(h, f)| commutator_norm(h, f)).collect()
}

fn check_pattern<T: Real>(residuals: &[T], j: usize, tol: Tolerances<T>) -> bool {
    residuals.iter().enumerate().all(|(i, &r)| if i == j { r >= tol.nonzero } else { r < tol.eq })
}

fn check_inputs<T: Real>(h: &ProductOperator<T>, group: &StabilizerGroup<T>, tol: Tolerances<T>) -> Result<()> {
    if h.dims() != group.party_dims() {
        return Err(Error::InvalidState(format!(
            "operator dimensions {:?} do not match group dimensions {:?}",
            h.dims(),
            group.party_dims()
        )));
    }
    h.check_invertible(tol.eq)
}

/// Decides whether `h|Ψ_s⟩` can be the output of a nontrivial finite-round
/// LOCC protocol whose input lies in the same class.
///
/// Elements are scanned in group order and parties in index order; the
/// first qualifying pair is returned.
pub fn is_reachable<T: Real>(
    h: &ProductOperator<T>,
    group: &StabilizerGroup<T>,
    tol: Tolerances<T>,
) -> Result<Option<ReachabilityCertificate<T>>> {
    check_inputs(h, group, tol)?;
    let grams = h.grams();
    for (index, e) in group.elements().iter().enumerate() {
        let residuals = commutators(&grams, &e.operator)?;
        if let Some(j) = (0..residuals.len()).find(|&j| check_pattern(&residuals, j, tol)) {
            return Ok(Some(ReachabilityCertificate {
                symmetry_index: index,
                distinguished_party: j,
                commuting_residuals: residuals,
            }));
        }
    }
    Ok(None)
}

impl<T: Real> ReachabilityCertificate<T> {
    /// Recomputes the commutator pattern against `h` and `group`.
    pub fn revalidate(&self, h: &ProductOperator<T>, group: &StabilizerGroup<T>, tol: Tolerances<T>) -> Result<()> {
        check_inputs(h, group, tol)?;
        let Some(e) = group.elements().get(self.symmetry_index) else {
            return Err(Error::StaleCertificate(format!("symmetry index {} out of range", self.symmetry_index + 1)));
        };
        if self.distinguished_party >= group.parties() {
            return Err(Error::StaleCertificate(format!("party {} out of range", self.distinguished_party + 1)));
        }
        let residuals = commutators(&h.grams(), &e.operator)?;
        if !check_pattern(&residuals, self.distinguished_party, tol) {
            return Err(Error::StaleCertificate(format!(
                "commutator pattern no longer holds for element {} and party {}",
                self.symmetry_index + 1,
                self.distinguished_party + 1
            )));
        }
        Ok(())
    }
}

/// Builds the one-round protocol that reaches `h|Ψ_s⟩`.
///
/// The source replaces the distinguished factor by `g_j = √G_j` with
/// `G_j = p·H_j + (1−p)·S_j†H_jS_j`. Party `j` measures
/// `A_1 = √p·h_j g_j⁻¹`, `A_2 = √(1−p)·h_j S_j g_j⁻¹`; after outcome 2 every
/// other party applies the unitary `h_i S_i h_i⁻¹`.
pub fn construct_reaching_protocol<T: Real>(
    h: &ProductOperator<T>,
    cert: &ReachabilityCertificate<T>,
    p: T,
    class: Arc<SloccClass<T>>,
    tol: Tolerances<T>,
) -> Result<(TrackedState<T>, LoccNode<T>)> {
    let group = class.group();
    cert.revalidate(h, group, tol)?;
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::InvalidProbability(p.as_f64()));
    }
    let j = cert.distinguished_party;
    let hc = h.canonical();
    let s = &group.element(cert.symmetry_index).operator;
    let hj = hc.factor(j);
    let sj = s.factor(j);
    let gram = hj.gram();
    let rotated = sj.adjoint().matmul(&gram).matmul(sj);
    let source_gram = &gram.scale_real(p) + &rotated.scale_real(T::one() - p);
    let gj = matrix_sqrt_psd(&source_gram, tol.eq)?;
    let gj_inv = gj.inverse().map_err(|_| Error::Singular { party: Some(j) })?;

    let a1 = hj.matmul(&gj_inv).scale_real(p.sqrt());
    let a2 = hj.matmul(sj).matmul(&gj_inv).scale_real((T::one() - p).sqrt());
    if proportional(&a1.gram(), &a2.gram(), tol.nonzero).is_some() {
        return Err(Error::InvalidProtocol("measurement outcomes are proportional".into()));
    }

    let mut corrections = BTreeMap::new();
    for i in (0..hc.parties()).filter(|&i| i != j) {
        let hi = hc.factor(i);
        let w = hi.matmul(s.factor(i)).matmul(&hi.inverse().map_err(|_| Error::Singular { party: Some(i) })?);
        if !w.is_unitary(tol.nonzero) {
            return Err(Error::StaleCertificate(format!("correction on party {} is not unitary", i + 1)));
        }
        if proportional(&w, &LocalOperator::identity(w.dim()), tol.eq).is_none() {
            corrections.insert(i, w);
        }
    }
    let round = LoccRound {
        party: j,
        outcomes: vec![Outcome::leaf(a1), Outcome { operator: a2, corrections, child: LoccNode::Leaf }],
    };
    let residual = round.completeness_residual();
    if !(residual < tol.nonzero) {
        return Err(Error::Completeness { path: "root".into(), residual: residual.as_f64() });
    }
    let source = TrackedState::new(hc.with_factor(j, gj), class, tol.eq)?;
    Ok((source, LoccNode::Round(round)))
}
