//! Finite LOCC protocol trees.
//!
//! Each round has one acting party applying a measurement; the outcome is
//! broadcast and the remaining parties respond with local unitaries. A
//! round's child is either another round or a leaf.

mod paper_example;
mod simulate;

use std::collections::BTreeMap;
use std::fmt;

pub use paper_example::{build_paper_example, paper_example_bound, PaperExample};
pub use simulate::{
    classify_protocol, simulate, simulate_direct, verify_deterministic, DeterminismCheck, DeterminismClass, DirectLeaf,
    Leaf, ProbabilityRule, PrunedBranch, RoundRecord, SimulationResult, PRUNE_THRESHOLD,
};

use crate::error::{Error, Result};
use crate::linalg::{proportional, LocalOperator};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome<T> {
    pub operator: LocalOperator<T>,
    /// Local unitaries keyed by (0-based) party index.
    pub corrections: BTreeMap<usize, LocalOperator<T>>,
    pub child: LoccNode<T>,
}

impl<T: Real> Outcome<T> {
    pub fn leaf(operator: LocalOperator<T>) -> Self {
        Self { operator, corrections: BTreeMap::new(), child: LoccNode::Leaf }
    }

    pub fn with_correction(mut self, party: usize, op: LocalOperator<T>) -> Self {
        self.corrections.insert(party, op);
        self
    }

    pub fn with_child(mut self, child: LoccNode<T>) -> Self {
        self.child = child;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoccRound<T> {
    /// Acting (measuring) party, 0-based.
    pub party: usize,
    pub outcomes: Vec<Outcome<T>>,
}

impl<T: Real> LoccRound<T> {
    /// `‖Σ_i A_i†A_i − 1‖_F`.
    pub fn completeness_residual(&self) -> T {
        let d = self.outcomes.first().map_or(1, |o| o.operator.dim());
        let sum = self.outcomes.iter().fold(LocalOperator::zeros(d), |acc, o| &acc + &o.operator.gram());
        (&sum - &LocalOperator::identity(d)).frobenius_norm()
    }

    /// All outcome effects `A_i†A_i` pairwise proportional.
    pub fn is_trivial(&self, tol: T) -> bool {
        let effects: Vec<_> = self.outcomes.iter().map(|o| o.operator.gram()).collect();
        effects.iter().all(|e| proportional(e, &effects[0], tol).is_some())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LoccNode<T> {
    Leaf,
    Round(LoccRound<T>),
}

impl<T: Real> LoccNode<T> {
    pub fn round(party: usize, outcomes: Vec<Outcome<T>>) -> Self {
        Self::Round(LoccRound { party, outcomes })
    }

    pub fn depth(&self) -> usize {
        match self {
            Self::Leaf => 0,
            Self::Round(r) => 1 + r.outcomes.iter().map(|o| o.child.depth()).max().unwrap_or(0),
        }
    }

    pub fn round_count(&self) -> usize {
        match self {
            Self::Leaf => 0,
            Self::Round(r) => 1 + r.outcomes.iter().map(|o| o.child.round_count()).sum::<usize>(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Self::Leaf => 1,
            Self::Round(r) => r.outcomes.iter().map(|o| o.child.leaf_count()).sum(),
        }
    }
}

/// Position of a node in the tree: the outcome indices taken from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct RoundPath(pub Vec<usize>);

impl RoundPath {
    pub fn child(&self, outcome: usize) -> Self {
        let mut v = self.0.clone();
        v.push(outcome);
        Self(v)
    }
}

impl fmt::Display for RoundPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "root");
        }
        write!(f, "root")?;
        for o in &self.0 {
            write!(f, "/{}", o + 1)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ValidationReport<T> {
    pub rounds: usize,
    pub depth: usize,
    pub max_completeness_residual: T,
    pub trivial_rounds: Vec<RoundPath>,
}

/// Checks every round: party index, operator dimensions, POVM completeness
/// and unitarity of the corrections.
pub fn validate<T: Real>(node: &LoccNode<T>, party_dims: &[usize], tol: T) -> Result<ValidationReport<T>> {
    let mut report = ValidationReport {
        rounds: 0,
        depth: node.depth(),
        max_completeness_residual: T::zero(),
        trivial_rounds: vec![],
    };
    validate_node(node, party_dims, tol, &RoundPath::default(), &mut report)?;
    Ok(report)
}

fn validate_node<T: Real>(
    node: &LoccNode<T>,
    dims: &[usize],
    tol: T,
    path: &RoundPath,
    report: &mut ValidationReport<T>,
) -> Result<()> {
    let LoccNode::Round(round) = node else { return Ok(()) };
    report.rounds += 1;
    if round.party >= dims.len() {
        return Err(Error::PartyOutOfRange { party: round.party, parties: dims.len() });
    }
    if round.outcomes.is_empty() {
        return Err(Error::InvalidProtocol(format!("round {path} has no outcomes")));
    }
    let d = dims[round.party];
    for (i, o) in round.outcomes.iter().enumerate() {
        if o.operator.dim() != d {
            return Err(Error::InvalidProtocol(format!(
                "round {path}, outcome {}: operator dimension {} does not match party {} dimension {d}",
                i + 1,
                o.operator.dim(),
                round.party + 1
            )));
        }
        for (&k, u) in &o.corrections {
            if k >= dims.len() {
                return Err(Error::PartyOutOfRange { party: k, parties: dims.len() });
            }
            if k == round.party {
                return Err(Error::InvalidProtocol(format!(
                    "round {path}, outcome {}: correction on the acting party {}",
                    i + 1,
                    k + 1
                )));
            }
            if u.dim() != dims[k] || !u.is_unitary(tol) {
                return Err(Error::InvalidProtocol(format!(
                    "round {path}, outcome {}: correction on party {} is not a {}x{} unitary",
                    i + 1,
                    k + 1,
                    dims[k],
                    dims[k]
                )));
            }
        }
    }
    let residual = round.completeness_residual();
    if !(residual < tol) {
        return Err(Error::Completeness { path: path.to_string(), residual: residual.as_f64() });
    }
    report.max_completeness_residual = report.max_completeness_residual.max(residual);
    if round.is_trivial(tol) {
        report.trivial_rounds.push(path.clone());
    }
    for (i, o) in round.outcomes.iter().enumerate() {
        validate_node(&o.child, dims, tol, &path.child(i), report)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn half_projectors() -> Vec<Outcome<f64>> {
        vec![
            Outcome::leaf(LocalOperator::diagonal(&[c(1.0, 0.0), c(0.0, 0.0)])),
            Outcome::leaf(LocalOperator::diagonal(&[c(0.0, 0.0), c(1.0, 0.0)])),
        ]
    }

    #[test]
    fn valid_round_passes() {
        let node = LoccNode::round(0, half_projectors());
        let rep = validate(&node, &[2, 2], 1e-9).unwrap();
        assert_eq!(rep.rounds, 1);
        assert!(rep.trivial_rounds.is_empty());
        assert_eq!(node.leaf_count(), 2);
    }

    #[test]
    fn incomplete_round_names_path() {
        let mut outs = half_projectors();
        outs[1] = Outcome::leaf(LocalOperator::diagonal(&[c(0.0, 0.0), c(0.5, 0.0)]));
        let inner = LoccNode::round(1, outs);
        let node = LoccNode::round(0, vec![Outcome::leaf(LocalOperator::identity(2)).with_child(inner)]);
        match validate(&node, &[2, 2], 1e-9) {
            Err(Error::Completeness { path, .. }) => assert_eq!(path, "root/1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn correction_rules() {
        let bad = LoccNode::round(
            0,
            vec![Outcome::leaf(LocalOperator::identity(2)).with_correction(0, LocalOperator::pauli(1))],
        );
        assert!(matches!(validate(&bad, &[2, 2], 1e-9), Err(Error::InvalidProtocol(_))));
        let non_unitary = LoccNode::round(
            0,
            vec![Outcome::leaf(LocalOperator::identity(2))
                .with_correction(1, LocalOperator::identity(2).scale_real(2.0))],
        );
        assert!(matches!(validate(&non_unitary, &[2, 2], 1e-9), Err(Error::InvalidProtocol(_))));
    }

    #[test]
    fn single_outcome_round_is_trivial() {
        let node = LoccNode::round(1, vec![Outcome::leaf(LocalOperator::<f64>::identity(2))]);
        let rep = validate(&node, &[2, 2], 1e-9).unwrap();
        assert_eq!(rep.trivial_rounds, vec![RoundPath::default()]);
    }
}
