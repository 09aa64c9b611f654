use num_complex::Complex;

use super::{validate, LoccNode, RoundPath};
use crate::analysis::lu_equivalent;
use crate::error::{Error, Result};
use crate::linalg::{apply_product, tensor_product, vector_norm, LocalOperator, ProductOperator};
use crate::scalar::{Real, Tolerances};
use crate::seed::TrackedState;

/// Outcomes below this probability are dropped from the tree walk.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbabilityRule {
    /// `‖g'|Ψ_s⟩‖² / ‖g|Ψ_s⟩‖²` on the seed vector.
    ExactNorm,
    /// `tr(g_j†A†A g_j) / tr(g_j†g_j)`, used when no seed vector is known.
    /// It agrees with the exact rule on rounds whose outcomes all lead to
    /// LU-equivalent states.
    GramTrace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeterminismClass {
    /// Every round maps to a single LU class.
    AllDeterministic,
    /// The leaves agree up to LU but some intermediate round branches.
    DeterministicWithProbabilisticSteps,
    Nondeterministic,
}

#[derive(Clone, Debug)]
pub struct Leaf<T> {
    pub path: RoundPath,
    pub state: TrackedState<T>,
    pub probability: T,
}

#[derive(Clone, Debug)]
pub struct PrunedBranch<T> {
    pub path: RoundPath,
    pub probability: T,
}

#[derive(Clone, Debug)]
pub struct RoundRecord<T> {
    pub path: RoundPath,
    pub party: usize,
    /// Conditional outcome probabilities given the round was reached.
    pub probabilities: Vec<T>,
    /// Post-outcome states, `None` for pruned outcomes.
    pub children: Vec<Option<TrackedState<T>>>,
    /// All surviving children lie in one LU class.
    pub deterministic: bool,
}

#[derive(Clone, Debug)]
pub struct SimulationResult<T> {
    pub leaves: Vec<Leaf<T>>,
    pub pruned: Vec<PrunedBranch<T>>,
    pub rounds: Vec<RoundRecord<T>>,
    pub rule: ProbabilityRule,
    pub total_probability: T,
    /// All leaves lie in one LU class.
    pub overall_deterministic: bool,
    pub determinism_class: DeterminismClass,
}

fn outcome_operator<T: Real>(
    g: &ProductOperator<T>,
    party: usize,
    op: &LocalOperator<T>,
    corrections: &std::collections::BTreeMap<usize, LocalOperator<T>>,
) -> ProductOperator<T> {
    let factors = g
        .factors()
        .iter()
        .enumerate()
        .map(|(k, f)| {
            if k == party {
                op.matmul(f)
            } else if let Some(u) = corrections.get(&k) {
                u.matmul(f)
            } else {
                f.clone()
            }
        })
        .collect();
    ProductOperator::new(factors).expect("at least two parties")
}

fn all_equivalent<T: Real>(states: &[&TrackedState<T>], tol: T) -> Result<bool> {
    let Some(first) = states.first() else { return Ok(true) };
    for s in &states[1..] {
        if lu_equivalent(first, s, tol)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Walks the protocol on a tracked state, recording leaf states with their
/// probabilities and the LU classes reached by every round.
pub fn simulate<T: Real>(
    protocol: &LoccNode<T>,
    initial: &TrackedState<T>,
    tol: Tolerances<T>,
) -> Result<SimulationResult<T>> {
    validate(protocol, &initial.party_dims(), tol.nonzero)?;
    let rule = if initial.class().seed().is_some() { ProbabilityRule::ExactNorm } else { ProbabilityRule::GramTrace };
    let mut out = SimulationResult {
        leaves: vec![],
        pruned: vec![],
        rounds: vec![],
        rule,
        total_probability: T::zero(),
        overall_deterministic: true,
        determinism_class: DeterminismClass::AllDeterministic,
    };
    walk(protocol, initial, T::one(), RoundPath::default(), rule, tol, &mut out)?;
    out.total_probability = out.leaves.iter().fold(T::zero(), |acc, l| acc + l.probability);
    let leaf_states: Vec<&TrackedState<T>> = out.leaves.iter().map(|l| &l.state).collect();
    out.overall_deterministic = all_equivalent(&leaf_states, tol.eq)?;
    out.determinism_class = if !out.overall_deterministic {
        DeterminismClass::Nondeterministic
    } else if out.rounds.iter().all(|r| r.deterministic) {
        DeterminismClass::AllDeterministic
    } else {
        DeterminismClass::DeterministicWithProbabilisticSteps
    };
    Ok(out)
}

fn walk<T: Real>(
    node: &LoccNode<T>,
    state: &TrackedState<T>,
    reach: T,
    path: RoundPath,
    rule: ProbabilityRule,
    tol: Tolerances<T>,
    out: &mut SimulationResult<T>,
) -> Result<()> {
    let LoccNode::Round(round) = node else {
        out.leaves.push(Leaf { path, state: state.clone(), probability: reach });
        return Ok(());
    };
    let g = state.g();
    let j = round.party;
    let mut probabilities = Vec::with_capacity(round.outcomes.len());
    let mut children = Vec::with_capacity(round.outcomes.len());
    for (i, o) in round.outcomes.iter().enumerate() {
        let next = outcome_operator(g, j, &o.operator, &o.corrections);
        let p = match (rule, state.class().seed(), state.normalization()) {
            (ProbabilityRule::ExactNorm, Some(seed), Some(n)) => {
                let v = vector_norm(&apply_product(&next, seed.amplitudes()));
                (v * v) / (n * n)
            }
            _ => {
                let before = g.factor(j).gram().trace().re;
                next.factor(j).gram().trace().re / before
            }
        };
        probabilities.push(p);
        let child_path = path.child(i);
        if p < T::lit(PRUNE_THRESHOLD) {
            out.pruned.push(PrunedBranch { path: child_path, probability: reach * p });
            children.push(None);
            continue;
        }
        if next.check_invertible(tol.eq).is_err() {
            return Err(Error::InvalidProtocol(format!(
                "round {path}, outcome {}: post-measurement operator is singular and leaves the class",
                i + 1
            )));
        }
        let child = TrackedState::new(next, state.class().clone(), tol.eq)?;
        walk(&o.child, &child, reach * p, child_path, rule, tol, out)?;
        children.push(Some(child));
    }
    let live: Vec<&TrackedState<T>> = children.iter().flatten().collect();
    let deterministic = all_equivalent(&live, tol.eq)?;
    out.rounds.push(RoundRecord { path, party: j, probabilities, children, deterministic });
    Ok(())
}

/// Leaf witnesses: the index of a symmetry relating each leaf to `target`.
#[derive(Clone, Debug)]
pub struct DeterminismCheck {
    pub deterministic: bool,
    pub witnesses: Vec<(RoundPath, Option<usize>)>,
}

pub fn verify_deterministic<T: Real>(
    result: &SimulationResult<T>,
    target: &TrackedState<T>,
    tol: T,
) -> Result<DeterminismCheck> {
    let witnesses = result
        .leaves
        .iter()
        .map(|l| lu_equivalent(&l.state, target, tol).map(|w| (l.path.clone(), w)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DeterminismCheck { deterministic: witnesses.iter().all(|(_, w)| w.is_some()), witnesses })
}

pub fn classify_protocol<T: Real>(
    protocol: &LoccNode<T>,
    initial: &TrackedState<T>,
    tol: Tolerances<T>,
) -> Result<DeterminismClass> {
    Ok(simulate(protocol, initial, tol)?.determinism_class)
}

#[derive(Clone, Debug)]
pub struct DirectLeaf<T> {
    pub path: RoundPath,
    /// Normalized post-protocol state vector.
    pub amplitudes: Vec<Complex<T>>,
    pub probability: T,
}

/// Reference simulation on the full state vector: every outcome applies the
/// complete tensor-product operator `A ⊗ U_k ⊗ …` and probabilities are
/// squared norms.
pub fn simulate_direct<T: Real>(
    protocol: &LoccNode<T>,
    amplitudes: &[Complex<T>],
    party_dims: &[usize],
    tol: T,
) -> Result<Vec<DirectLeaf<T>>> {
    validate(protocol, party_dims, tol)?;
    let total: usize = party_dims.iter().product();
    if amplitudes.len() != total {
        return Err(Error::DimensionMismatch { expected: total, found: amplitudes.len() });
    }
    let n = vector_norm(amplitudes);
    let start: Vec<Complex<T>> = amplitudes.iter().map(|z| z / n).collect();
    let mut leaves = Vec::new();
    direct_walk(protocol, start, T::one(), RoundPath::default(), party_dims, &mut leaves)?;
    Ok(leaves)
}

fn direct_walk<T: Real>(
    node: &LoccNode<T>,
    psi: Vec<Complex<T>>,
    reach: T,
    path: RoundPath,
    dims: &[usize],
    leaves: &mut Vec<DirectLeaf<T>>,
) -> Result<()> {
    let LoccNode::Round(round) = node else {
        leaves.push(DirectLeaf { path, amplitudes: psi, probability: reach });
        return Ok(());
    };
    for (i, o) in round.outcomes.iter().enumerate() {
        let local: Vec<LocalOperator<T>> = (0..dims.len())
            .map(|k| {
                if k == round.party {
                    o.operator.clone()
                } else {
                    o.corrections.get(&k).cloned().unwrap_or_else(|| LocalOperator::identity(dims[k]))
                }
            })
            .collect();
        let image = tensor_product(&local)?.apply(&psi);
        let norm = vector_norm(&image);
        let p = norm * norm;
        if p < T::lit(PRUNE_THRESHOLD) {
            continue;
        }
        let next = image.iter().map(|z| z / norm).collect();
        direct_walk(&o.child, next, reach * p, path.child(i), dims, leaves)?;
    }
    Ok(())
}
