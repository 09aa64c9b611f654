use std::sync::Arc;

use super::{LoccNode, Outcome};
use crate::error::{Error, Result};
use crate::linalg::{bloch_to_operator, BlochVector, LocalOperator, ProductOperator};
use crate::scalar::{Real, Tolerances};
use crate::seed::{build_l_state, build_u_gate, SloccClass, TrackedState};

/// A two-round L-state protocol in which the first measurement branches
/// into LU-inequivalent states while every leaf ends in the target class.
#[derive(Clone, Debug)]
pub struct PaperExample<T> {
    pub x: T,
    pub class: Arc<SloccClass<T>>,
    /// Bloch vectors `{(x,x,2x), (x,−x,0), 0, 0}`.
    pub initial: TrackedState<T>,
    /// Bloch vectors `{2(x,x,x), (x,−x,0), 0, 0}`, reached after outcome 1.
    pub intermediate: TrackedState<T>,
    /// Bloch vectors `{2(x,x,x), (x,x,−2x), 0, 0}`.
    pub target: TrackedState<T>,
    pub protocol: LoccNode<T>,
}

/// Exclusive upper bound `1/(4√3)` on `x`; beyond it the party-1 target
/// Gram operator `2(x,x,x)` is no longer positive definite.
pub fn paper_example_bound() -> f64 {
    1.0 / (4.0 * 3f64.sqrt())
}

fn op<T: Real>(v: [T; 3], party: usize, x: T) -> Result<LocalOperator<T>> {
    let b = BlochVector::from_array(v);
    bloch_to_operator(b).map_err(|_| {
        Error::ParameterOutOfRange(format!(
            "x = {x} gives Bloch norm {} >= 1/2 for h_{}; need 0 < x < {:.6}",
            b.norm(),
            party,
            paper_example_bound()
        ))
    })
}

pub fn build_paper_example<T: Real>(x: T, tol: Tolerances<T>) -> Result<PaperExample<T>> {
    if !(x > T::zero()) {
        return Err(Error::ParameterOutOfRange(format!(
            "x = {x} must be positive; need 0 < x < {:.6}",
            paper_example_bound()
        )));
    }
    let two = T::lit(2.0);
    let target1 = op([two * x, two * x, two * x], 1, x)?;
    let source1 = op([x, x, two * x], 1, x)?;
    let source2 = op([x, -x, T::zero()], 2, x)?;
    let target2 = op([x, x, -two * x], 2, x)?;

    let class = Arc::new(SloccClass::Concrete(build_l_state(tol.eq)?));
    let id = LocalOperator::identity(2);
    let state = |a: &LocalOperator<T>, b: &LocalOperator<T>| -> Result<TrackedState<T>> {
        let g = ProductOperator::new(vec![a.clone(), b.clone(), id.clone(), id.clone()])?;
        TrackedState::new(g, class.clone(), tol.eq)
    };
    let initial = state(&source1, &source2)?;
    let intermediate = state(&target1, &source2)?;
    let target = state(&target1, &target2)?;

    let g1_inv = initial.g().factor(0).inverse()?;
    let g2_inv = initial.g().factor(1).inverse()?;
    let h1 = intermediate.g().factor(0).clone();
    let h2 = target.g().factor(1).clone();
    let s3 = LocalOperator::pauli(3);
    let u = build_u_gate::<T>();
    let u2 = u.matmul(&u);
    let u_s3 = u.matmul(&s3);
    let third = T::one() / T::lit(3.0);

    let branch1 = LoccNode::round(
        1,
        vec![
            Outcome::leaf(h2.matmul(&g2_inv).scale_real(third.sqrt())),
            Outcome::leaf(h2.matmul(&u2).matmul(&g2_inv).scale_real((two * third).sqrt()))
                .with_correction(0, u2.clone())
                .with_correction(2, u2.clone())
                .with_correction(3, u2.clone()),
        ],
    );
    let branch2 = LoccNode::round(
        1,
        vec![
            Outcome::leaf(h2.matmul(&s3).matmul(&g2_inv).scale_real(third.sqrt()))
                .with_correction(2, s3.clone())
                .with_correction(3, s3.clone()),
            Outcome::leaf(h2.matmul(&u_s3).matmul(&g2_inv).scale_real((two * third).sqrt()))
                .with_correction(0, u.clone())
                .with_correction(2, u_s3.clone())
                .with_correction(3, u_s3.clone()),
        ],
    );
    let quarter = T::lit(0.25);
    let protocol = LoccNode::round(
        0,
        vec![
            Outcome::leaf(h1.matmul(&g1_inv).scale_real((T::one() - quarter).sqrt())).with_child(branch1),
            Outcome::leaf(h1.matmul(&s3).matmul(&g1_inv).scale_real(quarter.sqrt())).with_child(branch2),
        ],
    );
    Ok(PaperExample { x, class, initial, intermediate, target, protocol })
}
