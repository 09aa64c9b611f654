//! Finite-round LOCC transformations between pure multipartite states in an
//! SLOCC class whose seed state has a finite unitary stabilizer.
//!
//! Class members are tracked as `g|Ψ_s⟩` with a product operator `g`.
//! [`analysis`] decides whether a member is reachable by a nontrivial
//! protocol and whether it converts deterministically in one round;
//! [`protocol`] simulates and classifies protocol trees; [`sampler`]
//! estimates how rare reachable states are.
//!
//! All numerics are generic over [`Real`]; the aliases below fix `f64`.

// negated comparisons are deliberate: they reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod io;
pub mod linalg;
pub mod protocol;
pub mod sampler;
pub mod scalar;
pub mod seed;

pub use error::{Error, Result};
pub use scalar::{Real, Tolerances};

pub type Complex = num_complex::Complex<f64>;
pub type Operator = linalg::LocalOperator<f64>;
pub type Product = linalg::ProductOperator<f64>;
pub type Bloch = linalg::BlochVector<f64>;
pub type State = seed::StateVector<f64>;
pub type Group = seed::StabilizerGroup<f64>;
pub type Seed = seed::SeedState<f64>;
pub type Class = seed::SloccClass<f64>;
pub type Tracked = seed::TrackedState<f64>;
pub type Protocol = protocol::LoccNode<f64>;
