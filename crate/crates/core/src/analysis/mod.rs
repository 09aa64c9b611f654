//! Reachability and convertibility decisions for states in a class with a
//! finite stabilizer, plus the LU-equivalence test they rely on.

mod convertibility;
mod equivalence;
mod reachability;

pub use convertibility::{
    admissible_symmetries, build_convertibility_round, is_convertible, ConvertibilityCertificate,
    ConvertibilityOutcome, SearchConfig, SearchMode,
};
pub use equivalence::{lu_equivalent, lu_witness};
pub use reachability::{construct_reaching_protocol, is_reachable, ReachabilityCertificate};
