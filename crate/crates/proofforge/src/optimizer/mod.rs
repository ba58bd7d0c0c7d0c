//! Proof-search procedures over derivation structures: the Dijkstra-style
//! optimal-proof search for monotone recursive measures, budget deciders for
//! depth and tree size working against the oracle interface, and the
//! brute-force enumeration baseline the other procedures are tested against.

mod brute;
mod decide_depth;
mod decide_tree;
mod dijkstra;

pub use brute::{
    brute_force_optimal, enumerate_proofs, ProofEnumeration, ProofEvaluator,
    DEFAULT_ENUMERATION_CAP,
};
pub use decide_depth::decide_depth_leq;
pub use decide_tree::decide_treesize_leq;
pub use dijkstra::dijkstra_optimal;

use thiserror::Error;

use crate::derivers::DeriverError;
use crate::hypergraph::Proof;
use crate::measures::EvalError;
use crate::weight::Weight;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("goal '{0}' has no vertex in the derivation structure")]
    GoalAbsent(String),
    #[error("goal '{0}' is not derivable (no proof in the structure)")]
    Unreachable(String),
    #[error("the measure '{0}' is not monotone; the greedy search requires monotonicity")]
    RequiresMonotone(String),
    #[error("enumeration cap of {cap} subproofs exceeded")]
    EnumerationCap { cap: usize },
    #[error("budget {0} is too large to search")]
    BudgetTooLarge(Weight),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Deriver(#[from] DeriverError),
}

/// Counters from one search run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub edges_relaxed: usize,
    pub vertices_popped: usize,
    pub peak_memory_items: usize,
}

/// An optimal proof together with its weight and the run's counters.
#[derive(Debug)]
pub struct SearchResult {
    pub weight: Weight,
    pub proof: Proof,
    pub stats: SearchStats,
}

/// Outcome of a budget decision: whether an admissible proof within the
/// bound exists, with a witness when it does.
#[derive(Debug)]
pub struct Decision {
    pub admissible: bool,
    pub witness: Option<Proof>,
}

/// Options shared by the search procedures. `debug_invariants` switches on
/// the internal bookkeeping assertions (monotone pop order, single pops,
/// full acyclicity re-checks, and the tuple-tree conditions of the tree-size
/// decider); violations surface as `SearchError::InvariantViolation`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SearchOptions {
    pub debug_invariants: bool,
}

impl SearchOptions {
    pub fn checked() -> SearchOptions {
        SearchOptions { debug_invariants: true }
    }
}
