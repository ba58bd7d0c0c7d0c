//! Derivers: saturation procedures that turn a theory and a goal sentence
//! into a derivation structure containing every allowed rule instance, plus
//! oracle-style access to such structures.
//!
//! Two calculi are implemented: the polynomial EL saturation (rules `R_0`,
//! `R_⊤`, `R_⊑`, `R_⊓⁻`, `R_⊓⁺`, `R_∃`, confined to the subconcept universe
//! of theory and goal) and the worst-case exponential ELI saturation
//! (`CR1`–`CR4` over conjunctions of concept names appearing in the growing
//! saturated theory). Theory axioms used by side conditions are explicit
//! leaf premise vertices, so a proof exposes every axiom it uses.
//!
//! Structures satisfy three assumptions that the search procedures rely on:
//! no two vertices share a label, premise counts stay under a declared
//! polynomial bound, and label sizes stay polynomial in the input. All three
//! are asserted at construction.

mod elk;
mod eli;
mod lazy;

pub use elk::elk_materialize;
pub use eli::eli_materialize;
pub use lazy::{lazy_view, DeriverKind, LazyView, MaterializedView};

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::hypergraph::{Hypergraph, VertexId};
use crate::logic::{Concept, Dialect, Gci, NormalizeError, Theory};

pub const RULE_R0: &str = "R_0";
pub const RULE_RTOP: &str = "R_⊤";
pub const RULE_RSUB: &str = "R_⊑";
pub const RULE_RAND_MINUS: &str = "R_⊓⁻";
pub const RULE_RAND_PLUS: &str = "R_⊓⁺";
pub const RULE_REX: &str = "R_∃";
pub const RULE_CR1: &str = "CR1";
pub const RULE_CR2: &str = "CR2";
pub const RULE_CR3: &str = "CR3";
pub const RULE_CR4: &str = "CR4";

/// Resource caps for saturation and oracle queries. The exponential deriver
/// must fail loudly instead of thrashing.
#[derive(Clone, Copy, Debug)]
pub struct Budgets {
    pub max_vertices: usize,
    /// Cap on the premise sets a single `expand` call may enumerate.
    pub max_expansions: usize,
}

impl Default for Budgets {
    fn default() -> Budgets {
        Budgets { max_vertices: 1_000_000, max_expansions: 10_000 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeriverError {
    #[error("deriver expects a {expected} theory, got {found}")]
    DialectMismatch { expected: Dialect, found: Dialect },
    #[error("budget exceeded: more than {limit} {kind}")]
    BudgetExceeded { kind: &'static str, limit: usize },
    #[error("unsupported goal shape: {0}")]
    UnsupportedGoal(String),
    #[error("axiom is not in ELI normal form: {0}")]
    NotNormalForm(String),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error("unknown sentence id {0}")]
    UnknownSentence(usize),
}

/// A saturated derivation structure: the hypergraph of all rule instances
/// over derivable sentences, together with the theory it is grounded over
/// (the normalized theory in the ELI case) and the goal it was built for.
#[derive(Clone, Debug)]
pub struct DerivationStructure {
    graph: Hypergraph,
    theory: Theory,
    goal: Gci,
    universe: BTreeSet<Concept>,
    vertex_of: HashMap<Gci, VertexId>,
    axiom_flags: Vec<bool>,
    max_premises: usize,
    premise_bound: usize,
}

impl DerivationStructure {
    pub(crate) fn assemble(
        graph: Hypergraph,
        theory: Theory,
        goal: Gci,
        universe: BTreeSet<Concept>,
        premise_bound: usize,
        label_size_bound: usize,
    ) -> DerivationStructure {
        let mut vertex_of = HashMap::with_capacity(graph.vertex_count());
        let mut axiom_flags = vec![false; graph.vertex_count()];
        for v in graph.vertices() {
            let label = graph.label(v);
            let prev = vertex_of.insert(label.clone(), v);
            assert!(prev.is_none(), "duplicate label '{label}' in derivation structure");
            axiom_flags[v.0] = theory.contains(label);
            assert!(
                label.size() <= label_size_bound,
                "label '{label}' exceeds the declared size bound {label_size_bound}"
            );
        }
        let max_premises = graph
            .edges()
            .iter()
            .map(|e| e.sources.len())
            .max()
            .unwrap_or(0);
        assert!(
            max_premises <= premise_bound,
            "edge with {max_premises} premises exceeds the declared bound {premise_bound}"
        );
        DerivationStructure {
            graph,
            theory,
            goal,
            universe,
            vertex_of,
            axiom_flags,
            max_premises,
            premise_bound,
        }
    }

    pub fn graph(&self) -> &Hypergraph {
        &self.graph
    }

    /// The theory the structure is grounded over. For the ELI deriver this
    /// is the normalized theory.
    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    pub fn goal(&self) -> &Gci {
        &self.goal
    }

    pub fn universe(&self) -> &BTreeSet<Concept> {
        &self.universe
    }

    pub fn vertex_of(&self, label: &Gci) -> Option<VertexId> {
        self.vertex_of.get(label).copied()
    }

    /// The vertex carrying the goal, when the goal is derivable.
    pub fn goal_vertex(&self) -> Option<VertexId> {
        self.vertex_of(&self.goal)
    }

    pub fn is_axiom(&self, v: VertexId) -> bool {
        self.axiom_flags[v.0]
    }

    pub fn max_premises(&self) -> usize {
        self.max_premises
    }

    /// The declared polynomial premise bound `p`; search procedures use it
    /// for their bookkeeping assertions.
    pub fn premise_bound(&self) -> usize {
        self.premise_bound
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn label_size_sum(&self) -> usize {
        self.graph.label_size_sum()
    }
}

impl fmt::Display for DerivationStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "derivation structure: {} vertices, {} edges, goal '{}'",
            self.graph.vertex_count(),
            self.graph.edge_count(),
            self.goal
        )
    }
}

pub type SentenceId = usize;

/// Oracle access to a (possibly implicit) derivation structure: membership
/// of edges, labels of vertices, and enumeration of the premise sets that
/// derive a sentence. `expand` exists because the budget-bounded searches
/// must enumerate candidate inferences; membership queries alone would force
/// blind enumeration over all id tuples.
pub trait DeriverOracle: Send + Sync {
    /// The id carrying the given sentence, if it is in the structure.
    fn resolve(&self, sentence: &Gci) -> Result<Option<SentenceId>, DeriverError>;

    fn label_query(&self, id: SentenceId, sentence: &Gci) -> Result<bool, DeriverError>;

    fn edge_query(
        &self,
        premises: &[SentenceId],
        conclusion: SentenceId,
    ) -> Result<bool, DeriverError>;

    /// Every incoming premise set of `id`, with its rule tag, in a
    /// deterministic order.
    fn expand(&self, id: SentenceId)
        -> Result<Vec<(Vec<SentenceId>, Option<String>)>, DeriverError>;

    fn is_axiom(&self, id: SentenceId) -> Result<bool, DeriverError>;

    fn sentence(&self, id: SentenceId) -> Result<Gci, DeriverError>;

    /// The declared polynomial bound on premises per inference.
    fn premise_bound(&self) -> usize;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_gci, parse_theory, subconcepts};

    #[test]
    fn figure_structure_contains_figure_proof() {
        let theory = parse_theory("A <= B\nB <= ex r. A").unwrap();
        let goal = parse_gci("A <= (B and ex r. A)").unwrap();
        let ds = elk_materialize(&theory, &goal, &Budgets::default()).unwrap();
        let fig = crate::testgen::figures::figure_proof();
        let hom = crate::hypergraph::find_homomorphism(fig.graph(), ds.graph())
            .expect("figure proof embeds into the saturated structure");
        assert!(hom.validate(fig.graph(), ds.graph()));
        assert!(ds.goal_vertex().is_some());
        // the structure stays within the subconcept universe
        let uni = subconcepts(&theory, &goal);
        for v in ds.graph().vertices() {
            let l = ds.graph().label(v);
            assert!(uni.contains(&l.lhs), "lhs {} outside universe", l.lhs);
            assert!(uni.contains(&l.rhs), "rhs {} outside universe", l.rhs);
        }
    }

    #[test]
    fn tautology_edge_for_empty_theory() {
        let theory = parse_theory("").unwrap();
        let goal = parse_gci("A <= A").unwrap();
        let ds = elk_materialize(&theory, &goal, &Budgets::default()).unwrap();
        let v = ds.goal_vertex().expect("A <= A is derivable");
        let incoming = ds.graph().incoming_edges(v);
        assert_eq!(incoming.len(), 1);
        let e = ds.graph().edge(incoming[0]);
        assert!(e.sources.is_empty());
        assert_eq!(e.rule.as_deref(), Some(RULE_R0));
    }

    #[test]
    fn transitive_existential_chain() {
        let theory = parse_theory("A <= ex r. B\nB <= C\nex r. C <= D").unwrap();
        let goal = parse_gci("A <= D").unwrap();
        let ds = elk_materialize(&theory, &goal, &Budgets::default()).unwrap();
        assert!(ds.goal_vertex().is_some());
        assert!(ds.vertex_of(&parse_gci("A <= ex r. C").unwrap()).is_some());
        // the final step uses the theory axiom as an explicit premise
        let v = ds.goal_vertex().unwrap();
        let uses_axiom = ds.graph().incoming_edges(v).iter().any(|&ei| {
            let e = ds.graph().edge(ei);
            e.rule.as_deref() == Some(RULE_RSUB)
                && e.sources
                    .iter()
                    .any(|s| ds.graph().label(*s) == &parse_gci("ex r. C <= D").unwrap())
        });
        assert!(uses_axiom);
    }

    #[test]
    fn rejects_eli_theory() {
        let theory = parse_theory("A <= ex inv(r). B").unwrap();
        let goal = parse_gci("A <= B").unwrap();
        assert!(matches!(
            elk_materialize(&theory, &goal, &Budgets::default()),
            Err(DeriverError::DialectMismatch { .. })
        ));
    }

    #[test]
    fn vertex_budget_is_enforced() {
        let theory = parse_theory("A <= B\nB <= ex r. A").unwrap();
        let goal = parse_gci("A <= (B and ex r. A)").unwrap();
        let budgets = Budgets { max_vertices: 3, ..Budgets::default() };
        assert!(matches!(
            elk_materialize(&theory, &goal, &budgets),
            Err(DeriverError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn structure_is_grounded_and_sound() {
        let theory = parse_theory("A <= B\nB <= ex r. A").unwrap();
        let goal = parse_gci("A <= (B and ex r. A)").unwrap();
        let ds = elk_materialize(&theory, &goal, &Budgets::default()).unwrap();
        let oracle = crate::testgen::el_entailment_oracle();
        let report =
            crate::hypergraph::validate_derivation_structure(ds.graph(), &theory, &oracle);
        assert!(report.is_empty(), "violations: {report:?}");
    }
}
