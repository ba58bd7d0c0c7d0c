//! Oracle views over derivation structures.
//!
//! `MaterializedView` wraps an already-saturated structure. `LazyView`
//! defers saturation until the first query: the calculi's side conditions
//! (groundedness of premise vertices, the growing set of appearing
//! conjunctions) are global properties of the saturated theory, so the view
//! saturates once behind a lock and memoizes the result, including a budget
//! error if one occurs. Query semantics and budgets are identical to the
//! materialized path, which the agreement tests assert query by query.

use std::sync::{Arc, Mutex};

use super::{
    eli_materialize, elk_materialize, Budgets, DerivationStructure, DeriverError, DeriverOracle,
    SentenceId,
};
use crate::hypergraph::VertexId;
use crate::logic::{normalize_eli, Dialect, Gci, Theory};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DeriverKind {
    Elk,
    Eli,
}

/// Direct oracle access to a materialized structure.
pub struct MaterializedView {
    structure: Arc<DerivationStructure>,
    budgets: Budgets,
}

impl MaterializedView {
    pub fn new(structure: Arc<DerivationStructure>) -> MaterializedView {
        MaterializedView { structure, budgets: Budgets::default() }
    }

    pub fn with_budgets(structure: Arc<DerivationStructure>, budgets: Budgets) -> MaterializedView {
        MaterializedView { structure, budgets }
    }

    pub fn structure(&self) -> &DerivationStructure {
        &self.structure
    }
}

fn expand_structure(
    ds: &DerivationStructure,
    id: SentenceId,
    budgets: &Budgets,
) -> Result<Vec<(Vec<SentenceId>, Option<String>)>, DeriverError> {
    if id >= ds.vertex_count() {
        return Err(DeriverError::UnknownSentence(id));
    }
    let incoming = ds.graph().incoming_edges(VertexId(id));
    if incoming.len() > budgets.max_expansions {
        return Err(DeriverError::BudgetExceeded {
            kind: "premise sets per expansion",
            limit: budgets.max_expansions,
        });
    }
    let mut out: Vec<(Vec<SentenceId>, Option<String>)> = incoming
        .iter()
        .map(|&ei| {
            let e = ds.graph().edge(ei);
            (e.sources.iter().map(|v| v.0).collect(), e.rule.clone())
        })
        .collect();
    out.sort();
    Ok(out)
}

impl DeriverOracle for MaterializedView {
    fn resolve(&self, sentence: &Gci) -> Result<Option<SentenceId>, DeriverError> {
        Ok(self.structure.vertex_of(sentence).map(|v| v.0))
    }

    fn label_query(&self, id: SentenceId, sentence: &Gci) -> Result<bool, DeriverError> {
        if id >= self.structure.vertex_count() {
            return Err(DeriverError::UnknownSentence(id));
        }
        Ok(self.structure.graph().label(VertexId(id)) == sentence)
    }

    fn edge_query(
        &self,
        premises: &[SentenceId],
        conclusion: SentenceId,
    ) -> Result<bool, DeriverError> {
        if conclusion >= self.structure.vertex_count()
            || premises.iter().any(|&p| p >= self.structure.vertex_count())
        {
            return Err(DeriverError::UnknownSentence(conclusion));
        }
        let sources: Vec<VertexId> = premises.iter().map(|&p| VertexId(p)).collect();
        Ok(self.structure.graph().has_edge(&sources, VertexId(conclusion)))
    }

    fn expand(
        &self,
        id: SentenceId,
    ) -> Result<Vec<(Vec<SentenceId>, Option<String>)>, DeriverError> {
        expand_structure(&self.structure, id, &self.budgets)
    }

    fn is_axiom(&self, id: SentenceId) -> Result<bool, DeriverError> {
        if id >= self.structure.vertex_count() {
            return Err(DeriverError::UnknownSentence(id));
        }
        Ok(self.structure.is_axiom(VertexId(id)))
    }

    fn sentence(&self, id: SentenceId) -> Result<Gci, DeriverError> {
        if id >= self.structure.vertex_count() {
            return Err(DeriverError::UnknownSentence(id));
        }
        Ok(self.structure.graph().label(VertexId(id)).clone())
    }

    fn premise_bound(&self) -> usize {
        self.structure.premise_bound()
    }
}

/// Saturates on first query and memoizes the outcome.
pub struct LazyView {
    kind: DeriverKind,
    theory: Theory,
    goal: Gci,
    budgets: Budgets,
    premise_bound: usize,
    state: Mutex<Option<Result<Arc<DerivationStructure>, DeriverError>>>,
}

/// Builds a lazy oracle over the deriver's implicit structure. The theory
/// is validated (and, for the ELI deriver, normalized) up front; saturation
/// happens on first use.
pub fn lazy_view(
    kind: DeriverKind,
    theory: &Theory,
    goal: &Gci,
    budgets: Budgets,
) -> Result<LazyView, DeriverError> {
    let theory = match kind {
        DeriverKind::Elk => {
            if theory.dialect != Dialect::El {
                return Err(DeriverError::DialectMismatch {
                    expected: Dialect::El,
                    found: theory.dialect,
                });
            }
            theory.clone()
        }
        DeriverKind::Eli => normalize_eli(theory)?.theory,
    };
    let premise_bound = match kind {
        // widest conjunction in the universe, two premises minimum
        DeriverKind::Elk => crate::logic::subconcepts(&theory, goal)
            .iter()
            .map(|c| c.conjuncts().len())
            .max()
            .unwrap_or(1)
            .max(2),
        // CR2 takes one premise per name plus the side sentence
        DeriverKind::Eli => theory.concept_names().len() + 1 + goal.size(),
    };
    Ok(LazyView {
        kind,
        theory,
        goal: goal.clone(),
        budgets,
        premise_bound,
        state: Mutex::new(None),
    })
}

impl LazyView {
    /// The saturated structure, computed on first use.
    pub fn structure(&self) -> Result<Arc<DerivationStructure>, DeriverError> {
        let mut state = self.state.lock().expect("lazy view lock");
        if state.is_none() {
            let result = match self.kind {
                DeriverKind::Elk => elk_materialize(&self.theory, &self.goal, &self.budgets),
                DeriverKind::Eli => eli_materialize(&self.theory, &self.goal, &self.budgets),
            };
            *state = Some(result.map(Arc::new));
        }
        state.as_ref().unwrap().clone()
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }
}

impl DeriverOracle for LazyView {
    fn resolve(&self, sentence: &Gci) -> Result<Option<SentenceId>, DeriverError> {
        Ok(self.structure()?.vertex_of(sentence).map(|v| v.0))
    }

    fn label_query(&self, id: SentenceId, sentence: &Gci) -> Result<bool, DeriverError> {
        let ds = self.structure()?;
        if id >= ds.vertex_count() {
            return Err(DeriverError::UnknownSentence(id));
        }
        Ok(ds.graph().label(VertexId(id)) == sentence)
    }

    fn edge_query(
        &self,
        premises: &[SentenceId],
        conclusion: SentenceId,
    ) -> Result<bool, DeriverError> {
        let ds = self.structure()?;
        if conclusion >= ds.vertex_count() || premises.iter().any(|&p| p >= ds.vertex_count()) {
            return Err(DeriverError::UnknownSentence(conclusion));
        }
        let sources: Vec<VertexId> = premises.iter().map(|&p| VertexId(p)).collect();
        Ok(ds.graph().has_edge(&sources, VertexId(conclusion)))
    }

    fn expand(
        &self,
        id: SentenceId,
    ) -> Result<Vec<(Vec<SentenceId>, Option<String>)>, DeriverError> {
        let ds = self.structure()?;
        expand_structure(&ds, id, &self.budgets)
    }

    fn is_axiom(&self, id: SentenceId) -> Result<bool, DeriverError> {
        let ds = self.structure()?;
        if id >= ds.vertex_count() {
            return Err(DeriverError::UnknownSentence(id));
        }
        Ok(ds.is_axiom(VertexId(id)))
    }

    fn sentence(&self, id: SentenceId) -> Result<Gci, DeriverError> {
        let ds = self.structure()?;
        if id >= ds.vertex_count() {
            return Err(DeriverError::UnknownSentence(id));
        }
        Ok(ds.graph().label(VertexId(id)).clone())
    }

    fn premise_bound(&self) -> usize {
        self.premise_bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_gci, parse_theory};

    /// Every vertex and edge of the materialized structure answers true on
    /// the lazy view, and lazy expansions restricted to materialized
    /// sentences coincide with the materialized incoming edges.
    fn assert_agreement(kind: DeriverKind, theory: &Theory, goal: &Gci) {
        let lazy = lazy_view(kind, theory, goal, Budgets::default()).unwrap();
        let ds = match kind {
            DeriverKind::Elk => elk_materialize(theory, goal, &Budgets::default()).unwrap(),
            DeriverKind::Eli => {
                let n = normalize_eli(theory).unwrap();
                eli_materialize(&n.theory, goal, &Budgets::default()).unwrap()
            }
        };
        for v in ds.graph().vertices() {
            let label = ds.graph().label(v);
            let id = lazy.resolve(label).unwrap().expect("vertex resolves");
            assert!(lazy.label_query(id, label).unwrap());
            assert!(!lazy.label_query(id, goal).unwrap() || label == goal);
            assert_eq!(lazy.is_axiom(id).unwrap(), ds.is_axiom(v));

            let translate = |w: VertexId| {
                lazy.resolve(ds.graph().label(w)).unwrap().expect("premise resolves")
            };
            let mut expected: Vec<(Vec<usize>, Option<String>)> = ds
                .graph()
                .incoming_edges(v)
                .iter()
                .map(|&ei| {
                    let e = ds.graph().edge(ei);
                    let mut s: Vec<usize> = e.sources.iter().map(|w| translate(*w)).collect();
                    s.sort_unstable();
                    (s, e.rule.clone())
                })
                .collect();
            expected.sort();
            let got = lazy.expand(id).unwrap();
            assert_eq!(got, expected, "expand mismatch on {label}");
            for (premises, _) in &expected {
                assert!(lazy.edge_query(premises, id).unwrap());
            }
        }
    }

    #[test]
    fn lazy_elk_agrees_with_materialized() {
        let theory = parse_theory("A <= B\nB <= ex r. A").unwrap();
        let goal = parse_gci("A <= (B and ex r. A)").unwrap();
        assert_agreement(DeriverKind::Elk, &theory, &goal);
    }

    #[test]
    fn lazy_eli_agrees_with_materialized() {
        let theory = parse_theory("A <= ex r. B\nB <= all inv(r). C\nA <= all r. D").unwrap();
        let goal = parse_gci("A <= C").unwrap();
        assert_agreement(DeriverKind::Eli, &theory, &goal);
    }

    #[test]
    fn figure_edge_query() {
        let theory = parse_theory("A <= B\nB <= ex r. A").unwrap();
        let goal = parse_gci("A <= (B and ex r. A)").unwrap();
        let lazy = lazy_view(DeriverKind::Elk, &theory, &goal, Budgets::default()).unwrap();
        let p1 = lazy.resolve(&parse_gci("A <= B").unwrap()).unwrap().unwrap();
        let p2 = lazy.resolve(&parse_gci("B <= ex r. A").unwrap()).unwrap().unwrap();
        let c = lazy.resolve(&parse_gci("A <= ex r. A").unwrap()).unwrap().unwrap();
        assert!(lazy.edge_query(&[p1, p2], c).unwrap());
        assert!(!lazy.edge_query(&[p2], c).unwrap());
    }

    #[test]
    fn expand_of_figure_goal() {
        let theory = parse_theory("A <= B\nB <= ex r. A").unwrap();
        let goal = parse_gci("A <= (B and ex r. A)").unwrap();
        let lazy = lazy_view(DeriverKind::Elk, &theory, &goal, Budgets::default()).unwrap();
        let g = lazy.resolve(&goal).unwrap().unwrap();
        let expansions = lazy.expand(g).unwrap();
        assert_eq!(expansions.len(), 1);
        assert_eq!(expansions[0].1.as_deref(), Some(super::super::RULE_RAND_PLUS));
        let labels: Vec<String> = expansions[0]
            .0
            .iter()
            .map(|&p| lazy.sentence(p).unwrap().to_string())
            .collect();
        assert_eq!(labels, vec!["A <= B".to_string(), "A <= ex r. A".to_string()]);
    }

    #[test]
    fn label_query_mismatch_is_false() {
        let theory = parse_theory("A <= B").unwrap();
        let goal = parse_gci("A <= B").unwrap();
        let lazy = lazy_view(DeriverKind::Elk, &theory, &goal, Budgets::default()).unwrap();
        let id = lazy.resolve(&goal).unwrap().unwrap();
        assert!(!lazy.label_query(id, &parse_gci("B <= A").unwrap()).unwrap());
    }

    #[test]
    fn budget_error_is_memoized() {
        let theory = parse_theory("A <= B\nB <= ex r. A").unwrap();
        let goal = parse_gci("A <= (B and ex r. A)").unwrap();
        let budgets = Budgets { max_vertices: 2, ..Budgets::default() };
        let lazy = lazy_view(DeriverKind::Elk, &theory, &goal, budgets).unwrap();
        assert!(matches!(
            lazy.resolve(&goal),
            Err(DeriverError::BudgetExceeded { .. })
        ));
        assert!(matches!(
            lazy.resolve(&goal),
            Err(DeriverError::BudgetExceeded { .. })
        ));
    }
}
