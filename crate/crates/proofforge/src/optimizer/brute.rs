//! Exhaustive subproof enumeration: the independent baseline the greedy
//! search and the budget deciders are checked against, and the only
//! optimizer for the non-recursive size measure.

use std::collections::BTreeMap;

use super::{SearchError, SearchResult, SearchStats};
use crate::derivers::DerivationStructure;
use crate::hypergraph::{Hypergraph, Proof, VertexId};
use crate::logic::Gci;
use crate::measures::{evaluate, size, Measure};
use crate::weight::Weight;

pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

/// What the brute-force search minimizes: a recursive measure or the plain
/// vertex count.
#[derive(Clone, Copy)]
pub enum ProofEvaluator<'a> {
    Recursive(&'a Measure),
    Size,
}

impl ProofEvaluator<'_> {
    pub fn eval(&self, p: &Proof) -> Result<Weight, SearchError> {
        match self {
            ProofEvaluator::Recursive(m) => Ok(evaluate(m, p)?),
            ProofEvaluator::Size => Ok(size(p)),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            ProofEvaluator::Recursive(m) => m.name(),
            ProofEvaluator::Size => "size",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pick {
    AxiomLeaf,
    Edge(usize),
}

/// Walks every assignment of one derivation per needed vertex, in a fixed
/// order: vertices are processed smallest-id-first, and per vertex the
/// axiom-leaf option precedes the incoming edges. Cyclic assignments are
/// discarded when the candidate graph is assembled.
struct Enumerator<'a, F: FnMut(Proof, Vec<VertexId>) -> Result<(), SearchError>> {
    ds: &'a DerivationStructure,
    cap: usize,
    emitted: usize,
    sink: VertexId,
    on_proof: F,
    truncated: bool,
}

impl<'a, F: FnMut(Proof, Vec<VertexId>) -> Result<(), SearchError>> Enumerator<'a, F> {
    fn run(&mut self) -> Result<(), SearchError> {
        let mut picks: BTreeMap<VertexId, Pick> = BTreeMap::new();
        let mut pending: Vec<VertexId> = vec![self.sink];
        self.step(&mut picks, &mut pending)
    }

    fn step(
        &mut self,
        picks: &mut BTreeMap<VertexId, Pick>,
        pending: &mut Vec<VertexId>,
    ) -> Result<(), SearchError> {
        if self.truncated {
            return Ok(());
        }
        // next unresolved vertex, smallest id first
        pending.sort_unstable();
        pending.dedup();
        let next = pending.iter().copied().find(|v| !picks.contains_key(v));
        let Some(v) = next else {
            return self.emit(picks);
        };
        let graph = self.ds.graph();
        if self.ds.is_axiom(v) {
            picks.insert(v, Pick::AxiomLeaf);
            self.step(picks, &mut pending.clone())?;
            picks.remove(&v);
        }
        for &ei in graph.incoming_edges(v) {
            picks.insert(v, Pick::Edge(ei));
            let mut deeper = pending.clone();
            deeper.extend(graph.edge(ei).sources.iter().copied());
            self.step(picks, &mut deeper)?;
            picks.remove(&v);
        }
        Ok(())
    }

    fn emit(&mut self, picks: &BTreeMap<VertexId, Pick>) -> Result<(), SearchError> {
        if self.emitted >= self.cap {
            self.truncated = true;
            return Ok(());
        }
        let graph = self.ds.graph();
        let mut g = Hypergraph::new();
        let mut map = BTreeMap::new();
        for &v in picks.keys() {
            map.insert(v, g.add_vertex(graph.label(v).clone()));
        }
        for (&v, &pick) in picks {
            if let Pick::Edge(ei) = pick {
                let e = graph.edge(ei);
                g.add_edge(e.sources.iter().map(|s| map[&s]), map[&v], e.rule.as_deref());
            }
        }
        let Ok(proof) = Proof::new(g, map[&self.sink]) else {
            return Ok(()); // cyclic assignment
        };
        self.emitted += 1;
        let ids: Vec<VertexId> = picks.keys().copied().collect();
        (self.on_proof)(proof, ids)
    }
}

/// Enumerates every subproof of the structure whose sink carries `goal`, up
/// to `cap` proofs; `truncated` flags a partial list.
pub struct ProofEnumeration {
    pub proofs: Vec<Proof>,
    pub truncated: bool,
}

pub fn enumerate_proofs(
    ds: &DerivationStructure,
    goal: &Gci,
    cap: usize,
) -> Result<ProofEnumeration, SearchError> {
    let Some(sink) = ds.vertex_of(goal) else {
        return Ok(ProofEnumeration { proofs: Vec::new(), truncated: false });
    };
    let mut proofs = Vec::new();
    let mut en = Enumerator {
        ds,
        cap,
        emitted: 0,
        sink,
        on_proof: |p: Proof, _ids| {
            proofs.push(p);
            Ok(())
        },
        truncated: false,
    };
    en.run()?;
    let truncated = en.truncated;
    Ok(ProofEnumeration { proofs, truncated })
}

/// Minimizes an arbitrary measure by enumerating every subproof with the
/// goal sink. Ties go to the lexicographically smallest vertex-id sequence.
pub fn brute_force_optimal(
    ds: &DerivationStructure,
    evaluator: ProofEvaluator,
    cap: usize,
) -> Result<SearchResult, SearchError> {
    let goal = ds.goal().clone();
    let Some(sink) = ds.vertex_of(&goal) else {
        return Err(SearchError::GoalAbsent(goal.to_string()));
    };
    let mut best: Option<(Weight, Proof, Vec<VertexId>)> = None;
    let mut emitted = 0usize;
    let mut en = Enumerator {
        ds,
        cap,
        emitted: 0,
        sink,
        on_proof: |p: Proof, ids: Vec<VertexId>| {
            emitted += 1;
            let w = evaluator.eval(&p)?;
            let better = match &best {
                None => true,
                Some((bw, _, bids)) => w < *bw || (w == *bw && ids < *bids),
            };
            if better {
                best = Some((w, p, ids));
            }
            Ok(())
        },
        truncated: false,
    };
    en.run()?;
    if en.truncated {
        return Err(SearchError::EnumerationCap { cap });
    }
    match best {
        None => Err(SearchError::Unreachable(goal.to_string())),
        Some((weight, proof, _)) => Ok(SearchResult {
            weight,
            proof,
            stats: SearchStats { edges_relaxed: 0, vertices_popped: 0, peak_memory_items: emitted },
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivers::{elk_materialize, Budgets};
    use crate::logic::{parse_gci, parse_theory};
    use crate::measures::{depth_measure, tree_size_measure};

    fn figure_structure() -> DerivationStructure {
        let theory = parse_theory("A <= B\nB <= ex r. A").unwrap();
        let goal = parse_gci("A <= (B and ex r. A)").unwrap();
        elk_materialize(&theory, &goal, &Budgets::default()).unwrap()
    }

    #[test]
    fn figure_minimum_size_is_four() {
        let ds = figure_structure();
        let r = brute_force_optimal(&ds, ProofEvaluator::Size, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(r.weight, Weight::from_u64(4));
    }

    #[test]
    fn figure_minimum_depth_and_tree_size() {
        let ds = figure_structure();
        let depth = depth_measure();
        let r =
            brute_force_optimal(&ds, ProofEvaluator::Recursive(&depth), DEFAULT_ENUMERATION_CAP)
                .unwrap();
        assert_eq!(r.weight, Weight::from_u64(2));
        let tree = tree_size_measure();
        let r =
            brute_force_optimal(&ds, ProofEvaluator::Recursive(&tree), DEFAULT_ENUMERATION_CAP)
                .unwrap();
        assert_eq!(r.weight, Weight::from_u64(5));
    }

    #[test]
    fn single_leaf_structure() {
        let theory = parse_theory("A <= B").unwrap();
        let goal = parse_gci("A <= B").unwrap();
        let ds = elk_materialize(&theory, &goal, &Budgets::default()).unwrap();
        let depth = depth_measure();
        let r =
            brute_force_optimal(&ds, ProofEvaluator::Recursive(&depth), DEFAULT_ENUMERATION_CAP)
                .unwrap();
        assert_eq!(r.weight, Weight::zero());
        assert_eq!(r.proof.vertex_count(), 1);
    }

    #[test]
    fn figure_goal_has_exactly_one_proof() {
        let ds = figure_structure();
        let en = enumerate_proofs(&ds, ds.goal(), DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(en.proofs.len(), 1);
        assert!(!en.truncated);
    }

    #[test]
    fn two_routes_to_one_lemma_give_two_proofs() {
        // C <= D derivable either through the axiom directly or via B.
        let theory = parse_theory("A <= B\nB <= C\nA <= C").unwrap();
        let goal = parse_gci("A <= C").unwrap();
        let ds = elk_materialize(&theory, &goal, &Budgets::default()).unwrap();
        let en = enumerate_proofs(&ds, &goal, DEFAULT_ENUMERATION_CAP).unwrap();
        // axiom leaf, or R_⊑ through A <= B with the axiom B <= C
        assert_eq!(en.proofs.len(), 2);
    }

    #[test]
    fn unreachable_goal_enumerates_empty() {
        let theory = parse_theory("A <= B").unwrap();
        let ds = elk_materialize(&theory, &parse_gci("A <= B").unwrap(), &Budgets::default())
            .unwrap();
        let en =
            enumerate_proofs(&ds, &parse_gci("B <= A").unwrap(), DEFAULT_ENUMERATION_CAP).unwrap();
        assert!(en.proofs.is_empty());
        assert!(!en.truncated);
    }

    #[test]
    fn cap_is_reported() {
        let theory = parse_theory("A <= B\nB <= C\nA <= C").unwrap();
        let goal = parse_gci("A <= C").unwrap();
        let ds = elk_materialize(&theory, &goal, &Budgets::default()).unwrap();
        let en = enumerate_proofs(&ds, &goal, 1).unwrap();
        assert_eq!(en.proofs.len(), 1);
        assert!(en.truncated);
        assert!(matches!(
            brute_force_optimal(&ds, ProofEvaluator::Size, 1),
            Err(SearchError::EnumerationCap { cap: 1 })
        ));
    }
}
