//! Greedy optimal-proof extraction for monotone recursive measures.
//!
//! Vertices are popped from a priority queue in order of the weight of their
//! best known proof. An edge whose sources have all been popped constructs a
//! candidate proof for its target from the (by then final) source proofs;
//! the candidate replaces the incumbent only when acyclic and strictly
//! lighter. Per-vertex proofs are stored as a choice function (the selected
//! incoming edge), which is sound because a popped vertex's choice never
//! changes again.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{SearchError, SearchOptions, SearchResult, SearchStats};
use crate::derivers::DerivationStructure;
use crate::hypergraph::{Hypergraph, Proof, VertexId};
use crate::measures::{evaluate, EdgeLabel, Measure};
use crate::weight::Weight;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Choice {
    AxiomLeaf,
    Edge(usize),
}

struct State<'a> {
    ds: &'a DerivationStructure,
    weight: Vec<Option<Weight>>,
    choice: Vec<Option<Choice>>,
    popped: Vec<bool>,
    heap: BinaryHeap<Reverse<(Weight, VertexId)>>,
    stats: SearchStats,
    defined: usize,
}

impl<'a> State<'a> {
    fn offer(&mut self, v: VertexId, w: Weight, c: Choice) {
        if self.weight[v.0].is_none() {
            self.defined += 1;
        }
        self.weight[v.0] = Some(w.clone());
        self.choice[v.0] = Some(c);
        self.heap.push(Reverse((w, v)));
        let live = self.heap.len() + self.defined;
        self.stats.peak_memory_items = self.stats.peak_memory_items.max(live);
    }

    /// Vertex set of the stored proof below `v` (the choice-function
    /// closure). Only meaningful for popped vertices.
    fn proof_contains(&self, root: VertexId, needle: VertexId) -> bool {
        let mut seen = vec![false; self.ds.graph().vertex_count()];
        let mut stack = vec![root];
        seen[root.0] = true;
        while let Some(x) = stack.pop() {
            if x == needle {
                return true;
            }
            if let Some(Choice::Edge(ei)) = self.choice[x.0] {
                for &s in &self.ds.graph().edge(ei).sources {
                    if !seen[s.0] {
                        seen[s.0] = true;
                        stack.push(s);
                    }
                }
            }
        }
        false
    }

    /// Materializes the stored proof with sink `v` as a standalone graph.
    fn extract(&self, v: VertexId) -> Result<Proof, SearchError> {
        let mut keep = Vec::new();
        let mut seen = vec![false; self.ds.graph().vertex_count()];
        let mut stack = vec![v];
        seen[v.0] = true;
        while let Some(x) = stack.pop() {
            keep.push(x);
            if let Some(Choice::Edge(ei)) = self.choice[x.0] {
                for &s in &self.ds.graph().edge(ei).sources {
                    if !seen[s.0] {
                        seen[s.0] = true;
                        stack.push(s);
                    }
                }
            }
        }
        keep.sort_unstable();
        let mut g = Hypergraph::new();
        let mut map = vec![VertexId(usize::MAX); self.ds.graph().vertex_count()];
        for &x in &keep {
            map[x.0] = g.add_vertex(self.ds.graph().label(x).clone());
        }
        for &x in &keep {
            if let Some(Choice::Edge(ei)) = self.choice[x.0] {
                let e = self.ds.graph().edge(ei);
                g.add_edge(e.sources.iter().map(|s| map[s.0]), map[x.0], e.rule.as_deref());
            }
        }
        Proof::new(g, map[v.0])
            .map_err(|e| SearchError::InvariantViolation(format!("extracted proof invalid: {e}")))
    }
}

/// Computes an optimal proof of the structure's goal under a monotone
/// recursive measure.
pub fn dijkstra_optimal(
    ds: &DerivationStructure,
    measure: &Measure,
    opts: &SearchOptions,
) -> Result<SearchResult, SearchError> {
    if !measure.is_monotone() {
        return Err(SearchError::RequiresMonotone(measure.name().to_string()));
    }
    let goal = ds.goal().clone();
    let Some(goal_vertex) = ds.goal_vertex() else {
        return Err(SearchError::GoalAbsent(goal.to_string()));
    };

    let n = ds.graph().vertex_count();
    let mut st = State {
        ds,
        weight: vec![None; n],
        choice: vec![None; n],
        popped: vec![false; n],
        heap: BinaryHeap::new(),
        stats: SearchStats::default(),
        defined: 0,
    };
    let mut edge_counter = vec![0usize; ds.graph().edge_count()];

    let edge_weight = |st: &State, ei: usize| -> Result<Weight, SearchError> {
        let e = ds.graph().edge(ei);
        let ws: Vec<Weight> = e
            .sources
            .iter()
            .map(|s| st.weight[s.0].clone().expect("source weight defined"))
            .collect();
        let label = EdgeLabel {
            premises: e.sources.iter().map(|s| ds.graph().label(*s)).collect(),
            conclusion: ds.graph().label(e.target),
        };
        measure
            .edge_weight(&label, &ws)
            .ok_or_else(|| {
                crate::measures::EvalError::EdgeUndefined {
                    measure: measure.name().to_string(),
                    conclusion: ds.graph().label(e.target).to_string(),
                }
                .into()
            })
    };

    // Initialization: theory sentences become single-leaf proofs, and
    // premise-free edges become single-edge proofs.
    for v in ds.graph().vertices() {
        if ds.is_axiom(v) {
            let w = measure.leaf_weight(ds.graph().label(v));
            st.offer(v, w, Choice::AxiomLeaf);
        } else if let Some(&ei) = ds
            .graph()
            .incoming_edges(v)
            .iter()
            .find(|&&ei| ds.graph().edge(ei).sources.is_empty())
        {
            let w = edge_weight(&st, ei)?;
            st.offer(v, w, Choice::Edge(ei));
        }
    }

    let mut last_popped: Option<Weight> = None;
    while let Some(Reverse((w, v))) = st.heap.pop() {
        if st.popped[v.0] || st.weight[v.0].as_ref() != Some(&w) {
            continue; // stale entry
        }
        st.popped[v.0] = true;
        st.stats.vertices_popped += 1;
        if opts.debug_invariants {
            if let Some(prev) = &last_popped {
                if &w < prev {
                    return Err(SearchError::InvariantViolation(format!(
                        "pop order not monotone: {w} after {prev}"
                    )));
                }
            }
            last_popped = Some(w.clone());
        }

        for &ei in ds.graph().outgoing_edges(v) {
            let e = ds.graph().edge(ei);
            edge_counter[ei] += 1;
            if edge_counter[ei] < e.sources.len() {
                continue;
            }
            if opts.debug_invariants && edge_counter[ei] > e.sources.len() {
                return Err(SearchError::InvariantViolation(format!(
                    "edge {ei} relaxed more than once"
                )));
            }
            // All sources popped: construct the candidate proof for the target.
            st.stats.edges_relaxed += 1;
            let d = e.target;
            let cand = edge_weight(&st, ei)?;
            let acyclic = !e.sources.iter().any(|&s| st.proof_contains(s, d));
            if opts.debug_invariants {
                // the incremental test must agree with a full re-check
                let full = {
                    let mut probe = st.choice.clone();
                    probe[d.0] = Some(Choice::Edge(ei));
                    check_full_acyclicity(ds, &probe, d)
                };
                if full != acyclic {
                    return Err(SearchError::InvariantViolation(
                        "incremental acyclicity check diverged from full re-check".into(),
                    ));
                }
            }
            if !acyclic {
                continue;
            }
            let improves = match &st.weight[d.0] {
                None => true,
                Some(old) => old > &cand,
            };
            if improves {
                if st.popped[d.0] {
                    return Err(SearchError::InvariantViolation(format!(
                        "vertex {d} improved after being popped; measure not monotone?"
                    )));
                }
                st.offer(d, cand, Choice::Edge(ei));
            }
        }
    }

    let Some(weight) = st.weight[goal_vertex.0].clone() else {
        return Err(SearchError::Unreachable(goal.to_string()));
    };
    let proof = st.extract(goal_vertex)?;
    debug_assert_eq!(evaluate(measure, &proof)?, weight);
    if opts.debug_invariants {
        let recomputed = evaluate(measure, &proof)?;
        if recomputed != weight {
            return Err(SearchError::InvariantViolation(format!(
                "stored weight {weight} disagrees with evaluation {recomputed}"
            )));
        }
    }
    Ok(SearchResult { weight, proof, stats: st.stats })
}

/// Full acyclicity check of the choice closure from `root`.
fn check_full_acyclicity(
    ds: &DerivationStructure,
    choice: &[Option<Choice>],
    root: VertexId,
) -> bool {
    // depth-first search with colors over the chosen-edge graph
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    fn visit(
        ds: &DerivationStructure,
        choice: &[Option<Choice>],
        colors: &mut Vec<Color>,
        v: VertexId,
    ) -> bool {
        match colors[v.0] {
            Color::Gray => return false,
            Color::Black => return true,
            Color::White => {}
        }
        colors[v.0] = Color::Gray;
        if let Some(Choice::Edge(ei)) = choice[v.0] {
            for &s in &ds.graph().edge(ei).sources {
                if !visit(ds, choice, colors, s) {
                    return false;
                }
            }
        }
        colors[v.0] = Color::Black;
        true
    }
    let mut colors = vec![Color::White; ds.graph().vertex_count()];
    visit(ds, choice, &mut colors, root)
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
    fn figure_depth_and_tree_size() {
        let ds = figure_structure();
        let r = dijkstra_optimal(&ds, &depth_measure(), &SearchOptions::checked()).unwrap();
        assert_eq!(r.weight, Weight::from_u64(2));
        let r = dijkstra_optimal(&ds, &tree_size_measure(), &SearchOptions::checked()).unwrap();
        assert_eq!(r.weight, Weight::from_u64(5));
        assert_eq!(
            evaluate(&tree_size_measure(), &r.proof).unwrap(),
            Weight::from_u64(5)
        );
    }

    #[test]
    fn axiom_goal_is_a_single_leaf() {
        let theory = parse_theory("A <= B").unwrap();
        let goal = parse_gci("A <= B").unwrap();
        let ds = elk_materialize(&theory, &goal, &Budgets::default()).unwrap();
        let r = dijkstra_optimal(&ds, &depth_measure(), &SearchOptions::checked()).unwrap();
        assert_eq!(r.weight, Weight::zero());
        assert_eq!(r.proof.vertex_count(), 1);
        assert!(r.proof.incoming_edge(r.proof.sink()).is_none());
    }

    #[test]
    fn unreachable_goal_errors() {
        let theory = parse_theory("A <= B").unwrap();
        let goal = parse_gci("B <= A").unwrap();
        let ds = elk_materialize(&theory, &goal, &Budgets::default()).unwrap();
        assert!(matches!(
            dijkstra_optimal(&ds, &depth_measure(), &SearchOptions::default()),
            Err(SearchError::GoalAbsent(_))
        ));
    }

    #[test]
    fn non_monotone_measure_is_rejected() {
        let ds = figure_structure();
        let bad = crate::measures::Measure::new(
            "bad",
            std::sync::Arc::new(|_| Weight::zero()),
            std::sync::Arc::new(|_, _| Some(Weight::zero())),
            false,
        );
        assert!(matches!(
            dijkstra_optimal(&ds, &bad, &SearchOptions::default()),
            Err(SearchError::RequiresMonotone(_))
        ));
    }
}
