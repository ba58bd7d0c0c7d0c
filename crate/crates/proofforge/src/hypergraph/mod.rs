//! Labeled directed hypergraphs and proofs.
//!
//! A hypergraph is a set of vertices, a set of hyperedges `(sources, target)`
//! and a total labeling of vertices by sentences. A proof is a hypergraph
//! with exactly one sink, no cycles, and at most one incoming edge per
//! vertex. Vertex ids are dense indices; labels live in a side table so the
//! search loops can work on plain integers.
//!
//! All types are immutable once built (construction goes through `&mut`
//! methods, after which values are shared read-only). Edge insertion with an
//! already-present `(sources, target)` pair is a silent no-op: saturation
//! re-derives edges all the time.

mod ops;

pub use ops::{
    collapse_image, find_homomorphism, remove_subproof, subproof_at, unravel, unravel_with_map,
    CollapseError, Homomorphism, HypergraphOpError,
};

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::logic::{Gci, Theory};

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Edge {
    /// Sorted and duplicate-free.
    pub sources: Vec<VertexId>,
    pub target: VertexId,
    /// Provenance tag such as `R_⊑` or `CR3`; never affects semantics.
    pub rule: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct Hypergraph {
    labels: Vec<Gci>,
    edges: Vec<Edge>,
    edge_keys: HashSet<(Vec<VertexId>, VertexId)>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new() -> Hypergraph {
        Hypergraph::default()
    }

    pub fn add_vertex(&mut self, label: Gci) -> VertexId {
        let id = VertexId(self.labels.len());
        self.labels.push(label);
        self.incoming.push(Vec::new());
        self.outgoing.push(Vec::new());
        id
    }

    /// Inserts an edge; returns false when the same (sources, target) pair is
    /// already present. Panics on an unknown vertex id.
    pub fn add_edge(
        &mut self,
        sources: impl IntoIterator<Item = VertexId>,
        target: VertexId,
        rule: Option<&str>,
    ) -> bool {
        let mut sources: Vec<VertexId> = sources.into_iter().collect();
        sources.sort_unstable();
        sources.dedup();
        for v in sources.iter().chain([&target]) {
            assert!(v.0 < self.labels.len(), "edge references unknown vertex {v}");
        }
        let key = (sources.clone(), target);
        if !self.edge_keys.insert(key) {
            return false;
        }
        let idx = self.edges.len();
        for s in &sources {
            self.outgoing[s.0].push(idx);
        }
        self.incoming[target.0].push(idx);
        self.edges.push(Edge { sources, target, rule: rule.map(str::to_string) });
        true
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.labels.len()).map(VertexId)
    }

    pub fn label(&self, v: VertexId) -> &Gci {
        &self.labels[v.0]
    }

    pub fn labels(&self) -> &[Gci] {
        &self.labels
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    pub fn incoming_edges(&self, v: VertexId) -> &[usize] {
        &self.incoming[v.0]
    }

    pub fn outgoing_edges(&self, v: VertexId) -> &[usize] {
        &self.outgoing[v.0]
    }

    pub fn has_edge(&self, sources: &[VertexId], target: VertexId) -> bool {
        let mut s = sources.to_vec();
        s.sort_unstable();
        s.dedup();
        self.edge_keys.contains(&(s, target))
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.incoming[v.0].is_empty()
    }

    pub fn is_sink(&self, v: VertexId) -> bool {
        self.outgoing[v.0].is_empty()
    }

    pub fn leaves(&self) -> Vec<VertexId> {
        self.vertices().filter(|v| self.is_leaf(*v)).collect()
    }

    pub fn sinks(&self) -> Vec<VertexId> {
        self.vertices().filter(|v| self.is_sink(*v)).collect()
    }

    pub fn vertices_labeled(&self, label: &Gci) -> Vec<VertexId> {
        self.vertices().filter(|v| self.label(*v) == label).collect()
    }

    /// Sum of label sizes over all vertices; the alternative size notion to
    /// the plain vertex count.
    pub fn label_size_sum(&self) -> usize {
        self.labels.iter().map(Gci::size).sum()
    }

    /// Acyclicity of the binary reachability relation `s -> d` induced by
    /// the hyperedges. Edges with empty sources never lie on a path.
    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm over the vertex-to-vertex relation.
        let n = self.labels.len();
        let mut indeg = vec![0usize; n];
        let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        for e in &self.edges {
            for s in &e.sources {
                if seen.insert((s.0, e.target.0)) {
                    succs[s.0].push(e.target.0);
                    indeg[e.target.0] += 1;
                }
            }
        }
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut removed = 0;
        while let Some(v) = queue.pop() {
            removed += 1;
            for &w in &succs[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push(w);
                }
            }
        }
        removed == n
    }

    /// Structural equality up to edge insertion order.
    pub fn same_graph(&self, other: &Hypergraph) -> bool {
        if self.labels != other.labels {
            return false;
        }
        let mut a: Vec<&Edge> = self.edges.iter().collect();
        let mut b: Vec<&Edge> = other.edges.iter().collect();
        let key = |e: &&Edge| (e.target, e.sources.clone());
        a.sort_by_key(key);
        b.sort_by_key(key);
        a.iter().zip(&b).all(|(x, y)| x.sources == y.sources && x.target == y.target) && a.len() == b.len()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProofError {
    #[error("expected exactly one sink, found {0}")]
    SinkCount(usize),
    #[error("designated sink {0} is not the sink of the graph")]
    SinkMismatch(VertexId),
    #[error("graph contains a cycle")]
    Cyclic,
    #[error("vertex {0} has more than one incoming edge")]
    MultipleIncoming(VertexId),
    #[error("graph has no vertices")]
    Empty,
}

/// A proof: an acyclic hypergraph with a single sink and at most one
/// incoming edge per vertex. Constructed via [`Proof::new`], which checks
/// the structural invariants.
#[derive(Clone, Debug)]
pub struct Proof {
    graph: Hypergraph,
    sink: VertexId,
}

impl Proof {
    pub fn new(graph: Hypergraph, sink: VertexId) -> Result<Proof, ProofError> {
        if graph.vertex_count() == 0 {
            return Err(ProofError::Empty);
        }
        let sinks = graph.sinks();
        if sinks.len() != 1 {
            return Err(ProofError::SinkCount(sinks.len()));
        }
        if sinks[0] != sink {
            return Err(ProofError::SinkMismatch(sink));
        }
        for v in graph.vertices() {
            if graph.incoming_edges(v).len() > 1 {
                return Err(ProofError::MultipleIncoming(v));
            }
        }
        if !graph.is_acyclic() {
            return Err(ProofError::Cyclic);
        }
        Ok(Proof { graph, sink })
    }

    pub fn graph(&self) -> &Hypergraph {
        &self.graph
    }

    pub fn sink(&self) -> VertexId {
        self.sink
    }

    pub fn sink_label(&self) -> &Gci {
        self.graph.label(self.sink)
    }

    pub fn incoming_edge(&self, v: VertexId) -> Option<&Edge> {
        self.graph
            .incoming_edges(v)
            .first()
            .map(|&i| self.graph.edge(i))
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// A proof is a tree when every non-sink vertex feeds exactly one edge
    /// and the sources of all edges are pairwise disjoint.
    pub fn is_tree(&self) -> bool {
        self.graph
            .vertices()
            .all(|v| v == self.sink || self.graph.outgoing_edges(v).len() == 1)
    }

    pub fn same_graph(&self, other: &Proof) -> bool {
        self.sink == other.sink && self.graph.same_graph(&other.graph)
    }
}

/// One rule violation found by the validators. Violations are data, not
/// failures: an empty report means the object satisfies its definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UngroundedLeaf { vertex: VertexId, label: Gci },
    UnsoundEdge { edge: usize },
    SinkCount { found: usize },
    WrongSinkLabel { vertex: VertexId, label: Gci },
    MultipleIncoming { vertex: VertexId },
    Cyclic,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UngroundedLeaf { vertex, label } => {
                write!(f, "leaf {vertex} labeled '{label}' is not a theory sentence")
            }
            Violation::UnsoundEdge { edge } => write!(f, "edge #{edge} is not a sound inference"),
            Violation::SinkCount { found } => write!(f, "sink count != 1 (found {found})"),
            Violation::WrongSinkLabel { vertex, label } => {
                write!(f, "sink {vertex} labeled '{label}' does not match the goal")
            }
            Violation::MultipleIncoming { vertex } => {
                write!(f, "vertex {vertex} has multiple incoming edges")
            }
            Violation::Cyclic => write!(f, "graph contains a cycle"),
        }
    }
}

/// Decides `premises |= conclusion` for the logic in use.
pub type EntailmentOracle<'a> = dyn Fn(&[Gci], &Gci) -> bool + 'a;

/// Checks that `h` is a derivation structure over `theory`: grounded (every
/// leaf is labeled by a theory sentence) and sound (every edge is a valid
/// inference according to `entails`).
pub fn validate_derivation_structure(
    h: &Hypergraph,
    theory: &Theory,
    entails: &EntailmentOracle,
) -> Vec<Violation> {
    let mut report = Vec::new();
    for v in h.vertices() {
        if h.is_leaf(v) && !theory.contains(h.label(v)) {
            report.push(Violation::UngroundedLeaf { vertex: v, label: h.label(v).clone() });
        }
    }
    for (i, e) in h.edges().iter().enumerate() {
        let premises: Vec<Gci> = e.sources.iter().map(|s| h.label(*s).clone()).collect();
        if !entails(&premises, h.label(e.target)) {
            report.push(Violation::UnsoundEdge { edge: i });
        }
    }
    report
}

/// Checks that `h` is a proof of `goal` over `theory`: a derivation
/// structure with exactly one sink labeled `goal`, acyclic, and with at most
/// one incoming edge per vertex.
pub fn validate_proof(
    h: &Hypergraph,
    theory: &Theory,
    goal: &Gci,
    entails: &EntailmentOracle,
) -> Vec<Violation> {
    let mut report = validate_derivation_structure(h, theory, entails);
    let sinks = h.sinks();
    if sinks.len() != 1 {
        report.push(Violation::SinkCount { found: sinks.len() });
    } else if h.label(sinks[0]) != goal {
        report.push(Violation::WrongSinkLabel { vertex: sinks[0], label: h.label(sinks[0]).clone() });
    }
    for v in h.vertices() {
        if h.incoming_edges(v).len() > 1 {
            report.push(Violation::MultipleIncoming { vertex: v });
        }
    }
    if !h.is_acyclic() {
        report.push(Violation::Cyclic);
    }
    report
}

/// All vertices with a path to `v`, including `v` itself.
pub(crate) fn ancestors_of(h: &Hypergraph, v: VertexId) -> BTreeSet<VertexId> {
    let mut set = BTreeSet::new();
    let mut stack = vec![v];
    set.insert(v);
    while let Some(d) = stack.pop() {
        for &ei in h.incoming_edges(d) {
            for &s in &h.edge(ei).sources {
                if set.insert(s) {
                    stack.push(s);
                }
            }
        }
    }
    set
}

/// Reindexes `keep` (plus every edge both of whose endpoints survive) into a
/// fresh hypergraph; vertex order follows the original ids. Returns the
/// graph and the old-to-new mapping.
pub(crate) fn induced_subgraph(
    h: &Hypergraph,
    keep: &BTreeSet<VertexId>,
    drop_edges_into: Option<VertexId>,
) -> (Hypergraph, HashMap<VertexId, VertexId>) {
    let mut out = Hypergraph::new();
    let mut map = HashMap::new();
    for &v in keep {
        let nv = out.add_vertex(h.label(v).clone());
        map.insert(v, nv);
    }
    for e in h.edges() {
        if Some(e.target) == drop_edges_into {
            continue;
        }
        if keep.contains(&e.target) && e.sources.iter().all(|s| keep.contains(s)) {
            out.add_edge(
                e.sources.iter().map(|s| map[s]),
                map[&e.target],
                e.rule.as_deref(),
            );
        }
    }
    (out, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_gci, parse_theory};
    use crate::testgen::figures;

    #[test]
    fn figure_proof_is_acyclic() {
        let p = figures::figure_proof();
        assert!(p.graph().is_acyclic());
    }

    #[test]
    fn self_loop_and_two_cycle_are_cyclic() {
        let mut h = Hypergraph::new();
        let v = h.add_vertex(parse_gci("A <= A").unwrap());
        h.add_edge([v], v, None);
        assert!(!h.is_acyclic());

        let mut h = Hypergraph::new();
        let a = h.add_vertex(parse_gci("A <= B").unwrap());
        let b = h.add_vertex(parse_gci("B <= A").unwrap());
        h.add_edge([a], b, None);
        h.add_edge([b], a, None);
        assert!(!h.is_acyclic());
    }

    #[test]
    fn duplicate_edges_are_noops() {
        let mut h = Hypergraph::new();
        let a = h.add_vertex(parse_gci("A <= B").unwrap());
        let b = h.add_vertex(parse_gci("A <= C").unwrap());
        assert!(h.add_edge([a], b, Some("x")));
        assert!(!h.add_edge([a], b, Some("y")));
        assert_eq!(h.edge_count(), 1);
    }

    #[test]
    fn validates_figure_derivation_structure() {
        let theory = figures::figure_theory();
        let p = figures::figure_proof();
        let oracle = crate::testgen::el_entailment_oracle();
        let report = validate_derivation_structure(p.graph(), &theory, &oracle);
        assert!(report.is_empty(), "unexpected violations: {report:?}");
    }

    #[test]
    fn axiom_leaf_is_grounded() {
        let theory = parse_theory("A <= B").unwrap();
        let mut h = Hypergraph::new();
        h.add_vertex(parse_gci("A <= B").unwrap());
        let oracle = crate::testgen::el_entailment_oracle();
        assert!(validate_derivation_structure(&h, &theory, &oracle).is_empty());
    }

    #[test]
    fn unsound_edge_is_reported() {
        let theory = parse_theory("A <= B").unwrap();
        let mut h = Hypergraph::new();
        let a = h.add_vertex(parse_gci("A <= B").unwrap());
        let b = h.add_vertex(parse_gci("B <= A").unwrap());
        h.add_edge([a], b, None);
        let oracle = crate::testgen::el_entailment_oracle();
        let report = validate_derivation_structure(&h, &theory, &oracle);
        assert_eq!(report, vec![Violation::UnsoundEdge { edge: 0 }]);
    }

    #[test]
    fn validates_figure_tree_proof() {
        let theory = figures::figure_theory();
        let goal = figures::figure_goal();
        let tree = figures::figure_tree_proof();
        let oracle = crate::testgen::el_entailment_oracle();
        let report = validate_proof(tree.graph(), &theory, &goal, &oracle);
        assert!(report.is_empty(), "unexpected violations: {report:?}");
    }

    #[test]
    fn sink_count_violation() {
        // Delete the final edge of the figure proof: two sinks remain.
        let theory = figures::figure_theory();
        let goal = figures::figure_goal();
        let p = figures::figure_proof();
        let mut h = Hypergraph::new();
        for v in p.graph().vertices() {
            h.add_vertex(p.graph().label(v).clone());
        }
        let last = p.graph().edge_count() - 1;
        for (i, e) in p.graph().edges().iter().enumerate() {
            if i != last {
                h.add_edge(e.sources.iter().copied(), e.target, e.rule.as_deref());
            }
        }
        let oracle = crate::testgen::el_entailment_oracle();
        let report = validate_proof(&h, &theory, &goal, &oracle);
        assert!(report.contains(&Violation::SinkCount { found: 2 }));
    }

    #[test]
    fn multiple_incoming_violation() {
        let theory = parse_theory("A <= B\nB <= C\nA <= C").unwrap();
        let mut h = Hypergraph::new();
        let ab = h.add_vertex(parse_gci("A <= B").unwrap());
        let bc = h.add_vertex(parse_gci("B <= C").unwrap());
        let ac = h.add_vertex(parse_gci("A <= C").unwrap());
        h.add_edge([ab, bc], ac, None);
        h.add_edge([ab], ac, None);
        let oracle = crate::testgen::el_entailment_oracle();
        let report = validate_proof(&h, &theory, &parse_gci("A <= C").unwrap(), &oracle);
        assert!(report
            .iter()
            .any(|v| matches!(v, Violation::MultipleIncoming { vertex } if *vertex == ac)));
    }

    #[test]
    fn proof_constructor_rejects_broken_shapes() {
        let mut h = Hypergraph::new();
        let a = h.add_vertex(parse_gci("A <= B").unwrap());
        let b = h.add_vertex(parse_gci("B <= A").unwrap());
        h.add_edge([a], b, None);
        h.add_edge([b], a, None);
        assert!(matches!(Proof::new(h, a), Err(ProofError::SinkCount(0))));
    }
}
