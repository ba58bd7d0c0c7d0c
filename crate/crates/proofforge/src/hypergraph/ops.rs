//! Structural operations on proofs: induced subproofs, subproof removal,
//! homomorphism search, tree unraveling, and the collapse of a proof through
//! a homomorphism into a host structure.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use super::{ancestors_of, induced_subgraph, Hypergraph, Proof, ProofError, VertexId};
use crate::measures::{evaluate, Measure};
use crate::weight::Weight;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypergraphOpError {
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(VertexId),
    #[error("operation produced a malformed proof: {0}")]
    Malformed(#[from] ProofError),
}

/// The subproof of `p` with sink `v`: the largest subgraph induced by the
/// vertices that have a path to `v`.
pub fn subproof_at(p: &Proof, v: VertexId) -> Result<Proof, HypergraphOpError> {
    if v.0 >= p.graph().vertex_count() {
        return Err(HypergraphOpError::UnknownVertex(v));
    }
    let keep = ancestors_of(p.graph(), v);
    let (graph, map) = induced_subgraph(p.graph(), &keep, None);
    Ok(Proof::new(graph, map[&v])?)
}

/// Vertices that keep a path to the sink when `avoid` is taken out of the
/// graph. The sink itself is included unless it equals `avoid`.
fn reaches_sink_avoiding(h: &Hypergraph, sink: VertexId, avoid: VertexId) -> BTreeSet<VertexId> {
    let mut set = BTreeSet::new();
    if sink == avoid {
        return set;
    }
    set.insert(sink);
    let mut stack = vec![sink];
    while let Some(d) = stack.pop() {
        for &ei in h.incoming_edges(d) {
            for &s in &h.edge(ei).sources {
                if s != avoid && set.insert(s) {
                    stack.push(s);
                }
            }
        }
    }
    set
}

/// Kept vertex set of the removal `p` minus the subproof at `v`: `v` itself
/// plus every vertex with a sink path that does not pass through `v`.
fn removal_kept_set(p: &Proof, v: VertexId) -> BTreeSet<VertexId> {
    let mut keep = reaches_sink_avoiding(p.graph(), p.sink(), v);
    keep.insert(v);
    keep
}

/// Removes the subproof below `v`: `v` becomes a leaf, vertices whose every
/// sink path runs through `v` disappear, the sink stays put. The result need
/// not be a proof (`v` may not carry a theory sentence), so a plain
/// hypergraph is returned.
pub fn remove_subproof(p: &Proof, v: VertexId) -> Result<Hypergraph, HypergraphOpError> {
    if v.0 >= p.graph().vertex_count() {
        return Err(HypergraphOpError::UnknownVertex(v));
    }
    let keep = removal_kept_set(p, v);
    let (graph, _) = induced_subgraph(p.graph(), &keep, Some(v));
    Ok(graph)
}

/// A vertex mapping from one hypergraph into another that preserves labels
/// and edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    /// Indexed by source-graph vertex id.
    pub mapping: Vec<VertexId>,
}

impl Homomorphism {
    pub fn apply(&self, v: VertexId) -> VertexId {
        self.mapping[v.0]
    }

    pub fn validate(&self, g: &Hypergraph, h: &Hypergraph) -> bool {
        if self.mapping.len() != g.vertex_count() {
            return false;
        }
        if self.mapping.iter().any(|m| m.0 >= h.vertex_count()) {
            return false;
        }
        for v in g.vertices() {
            if g.label(v) != h.label(self.apply(v)) {
                return false;
            }
        }
        g.edges().iter().all(|e| {
            let sources: Vec<VertexId> = e.sources.iter().map(|s| self.apply(*s)).collect();
            h.has_edge(&sources, self.apply(e.target))
        })
    }

    pub fn is_bijection(&self, g: &Hypergraph, h: &Hypergraph) -> bool {
        if g.vertex_count() != h.vertex_count() {
            return false;
        }
        let distinct: BTreeSet<_> = self.mapping.iter().collect();
        distinct.len() == self.mapping.len()
    }
}

/// Backtracking search for a homomorphism from `g` into `h`. Candidates are
/// the label-compatible vertices, tried in decreasing degree order; the
/// worst case is exponential, which is fine at the scales this is used.
pub fn find_homomorphism(g: &Hypergraph, h: &Hypergraph) -> Option<Homomorphism> {
    let mut candidates: Vec<Vec<VertexId>> = Vec::with_capacity(g.vertex_count());
    for v in g.vertices() {
        let mut cs: Vec<VertexId> = h
            .vertices()
            .filter(|w| h.label(*w) == g.label(v))
            .collect();
        if cs.is_empty() {
            return None;
        }
        cs.sort_by_key(|w| {
            let deg = h.incoming_edges(*w).len() + h.outgoing_edges(*w).len();
            (std::cmp::Reverse(deg), *w)
        });
        candidates.push(cs);
    }
    // Assign the most constrained vertices first.
    let mut order: Vec<VertexId> = g.vertices().collect();
    order.sort_by_key(|v| (candidates[v.0].len(), *v));

    // For early pruning: edges indexed by the latest-assigned endpoint.
    let mut position = vec![usize::MAX; g.vertex_count()];
    for (i, v) in order.iter().enumerate() {
        position[v.0] = i;
    }
    let mut edges_ready_at: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count() + 1];
    for (ei, e) in g.edges().iter().enumerate() {
        let last = e
            .sources
            .iter()
            .chain([&e.target])
            .map(|v| position[v.0])
            .max()
            .unwrap_or(0);
        edges_ready_at[last].push(ei);
    }

    fn rec(
        g: &Hypergraph,
        h: &Hypergraph,
        order: &[VertexId],
        candidates: &[Vec<VertexId>],
        edges_ready_at: &[Vec<usize>],
        assign: &mut Vec<Option<VertexId>>,
        depth: usize,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let v = order[depth];
        for &cand in &candidates[v.0] {
            assign[v.0] = Some(cand);
            let ok = edges_ready_at[depth].iter().all(|&ei| {
                let e = g.edge(ei);
                let sources: Vec<VertexId> =
                    e.sources.iter().map(|s| assign[s.0].unwrap()).collect();
                h.has_edge(&sources, assign[e.target.0].unwrap())
            });
            if ok && rec(g, h, order, candidates, edges_ready_at, assign, depth + 1) {
                return true;
            }
            assign[v.0] = None;
        }
        false
    }

    let mut assign: Vec<Option<VertexId>> = vec![None; g.vertex_count()];
    if rec(g, h, &order, &candidates, &edges_ready_at, &mut assign, 0) {
        Some(Homomorphism { mapping: assign.into_iter().map(Option::unwrap).collect() })
    } else {
        None
    }
}

/// Unravels a proof into a tree at its sink, duplicating shared subproofs.
/// Also returns the map from tree vertices to their originals, which is a
/// homomorphism from the unraveling into `p`.
pub fn unravel_with_map(p: &Proof) -> (Proof, Homomorphism) {
    fn build(p: &Proof, v: VertexId, out: &mut Hypergraph, map: &mut Vec<VertexId>) -> VertexId {
        let nv = out.add_vertex(p.graph().label(v).clone());
        map.push(v);
        if let Some(e) = p.incoming_edge(v) {
            let children: Vec<VertexId> = e
                .sources
                .iter()
                .map(|s| build(p, *s, out, map))
                .collect();
            out.add_edge(children, nv, e.rule.as_deref());
        }
        nv
    }
    let mut out = Hypergraph::new();
    let mut map = Vec::new();
    let root = build(p, p.sink(), &mut out, &mut map);
    let proof = Proof::new(out, root).expect("unraveling of a proof is a tree proof");
    (proof, Homomorphism { mapping: map })
}

pub fn unravel(p: &Proof) -> Proof {
    unravel_with_map(p).0
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CollapseError {
    #[error("the mapping is not a homomorphism into the host graph")]
    InvalidHomomorphism,
    #[error("no grounded subproof exists in the homomorphic image")]
    NoSubproof,
    #[error("measure evaluation failed: {0}")]
    Eval(String),
}

/// An explicit edge list over original vertex ids, used while a proof is
/// being rewritten in place.
#[derive(Clone)]
struct Skeleton {
    vertices: BTreeSet<VertexId>,
    /// (sorted sources, target) -> rule tag
    edges: BTreeMap<(Vec<VertexId>, VertexId), Option<String>>,
    sink: VertexId,
}

impl Skeleton {
    fn of_proof(p: &Proof) -> Skeleton {
        Skeleton {
            vertices: p.graph().vertices().collect(),
            edges: p
                .graph()
                .edges()
                .iter()
                .map(|e| ((e.sources.clone(), e.target), e.rule.clone()))
                .collect(),
            sink: p.sink(),
        }
    }

    /// Ancestors of `v` within the skeleton, `v` included.
    fn ancestors(&self, v: VertexId) -> BTreeSet<VertexId> {
        let mut set = BTreeSet::new();
        set.insert(v);
        let mut stack = vec![v];
        while let Some(d) = stack.pop() {
            for ((sources, target), _) in &self.edges {
                if *target == d {
                    for &s in sources {
                        if set.insert(s) {
                            stack.push(s);
                        }
                    }
                }
            }
        }
        set
    }

    /// Vertices with a sink path avoiding `avoid`.
    fn reaches_sink_avoiding(&self, avoid: VertexId) -> BTreeSet<VertexId> {
        let mut set = BTreeSet::new();
        if self.sink == avoid {
            return set;
        }
        set.insert(self.sink);
        let mut stack = vec![self.sink];
        while let Some(d) = stack.pop() {
            for ((sources, target), _) in &self.edges {
                if *target == d {
                    for &s in sources {
                        if s != avoid && set.insert(s) {
                            stack.push(s);
                        }
                    }
                }
            }
        }
        set
    }

    /// Path from `a` to `b` through the skeleton edges?
    fn has_path(&self, a: VertexId, b: VertexId) -> bool {
        a != b && self.ancestors(b).contains(&a)
    }

    /// Materializes a sub-skeleton rooted at `v` as a proof, for measuring.
    fn subproof(&self, labels: &Hypergraph, v: VertexId) -> Proof {
        let keep = self.ancestors(v);
        let mut g = Hypergraph::new();
        let mut map = HashMap::new();
        for &w in &keep {
            map.insert(w, g.add_vertex(labels.label(w).clone()));
        }
        for ((sources, target), rule) in &self.edges {
            if keep.contains(target) && sources.iter().all(|s| keep.contains(s)) {
                g.add_edge(sources.iter().map(|s| map[s]), map[target], rule.as_deref());
            }
        }
        Proof::new(g, map[&v]).expect("skeleton subproof is well-formed")
    }

    /// Replaces the subproof at `drop` by the one at `keep` (both carry the
    /// same image): take the graph minus the subproof below `drop`, union
    /// the subproof at `keep`, rewire `drop` to `keep` in edge sources, and
    /// delete `drop`.
    fn replace(&mut self, keep: VertexId, drop: VertexId) {
        let minus: BTreeSet<VertexId> = {
            let mut m = self.reaches_sink_avoiding(drop);
            m.insert(drop);
            m
        };
        let keep_anc = self.ancestors(keep);
        let mut vertices: BTreeSet<VertexId> = minus.union(&keep_anc).copied().collect();
        let mut edges: BTreeMap<(Vec<VertexId>, VertexId), Option<String>> = BTreeMap::new();
        for ((sources, target), rule) in &self.edges {
            let in_minus = *target != drop
                && minus.contains(target)
                && sources.iter().all(|s| minus.contains(s));
            let in_keep =
                keep_anc.contains(target) && sources.iter().all(|s| keep_anc.contains(s));
            if in_minus || in_keep {
                let mut sources: Vec<VertexId> = sources
                    .iter()
                    .map(|&s| if s == drop { keep } else { s })
                    .collect();
                sources.sort_unstable();
                sources.dedup();
                edges.entry((sources, *target)).or_insert_with(|| rule.clone());
            }
        }
        vertices.remove(&drop);
        if self.sink == drop {
            self.sink = keep;
        }
        self.vertices = vertices;
        self.edges = edges;
    }
}

/// Pushes `p` through the homomorphism `h` into `d` and returns a subproof
/// of `d` with the image sink whose weight is minimal among the grounded
/// subproofs of the image. For monotone recursive measures this weight never
/// exceeds `measure(p)`: merging duplicated vertices only replaces subproofs
/// by lighter alternatives.
pub fn collapse_image(
    p: &Proof,
    hom: &Homomorphism,
    d: &Hypergraph,
    measure: &Measure,
) -> Result<Proof, CollapseError> {
    if !hom.validate(p.graph(), d) {
        return Err(CollapseError::InvalidHomomorphism);
    }

    // Repair loop: merge pairs mapping to the same host vertex, always
    // keeping the lighter of the two subproofs.
    let mut sk = Skeleton::of_proof(p);
    loop {
        let mut by_image: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for &v in &sk.vertices {
            by_image.entry(hom.apply(v)).or_default().push(v);
        }
        let Some(group) = by_image.values().find(|g| g.len() > 1) else {
            break;
        };
        let (a, b) = (group[0], group[1]);
        let (keep, drop) = if sk.has_path(a, b) {
            (a, b) // the subproof at `a` sits strictly inside the one at `b`
        } else if sk.has_path(b, a) {
            (b, a)
        } else {
            let wa = evaluate(measure, &sk.subproof(p.graph(), a))
                .map_err(|e| CollapseError::Eval(e.to_string()))?;
            let wb = evaluate(measure, &sk.subproof(p.graph(), b))
                .map_err(|e| CollapseError::Eval(e.to_string()))?;
            if wa <= wb {
                (a, b)
            } else {
                (b, a)
            }
        };
        sk.replace(keep, drop);
    }

    // The image of the original proof, as a subgraph of `d` with dense ids.
    let image_vertices: BTreeSet<VertexId> = p.graph().vertices().map(|v| hom.apply(v)).collect();
    let mut image = Hypergraph::new();
    let mut to_image = HashMap::new();
    let mut image_to_d = Vec::new();
    for &v in &image_vertices {
        to_image.insert(v, image.add_vertex(d.label(v).clone()));
        image_to_d.push(v);
    }
    for e in p.graph().edges() {
        let sources: Vec<VertexId> = e.sources.iter().map(|s| to_image[&hom.apply(*s)]).collect();
        image.add_edge(sources, to_image[&hom.apply(e.target)], e.rule.as_deref());
    }
    // Leaves of the source proof are grounded; their images are the
    // admissible leaves for subproofs of the image.
    let mut leaf_ok = vec![false; image.vertex_count()];
    for v in p.graph().vertices() {
        if p.graph().is_leaf(v) {
            leaf_ok[to_image[&hom.apply(v)].0] = true;
        }
    }
    let image_sink = to_image[&hom.apply(p.sink())];

    let best = min_grounded_subproof(&image, image_sink, &leaf_ok, measure)
        .map_err(CollapseError::Eval)?
        .ok_or(CollapseError::NoSubproof)?;
    debug_assert!(
        {
            let repaired = sk.subproof(p.graph(), sk.sink);
            let w_rep = evaluate(measure, &repaired).unwrap();
            let w_best = evaluate(measure, &best.0).unwrap();
            w_best <= w_rep
        },
        "minimal image subproof must not exceed the repaired proof"
    );
    let _ = image_to_d;
    Ok(best.0)
}

/// Enumerates the grounded subproofs of `h` with the given sink (a vertex
/// may stay a leaf only where `leaf_ok` allows it) and returns a minimal one
/// by weight, ties broken by the lexicographically smallest vertex set.
fn min_grounded_subproof(
    h: &Hypergraph,
    sink: VertexId,
    leaf_ok: &[bool],
    measure: &Measure,
) -> Result<Option<(Proof, Weight)>, String> {
    #[derive(Clone, Copy, PartialEq, Eq)]
    enum Choice {
        Leaf,
        Edge(usize),
    }

    fn rec(
        h: &Hypergraph,
        leaf_ok: &[bool],
        chosen: &mut BTreeMap<VertexId, Choice>,
        pending: &mut BTreeSet<VertexId>,
        out: &mut Vec<BTreeMap<VertexId, Choice>>,
    ) {
        if out.len() > 200_000 {
            return; // enumeration cap; callers keep images small
        }
        let Some(&v) = pending.iter().next() else {
            out.push(chosen.clone());
            return;
        };
        pending.remove(&v);
        if leaf_ok[v.0] {
            chosen.insert(v, Choice::Leaf);
            rec(h, leaf_ok, chosen, pending, out);
            chosen.remove(&v);
        }
        for &ei in h.incoming_edges(v) {
            chosen.insert(v, Choice::Edge(ei));
            let mut added = Vec::new();
            for &s in &h.edge(ei).sources {
                if !chosen.contains_key(&s) && !pending.contains(&s) {
                    pending.insert(s);
                    added.push(s);
                }
            }
            rec(h, leaf_ok, chosen, pending, out);
            for s in added {
                pending.remove(&s);
            }
            chosen.remove(&v);
        }
        pending.insert(v);
    }

    let mut assignments = Vec::new();
    let mut chosen = BTreeMap::new();
    let mut pending: BTreeSet<VertexId> = [sink].into_iter().collect();
    rec(h, leaf_ok, &mut chosen, &mut pending, &mut assignments);

    let mut best: Option<(Proof, Weight, Vec<VertexId>)> = None;
    for assignment in assignments {
        let mut g = Hypergraph::new();
        let mut map = BTreeMap::new();
        for &v in assignment.keys() {
            map.insert(v, g.add_vertex(h.label(v).clone()));
        }
        for (&v, &c) in &assignment {
            if let Choice::Edge(ei) = c {
                let e = h.edge(ei);
                g.add_edge(e.sources.iter().map(|s| map[s]), map[&v], e.rule.as_deref());
            }
        }
        let Ok(prf) = Proof::new(g, map[&sink]) else {
            continue; // cyclic choice
        };
        let w = evaluate(measure, &prf).map_err(|e| e.to_string())?;
        let ids: Vec<VertexId> = assignment.keys().copied().collect();
        let better = match &best {
            None => true,
            Some((_, bw, bids)) => w < *bw || (w == *bw && ids < *bids),
        };
        if better {
            best = Some((prf, w, ids));
        }
    }
    Ok(best.map(|(p, w, _)| (p, w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_gci;
    use crate::measures::{depth_measure, tree_size_measure};
    use crate::testgen::figures;

    #[test]
    fn subproof_at_middle_vertex() {
        let p = figures::figure_proof();
        let v = p
            .graph()
            .vertices_labeled(&parse_gci("A <= ex r. A").unwrap())[0];
        let sub = subproof_at(&p, v).unwrap();
        assert_eq!(sub.vertex_count(), 3);
        let labels: Vec<String> = sub.graph().labels().iter().map(|l| l.to_string()).collect();
        assert!(labels.contains(&"A <= B".to_string()));
        assert!(labels.contains(&"B <= ex r. A".to_string()));
        assert_eq!(sub.sink_label(), &parse_gci("A <= ex r. A").unwrap());
    }

    #[test]
    fn subproof_at_leaf_and_sink() {
        let p = figures::figure_proof();
        let leaf = p.graph().vertices_labeled(&parse_gci("B <= ex r. A").unwrap())[0];
        let sub = subproof_at(&p, leaf).unwrap();
        assert_eq!(sub.vertex_count(), 1);

        let at_sink = subproof_at(&p, p.sink()).unwrap();
        assert!(at_sink.same_graph(&p));
        // idempotent in v
        let again = subproof_at(&at_sink, at_sink.sink()).unwrap();
        assert!(again.same_graph(&at_sink));
    }

    #[test]
    fn subproof_at_unknown_vertex() {
        let p = figures::figure_proof();
        assert!(matches!(
            subproof_at(&p, VertexId(99)),
            Err(HypergraphOpError::UnknownVertex(_))
        ));
    }

    #[test]
    fn remove_subproof_middle_vertex() {
        // Dropping the proof of A <= ex r. A keeps the final edge and loses
        // the axiom B <= ex r. A.
        let p = figures::figure_proof();
        let v = p.graph().vertices_labeled(&parse_gci("A <= ex r. A").unwrap())[0];
        let g = remove_subproof(&p, v).unwrap();
        assert_eq!(g.vertex_count(), 3);
        let labels: Vec<String> = g.labels().iter().map(|l| l.to_string()).collect();
        assert!(!labels.contains(&"B <= ex r. A".to_string()));
        assert_eq!(g.edge_count(), 1);
        let kept_v = g.vertices_labeled(&parse_gci("A <= ex r. A").unwrap())[0];
        assert!(g.is_leaf(kept_v));
        assert_eq!(g.sinks().len(), 1);
    }

    #[test]
    fn remove_subproof_leaf_keeps_everything() {
        let p = figures::figure_proof();
        let leaf = p.graph().vertices_labeled(&parse_gci("A <= B").unwrap())[0];
        let g = remove_subproof(&p, leaf).unwrap();
        assert!(g.same_graph(p.graph()));
    }

    #[test]
    fn remove_subproof_at_sink_leaves_single_vertex() {
        let p = figures::figure_proof();
        let g = remove_subproof(&p, p.sink()).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn homomorphism_tree_into_graph_but_not_back() {
        let tree = figures::figure_tree_proof();
        let graph = figures::figure_proof();
        let hom = find_homomorphism(tree.graph(), graph.graph()).expect("tree maps into graph");
        assert!(hom.validate(tree.graph(), graph.graph()));
        assert!(find_homomorphism(graph.graph(), tree.graph()).is_none());
    }

    #[test]
    fn homomorphism_identity() {
        let p = figures::figure_proof();
        let hom = find_homomorphism(p.graph(), p.graph()).unwrap();
        assert!(hom.validate(p.graph(), p.graph()));
        assert!(hom.is_bijection(p.graph(), p.graph()));
    }

    #[test]
    fn unravel_figure_graph_gives_figure_tree() {
        let p = figures::figure_proof();
        let (tree, hom) = unravel_with_map(&p);
        assert!(tree.is_tree());
        assert_eq!(tree.vertex_count(), 5);
        assert!(hom.validate(tree.graph(), p.graph()));
        // isomorphic to the hand-built tree
        let reference = figures::figure_tree_proof();
        let fwd = find_homomorphism(tree.graph(), reference.graph()).unwrap();
        assert!(fwd.is_bijection(tree.graph(), reference.graph()));
    }

    #[test]
    fn unravel_tree_is_isomorphic_copy() {
        let tree = figures::figure_tree_proof();
        let again = unravel(&tree);
        assert_eq!(again.vertex_count(), tree.vertex_count());
        let hom = find_homomorphism(again.graph(), tree.graph()).unwrap();
        assert!(hom.is_bijection(again.graph(), tree.graph()));
    }

    #[test]
    fn unravel_single_vertex() {
        let mut g = Hypergraph::new();
        let v = g.add_vertex(parse_gci("A <= B").unwrap());
        let p = Proof::new(g, v).unwrap();
        let t = unravel(&p);
        assert_eq!(t.vertex_count(), 1);
    }

    #[test]
    fn collapse_tree_into_figure_graph() {
        let tree = figures::figure_tree_proof();
        let host = figures::figure_proof();
        let hom = find_homomorphism(tree.graph(), host.graph()).unwrap();
        let q = collapse_image(&tree, &hom, host.graph(), &tree_size_measure()).unwrap();
        // The collapse merges the duplicated axiom: 4 vertices, tree size 5.
        assert_eq!(q.vertex_count(), 4);
        let w = evaluate(&tree_size_measure(), &q).unwrap();
        assert_eq!(w, Weight::from_u64(5));
        assert_eq!(q.sink_label(), &figures::figure_goal());
    }

    #[test]
    fn collapse_injective_image_is_identity_shaped() {
        let p = figures::figure_proof();
        let hom = find_homomorphism(p.graph(), p.graph()).unwrap();
        let q = collapse_image(&p, &hom, p.graph(), &depth_measure()).unwrap();
        assert_eq!(q.vertex_count(), p.vertex_count());
        assert_eq!(
            evaluate(&depth_measure(), &q).unwrap(),
            evaluate(&depth_measure(), &p).unwrap()
        );
    }

    #[test]
    fn collapse_rejects_bad_homomorphism() {
        let tree = figures::figure_tree_proof();
        let host = figures::figure_proof();
        let bad = Homomorphism { mapping: vec![VertexId(0); tree.vertex_count()] };
        assert!(matches!(
            collapse_image(&tree, &bad, host.graph(), &depth_measure()),
            Err(CollapseError::InvalidHomomorphism)
        ));
    }
}
