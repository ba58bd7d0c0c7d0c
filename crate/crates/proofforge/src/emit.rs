//! DOT and JSON emitters for hypergraphs, structures, and proofs.
//!
//! JSON is the canonical machine format: keys are emitted in sorted order,
//! vertices by id, edges by (target, sources), and concepts in canonical
//! printing, so identical inputs produce byte-identical output. DOT is
//! display-only: vertices are boxes (theory axioms with `penwidth=2`) and
//! each hyperedge is rendered through one point-shaped junction node.

use serde::Serialize;

use crate::derivers::DerivationStructure;
use crate::hypergraph::{Hypergraph, Proof, VertexId};
use crate::logic::Theory;

// field order is alphabetical: serde emits struct fields in declaration
// order, and the output promises sorted keys
#[derive(Serialize)]
struct JsonEdge {
    rule: Option<String>,
    sources: Vec<usize>,
    target: usize,
}

#[derive(Serialize)]
struct JsonVertex {
    id: usize,
    is_axiom: bool,
    label: String,
}

#[derive(Serialize)]
struct JsonGraph {
    edges: Vec<JsonEdge>,
    sink: Option<usize>,
    vertices: Vec<JsonVertex>,
}

fn graph_json(
    graph: &Hypergraph,
    is_axiom: impl Fn(VertexId) -> bool,
    sink: Option<VertexId>,
) -> String {
    let vertices: Vec<JsonVertex> = graph
        .vertices()
        .map(|v| JsonVertex {
            id: v.0,
            is_axiom: is_axiom(v),
            label: graph.label(v).to_string(),
        })
        .collect();
    let mut edges: Vec<JsonEdge> = graph
        .edges()
        .iter()
        .map(|e| JsonEdge {
            rule: e.rule.clone(),
            sources: e.sources.iter().map(|s| s.0).collect(),
            target: e.target.0,
        })
        .collect();
    edges.sort_by(|a, b| (a.target, &a.sources).cmp(&(b.target, &b.sources)));
    let out = JsonGraph { edges, sink: sink.map(|s| s.0), vertices };
    serde_json::to_string_pretty(&out).expect("graph serializes")
}

pub fn structure_to_json(ds: &DerivationStructure) -> String {
    graph_json(ds.graph(), |v| ds.is_axiom(v), ds.goal_vertex())
}

pub fn proof_to_json(p: &Proof, theory: &Theory) -> String {
    graph_json(p.graph(), |v| theory.contains(p.graph().label(v)), Some(p.sink()))
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn graph_dot(graph: &Hypergraph, is_axiom: impl Fn(VertexId) -> bool, name: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!("digraph {name} {{\n"));
    out.push_str("  rankdir=BT;\n  node [shape=box];\n");
    for v in graph.vertices() {
        let style = if is_axiom(v) { ", penwidth=2" } else { "" };
        out.push_str(&format!(
            "  v{} [label=\"{}\"{}];\n",
            v.0,
            dot_escape(&graph.label(v).to_string()),
            style
        ));
    }
    let mut order: Vec<usize> = (0..graph.edge_count()).collect();
    order.sort_by_key(|&i| (graph.edge(i).target, graph.edge(i).sources.clone()));
    for (j, &i) in order.iter().enumerate() {
        let e = graph.edge(i);
        let label = e
            .rule
            .as_deref()
            .map(|r| format!(" [label=\"{}\"]", dot_escape(r)))
            .unwrap_or_default();
        out.push_str(&format!("  e{j} [shape=point];\n"));
        for s in &e.sources {
            out.push_str(&format!("  v{} -> e{j};\n", s.0));
        }
        out.push_str(&format!("  e{j} -> v{}{};\n", e.target.0, label));
    }
    out.push_str("}\n");
    out
}

pub fn structure_to_dot(ds: &DerivationStructure) -> String {
    graph_dot(ds.graph(), |v| ds.is_axiom(v), "structure")
}

pub fn proof_to_dot(p: &Proof, theory: &Theory) -> String {
    graph_dot(p.graph(), |v| theory.contains(p.graph().label(v)), "proof")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testgen::figures;

    #[test]
    fn json_is_deterministic_and_shaped() {
        let theory = figures::figure_theory();
        let p = figures::figure_proof();
        let a = proof_to_json(&p, &theory);
        let b = proof_to_json(&p, &theory);
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert!(v.get("vertices").is_some());
        assert!(v.get("edges").is_some());
        assert!(v.get("sink").is_some());
        assert_eq!(v["vertices"].as_array().unwrap().len(), 4);
        // keys of each edge are sorted
        let edge = &v["edges"][0];
        assert!(edge.get("sources").is_some() && edge.get("target").is_some());
    }

    #[test]
    fn dot_marks_axioms_and_junctions() {
        let theory = figures::figure_theory();
        let p = figures::figure_proof();
        let dot = proof_to_dot(&p, &theory);
        assert_eq!(dot.matches("penwidth=2").count(), 2);
        assert_eq!(dot.matches("shape=point").count(), 2);
        assert!(dot.contains("A <= B"));
    }
}
