//! Reproducible fixtures: the worked proof pair used throughout the tests,
//! a seeded generator of small random derivation structures, and random
//! small EL theories. The random structures satisfy the structural deriver
//! assumptions (distinct labels, bounded premises, grounded leaves) but are
//! not sound for any real calculus; they exist to exercise the search
//! procedures, whose behavior only depends on the hypergraph.

use rand::prelude::*;

use crate::derivers::{Budgets, DerivationStructure, RULE_RAND_PLUS, RULE_RSUB};
use crate::hypergraph::{EntailmentOracle, Hypergraph, Proof};
use crate::logic::{entails, Concept, Dialect, Gci, Role, Theory};
use crate::optimizer::enumerate_proofs;

/// The running example: `T = {A <= B, B <= ex r. A}` proving
/// `A <= (B and ex r. A)` either as a 4-vertex graph that reuses the shared
/// axiom, or as its 5-vertex tree unraveling.
pub mod figures {
    use super::*;

    pub fn figure_theory() -> Theory {
        crate::logic::parse_theory("A <= B\nB <= ex r. A").unwrap()
    }

    pub fn figure_goal() -> Gci {
        crate::logic::parse_gci("A <= (B and ex r. A)").unwrap()
    }

    /// The graph-shaped proof: the axiom `A <= B` feeds both the derived
    /// existential and the final conjunction.
    pub fn figure_proof() -> Proof {
        let mut g = Hypergraph::new();
        let ab = g.add_vertex(crate::logic::parse_gci("A <= B").unwrap());
        let bra = g.add_vertex(crate::logic::parse_gci("B <= ex r. A").unwrap());
        let ara = g.add_vertex(crate::logic::parse_gci("A <= ex r. A").unwrap());
        let goal = g.add_vertex(figure_goal());
        g.add_edge([ab, bra], ara, Some(RULE_RSUB));
        g.add_edge([ab, ara], goal, Some(RULE_RAND_PLUS));
        Proof::new(g, goal).unwrap()
    }

    /// The tree-shaped proof: the shared axiom is duplicated.
    pub fn figure_tree_proof() -> Proof {
        let mut g = Hypergraph::new();
        let ab1 = g.add_vertex(crate::logic::parse_gci("A <= B").unwrap());
        let bra = g.add_vertex(crate::logic::parse_gci("B <= ex r. A").unwrap());
        let ara = g.add_vertex(crate::logic::parse_gci("A <= ex r. A").unwrap());
        let ab2 = g.add_vertex(crate::logic::parse_gci("A <= B").unwrap());
        let goal = g.add_vertex(figure_goal());
        g.add_edge([ab1, bra], ara, Some(RULE_RSUB));
        g.add_edge([ab2, ara], goal, Some(RULE_RAND_PLUS));
        Proof::new(g, goal).unwrap()
    }
}

/// An entailment oracle for EL edges: the premises become a theory and the
/// conclusion is checked by saturation.
pub fn el_entailment_oracle() -> Box<EntailmentOracle<'static>> {
    Box::new(|premises: &[Gci], conclusion: &Gci| {
        let theory = Theory::new(Dialect::El, premises.to_vec());
        entails(&theory, conclusion).unwrap_or(false)
    })
}

#[derive(Clone, Copy, Debug)]
pub struct StructureParams {
    pub max_vertices: usize,
    pub max_premises: usize,
    pub extra_edge_factor: f64,
}

impl Default for StructureParams {
    fn default() -> StructureParams {
        StructureParams { max_vertices: 10, max_premises: 3, extra_edge_factor: 1.0 }
    }
}

/// A random small derivation structure whose goal (the last vertex's label)
/// always has at least one proof: the first vertices are axiom leaves, every
/// later vertex gets a backbone edge from strictly earlier vertices, and
/// extra random edges (which may form cycles) are sprinkled on top.
pub fn random_structure(rng: &mut impl Rng, params: &StructureParams) -> DerivationStructure {
    let n = rng.gen_range(2..=params.max_vertices.max(2));
    let axioms = rng.gen_range(1..=(n - 1).max(1));

    let mut graph = Hypergraph::new();
    let labels: Vec<Gci> = (0..n)
        .map(|i| {
            // distinct left-hand sides keep the labels distinct
            let rhs = random_el_concept(rng, 1);
            Gci::new(Concept::Name(format!("C{i}")), rhs)
        })
        .collect();
    for l in &labels {
        graph.add_vertex(l.clone());
    }

    use crate::hypergraph::VertexId;
    for v in axioms..n {
        let count = rng.gen_range(1..=params.max_premises.min(v).max(1));
        let mut sources: Vec<usize> = (0..v).collect();
        sources.shuffle(rng);
        sources.truncate(count);
        graph.add_edge(sources.into_iter().map(VertexId), VertexId(v), Some("bk"));
    }
    let extras = ((n as f64) * params.extra_edge_factor) as usize;
    for _ in 0..rng.gen_range(0..=extras.max(1)) {
        let target = rng.gen_range(0..n);
        let count = rng.gen_range(1..=params.max_premises);
        let mut sources: Vec<usize> = (0..n).filter(|&s| s != target).collect();
        sources.shuffle(rng);
        sources.truncate(count);
        if sources.is_empty() {
            continue;
        }
        graph.add_edge(sources.into_iter().map(VertexId), VertexId(target), Some("xt"));
    }

    let theory = Theory::new(Dialect::El, labels[..axioms].to_vec());
    let goal = labels[n - 1].clone();
    let universe = labels
        .iter()
        .flat_map(|g| [g.lhs.clone(), g.rhs.clone()])
        .collect();
    let label_size_bound = labels.iter().map(Gci::size).max().unwrap_or(1) + 1;
    DerivationStructure::assemble(
        graph,
        theory,
        goal,
        universe,
        params.max_premises.max(2),
        label_size_bound,
    )
}

fn random_el_concept<R: Rng>(rng: &mut R, depth: usize) -> Concept {
    let roll: f64 = rng.gen();
    if depth == 0 || roll < 0.5 {
        Concept::Name(format!("N{}", rng.gen_range(0..6u8)))
    } else if roll < 0.75 {
        let role = if rng.gen() { Role::plain("r") } else { Role::plain("s") };
        Concept::exists(role, random_el_concept(rng, depth - 1))
    } else {
        Concept::and([random_el_concept(rng, depth - 1), random_el_concept(rng, depth - 1)])
    }
}

fn random_pool_concept<R: Rng>(rng: &mut R, names: &[&str], depth: usize) -> Concept {
    let roll = rng.gen_range(0..10u8);
    if depth == 0 || roll < 6 {
        Concept::Name(names[rng.gen_range(0..names.len())].to_string())
    } else if roll < 8 {
        let role = if rng.gen() { Role::plain("r") } else { Role::plain("s") };
        Concept::exists(role, random_pool_concept(rng, names, depth - 1))
    } else {
        Concept::and([
            random_pool_concept(rng, names, depth - 1),
            random_pool_concept(rng, names, depth - 1),
        ])
    }
}

/// A random small EL theory over the fixed name pool `A..E`.
pub fn random_el_theory(rng: &mut impl Rng, max_axioms: usize) -> Theory {
    let names = ["A", "B", "C", "D", "E"];
    let count = rng.gen_range(1..=max_axioms.max(1));
    let axioms = (0..count)
        .map(|_| {
            Gci::new(
                random_pool_concept(rng, &names, 2),
                random_pool_concept(rng, &names, 2),
            )
        })
        .collect();
    Theory::new(Dialect::El, axioms)
}

/// A random proof sampled from a random structure's enumeration.
pub fn random_proof(rng: &mut impl Rng, params: &StructureParams) -> Proof {
    loop {
        let ds = random_structure(rng, params);
        let en = enumerate_proofs(&ds, ds.goal(), 200).expect("enumeration in bounds");
        if !en.proofs.is_empty() {
            let idx = rng.gen_range(0..en.proofs.len());
            return en.proofs.into_iter().nth(idx).unwrap();
        }
    }
}

/// A random structure together with one of its proofs and the embedding of
/// the proof's tree unraveling, for homomorphic-image properties.
pub fn random_proof_with_host(
    rng: &mut impl Rng,
    params: &StructureParams,
) -> (DerivationStructure, Proof) {
    loop {
        let ds = random_structure(rng, params);
        let en = enumerate_proofs(&ds, ds.goal(), 200).expect("enumeration in bounds");
        if !en.proofs.is_empty() {
            let idx = rng.gen_range(0..en.proofs.len());
            let proof = en.proofs.into_iter().nth(idx).unwrap();
            return (ds, proof);
        }
    }
}

/// Keep saturation cheap in randomized loops.
pub fn small_budgets() -> Budgets {
    Budgets { max_vertices: 100_000, max_expansions: 10_000 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn figure_fixtures_are_proofs() {
        assert_eq!(figures::figure_proof().vertex_count(), 4);
        assert_eq!(figures::figure_tree_proof().vertex_count(), 5);
        assert!(figures::figure_tree_proof().is_tree());
        assert!(!figures::figure_proof().is_tree());
    }

    #[test]
    fn random_structures_are_reproducible_and_wellformed() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        let p = StructureParams::default();
        for _ in 0..50 {
            let s1 = random_structure(&mut a, &p);
            let s2 = random_structure(&mut b, &p);
            assert_eq!(s1.vertex_count(), s2.vertex_count());
            assert_eq!(s1.graph().edge_count(), s2.graph().edge_count());
            // grounded: every leaf is an axiom
            for v in s1.graph().vertices() {
                if s1.graph().is_leaf(v) {
                    assert!(s1.is_axiom(v));
                }
            }
            // the goal is always derivable
            let en = enumerate_proofs(&s1, s1.goal(), 10_000).unwrap();
            assert!(!en.proofs.is_empty());
        }
    }
}
