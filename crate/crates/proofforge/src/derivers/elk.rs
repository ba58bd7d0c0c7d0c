//! EL saturation: all rule instances over the subconcept universe.
//!
//! Derived sentences are subsumptions `C <= D` with both sides in the
//! subconcept closure of theory and goal, which keeps the structure
//! polynomial. Conjunctions are canonical sorted sets, so the two
//! decomposition rules become projection onto a conjunct (`R_⊓⁻`) and the
//! composition rule takes one premise per conjunct (`R_⊓⁺`). Rule instances
//! whose conclusion occurs among their own premises are skipped: an edge
//! whose target feeds its own sources can never occur in an acyclic proof.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use super::{
    Budgets, DerivationStructure, DeriverError, RULE_R0, RULE_RAND_MINUS, RULE_RAND_PLUS,
    RULE_REX, RULE_RSUB, RULE_RTOP,
};
use crate::hypergraph::{Hypergraph, VertexId};
use crate::logic::{subconcepts, Concept, Dialect, Gci, Role, Theory};

type CId = usize; // index into the universe

struct Saturation<'a> {
    universe: Vec<Concept>,
    graph: Hypergraph,
    vertex_of: HashMap<(CId, CId), VertexId>,
    derived: HashSet<(CId, CId)>,
    queue: VecDeque<(CId, CId)>,
    /// derived sentences indexed by lhs and by rhs
    by_lhs: Vec<Vec<CId>>,
    by_rhs: Vec<Vec<CId>>,
    /// theory axioms indexed by their lhs concept
    axioms_by_lhs: HashMap<CId, Vec<(CId, CId)>>,
    /// conjunction id -> conjunct ids
    conj_members: HashMap<CId, Vec<CId>>,
    /// conjunct id -> conjunctions containing it
    conj_containing: HashMap<CId, Vec<CId>>,
    /// existential id -> (role, filler)
    exists_parts: HashMap<CId, (Role, CId)>,
    /// filler id -> existentials over it
    exists_with_filler: HashMap<CId, Vec<CId>>,
    /// (role, filler) -> existential id
    exists_of: HashMap<(Role, CId), CId>,
    budgets: &'a Budgets,
}

impl<'a> Saturation<'a> {
    fn vertex(&mut self, s: (CId, CId)) -> Result<VertexId, DeriverError> {
        if let Some(&v) = self.vertex_of.get(&s) {
            return Ok(v);
        }
        if self.graph.vertex_count() >= self.budgets.max_vertices {
            return Err(DeriverError::BudgetExceeded {
                kind: "vertices",
                limit: self.budgets.max_vertices,
            });
        }
        let label = Gci::new(self.universe[s.0].clone(), self.universe[s.1].clone());
        let v = self.graph.add_vertex(label);
        self.vertex_of.insert(s, v);
        Ok(v)
    }

    fn mark_derived(&mut self, s: (CId, CId)) {
        if self.derived.insert(s) {
            self.by_lhs[s.0].push(s.1);
            self.by_rhs[s.1].push(s.0);
            self.queue.push_back(s);
        }
    }

    /// Records a rule instance. Premises must already have vertices.
    fn record(
        &mut self,
        premises: &[(CId, CId)],
        conclusion: (CId, CId),
        rule: &str,
    ) -> Result<(), DeriverError> {
        if premises.contains(&conclusion) {
            return Ok(()); // unusable in any acyclic proof
        }
        let target = self.vertex(conclusion)?;
        let sources: Vec<VertexId> = premises
            .iter()
            .map(|p| *self.vertex_of.get(p).expect("premise has a vertex"))
            .collect();
        self.graph.add_edge(sources, target, Some(rule));
        self.mark_derived(conclusion);
        Ok(())
    }

    /// All rule instances with `s` among the premises (joined against the
    /// already-derived sentences), plus the instances `s` concludes.
    fn saturate_from(&mut self, s: (CId, CId)) -> Result<(), DeriverError> {
        let (c, d) = s;

        // R_⊑: C <= D with D <= E in the theory yields C <= E; the axiom is
        // an explicit premise vertex.
        if let Some(axioms) = self.axioms_by_lhs.get(&d) {
            for &ax in &axioms.clone() {
                self.vertex(ax)?;
                self.record(&[s, ax], (c, ax.1), RULE_RSUB)?;
            }
        }

        // R_⊓⁻: project a derived conjunction onto each conjunct.
        if let Some(members) = self.conj_members.get(&d) {
            for &x in &members.clone() {
                self.record(&[s], (c, x), RULE_RAND_MINUS)?;
            }
        }

        // R_⊓⁺: once every conjunct of some universe conjunction is derived
        // for C, conclude the conjunction; one premise per conjunct.
        if let Some(conjs) = self.conj_containing.get(&d) {
            for &m in &conjs.clone() {
                let members = self.conj_members[&m].clone();
                if members.iter().all(|y| self.derived.contains(&(c, *y))) {
                    let premises: Vec<(CId, CId)> = members.iter().map(|y| (c, *y)).collect();
                    self.record(&premises, (c, m), RULE_RAND_PLUS)?;
                }
            }
        }

        // R_∃ with s as the left premise: C <= ex r. D', D' <= E.
        if let Some((role, filler)) = self.exists_parts.get(&d).cloned() {
            for &e in &self.by_lhs[filler].clone() {
                if let Some(&ex) = self.exists_of.get(&(role.clone(), e)) {
                    self.record(&[s, (filler, e)], (c, ex), RULE_REX)?;
                }
            }
        }

        // R_∃ with s as the right premise: X <= ex r. C joins with C <= D.
        if let Some(exts) = self.exists_with_filler.get(&c) {
            for &ex_over_c in &exts.clone() {
                let role = self.exists_parts[&ex_over_c].0.clone();
                if let Some(&ex_target) = self.exists_of.get(&(role, d)) {
                    for &x in &self.by_rhs[ex_over_c].clone() {
                        self.record(&[(x, ex_over_c), s], (x, ex_target), RULE_REX)?;
                    }
                }
            }
        }

        Ok(())
    }
}

/// Saturates an EL theory for the given goal and returns the derivation
/// structure of every allowed rule instance over the subconcept universe.
pub fn elk_materialize(
    theory: &Theory,
    goal: &Gci,
    budgets: &Budgets,
) -> Result<DerivationStructure, DeriverError> {
    if theory.dialect != Dialect::El {
        return Err(DeriverError::DialectMismatch {
            expected: Dialect::El,
            found: theory.dialect,
        });
    }
    for side in [&goal.lhs, &goal.rhs] {
        if side.contains_inverse_or_forall() {
            return Err(DeriverError::UnsupportedGoal(goal.to_string()));
        }
    }

    let universe_set: BTreeSet<Concept> = subconcepts(theory, goal);
    let universe: Vec<Concept> = universe_set.iter().cloned().collect();
    let index: HashMap<Concept, CId> =
        universe.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    let n = universe.len();

    let mut sat = Saturation {
        graph: Hypergraph::new(),
        vertex_of: HashMap::new(),
        derived: HashSet::new(),
        queue: VecDeque::new(),
        by_lhs: vec![Vec::new(); n],
        by_rhs: vec![Vec::new(); n],
        axioms_by_lhs: HashMap::new(),
        conj_members: HashMap::new(),
        conj_containing: HashMap::new(),
        exists_parts: HashMap::new(),
        exists_with_filler: HashMap::new(),
        exists_of: HashMap::new(),
        budgets,
        universe,
    };

    let top = index[&Concept::Top];
    for (i, c) in sat.universe.iter().enumerate() {
        match c {
            Concept::And(parts) => {
                let members: Vec<CId> = parts.iter().map(|p| index[p]).collect();
                for &m in &members {
                    sat.conj_containing.entry(m).or_default().push(i);
                }
                sat.conj_members.insert(i, members);
            }
            Concept::Exists(r, inner) => {
                let filler = index[&**inner];
                sat.exists_parts.insert(i, (r.clone(), filler));
                sat.exists_with_filler.entry(filler).or_default().push(i);
                sat.exists_of.insert((r.clone(), filler), i);
            }
            _ => {}
        }
    }

    // Theory axioms: explicit leaf vertices, seeded as derived.
    let mut axiom_sentences = Vec::new();
    for ax in &theory.axioms {
        let s = (index[&ax.lhs], index[&ax.rhs]);
        sat.axioms_by_lhs.entry(s.0).or_default().push(s);
        axiom_sentences.push(s);
    }
    for s in axiom_sentences {
        sat.vertex(s)?;
        sat.mark_derived(s);
    }

    // R_0 and R_⊤, instantiated eagerly for the whole universe.
    for c in 0..n {
        let s = (c, c);
        sat.vertex(s)?;
        sat.graph.add_edge([], sat.vertex_of[&s], Some(RULE_R0));
        sat.mark_derived(s);
        let s = (c, top);
        sat.vertex(s)?;
        sat.graph.add_edge([], sat.vertex_of[&s], Some(RULE_RTOP));
        sat.mark_derived(s);
    }

    while let Some(s) = sat.queue.pop_front() {
        sat.saturate_from(s)?;
    }

    let max_width = sat
        .conj_members
        .values()
        .map(Vec::len)
        .max()
        .unwrap_or(0);
    let premise_bound = max_width.max(2);
    let label_size_bound = 2 * (theory.size() + goal.size()) + 4;

    Ok(DerivationStructure::assemble(
        sat.graph,
        theory.clone(),
        goal.clone(),
        universe_set,
        premise_bound,
        label_size_bound,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_gci, parse_theory};

    #[test]
    fn conjunction_composition_edge_matches_figure() {
        let theory = parse_theory("A <= B\nB <= ex r. A").unwrap();
        let goal = parse_gci("A <= (B and ex r. A)").unwrap();
        let ds = elk_materialize(&theory, &goal, &Budgets::default()).unwrap();
        let v = ds.goal_vertex().unwrap();
        let incoming = ds.graph().incoming_edges(v);
        assert_eq!(incoming.len(), 1, "exactly one way to derive the figure goal");
        let e = ds.graph().edge(incoming[0]);
        assert_eq!(e.rule.as_deref(), Some(RULE_RAND_PLUS));
        let premise_labels: BTreeSet<String> = e
            .sources
            .iter()
            .map(|s| ds.graph().label(*s).to_string())
            .collect();
        assert_eq!(
            premise_labels,
            ["A <= B".to_string(), "A <= ex r. A".to_string()].into()
        );
    }

    #[test]
    fn axiom_vertices_can_be_rederived() {
        // A <= C is an axiom and also derivable through B.
        let theory = parse_theory("A <= B\nB <= C\nA <= C").unwrap();
        let goal = parse_gci("A <= C").unwrap();
        let ds = elk_materialize(&theory, &goal, &Budgets::default()).unwrap();
        let v = ds.goal_vertex().unwrap();
        assert!(ds.is_axiom(v));
        assert!(!ds.graph().incoming_edges(v).is_empty());
    }

    #[test]
    fn no_self_premise_edges() {
        let theory = parse_theory("A <= A\nA <= B").unwrap();
        let goal = parse_gci("A <= B").unwrap();
        let ds = elk_materialize(&theory, &goal, &Budgets::default()).unwrap();
        for e in ds.graph().edges() {
            assert!(
                !e.sources.contains(&e.target),
                "degenerate edge on {}",
                ds.graph().label(e.target)
            );
        }
    }

    #[test]
    fn decomposition_projects_each_conjunct() {
        let theory = parse_theory("A <= (B and C and D)").unwrap();
        let goal = parse_gci("A <= C").unwrap();
        let ds = elk_materialize(&theory, &goal, &Budgets::default()).unwrap();
        for rhs in ["B", "C", "D"] {
            let s = parse_gci(&format!("A <= {rhs}")).unwrap();
            let v = ds.vertex_of(&s).expect("projection derived");
            assert!(ds
                .graph()
                .incoming_edges(v)
                .iter()
                .any(|&ei| ds.graph().edge(ei).rule.as_deref() == Some(RULE_RAND_MINUS)));
        }
    }
}
