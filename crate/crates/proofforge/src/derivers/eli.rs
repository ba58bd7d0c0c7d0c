//! ELI saturation: rules CR1-CR4 over conjunctions of concept names.
//!
//! The input theory must be in normal form (see `logic::normalize_eli`):
//! every axiom is `K <= C` with `K` a conjunction of names and `C` a name,
//! `ex r. M`, or `all r. A`. Sentences of the growing saturated theory have
//! the same three shapes. A conjunction "appears" once it occurs as a
//! left-hand side or under an existential; CR1 instantiates eagerly for
//! every appearing conjunction, and CR4 is what makes new conjunctions
//! appear, which is where the exponential blow-up lives. The vertex budget
//! turns runaway saturation into an error instead of a hang.
//!
//! CR2's side sentence `K <= C` is drawn from the input axioms, mirroring
//! how the EL subsumption rule consumes its theory sentence. Letting it
//! range over derived sentences would compose subsumption chains into
//! logarithmic depth, and any derivation using such an instance can be
//! replayed with the name premises relativized, so nothing is lost.
//!
//! Everything is interned to small integers internally; labels are built
//! once per sentence when its vertex is created.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{
    Budgets, DerivationStructure, DeriverError, RULE_CR1, RULE_CR2, RULE_CR3, RULE_CR4,
};
use crate::hypergraph::{Hypergraph, VertexId};
use crate::logic::{Concept, Gci, Role, Theory};

type NameId = u32;
type RoleId = u32;
type ConjId = u32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Rhs {
    Name(NameId),
    Ex(RoleId, ConjId),
    All(RoleId, NameId),
}

type Sentence = (ConjId, Rhs);
type Sid = usize;

#[derive(Default)]
struct Interner {
    names: Vec<String>,
    name_index: HashMap<String, NameId>,
    roles: Vec<(NameId, bool)>,
    role_index: HashMap<(NameId, bool), RoleId>,
    conjs: Vec<Vec<NameId>>,
    conj_index: HashMap<Vec<NameId>, ConjId>,
}

impl Interner {
    fn name(&mut self, n: &str) -> NameId {
        if let Some(&id) = self.name_index.get(n) {
            return id;
        }
        let id = self.names.len() as NameId;
        self.names.push(n.to_string());
        self.name_index.insert(n.to_string(), id);
        id
    }

    fn role(&mut self, r: &Role) -> RoleId {
        let key = (self.name(&r.name), r.inverted);
        if let Some(&id) = self.role_index.get(&key) {
            return id;
        }
        let id = self.roles.len() as RoleId;
        self.roles.push(key);
        self.role_index.insert(key, id);
        id
    }

    fn invert(&mut self, r: RoleId) -> RoleId {
        let (n, inv) = self.roles[r as usize];
        let key = (n, !inv);
        if let Some(&id) = self.role_index.get(&key) {
            return id;
        }
        let id = self.roles.len() as RoleId;
        self.roles.push(key);
        self.role_index.insert(key, id);
        id
    }

    fn conj(&mut self, mut members: Vec<NameId>) -> ConjId {
        members.sort_unstable();
        members.dedup();
        if let Some(&id) = self.conj_index.get(&members) {
            return id;
        }
        let id = self.conjs.len() as ConjId;
        self.conj_index.insert(members.clone(), id);
        self.conjs.push(members);
        id
    }

    fn conj_concept(&self, c: ConjId) -> Concept {
        Concept::and(
            self.conjs[c as usize]
                .iter()
                .map(|&n| Concept::Name(self.names[n as usize].clone())),
        )
    }

    fn role_concept(&self, r: RoleId) -> Role {
        let (n, inv) = self.roles[r as usize];
        Role { name: self.names[n as usize].clone(), inverted: inv }
    }

    fn sentence_label(&self, s: Sentence) -> Gci {
        let lhs = self.conj_concept(s.0);
        let rhs = match s.1 {
            Rhs::Name(n) => Concept::Name(self.names[n as usize].clone()),
            Rhs::Ex(r, m) => Concept::exists(self.role_concept(r), self.conj_concept(m)),
            Rhs::All(r, n) => Concept::forall(
                self.role_concept(r),
                Concept::Name(self.names[n as usize].clone()),
            ),
        };
        Gci::new(lhs, rhs)
    }
}

struct Saturation<'a> {
    intern: Interner,
    graph: Hypergraph,
    sentences: Vec<Sentence>,
    sent_index: HashMap<Sentence, Sid>,
    sent_queue: VecDeque<Sid>,
    appearing: BTreeSet<ConjId>,
    appear_queue: VecDeque<ConjId>,
    /// M -> names A with (M, A) in the saturated set
    names_of: HashMap<ConjId, BTreeSet<NameId>>,
    /// A -> conjunctions M with (M, A) in the saturated set
    lhs_with_name: HashMap<NameId, Vec<ConjId>>,
    /// A -> axioms whose left conjunction contains A
    axiom_by_lhs_member: HashMap<NameId, Vec<Sid>>,
    axiom_flags: Vec<bool>,
    /// L -> sentences (M, ex r. L)
    ex_by_filler: HashMap<ConjId, Vec<Sid>>,
    /// L -> sentences (L, ex r. M)
    ex_by_lhs: HashMap<ConjId, Vec<Sid>>,
    /// L -> sentences (L, all r. A)
    all_by_lhs: HashMap<ConjId, Vec<Sid>>,
    budgets: &'a Budgets,
}

impl<'a> Saturation<'a> {
    fn add_sentence(&mut self, s: Sentence) -> Result<Sid, DeriverError> {
        if let Some(&sid) = self.sent_index.get(&s) {
            return Ok(sid);
        }
        if self.sentences.len() >= self.budgets.max_vertices {
            return Err(DeriverError::BudgetExceeded {
                kind: "vertices",
                limit: self.budgets.max_vertices,
            });
        }
        let sid = self.sentences.len();
        let label = self.intern.sentence_label(s);
        let v = self.graph.add_vertex(label);
        debug_assert_eq!(v.0, sid);
        self.sentences.push(s);
        self.sent_index.insert(s, sid);
        self.axiom_flags.push(false);

        let (k, rhs) = s;
        self.mark_appearing(k);
        match rhs {
            Rhs::Name(a) => {
                self.names_of.entry(k).or_default().insert(a);
                self.lhs_with_name.entry(a).or_default().push(k);
            }
            Rhs::Ex(_, m) => {
                self.mark_appearing(m);
                self.ex_by_filler.entry(m).or_default().push(sid);
                self.ex_by_lhs.entry(k).or_default().push(sid);
            }
            Rhs::All(_, _) => {
                self.all_by_lhs.entry(k).or_default().push(sid);
            }
        }
        self.sent_queue.push_back(sid);
        Ok(sid)
    }

    fn mark_appearing(&mut self, k: ConjId) {
        if self.appearing.insert(k) {
            self.appear_queue.push_back(k);
        }
    }

    fn record(&mut self, premises: &[Sid], conclusion: Sentence, rule: &str) -> Result<(), DeriverError> {
        let target = self.add_sentence(conclusion)?;
        if premises.contains(&target) {
            return Ok(()); // a conclusion among its own premises never sits in a proof
        }
        self.graph.add_edge(
            premises.iter().map(|&p| VertexId(p)),
            VertexId(target),
            Some(rule),
        );
        Ok(())
    }

    /// CR1 for a newly appearing conjunction: `K <= A` for every `A` in `K`,
    /// as premise-free edges.
    fn process_appearing(&mut self, k: ConjId) -> Result<(), DeriverError> {
        for &a in &self.intern.conjs[k as usize].clone() {
            self.record(&[], (k, Rhs::Name(a)), RULE_CR1)?;
        }
        Ok(())
    }

    /// CR2 instances with side sentence `t = (K, C)` and left conjunction
    /// `m`: fires when `(m, A)` is present for every name of `K`.
    fn try_cr2(&mut self, m: ConjId, t: Sid) -> Result<(), DeriverError> {
        let (k, c) = self.sentences[t];
        let members = self.intern.conjs[k as usize].clone();
        let Some(have) = self.names_of.get(&m) else {
            return Ok(());
        };
        if !members.iter().all(|a| have.contains(a)) {
            return Ok(());
        }
        let mut premises: Vec<Sid> = members
            .iter()
            .map(|&a| self.sent_index[&(m, Rhs::Name(a))])
            .collect();
        premises.push(t);
        self.record(&premises, (m, c), RULE_CR2)
    }

    fn process_sentence(&mut self, sid: Sid) -> Result<(), DeriverError> {
        let (k, rhs) = self.sentences[sid];

        // CR2 with this axiom as the side premise `K <= C`: every
        // conjunction that already derived all names of K fires.
        if self.axiom_flags[sid] {
            let members = self.intern.conjs[k as usize].clone();
            if let Some(first) = members.first() {
                let candidates = self.lhs_with_name.get(first).cloned().unwrap_or_default();
                for m in candidates {
                    self.try_cr2(m, sid)?;
                }
            }
        }

        match rhs {
            Rhs::Name(a) => {
                // CR2 with this sentence as one of the name premises.
                let candidates = self.axiom_by_lhs_member.get(&a).cloned().unwrap_or_default();
                for t in candidates {
                    self.try_cr2(k, t)?;
                }
            }
            Rhs::Ex(r, l) => {
                // CR3: (K, ex r. L) + (L, all inv(r). A) -> (K, A)
                let r_inv = self.intern.invert(r);
                for t in self.all_by_lhs.get(&l).cloned().unwrap_or_default() {
                    if let (_, Rhs::All(r2, a)) = self.sentences[t] {
                        if r2 == r_inv {
                            self.record(&[sid, t], (k, Rhs::Name(a)), RULE_CR3)?;
                        }
                    }
                }
                // CR4: (K, ex r. L) + (K, all r. A) -> (K, ex r. (L + A))
                for t in self.all_by_lhs.get(&k).cloned().unwrap_or_default() {
                    if let (_, Rhs::All(r2, a)) = self.sentences[t] {
                        if r2 == r {
                            self.fire_cr4(sid, t, k, r, l, a)?;
                        }
                    }
                }
            }
            Rhs::All(r2, a) => {
                // CR3 with this sentence as the value-restriction premise.
                let r = self.intern.invert(r2);
                for t in self.ex_by_filler.get(&k).cloned().unwrap_or_default() {
                    if let (m, Rhs::Ex(r1, _)) = self.sentences[t] {
                        if r1 == r {
                            self.record(&[t, sid], (m, Rhs::Name(a)), RULE_CR3)?;
                        }
                    }
                }
                // CR4 with this sentence as the value-restriction premise.
                for t in self.ex_by_lhs.get(&k).cloned().unwrap_or_default() {
                    if let (_, Rhs::Ex(r1, m)) = self.sentences[t] {
                        if r1 == r2 {
                            self.fire_cr4(t, sid, k, r2, m, a)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn fire_cr4(
        &mut self,
        ex_sid: Sid,
        all_sid: Sid,
        lhs: ConjId,
        role: RoleId,
        filler: ConjId,
        added: NameId,
    ) -> Result<(), DeriverError> {
        if self.intern.conjs[filler as usize].contains(&added) {
            return Ok(()); // conclusion would equal the existential premise
        }
        let mut members = self.intern.conjs[filler as usize].clone();
        members.push(added);
        let bigger = self.intern.conj(members);
        self.record(&[ex_sid, all_sid], (lhs, Rhs::Ex(role, bigger)), RULE_CR4)
    }
}

fn parse_normal_axiom(intern: &mut Interner, ax: &Gci) -> Result<Sentence, DeriverError> {
    let not_normal = || DeriverError::NotNormalForm(ax.to_string());
    let lhs_members: Vec<NameId> = ax
        .lhs
        .conjuncts()
        .iter()
        .map(|c| match c {
            Concept::Name(n) => Ok(intern.name(n)),
            _ => Err(not_normal()),
        })
        .collect::<Result<_, _>>()?;
    if lhs_members.is_empty() {
        return Err(not_normal());
    }
    let lhs = intern.conj(lhs_members);
    let rhs = match &ax.rhs {
        Concept::Name(n) => Rhs::Name(intern.name(n)),
        Concept::Exists(r, inner) => {
            let members: Vec<NameId> = inner
                .conjuncts()
                .iter()
                .map(|c| match c {
                    Concept::Name(n) => Ok(intern.name(n)),
                    _ => Err(not_normal()),
                })
                .collect::<Result<_, _>>()?;
            let role = intern.role(r);
            Rhs::Ex(role, intern.conj(members))
        }
        Concept::Forall(r, inner) => match &**inner {
            Concept::Name(n) => {
                let role = intern.role(r);
                Rhs::All(role, intern.name(n))
            }
            _ => return Err(not_normal()),
        },
        _ => return Err(not_normal()),
    };
    Ok((lhs, rhs))
}

/// Saturates a normalized ELI theory for a goal `A <= B` over concept names
/// and returns the derivation structure of all CR1-CR4 instances.
pub fn eli_materialize(
    normalized: &Theory,
    goal: &Gci,
    budgets: &Budgets,
) -> Result<DerivationStructure, DeriverError> {
    let (Concept::Name(goal_lhs), Concept::Name(_)) = (&goal.lhs, &goal.rhs) else {
        return Err(DeriverError::UnsupportedGoal(goal.to_string()));
    };

    let mut sat = Saturation {
        intern: Interner::default(),
        graph: Hypergraph::new(),
        sentences: Vec::new(),
        sent_index: HashMap::new(),
        sent_queue: VecDeque::new(),
        appearing: BTreeSet::new(),
        appear_queue: VecDeque::new(),
        names_of: HashMap::new(),
        lhs_with_name: HashMap::new(),
        axiom_by_lhs_member: HashMap::new(),
        axiom_flags: Vec::new(),
        ex_by_filler: HashMap::new(),
        ex_by_lhs: HashMap::new(),
        all_by_lhs: HashMap::new(),
        budgets,
    };

    // Axioms are the initial sentences of the saturated theory.
    for ax in &normalized.axioms {
        let s = parse_normal_axiom(&mut sat.intern, ax)?;
        let sid = sat.add_sentence(s)?;
        if !sat.axiom_flags[sid] {
            sat.axiom_flags[sid] = true;
            for &member in &sat.intern.conjs[s.0 as usize].clone() {
                sat.axiom_by_lhs_member.entry(member).or_default().push(sid);
            }
        }
    }
    // The goal's left-hand side counts as appearing, so reflexive goals are
    // derivable even when the name is not mentioned in the theory.
    let goal_conj = {
        let n = sat.intern.name(goal_lhs);
        sat.intern.conj(vec![n])
    };
    sat.mark_appearing(goal_conj);

    loop {
        if let Some(k) = sat.appear_queue.pop_front() {
            sat.process_appearing(k)?;
        } else if let Some(sid) = sat.sent_queue.pop_front() {
            sat.process_sentence(sid)?;
        } else {
            break;
        }
    }

    let universe: BTreeSet<Concept> = sat
        .graph
        .labels()
        .iter()
        .flat_map(|g| [g.lhs.clone(), g.rhs.clone()])
        .collect();
    let premise_bound = (sat.intern.names.len() + 1).max(2);
    let label_size_bound = 2 * (normalized.size() + goal.size()) + 8;

    Ok(DerivationStructure::assemble(
        sat.graph,
        normalized.clone(),
        goal.clone(),
        universe,
        premise_bound,
        label_size_bound,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{normalize_eli, parse_gci, parse_theory};

    fn saturate(theory_src: &str, goal_src: &str) -> DerivationStructure {
        let t = parse_theory(theory_src).unwrap();
        let n = normalize_eli(&t).unwrap();
        eli_materialize(&n.theory, &parse_gci(goal_src).unwrap(), &Budgets::default()).unwrap()
    }

    #[test]
    fn cr1_yields_premise_free_edges() {
        let ds = saturate("A and B <= C", "A <= A");
        let v = ds
            .vertex_of(&parse_gci("(A and B) <= A").unwrap())
            .expect("CR1 conclusion present");
        let edges = ds.graph().incoming_edges(v);
        assert!(edges
            .iter()
            .any(|&ei| ds.graph().edge(ei).sources.is_empty()
                && ds.graph().edge(ei).rule.as_deref() == Some(RULE_CR1)));
    }

    #[test]
    fn cr3_derives_through_inverse() {
        // normalized {A <= ex r. B, B <= all inv(r). C} lets CR3 conclude A <= C
        let ds = saturate("A <= ex r. B\nB <= all inv(r). C", "A <= C");
        let v = ds.goal_vertex().expect("A <= C derivable");
        let has_cr3 = ds
            .graph()
            .incoming_edges(v)
            .iter()
            .any(|&ei| ds.graph().edge(ei).rule.as_deref() == Some(RULE_CR3));
        assert!(has_cr3);
    }

    #[test]
    fn cr4_joins_existential_and_value_restriction() {
        let ds = saturate("A <= ex r. B\nA <= all r. C", "A <= A");
        let s = parse_gci("A <= ex r. (B and C)").unwrap();
        let v = ds.vertex_of(&s).expect("CR4 conclusion present");
        assert!(ds
            .graph()
            .incoming_edges(v)
            .iter()
            .any(|&ei| ds.graph().edge(ei).rule.as_deref() == Some(RULE_CR4)));
    }

    #[test]
    fn reflexive_goal_without_mentions() {
        let ds = saturate("B <= C", "A <= A");
        assert!(ds.goal_vertex().is_some());
    }

    #[test]
    fn inverse_rewrite_preserves_subsumption() {
        // ex r. C on the left: A <= ex r. C plus ex r. C <= B entail A <= B.
        let ds = saturate("A <= ex r. C\nex r. C <= B", "A <= B");
        assert!(ds.goal_vertex().is_some());
        // and A alone is not subsumed by B without the existential
        let ds = saturate("ex r. C <= B", "A <= B");
        assert!(ds.goal_vertex().is_none());
    }

    #[test]
    fn rejects_non_normal_axiom() {
        let t = parse_theory("A <= ex r. (ex s. B)").unwrap();
        let err = eli_materialize(&t, &parse_gci("A <= B").unwrap(), &Budgets::default());
        assert!(matches!(err, Err(DeriverError::NotNormalForm(_))));
    }

    #[test]
    fn rejects_complex_goal() {
        let t = parse_theory("A <= B").unwrap();
        let err = eli_materialize(
            &t,
            &parse_gci("A <= (B and C)").unwrap(),
            &Budgets::default(),
        );
        assert!(matches!(err, Err(DeriverError::UnsupportedGoal(_))));
    }

    #[test]
    fn grounded_over_the_normalized_theory() {
        let ds = saturate("A <= ex r. B\nB <= all inv(r). C", "A <= C");
        for v in ds.graph().vertices() {
            if ds.graph().is_leaf(v) {
                assert!(ds.is_axiom(v), "leaf {} is not an axiom", ds.graph().label(v));
            }
        }
    }
}
