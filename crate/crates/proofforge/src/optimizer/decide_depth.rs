//! Budget decision for proof depth, working against the oracle interface.
//!
//! Deterministic realization of the depth-first guessing strategy: a
//! sentence is provable within budget `b` when it is an axiom (depth 0), or
//! some premise set from `expand` proves every premise within `b - 1`.
//! Budgets shrink strictly along the recursion, so the search is a finite
//! tree walk and never needs an explicit cycle check; witnesses come out as
//! tree proofs. Depth weights are integers, so budgets are floored and
//! outcomes are memoized per sentence as "succeeds from" / "fails up to"
//! watermarks, which stay valid across contexts.

use std::collections::HashMap;

use super::{Decision, SearchError, SearchOptions};
use crate::derivers::{DeriverOracle, SentenceId};
use crate::hypergraph::{Hypergraph, Proof, VertexId};
use crate::logic::Gci;
use crate::measures::{depth_measure, evaluate};
use crate::weight::Weight;

#[derive(Clone, Default)]
struct Entry {
    /// Smallest budget known to suffice, with the premise set that works.
    success: Option<(u64, Vec<SentenceId>, Option<String>)>,
    /// Largest budget known to fail.
    failure: Option<u64>,
}

pub(crate) struct DepthSearch<'a> {
    view: &'a dyn DeriverOracle,
    memo: HashMap<SentenceId, Entry>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Route {
    AxiomLeaf,
    Premises,
}

impl<'a> DepthSearch<'a> {
    pub(crate) fn new(view: &'a dyn DeriverOracle) -> DepthSearch<'a> {
        DepthSearch { view, memo: HashMap::new() }
    }

    /// Is there a proof of `id` with depth at most `budget`?
    pub(crate) fn provable_within(
        &mut self,
        id: SentenceId,
        budget: u64,
    ) -> Result<bool, SearchError> {
        if self.view.is_axiom(id)? {
            return Ok(true); // a single axiom leaf has depth 0 <= budget
        }
        if let Some(e) = self.memo.get(&id) {
            if let Some((b, _, _)) = &e.success {
                if *b <= budget {
                    return Ok(true);
                }
            }
            if let Some(f) = e.failure {
                if f >= budget {
                    return Ok(false);
                }
            }
        }
        let mut ok = false;
        'edges: for (premises, rule) in self.view.expand(id)? {
            if premises.is_empty() {
                // premise-free edge: depth 1
                if budget >= 1 {
                    self.record_success(id, 1, premises, rule);
                    ok = true;
                    break 'edges;
                }
                continue;
            }
            if budget == 0 {
                continue;
            }
            let mut all = true;
            for &p in &premises {
                if !self.provable_within(p, budget - 1)? {
                    all = false;
                    break;
                }
            }
            if all {
                self.record_success(id, budget, premises, rule);
                ok = true;
                break 'edges;
            }
        }
        if !ok {
            let e = self.memo.entry(id).or_default();
            e.failure = Some(e.failure.map_or(budget, |f| f.max(budget)));
        }
        Ok(ok)
    }

    fn record_success(
        &mut self,
        id: SentenceId,
        budget: u64,
        premises: Vec<SentenceId>,
        rule: Option<String>,
    ) {
        let e = self.memo.entry(id).or_default();
        match &e.success {
            Some((b, _, _)) if *b <= budget => {}
            _ => e.success = Some((budget, premises, rule)),
        }
    }

    /// Rebuilds a tree witness from the recorded successful routes.
    pub(crate) fn witness(&mut self, id: SentenceId) -> Result<Proof, SearchError> {
        let mut g = Hypergraph::new();
        let root = self.build(id, &mut g)?;
        Proof::new(g, root)
            .map_err(|e| SearchError::InvariantViolation(format!("witness not a proof: {e}")))
    }

    fn build(&mut self, id: SentenceId, g: &mut Hypergraph) -> Result<VertexId, SearchError> {
        let v = g.add_vertex(self.view.sentence(id)?);
        if self.view.is_axiom(id)? && self.route(id) == Route::AxiomLeaf {
            return Ok(v);
        }
        let (premises, rule) = {
            let e = self.memo.get(&id).expect("witness follows recorded successes");
            let (_, premises, rule) = e.success.as_ref().expect("recorded success");
            (premises.clone(), rule.clone())
        };
        let children: Result<Vec<VertexId>, SearchError> =
            premises.iter().map(|&p| self.build(p, g)).collect();
        g.add_edge(children?, v, rule.as_deref());
        Ok(v)
    }

    fn route(&self, id: SentenceId) -> Route {
        match self.memo.get(&id).and_then(|e| e.success.as_ref()) {
            Some(_) => Route::Premises,
            None => Route::AxiomLeaf,
        }
    }
}

fn floor_budget(q: &Weight) -> Result<u64, SearchError> {
    use num_traits::ToPrimitive;
    q.floor_uint()
        .to_u64()
        .ok_or_else(|| SearchError::BudgetTooLarge(q.clone()))
}

/// Decides whether an admissible proof of depth at most `q` exists for the
/// goal, returning a tree witness when it does. An absent goal vertex
/// answers no rather than erroring, so the decider doubles as a
/// reachability probe.
pub fn decide_depth_leq(
    view: &dyn DeriverOracle,
    goal: &Gci,
    q: &Weight,
    opts: &SearchOptions,
) -> Result<Decision, SearchError> {
    let budget = floor_budget(q)?;
    let Some(goal_id) = view.resolve(goal)? else {
        return Ok(Decision { admissible: false, witness: None });
    };
    let mut search = DepthSearch::new(view);
    if !search.provable_within(goal_id, budget)? {
        return Ok(Decision { admissible: false, witness: None });
    }
    // An axiom goal is witnessed by its single leaf.
    let witness = if view.is_axiom(goal_id)? && search.route(goal_id) == Route::AxiomLeaf {
        let mut g = Hypergraph::new();
        let v = g.add_vertex(view.sentence(goal_id)?);
        Proof::new(g, v).expect("single vertex is a proof")
    } else {
        search.witness(goal_id)?
    };
    let w = evaluate(&depth_measure(), &witness)?;
    if opts.debug_invariants && !depth_measure().within_bound(&w, q) {
        return Err(SearchError::InvariantViolation(format!(
            "depth witness weighs {w}, over the bound {q}"
        )));
    }
    debug_assert!(w <= Weight::from_u64(budget));
    Ok(Decision { admissible: true, witness: Some(witness) })
}
