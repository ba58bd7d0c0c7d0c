//! Hardness-instance constructors and their independent semantic oracles.
//!
//! Each generator emits a theory, a goal, a threshold, and the measure the
//! threshold is for; the theory is always padded so the goal entailment
//! holds regardless of the encoded question, and the threshold separates
//! the genuine proofs from the artificial padding route.

mod deep;
mod qbf;
mod tm;

pub use deep::{deep_eli_theory, deep_meta};
pub use qbf::{parse_qbf, qbf_eval, qbf_to_eli, Nnf, Qbf, Quantifier};
pub use tm::{parse_tm, tm_run, tm_to_eli, tm_tree_size_threshold, RunOutcome, TuringMachine};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::derivers::{elk_materialize, Budgets, DeriverError};
use crate::logic::{Concept, Dialect, Gci, Theory};
use crate::optimizer::SearchError;
use crate::weight::Weight;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("fresh name '{0}' clashes with a name in the input theory")]
    FreshNameClash(String),
    #[error("chain padding expects an EL theory, got {0}")]
    WrongDialect(Dialect),
    #[error("QBF is not closed: variable '{0}' is unquantified")]
    OpenFormula(String),
    #[error("QBF has {0} variables; the exhaustive evaluator caps at {1}")]
    TooManyVariables(usize, usize),
    #[error("QBF syntax error: {0}")]
    QbfSyntax(String),
    #[error("machine description error: {0}")]
    MachineSyntax(String),
    #[error("word symbol '{0}' is not in the input alphabet")]
    WordNotInAlphabet(char),
    #[error("word of length {len} does not fit the {cells} tape cells")]
    WordTooLong { len: usize, cells: usize },
    #[error(transparent)]
    Deriver(#[from] DeriverError),
    #[error("search during calibration failed: {0}")]
    Search(String),
}

impl From<SearchError> for GenError {
    fn from(e: SearchError) -> GenError {
        GenError::Search(e.to_string())
    }
}

/// A ready-to-run decision instance: a padded theory, the goal, the budget
/// threshold, and the measure it applies to.
#[derive(Clone, Debug)]
pub struct ReductionInstance {
    pub theory: Theory,
    pub goal: Gci,
    pub threshold: Weight,
    pub measure_name: String,
    pub meta: BTreeMap<String, String>,
}

/// Appends the axiom chain `lhs <= Pad1 <= ... <= Pad{len} <= rhs`.
/// Deriving the goal through the chain takes one subsumption step per link,
/// so both its depth and its tree size exceed `len`.
pub(crate) fn append_pad_chain(
    theory: &mut Theory,
    lhs: &str,
    rhs: &str,
    len: usize,
) -> Result<(), GenError> {
    let names = theory.concept_names();
    for i in 1..=len {
        let pad = format!("Pad{i}");
        if names.contains(&pad) {
            return Err(GenError::FreshNameClash(pad));
        }
    }
    let mut prev = Concept::name(lhs);
    for i in 1..=len {
        let next = Concept::name(format!("Pad{i}"));
        theory.axioms.push(Gci::new(prev, next.clone()));
        prev = next;
    }
    theory.axioms.push(Gci::new(prev, Concept::name(rhs)));
    Ok(())
}

/// Entailment reduction for the depth measure: the bound `q` is the vertex
/// count of the saturated structure (any genuine proof is an acyclic path
/// through it, so its depth stays below `q`), and a fresh-name chain of
/// `q + 2` links guarantees the goal entailment with depth above `q`. The
/// goal thus has a proof of depth at most `q` iff the input theory already
/// entailed it.
pub fn pad_depth_chain(theory: &Theory, lhs: &str, rhs: &str) -> Result<ReductionInstance, GenError> {
    if theory.dialect != Dialect::El {
        return Err(GenError::WrongDialect(theory.dialect));
    }
    let goal = Gci::new(Concept::name(lhs), Concept::name(rhs));
    let ds = elk_materialize(theory, &goal, &Budgets::default())?;
    let q = ds.vertex_count();

    let mut padded = theory.clone();
    append_pad_chain(&mut padded, lhs, rhs, q + 2)?;
    let mut meta = BTreeMap::new();
    meta.insert("construction".into(), "pad_depth_chain".into());
    meta.insert("chain_length".into(), (q + 2).to_string());
    Ok(ReductionInstance {
        theory: padded,
        goal,
        threshold: Weight::from_u64(q as u64),
        measure_name: "depth".into(),
        meta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivers::{lazy_view, DeriverKind};
    use crate::logic::{entails, parse_theory};
    use crate::measures::depth_measure;
    use crate::optimizer::{decide_depth_leq, dijkstra_optimal, SearchOptions};

    fn check_chain(theory_src: &str, expect: bool) {
        let t = parse_theory(theory_src).unwrap();
        let inst = pad_depth_chain(&t, "A", "B").unwrap();
        assert_eq!(entails(&inst.theory, &inst.goal).unwrap(), true);
        let view =
            lazy_view(DeriverKind::Elk, &inst.theory, &inst.goal, Budgets::default()).unwrap();
        let d = decide_depth_leq(&view, &inst.goal, &inst.threshold, &SearchOptions::checked())
            .unwrap();
        assert_eq!(d.admissible, expect);
        assert_eq!(entails(&t, &inst.goal).unwrap(), expect);
    }

    #[test]
    fn provable_goal_stays_below_threshold() {
        check_chain("A <= B", true);
        check_chain("A <= C\nC <= B", true);
    }

    #[test]
    fn unprovable_goal_forces_the_chain() {
        check_chain("A <= C", false);
        check_chain("", false);
    }

    #[test]
    fn artificial_chain_depth_exceeds_threshold() {
        let t = parse_theory("").unwrap();
        let inst = pad_depth_chain(&t, "A", "B").unwrap();
        let ds = elk_materialize(&inst.theory, &inst.goal, &Budgets::default()).unwrap();
        let r = dijkstra_optimal(&ds, &depth_measure(), &SearchOptions::default()).unwrap();
        assert!(r.weight > inst.threshold);
    }

    #[test]
    fn fresh_name_clash_is_detected() {
        let t = parse_theory("A <= Pad1").unwrap();
        assert!(matches!(
            pad_depth_chain(&t, "A", "B"),
            Err(GenError::FreshNameClash(_))
        ));
    }
}
