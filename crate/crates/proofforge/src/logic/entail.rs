//! Entailment checking by full saturation: the goal holds iff the deriver
//! for the theory's dialect derives it. The calculi are complete for the
//! supported goal shapes, so no separate model-theoretic checker exists.

use thiserror::Error;

use super::{normalize_eli, Concept, Dialect, Gci, NormalizeError, Theory};
use crate::derivers::{eli_materialize, elk_materialize, Budgets, DeriverError};

#[derive(Debug, Error)]
pub enum EntailError {
    #[error("unsupported goal shape for {dialect}: {goal}")]
    UnsupportedGoal { dialect: Dialect, goal: String },
    #[error(transparent)]
    Deriver(#[from] DeriverError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
}

/// Decides `theory |= goal`. EL theories support any goal over EL concepts;
/// ELI theories support goals between concept names.
pub fn entails(theory: &Theory, goal: &Gci) -> Result<bool, EntailError> {
    match theory.dialect {
        Dialect::El => {
            if goal.lhs.contains_inverse_or_forall() || goal.rhs.contains_inverse_or_forall() {
                return Err(EntailError::UnsupportedGoal {
                    dialect: Dialect::El,
                    goal: goal.to_string(),
                });
            }
            let ds = elk_materialize(theory, goal, &Budgets::default())?;
            Ok(ds.goal_vertex().is_some())
        }
        Dialect::Eli => {
            if !matches!((&goal.lhs, &goal.rhs), (Concept::Name(_), Concept::Name(_))) {
                return Err(EntailError::UnsupportedGoal {
                    dialect: Dialect::Eli,
                    goal: goal.to_string(),
                });
            }
            let normalized = normalize_eli(theory)?;
            let ds = eli_materialize(&normalized.theory, goal, &Budgets::default())?;
            Ok(ds.goal_vertex().is_some())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_gci, parse_theory};

    fn holds(theory: &str, goal: &str) -> bool {
        entails(&parse_theory(theory).unwrap(), &parse_gci(goal).unwrap()).unwrap()
    }

    #[test]
    fn existential_chain_is_valid() {
        assert!(holds("A <= ex r. B\nB <= C\nex r. C <= D", "A <= D"));
    }

    #[test]
    fn reflexivity_from_the_empty_theory() {
        assert!(holds("", "A <= A"));
    }

    #[test]
    fn no_converse() {
        assert!(!holds("A <= B", "B <= A"));
    }

    #[test]
    fn transitive_closure_on_derived_subsumptions() {
        assert!(holds("A <= B\nB <= C\nC <= D", "A <= D"));
    }

    #[test]
    fn complex_goals_work_in_el() {
        assert!(holds("A <= B\nB <= ex r. A", "A <= (B and ex r. A)"));
    }

    #[test]
    fn eli_rejects_complex_goals() {
        let t = parse_theory("A <= ex inv(r). B").unwrap();
        let err = entails(&t, &parse_gci("A <= (B and C)").unwrap());
        assert!(matches!(err, Err(EntailError::UnsupportedGoal { .. })));
    }

    #[test]
    fn conjunction_order_is_irrelevant() {
        // conjunctions behave as sets: both writings are the same sentence
        let a = parse_gci("A <= (B and C)").unwrap();
        let b = parse_gci("A <= (C and B and C)").unwrap();
        assert_eq!(a, b);
        assert!(holds("A <= (C and B)", "A <= (B and C)"));
    }

    #[test]
    fn normalization_preserves_entailment_on_fixtures() {
        // an inverse-role rewrite: A <= ex r. C with ex r. C <= B
        let t = parse_theory("A <= ex r. C\nex r. C <= B").unwrap();
        assert!(entails(&t, &parse_gci("A <= B").unwrap()).unwrap());
        let n = crate::logic::normalize_eli(&t).unwrap();
        assert!(entails(&n.theory, &parse_gci("A <= B").unwrap()).unwrap());
        // and the subsumption genuinely needs the existential
        let t = parse_theory("ex r. C <= B\nA <= all r. C").unwrap();
        assert!(!entails(&t, &parse_gci("A <= B").unwrap()).unwrap());
    }
}
