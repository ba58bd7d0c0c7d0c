//! A linear-size ELI theory whose only proofs are exponentially deep.
//!
//! The theory drives a binary counter over `n` bit names through a role
//! chain: a configuration steps to its successor by flipping the lowest
//! zero bit, zeroing everything below it, and copying the bits above it
//! through value restrictions. Acceptance is detected at the all-ones
//! configuration and propagated back through the inverse role, so any proof
//! of `A <= B` contains one backward step per counter increment. Each step
//! raises the counter value by at most one, hence at least `2^n - 1` chained
//! steps and proof depth above `2^n`.

use std::collections::BTreeMap;

use crate::logic::{Concept, Dialect, Gci, Role, Theory};

fn name(s: String) -> Concept {
    Concept::Name(s)
}

/// Builds the counter theory over `n` bits with goal `A <= B`. The theory
/// is in ELI normal form and its size grows linearly in `n`.
pub fn deep_eli_theory(n: usize) -> (Theory, Gci) {
    assert!(n >= 1, "counter needs at least one bit");
    let r = Role::plain("r");
    let bit = |i: usize, v: u8| name(format!("Bit{i}v{v}"));
    let ones_below = |i: usize| name(format!("Ones{i}")); // bits 0..i all 1
    let zeros_below = |i: usize| name(format!("Zero{i}")); // bits 0..i all 0
    let flip = |i: usize| name(format!("Flip{i}")); // successor via level i
    let copy_from = |j: usize| name(format!("Copy{j}")); // flip level below j
    let acc = || name("Acc".to_string());

    let mut axioms = Vec::new();
    let mut push = |lhs: Concept, rhs: Concept| axioms.push(Gci::new(lhs, rhs));

    // Initial configuration: all bits zero.
    for i in 0..n {
        push(name("A".into()), bit(i, 0));
    }
    push(name("A".into()), ones_below(0));

    for i in 0..n {
        // ones-prefix detection: bits 0..i-1 all 1 and bit i 1 extends it
        push(Concept::and([bit(i, 1), ones_below(i)]), ones_below(i + 1));
        // step at level i: flip the lowest zero bit
        let level = Concept::and([ones_below(i), bit(i, 0)]);
        push(
            level.clone(),
            Concept::exists(r.clone(), Concept::and([flip(i), bit(i, 1), ones_below(0)])),
        );
        // bits above the flip level are copyable
        push(level, copy_from(i + 1));
        if i + 1 < n {
            push(copy_from(i + 1), copy_from(i + 2));
        }
        // the successor zeroes out everything below the flipped bit
        if i >= 1 {
            push(flip(i), zeros_below(i));
        }
        // copies run through the value restriction
        for v in [0, 1] {
            push(
                Concept::and([copy_from(i + 1), bit(i, v)]),
                Concept::forall(r.clone(), bit(i, v)),
            );
        }
    }
    // zero-prefixes unfold downwards
    for i in 1..n {
        push(zeros_below(i), bit(i - 1, 0));
        if i >= 2 {
            push(zeros_below(i), zeros_below(i - 1));
        }
    }
    // all-ones accepts; acceptance travels back along the role chain
    push(ones_below(n), acc());
    push(acc(), Concept::forall(r.inverse(), acc()));
    push(acc(), name("B".into()));

    let theory = Theory::new(Dialect::Eli, axioms);
    let goal = Gci::new(name("A".into()), name("B".into()));
    (theory, goal)
}

/// Construction parameters, for instance sidecars.
pub fn deep_meta(n: usize) -> BTreeMap<String, String> {
    let mut meta = BTreeMap::new();
    meta.insert("construction".into(), "deep_eli_counter".into());
    meta.insert("bits".into(), n.to_string());
    meta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivers::{eli_materialize, Budgets};
    use crate::measures::depth_measure;
    use crate::optimizer::{dijkstra_optimal, SearchOptions};
    use crate::weight::Weight;

    fn minimal_depth(n: usize) -> Weight {
        let (theory, goal) = deep_eli_theory(n);
        let ds = eli_materialize(&theory, &goal, &Budgets::default()).unwrap();
        dijkstra_optimal(&ds, &depth_measure(), &SearchOptions::default())
            .unwrap()
            .weight
    }

    #[test]
    fn depth_exceeds_two_to_the_n() {
        assert!(minimal_depth(1) > Weight::from_u64(2));
        assert!(minimal_depth(2) > Weight::from_u64(4));
    }

    #[test]
    fn size_grows_linearly() {
        // size(n) - size(n-1) is a constant increment
        let sizes: Vec<usize> = (1..=5).map(|n| deep_eli_theory(n).0.size()).collect();
        let d1 = sizes[2] - sizes[1];
        for w in sizes.windows(2).skip(2) {
            assert_eq!(w[1] - w[0], d1, "sizes not linear: {sizes:?}");
        }
    }

    #[test]
    fn theory_is_already_normal() {
        let (theory, _) = deep_eli_theory(3);
        let normalized = crate::logic::normalize_eli(&theory).unwrap();
        assert_eq!(normalized.theory.axioms, theory.axioms);
    }
}
