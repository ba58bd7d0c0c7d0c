//! Structural normalization for ELI theories.
//!
//! The target shape is `K <= C` where `K` is a conjunction of concept names
//! and `C` is a concept name, `ex r. M` with `M` a conjunction of names, or
//! `all r. A` with `A` a name (`r` a role name or an inverse). Complex
//! subconcepts are split out behind fresh names (`_N0`, `_N1`, ...; the
//! leading underscore is unreachable from the input grammar, so fresh names
//! cannot clash). An existential on the left is turned around through the
//! inverse role: `ex r. C <= D` becomes `C <= all inv(r). D`.
//!
//! The result is a conservative extension: entailments between concepts over
//! the original signature are preserved.

use std::collections::VecDeque;

use thiserror::Error;

use super::{Concept, Dialect, Gci, Theory};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("axiom {0}: 'top' on the left-hand side is outside the supported ELI fragment")]
    TopLhs(String),
    #[error("axiom {0}: a value restriction on the left-hand side is not an ELI concept")]
    ForallLhs(String),
    #[error("normalization did not terminate (internal error)")]
    Diverged,
}

#[derive(Clone, Debug)]
pub struct NormalizedTheory {
    pub theory: Theory,
    /// For each axiom of `theory`, the index of the source axiom in the
    /// input it was derived from. Fresh definitional axioms inherit the
    /// source of the axiom that introduced them.
    pub provenance: Vec<Option<usize>>,
}

struct Fresh {
    next: usize,
}

impl Fresh {
    fn take(&mut self) -> Concept {
        let name = format!("_N{}", self.next);
        self.next += 1;
        Concept::Name(name)
    }
}

fn is_name_conjunction(c: &Concept) -> bool {
    c.conjuncts().iter().all(|p| matches!(p, Concept::Name(_)))
}

/// True for the allowed right-hand sides.
fn is_normal_rhs(c: &Concept) -> bool {
    match c {
        Concept::Name(_) => true,
        Concept::Exists(_, inner) => is_name_conjunction(inner),
        Concept::Forall(_, inner) => matches!(**inner, Concept::Name(_)),
        _ => false,
    }
}

pub fn normalize_eli(theory: &Theory) -> Result<NormalizedTheory, NormalizeError> {
    let mut fresh = Fresh { next: 0 };
    let mut queue: VecDeque<(Gci, Option<usize>)> = theory
        .axioms
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, g)| (g, Some(i)))
        .collect();
    let mut out: Vec<Gci> = Vec::new();
    let mut provenance: Vec<Option<usize>> = Vec::new();

    let budget = 1000 + 100 * theory.size();
    let mut steps = 0usize;
    while let Some((gci, src)) = queue.pop_front() {
        steps += 1;
        if steps > budget {
            return Err(NormalizeError::Diverged);
        }
        let Gci { lhs, rhs } = gci;

        // Left-hand side first: reduce it to a conjunction of names.
        match &lhs {
            Concept::Top => return Err(NormalizeError::TopLhs(Gci { lhs, rhs }.to_string())),
            Concept::Forall(_, _) => {
                return Err(NormalizeError::ForallLhs(Gci { lhs, rhs }.to_string()))
            }
            Concept::Exists(r, inner) => {
                // ex r. C <= D  ~>  C <= all inv(r). D
                let flipped = Gci {
                    lhs: (**inner).clone(),
                    rhs: Concept::forall(r.inverse(), rhs),
                };
                queue.push_back((flipped, src));
                continue;
            }
            Concept::And(parts) => {
                if parts.iter().any(|p| matches!(p, Concept::Forall(_, _))) {
                    return Err(NormalizeError::ForallLhs(Gci { lhs, rhs }.to_string()));
                }
                let mut names = Vec::new();
                let mut defs: Vec<(Gci, Option<usize>)> = Vec::new();
                for p in parts {
                    match p {
                        Concept::Name(_) => names.push(p.clone()),
                        Concept::Top => {} // K and top == K
                        Concept::Exists(_, _) => {
                            // K and (ex r. C) <= D  ~>  ex r. C <= X, K and X <= D
                            let x = fresh.take();
                            defs.push((Gci { lhs: p.clone(), rhs: x.clone() }, src));
                            names.push(x);
                        }
                        Concept::And(_) => unreachable!("canonical conjunctions are flat"),
                        Concept::Forall(_, _) => unreachable!("checked above"),
                    }
                }
                if !defs.is_empty() || names.len() != parts.len() {
                    if names.is_empty() {
                        return Err(NormalizeError::TopLhs(rhs.to_string()));
                    }
                    queue.push_back((Gci { lhs: Concept::and(names), rhs }, src));
                    queue.extend(defs);
                    continue;
                }
            }
            Concept::Name(_) => {}
        }

        // Right-hand side.
        if is_normal_rhs(&rhs) {
            out.push(Gci { lhs, rhs });
            provenance.push(src);
            continue;
        }
        match rhs {
            Concept::Top => {} // trivially true, drop
            Concept::Name(_) => unreachable!("names are normal"),
            Concept::And(parts) => {
                for p in parts {
                    queue.push_back((Gci { lhs: lhs.clone(), rhs: p }, src));
                }
            }
            Concept::Exists(r, inner) => {
                // Keep name conjuncts, split every complex conjunct out
                // behind a fresh name.
                let mut kept = Vec::new();
                for p in inner.conjuncts() {
                    match p {
                        Concept::Name(_) => kept.push(p.clone()),
                        Concept::Top => {}
                        _ => {
                            let x = fresh.take();
                            queue.push_back((Gci { lhs: x.clone(), rhs: p.clone() }, src));
                            kept.push(x);
                        }
                    }
                }
                if kept.is_empty() {
                    // ex r. top: the filler is unconstrained
                    kept.push(fresh.take());
                }
                queue.push_back((Gci { lhs, rhs: Concept::exists(r, Concept::and(kept)) }, src));
            }
            Concept::Forall(r, inner) => match *inner {
                Concept::Top => {} // all r. top is trivial
                inner => {
                    let y = fresh.take();
                    queue.push_back((Gci { lhs: lhs.clone(), rhs: Concept::forall(r, y.clone()) }, src));
                    queue.push_back((Gci { lhs: y, rhs: inner }, src));
                }
            },
        }
    }

    Ok(NormalizedTheory {
        theory: Theory::new(Dialect::Eli, out),
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_theory, Role};

    fn normal_shape(t: &Theory) -> bool {
        t.axioms
            .iter()
            .all(|g| is_name_conjunction(&g.lhs) && is_normal_rhs(&g.rhs))
    }

    #[test]
    fn splits_nested_existential() {
        let t = parse_theory("A <= ex r. (B and ex s. C)").unwrap();
        let n = normalize_eli(&t).unwrap();
        assert!(normal_shape(&n.theory));
        // One axiom keeps the outer existential with a fresh filler, one
        // defines the fresh name.
        assert_eq!(n.theory.axioms.len(), 2);
        assert!(n
            .theory
            .axioms
            .iter()
            .any(|g| matches!(&g.rhs, Concept::Exists(r, m) if !r.inverted && m.conjuncts().len() == 2)));
        assert!(n.provenance.iter().all(|p| *p == Some(0)));
    }

    #[test]
    fn flips_lhs_existential_through_inverse() {
        let t = parse_theory("ex r. A <= B").unwrap();
        let n = normalize_eli(&t).unwrap();
        assert_eq!(n.theory.axioms.len(), 1);
        let g = &n.theory.axioms[0];
        assert_eq!(g.lhs, Concept::name("A"));
        assert_eq!(
            g.rhs,
            Concept::forall(Role::inverse_of("r"), Concept::name("B"))
        );
    }

    #[test]
    fn already_normal_is_unchanged() {
        let t = parse_theory("A and B <= C\nA <= ex r. (B and C)\nA <= all inv(r). B").unwrap();
        let n = normalize_eli(&t).unwrap();
        assert_eq!(n.theory.axioms, t.axioms);
    }

    #[test]
    fn rejects_top_lhs() {
        let t = parse_theory("top <= A").unwrap();
        assert!(matches!(normalize_eli(&t), Err(NormalizeError::TopLhs(_))));
    }

    #[test]
    fn drops_trivial_rhs() {
        let t = parse_theory("A <= top\nB <= C").unwrap();
        let n = normalize_eli(&t).unwrap();
        assert_eq!(n.theory.axioms.len(), 1);
        assert_eq!(n.provenance, vec![Some(1)]);
    }

    #[test]
    fn fresh_names_use_reserved_prefix() {
        let t = parse_theory("A <= ex r. (ex s. B)").unwrap();
        let n = normalize_eli(&t).unwrap();
        let names = n.theory.concept_names();
        assert!(names.iter().any(|n| n.starts_with("_N")));
    }
}
