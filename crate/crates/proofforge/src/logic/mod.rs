//! EL and ELI syntax: concepts, inclusion axioms, theories.
//!
//! Concepts are kept in a canonical form: conjunction trees are flattened
//! into a sorted, duplicate-free list, so label equality is syntactic
//! equality and conjunctions behave as sets. The printer emits exactly the
//! grammar the parser accepts, so `parse(print(t)) == t`.

mod entail;
mod normalize;
mod parse;

pub use entail::{entails, EntailError};
pub use normalize::{normalize_eli, NormalizeError, NormalizedTheory};
pub use parse::{parse_gci, parse_theory, parse_theory_with_dialect, ParseError};

use std::collections::BTreeSet;
use std::fmt;

/// A role name, possibly inverted. Inverting twice yields the plain role.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Role {
    pub name: String,
    pub inverted: bool,
}

impl Role {
    pub fn plain(name: impl Into<String>) -> Role {
        Role { name: name.into(), inverted: false }
    }

    pub fn inverse_of(name: impl Into<String>) -> Role {
        Role { name: name.into(), inverted: true }
    }

    pub fn inverse(&self) -> Role {
        Role { name: self.name.clone(), inverted: !self.inverted }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "inv({})", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

/// A concept in canonical form. `And` holds at least two conjuncts, none of
/// which is itself an `And`, sorted and duplicate-free.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Concept {
    Top,
    Name(String),
    And(Vec<Concept>),
    Exists(Role, Box<Concept>),
    Forall(Role, Box<Concept>),
}

impl Concept {
    pub fn name(n: impl Into<String>) -> Concept {
        Concept::Name(n.into())
    }

    pub fn exists(role: Role, inner: Concept) -> Concept {
        Concept::Exists(role, Box::new(inner))
    }

    pub fn forall(role: Role, inner: Concept) -> Concept {
        Concept::Forall(role, Box::new(inner))
    }

    /// Canonical conjunction: flattens nested `And`s, sorts, deduplicates.
    /// A single remaining conjunct collapses to that conjunct; an empty
    /// conjunction is `Top`.
    pub fn and(parts: impl IntoIterator<Item = Concept>) -> Concept {
        let mut set = BTreeSet::new();
        let mut stack: Vec<Concept> = parts.into_iter().collect();
        while let Some(c) = stack.pop() {
            match c {
                Concept::And(inner) => stack.extend(inner),
                other => {
                    set.insert(other);
                }
            }
        }
        let mut list: Vec<Concept> = set.into_iter().collect();
        match list.len() {
            0 => Concept::Top,
            1 => list.pop().unwrap(),
            _ => Concept::And(list),
        }
    }

    /// Re-establishes the canonical form after arbitrary construction.
    pub fn canonical(self) -> Concept {
        match self {
            Concept::Top | Concept::Name(_) => self,
            Concept::And(parts) => {
                Concept::and(parts.into_iter().map(Concept::canonical))
            }
            Concept::Exists(r, inner) => Concept::exists(r, inner.canonical()),
            Concept::Forall(r, inner) => Concept::forall(r, inner.canonical()),
        }
    }

    /// Node count of the concept tree.
    pub fn size(&self) -> usize {
        match self {
            Concept::Top | Concept::Name(_) => 1,
            Concept::And(parts) => 1 + parts.iter().map(Concept::size).sum::<usize>(),
            Concept::Exists(_, inner) | Concept::Forall(_, inner) => 1 + inner.size(),
        }
    }

    /// The conjunct list: the parts of an `And`, or the concept itself.
    pub fn conjuncts(&self) -> Vec<&Concept> {
        match self {
            Concept::And(parts) => parts.iter().collect(),
            other => vec![other],
        }
    }

    pub fn is_conjunction(&self) -> bool {
        matches!(self, Concept::And(_))
    }

    pub fn contains_inverse_or_forall(&self) -> bool {
        match self {
            Concept::Top | Concept::Name(_) => false,
            Concept::And(parts) => parts.iter().any(Concept::contains_inverse_or_forall),
            Concept::Exists(r, inner) => r.inverted || inner.contains_inverse_or_forall(),
            Concept::Forall(_, _) => true,
        }
    }

    /// All syntactic subconcepts, self included.
    pub fn subconcepts(&self, out: &mut BTreeSet<Concept>) {
        out.insert(self.clone());
        match self {
            Concept::Top | Concept::Name(_) => {}
            Concept::And(parts) => {
                for p in parts {
                    p.subconcepts(out);
                }
            }
            Concept::Exists(_, inner) | Concept::Forall(_, inner) => inner.subconcepts(out),
        }
    }

    pub fn concept_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Concept::Top => {}
            Concept::Name(n) => {
                out.insert(n.clone());
            }
            Concept::And(parts) => {
                for p in parts {
                    p.concept_names(out);
                }
            }
            Concept::Exists(_, inner) | Concept::Forall(_, inner) => inner.concept_names(out),
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Top => write!(f, "top"),
            Concept::Name(n) => write!(f, "{n}"),
            Concept::And(parts) => {
                write!(f, "(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " and ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
            Concept::Exists(r, inner) => write!(f, "ex {r}. {inner}"),
            Concept::Forall(r, inner) => write!(f, "all {r}. {inner}"),
        }
    }
}

/// A general concept inclusion `lhs <= rhs`. These are the sentences that
/// label hypergraph vertices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Gci {
    pub lhs: Concept,
    pub rhs: Concept,
}

impl Gci {
    pub fn new(lhs: Concept, rhs: Concept) -> Gci {
        Gci { lhs: lhs.canonical(), rhs: rhs.canonical() }
    }

    pub fn size(&self) -> usize {
        self.lhs.size() + self.rhs.size()
    }
}

impl fmt::Display for Gci {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Dialect {
    El,
    Eli,
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dialect::El => write!(f, "EL"),
            Dialect::Eli => write!(f, "ELI"),
        }
    }
}

/// A finite list of inclusion axioms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Theory {
    pub axioms: Vec<Gci>,
    pub dialect: Dialect,
}

impl Theory {
    pub fn new(dialect: Dialect, axioms: Vec<Gci>) -> Theory {
        Theory { axioms, dialect }
    }

    pub fn empty(dialect: Dialect) -> Theory {
        Theory { axioms: Vec::new(), dialect }
    }

    /// Total symbol count over all axioms.
    pub fn size(&self) -> usize {
        self.axioms.iter().map(Gci::size).sum()
    }

    pub fn contains(&self, gci: &Gci) -> bool {
        self.axioms.contains(gci)
    }

    pub fn concept_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for ax in &self.axioms {
            ax.lhs.concept_names(&mut out);
            ax.rhs.concept_names(&mut out);
        }
        out
    }

    pub fn print(&self) -> String {
        let mut s = String::new();
        for ax in &self.axioms {
            s.push_str(&ax.to_string());
            s.push('\n');
        }
        s
    }
}

/// All syntactic subconcepts of the theory and the goal, closed under
/// subterms, plus `top`.
pub fn subconcepts(theory: &Theory, goal: &Gci) -> BTreeSet<Concept> {
    let mut out = BTreeSet::new();
    out.insert(Concept::Top);
    for ax in &theory.axioms {
        ax.lhs.subconcepts(&mut out);
        ax.rhs.subconcepts(&mut out);
    }
    goal.lhs.subconcepts(&mut out);
    goal.rhs.subconcepts(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Concept {
        Concept::name("A")
    }
    fn b() -> Concept {
        Concept::name("B")
    }

    #[test]
    fn and_flattens_sorts_dedups() {
        let nested = Concept::And(vec![
            Concept::And(vec![b(), a()]),
            a(),
        ]);
        let canon = nested.canonical();
        assert_eq!(canon, Concept::and([a(), b()]));
        assert_eq!(canon.conjuncts().len(), 2);
    }

    #[test]
    fn singleton_and_collapses() {
        assert_eq!(Concept::and([a(), a()]), a());
        assert_eq!(Concept::and([]), Concept::Top);
    }

    #[test]
    fn double_inverse_is_plain() {
        let r = Role::plain("r");
        assert_eq!(r.inverse().inverse(), r);
    }

    #[test]
    fn subconcepts_of_figure_theory() {
        // {A <= B, B <= ex r. A}, goal A <= (B and ex r. A)
        let t = Theory::new(
            Dialect::El,
            vec![
                Gci::new(a(), b()),
                Gci::new(b(), Concept::exists(Role::plain("r"), a())),
            ],
        );
        let goal = Gci::new(a(), Concept::and([b(), Concept::exists(Role::plain("r"), a())]));
        let subs = subconcepts(&t, &goal);
        let expected: BTreeSet<Concept> = [
            Concept::Top,
            a(),
            b(),
            Concept::exists(Role::plain("r"), a()),
            Concept::and([b(), Concept::exists(Role::plain("r"), a())]),
        ]
        .into_iter()
        .collect();
        assert_eq!(subs, expected);
    }

    #[test]
    fn subconcepts_trivial_and_nested() {
        let t = Theory::empty(Dialect::El);
        let goal = Gci::new(a(), a());
        let subs = subconcepts(&t, &goal);
        assert_eq!(subs, [Concept::Top, a()].into_iter().collect());

        let nested = Concept::exists(Role::plain("r"), Concept::and([a(), b()]));
        let goal = Gci::new(a(), nested.clone());
        let subs = subconcepts(&t, &goal);
        assert!(subs.contains(&Concept::and([a(), b()])));
        assert!(subs.contains(&a()));
        assert!(subs.contains(&b()));
    }
}
