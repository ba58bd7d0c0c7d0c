//! Quantified Boolean formulas: parsing, exhaustive evaluation, and the
//! reduction to depth-bounded proof search over an ELI theory.
//!
//! Input syntax: `E x1 A x2 : (x1 | !x2) & x2` — a quantifier prefix, a
//! colon, and a matrix in negation normal form (`!` only in front of a
//! variable; `&` binds tighter than `|`).

use std::collections::BTreeMap;
use std::fmt;

use super::{append_pad_chain, GenError, ReductionInstance};
use crate::derivers::{eli_materialize, Budgets};
use crate::logic::{Concept, Dialect, Gci, Role, Theory};
use crate::measures::depth_measure;
use crate::optimizer::{dijkstra_optimal, SearchOptions};
use crate::weight::Weight;

pub const QBF_EVAL_VAR_CAP: usize = 20;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Quantifier {
    Exists,
    Forall,
}

/// Matrix in negation normal form; variables are indices into the prefix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Nnf {
    And(Box<Nnf>, Box<Nnf>),
    Or(Box<Nnf>, Box<Nnf>),
    Lit { var: usize, negated: bool },
}

impl Nnf {
    pub fn node_count(&self) -> usize {
        match self {
            Nnf::And(a, b) | Nnf::Or(a, b) => 1 + a.node_count() + b.node_count(),
            Nnf::Lit { .. } => 1,
        }
    }

    fn eval(&self, assignment: u64) -> bool {
        match self {
            Nnf::And(a, b) => a.eval(assignment) && b.eval(assignment),
            Nnf::Or(a, b) => a.eval(assignment) || b.eval(assignment),
            Nnf::Lit { var, negated } => {
                let v = assignment & (1 << var) != 0;
                v != *negated
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Qbf {
    pub prefix: Vec<(Quantifier, String)>,
    pub matrix: Nnf,
}

impl fmt::Display for Qbf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, x) in &self.prefix {
            let q = match q {
                Quantifier::Exists => "E",
                Quantifier::Forall => "A",
            };
            write!(f, "{q} {x} ")?;
        }
        write!(f, ": ")?;
        fn matrix(n: &Nnf, names: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match n {
                Nnf::And(a, b) => {
                    write!(f, "(")?;
                    matrix(a, names, f)?;
                    write!(f, " & ")?;
                    matrix(b, names, f)?;
                    write!(f, ")")
                }
                Nnf::Or(a, b) => {
                    write!(f, "(")?;
                    matrix(a, names, f)?;
                    write!(f, " | ")?;
                    matrix(b, names, f)?;
                    write!(f, ")")
                }
                Nnf::Lit { var, negated } => {
                    if *negated {
                        write!(f, "!")?;
                    }
                    write!(f, "{}", names[*var])
                }
            }
        }
        let names: Vec<String> = self.prefix.iter().map(|(_, x)| x.clone()).collect();
        matrix(&self.matrix, &names, f)
    }
}

pub fn parse_qbf(src: &str) -> Result<Qbf, GenError> {
    let err = |m: &str| GenError::QbfSyntax(m.to_string());
    let (prefix_src, matrix_src) = src
        .split_once(':')
        .ok_or_else(|| err("expected ':' between prefix and matrix"))?;

    let mut prefix = Vec::new();
    let mut toks = prefix_src.split_whitespace();
    while let Some(t) = toks.next() {
        let quant = match t {
            "E" => Quantifier::Exists,
            "A" => Quantifier::Forall,
            other => return Err(err(&format!("expected quantifier E or A, found {other:?}"))),
        };
        let var = toks.next().ok_or_else(|| err("quantifier without a variable"))?;
        prefix.push((quant, var.to_string()));
    }
    if prefix.is_empty() {
        return Err(err("empty quantifier prefix"));
    }
    let var_index: BTreeMap<&str, usize> = prefix
        .iter()
        .enumerate()
        .map(|(i, (_, x))| (x.as_str(), i))
        .collect();
    if var_index.len() != prefix.len() {
        return Err(err("duplicate variable in prefix"));
    }

    // matrix: or := and ('|' and)*, and := atom ('&' atom)*
    struct P<'a> {
        toks: Vec<&'a str>,
        idx: usize,
    }
    fn tokenize(s: &str) -> Vec<&str> {
        let mut out = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let c = rest.chars().next().unwrap();
            match c {
                '(' | ')' | '|' | '&' | '!' => {
                    out.push(&rest[..1]);
                    rest = rest[1..].trim_start();
                }
                _ => {
                    let end = rest
                        .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                        .unwrap_or(rest.len());
                    if end == 0 {
                        out.push(&rest[..1]); // will be rejected below
                        rest = rest[1..].trim_start();
                    } else {
                        out.push(&rest[..end]);
                        rest = rest[end..].trim_start();
                    }
                }
            }
        }
        out
    }
    impl<'a> P<'a> {
        fn peek(&self) -> Option<&'a str> {
            self.toks.get(self.idx).copied()
        }
        fn bump(&mut self) -> Option<&'a str> {
            let t = self.peek();
            self.idx += 1;
            t
        }
    }
    fn atom(p: &mut P, vars: &BTreeMap<&str, usize>) -> Result<Nnf, GenError> {
        let err = |m: String| GenError::QbfSyntax(m);
        match p.bump() {
            Some("(") => {
                let inner = or(p, vars)?;
                if p.bump() != Some(")") {
                    return Err(err("expected ')'".into()));
                }
                Ok(inner)
            }
            Some("!") => match p.bump() {
                Some(v) if vars.contains_key(v) => Ok(Nnf::Lit { var: vars[v], negated: true }),
                Some(other) => Err(err(format!(
                    "negation must sit directly on a variable, found {other:?}"
                ))),
                None => Err(err("dangling '!'".into())),
            },
            Some(v) if vars.contains_key(v) => Ok(Nnf::Lit { var: vars[v], negated: false }),
            Some(other) => Err(GenError::OpenFormula(other.to_string())),
            None => Err(err("unexpected end of matrix".into())),
        }
    }
    fn and(p: &mut P, vars: &BTreeMap<&str, usize>) -> Result<Nnf, GenError> {
        let mut node = atom(p, vars)?;
        while p.peek() == Some("&") {
            p.bump();
            node = Nnf::And(Box::new(node), Box::new(atom(p, vars)?));
        }
        Ok(node)
    }
    fn or(p: &mut P, vars: &BTreeMap<&str, usize>) -> Result<Nnf, GenError> {
        let mut node = and(p, vars)?;
        while p.peek() == Some("|") {
            p.bump();
            node = Nnf::Or(Box::new(node), Box::new(and(p, vars)?));
        }
        Ok(node)
    }

    let mut p = P { toks: tokenize(matrix_src), idx: 0 };
    let matrix = or(&mut p, &var_index)?;
    if p.peek().is_some() {
        return Err(err("trailing input after matrix"));
    }
    Ok(Qbf { prefix, matrix })
}

/// Exhaustive evaluation over all assignments; the independent oracle for
/// the reduction tests.
pub fn qbf_eval(f: &Qbf) -> Result<bool, GenError> {
    let m = f.prefix.len();
    if m > QBF_EVAL_VAR_CAP {
        return Err(GenError::TooManyVariables(m, QBF_EVAL_VAR_CAP));
    }
    fn go(f: &Qbf, level: usize, assignment: u64) -> bool {
        if level == f.prefix.len() {
            return f.matrix.eval(assignment);
        }
        let set = assignment | (1 << level);
        match f.prefix[level].0 {
            Quantifier::Exists => go(f, level + 1, set) || go(f, level + 1, assignment),
            Quantifier::Forall => go(f, level + 1, set) && go(f, level + 1, assignment),
        }
    }
    Ok(go(f, 0, 0))
}

/// Concept names for the encoding: valuation markers per literal, one
/// marker per subformula (literal subformulas reuse the valuation names),
/// level counters, and the goal pair.
struct Names;

impl Names {
    fn level(i: usize) -> Concept {
        Concept::Name(format!("Lvl{i}"))
    }
    fn lit(var: usize, negated: bool) -> Concept {
        if negated {
            Concept::Name(format!("Vn{var}"))
        } else {
            Concept::Name(format!("Vp{var}"))
        }
    }
}

/// Encodes the QBF as an ELI theory: level axioms branch over the two
/// valuations of each variable, valuation markers propagate down the role
/// chain, the matrix evaluates through subformula markers, and the result
/// travels back up, through both branches under a universal quantifier. The
/// threshold is the minimal proof depth of the instance itself when the
/// formula is valid (found with the greedy search on the unpadded
/// saturation), or a small structural bound otherwise; the pad chain is
/// sized from the threshold either way.
pub fn qbf_to_eli(f: &Qbf) -> Result<ReductionInstance, GenError> {
    let m = f.prefix.len();
    let r1 = Role::plain("r1");
    let r2 = Role::plain("r2");
    let a = || Concept::name("A");
    let b = || Concept::name("B");

    let mut axioms: Vec<Gci> = Vec::new();
    // level 0 initialization
    axioms.push(Gci::new(a(), Names::level(0)));
    // valuation branching, one existential per truth value of x_i
    for i in 0..m {
        axioms.push(Gci::new(
            Names::level(i),
            Concept::exists(r1.clone(), Concept::and([Names::level(i + 1), Names::lit(i, false)])),
        ));
        axioms.push(Gci::new(
            Names::level(i),
            Concept::exists(r2.clone(), Concept::and([Names::level(i + 1), Names::lit(i, true)])),
        ));
    }
    // valuations persist along both roles
    for var in 0..m {
        for negated in [false, true] {
            for role in [&r1, &r2] {
                axioms.push(Gci::new(
                    Names::lit(var, negated),
                    Concept::forall(role.clone(), Names::lit(var, negated)),
                ));
            }
        }
    }
    // matrix evaluation over subformula markers
    let mut counter = 0usize;
    fn encode(n: &Nnf, counter: &mut usize, axioms: &mut Vec<Gci>) -> Concept {
        match n {
            Nnf::Lit { var, negated } => Names::lit(*var, *negated),
            Nnf::And(x, y) => {
                let cx = encode(x, counter, axioms);
                let cy = encode(y, counter, axioms);
                let me = Concept::Name(format!("Sub{}", *counter));
                *counter += 1;
                axioms.push(Gci::new(Concept::and([cx, cy]), me.clone()));
                me
            }
            Nnf::Or(x, y) => {
                let cx = encode(x, counter, axioms);
                let cy = encode(y, counter, axioms);
                let me = Concept::Name(format!("Sub{}", *counter));
                *counter += 1;
                axioms.push(Gci::new(cx, me.clone()));
                axioms.push(Gci::new(cy, me.clone()));
                me
            }
        }
    }
    let matrix_marker = encode(&f.matrix, &mut counter, &mut axioms);
    axioms.push(Gci::new(matrix_marker, b()));
    // back-propagation of the result, per quantifier
    for i in 1..=m {
        match f.prefix[i - 1].0 {
            Quantifier::Exists => {
                for role in [&r1, &r2] {
                    axioms.push(Gci::new(
                        Concept::and([Names::level(i), b()]),
                        Concept::forall(role.inverse(), b()),
                    ));
                }
            }
            Quantifier::Forall => {
                axioms.push(Gci::new(
                    Concept::and([Names::level(i), b()]),
                    Concept::forall(r1.inverse(), Concept::name("B1")),
                ));
                axioms.push(Gci::new(
                    Concept::and([Names::level(i), b()]),
                    Concept::forall(r2.inverse(), Concept::name("B2")),
                ));
            }
        }
    }
    if f.prefix.iter().any(|(q, _)| *q == Quantifier::Forall) {
        axioms.push(Gci::new(
            Concept::and([Concept::name("B1"), Concept::name("B2")]),
            b(),
        ));
    }

    let unpadded = Theory::new(Dialect::Eli, axioms);
    let goal = Gci::new(a(), b());

    // Calibrate the threshold: the exact minimal depth when valid (the
    // instance is its own canonical valid representative), or a small
    // structural bound when not (any value below the pad depth works).
    let ds = eli_materialize(&unpadded, &goal, &Budgets::default())?;
    let q: u64 = if ds.goal_vertex().is_some() {
        use num_traits::ToPrimitive;
        let r = dijkstra_optimal(&ds, &depth_measure(), &SearchOptions::default())?;
        r.weight.floor_uint().to_u64().expect("depth fits u64")
    } else {
        (4 * m + 2 * f.matrix.node_count() + 12) as u64
    };

    let mut padded = unpadded;
    append_pad_chain(&mut padded, "A", "B", q as usize + 2)?;
    let mut meta = BTreeMap::new();
    meta.insert("construction".into(), "qbf_to_eli".into());
    meta.insert("variables".into(), m.to_string());
    meta.insert("matrix_nodes".into(), f.matrix.node_count().to_string());
    meta.insert("formula".into(), f.to_string());
    Ok(ReductionInstance {
        theory: padded,
        goal,
        threshold: Weight::from_u64(q),
        measure_name: "depth".into(),
        meta,
    })
}
