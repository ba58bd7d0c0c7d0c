//! Recursive quality measures on proofs.
//!
//! A recursive measure is a leaf function plus an edge function that folds
//! the weights of the direct subproofs into a weight for the whole proof;
//! it is monotone when lowering any input weight never raises the output.
//! Depth (leaf 0, edge `1 + max`) and tree size (leaf 1, edge `1 + sum`) are
//! the monotone instances shipped here; log-depth stores the depth and only
//! changes the threshold and display semantics. The plain vertex-count size
//! is not recursive and is exposed as a free function for the brute-force
//! baseline.
//!
//! Weights are exact rationals throughout; nothing rounds.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::hypergraph::{Proof, VertexId};
use crate::logic::Gci;
use crate::weight::{self, Weight};

/// The label of a hyperedge: the premise sentences and the conclusion.
pub struct EdgeLabel<'a> {
    pub premises: Vec<&'a Gci>,
    pub conclusion: &'a Gci,
}

pub type LeafFn = Arc<dyn Fn(&Gci) -> Weight + Send + Sync>;
/// Partial: `None` means the edge function is undefined on this input.
pub type EdgeFn = Arc<dyn Fn(&EdgeLabel, &[Weight]) -> Option<Weight> + Send + Sync>;

/// How a weight is matched against a threshold `q`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ThresholdSemantics {
    /// `weight <= q`.
    Direct,
    /// `weight <= 2^q`; used by log-depth, which stores the plain depth.
    Log2,
}

#[derive(Clone)]
pub struct Measure {
    name: String,
    leaf_fn: LeafFn,
    edge_fn: EdgeFn,
    monotone: bool,
    threshold: ThresholdSemantics,
}

impl fmt::Debug for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Measure({})", self.name)
    }
}

impl Measure {
    pub fn new(
        name: impl Into<String>,
        leaf_fn: LeafFn,
        edge_fn: EdgeFn,
        monotone: bool,
    ) -> Measure {
        Measure {
            name: name.into(),
            leaf_fn,
            edge_fn,
            monotone,
            threshold: ThresholdSemantics::Direct,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn threshold_semantics(&self) -> ThresholdSemantics {
        self.threshold
    }

    pub fn leaf_weight(&self, sentence: &Gci) -> Weight {
        (self.leaf_fn)(sentence)
    }

    /// Applies the edge function to a multiset of weights. The multiset is
    /// passed sorted so the call is insensitive to source order.
    pub fn edge_weight(&self, label: &EdgeLabel, weights: &[Weight]) -> Option<Weight> {
        let mut ws = weights.to_vec();
        ws.sort();
        (self.edge_fn)(label, &ws)
    }

    /// Does a proof of this weight satisfy the bound `q`?
    pub fn within_bound(&self, weight: &Weight, bound: &Weight) -> bool {
        match self.threshold {
            ThresholdSemantics::Direct => weight <= bound,
            ThresholdSemantics::Log2 => weight.leq_pow2(bound),
        }
    }

    /// Human-facing rendering of a weight. Log-depth shows a decimal
    /// approximation of `log2(depth)`, with `log2(0)` displayed as 0.
    pub fn display_weight(&self, weight: &Weight) -> String {
        match self.threshold {
            ThresholdSemantics::Direct => weight.to_string(),
            ThresholdSemantics::Log2 => {
                if weight.is_zero() {
                    "0".to_string()
                } else {
                    format!("{:.6}", weight.to_f64().log2())
                }
            }
        }
    }
}

/// Depth: longest premise chain. Leaf 0; an edge adds 1 to the maximum of
/// its premise weights, so a premise-free edge weighs 1.
pub fn depth_measure() -> Measure {
    Measure::new(
        "depth",
        Arc::new(|_| Weight::zero()),
        Arc::new(|_, ws| Some(weight::max(ws) + &Weight::one())),
        true,
    )
}

/// Tree size: vertex count of the tree unraveling. Leaf 1; edge `1 + sum`.
pub fn tree_size_measure() -> Measure {
    Measure::new(
        "treesize",
        Arc::new(|_| Weight::one()),
        Arc::new(|_, ws| Some(weight::sum(ws) + &Weight::one())),
        true,
    )
}

/// Log-depth: evaluates exactly like depth and stores the depth value; only
/// threshold checks (`depth <= 2^q`) and display apply the logarithm. The
/// argmin over proofs therefore coincides with the depth argmin.
pub fn log_depth_measure() -> Measure {
    let mut m = depth_measure();
    m.name = "logdepth".into();
    m.threshold = ThresholdSemantics::Log2;
    m
}

pub fn measure_by_name(name: &str) -> Option<Measure> {
    match name {
        "depth" => Some(depth_measure()),
        "treesize" => Some(tree_size_measure()),
        "logdepth" => Some(log_depth_measure()),
        _ => None,
    }
}

/// Plain size of a proof: its vertex count. Not a recursive measure; only
/// the brute-force baseline can optimize it.
pub fn size(p: &Proof) -> Weight {
    Weight::from_u64(p.vertex_count() as u64)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("edge function of '{measure}' is undefined on the step deriving '{conclusion}'")]
    EdgeUndefined { measure: String, conclusion: String },
}

/// Bottom-up evaluation over the unique incoming edge of each vertex.
/// A vertex with an incoming edge is folded through the edge function even
/// when that edge has no premises; only an edgeless vertex is a leaf.
pub fn evaluate(m: &Measure, p: &Proof) -> Result<Weight, EvalError> {
    fn weight_of(
        m: &Measure,
        p: &Proof,
        v: VertexId,
        memo: &mut Vec<Option<Weight>>,
    ) -> Result<Weight, EvalError> {
        if let Some(w) = &memo[v.0] {
            return Ok(w.clone());
        }
        let w = match p.incoming_edge(v) {
            None => m.leaf_weight(p.graph().label(v)),
            Some(e) => {
                let mut ws = Vec::with_capacity(e.sources.len());
                for &s in &e.sources {
                    ws.push(weight_of(m, p, s, memo)?);
                }
                let label = EdgeLabel {
                    premises: e.sources.iter().map(|s| p.graph().label(*s)).collect(),
                    conclusion: p.graph().label(v),
                };
                m.edge_weight(&label, &ws).ok_or_else(|| EvalError::EdgeUndefined {
                    measure: m.name.clone(),
                    conclusion: p.graph().label(v).to_string(),
                })?
            }
        };
        memo[v.0] = Some(w.clone());
        Ok(w)
    }
    let mut memo = vec![None; p.vertex_count()];
    weight_of(m, p, p.sink(), &mut memo)
}

/// One monotonicity counterexample: lowering `position` in `multiset` from
/// `original` to `lowered` raised the edge weight.
#[derive(Clone, Debug)]
pub struct MonotoneViolation {
    pub multiset: Vec<Weight>,
    pub position: usize,
    pub lowered_to: Weight,
    pub before: Weight,
    pub after: Weight,
}

/// Samples the monotonicity condition: for each multiset and each element,
/// replacing the element by a smaller value must not raise the edge weight
/// (whenever both applications are defined).
pub fn check_monotone(
    m: &Measure,
    labels: &[(Vec<Gci>, Gci)],
    multisets: &[Vec<Weight>],
) -> Vec<MonotoneViolation> {
    let mut violations = Vec::new();
    for (premises, conclusion) in labels {
        let label = EdgeLabel {
            premises: premises.iter().collect(),
            conclusion,
        };
        for q in multisets {
            let Some(before) = m.edge_weight(&label, q) else {
                continue;
            };
            for i in 0..q.len() {
                let mut lowered: Vec<Weight> = vec![Weight::zero()];
                if let Some(h) = q[i].checked_sub(&Weight::one()) {
                    lowered.push(h);
                }
                lowered.push(
                    Weight::from_rational(q[i].as_rational() / num_bigint::BigInt::from(2))
                        .expect("halving keeps sign"),
                );
                lowered.sort();
                lowered.dedup();
                for q_prime in lowered {
                    if q_prime > q[i] {
                        continue;
                    }
                    let mut repl = q.clone();
                    repl[i] = q_prime.clone();
                    let Some(after) = m.edge_weight(&label, &repl) else {
                        continue;
                    };
                    if after > before {
                        violations.push(MonotoneViolation {
                            multiset: q.clone(),
                            position: i,
                            lowered_to: q_prime,
                            before: before.clone(),
                            after,
                        });
                    }
                }
            }
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{unravel, Hypergraph};
    use crate::logic::parse_gci;
    use crate::testgen::figures;

    /// Independent oracle: direct recursion over the definition, written
    /// without the Measure machinery.
    fn hand_depth(p: &Proof, v: VertexId) -> u64 {
        match p.incoming_edge(v) {
            None => 0,
            Some(e) => 1 + e.sources.iter().map(|s| hand_depth(p, *s)).max().unwrap_or(0),
        }
    }

    fn hand_tree_size(p: &Proof, v: VertexId) -> u64 {
        match p.incoming_edge(v) {
            None => 1,
            Some(e) => 1 + e.sources.iter().map(|s| hand_tree_size(p, *s)).sum::<u64>(),
        }
    }

    #[test]
    fn depth_of_figure_proof() {
        let p = figures::figure_proof();
        let expected = hand_depth(&p, p.sink());
        assert_eq!(expected, 2);
        assert_eq!(
            evaluate(&depth_measure(), &p).unwrap(),
            Weight::from_u64(expected)
        );
    }

    #[test]
    fn tree_size_of_figure_tree() {
        let p = figures::figure_tree_proof();
        let expected = hand_tree_size(&p, p.sink());
        assert_eq!(expected, 5);
        assert_eq!(
            evaluate(&tree_size_measure(), &p).unwrap(),
            Weight::from_u64(expected)
        );
    }

    #[test]
    fn tree_size_counts_reuse_twice() {
        // The shared axiom of the figure graph is counted in both branches.
        let p = figures::figure_proof();
        assert_eq!(p.vertex_count(), 4);
        assert_eq!(
            evaluate(&tree_size_measure(), &p).unwrap(),
            Weight::from_u64(5)
        );
    }

    #[test]
    fn single_leaf_is_the_base_case() {
        let mut g = Hypergraph::new();
        let v = g.add_vertex(parse_gci("A <= B").unwrap());
        let p = Proof::new(g, v).unwrap();
        assert_eq!(evaluate(&depth_measure(), &p).unwrap(), Weight::zero());
        assert_eq!(evaluate(&tree_size_measure(), &p).unwrap(), Weight::one());
    }

    #[test]
    fn premise_free_edge_weighs_one_for_depth() {
        let mut g = Hypergraph::new();
        let v = g.add_vertex(parse_gci("A <= A").unwrap());
        g.add_edge([], v, Some("R_0"));
        let p = Proof::new(g, v).unwrap();
        assert_eq!(evaluate(&depth_measure(), &p).unwrap(), Weight::one());
        assert_eq!(evaluate(&tree_size_measure(), &p).unwrap(), Weight::one());
    }

    #[test]
    fn unraveling_invariance_on_figures() {
        let p = figures::figure_proof();
        for m in [depth_measure(), tree_size_measure()] {
            assert_eq!(
                evaluate(&m, &p).unwrap(),
                evaluate(&m, &unravel(&p)).unwrap(),
                "{} changed under unraveling",
                m.name()
            );
        }
    }

    #[test]
    fn size_is_vertex_count() {
        assert_eq!(size(&figures::figure_proof()), Weight::from_u64(4));
        assert_eq!(size(&figures::figure_tree_proof()), Weight::from_u64(5));
        let mut g = Hypergraph::new();
        let v = g.add_vertex(parse_gci("A <= B").unwrap());
        assert_eq!(size(&Proof::new(g, v).unwrap()), Weight::one());
    }

    #[test]
    fn tree_size_equals_size_of_unraveling() {
        let p = figures::figure_proof();
        assert_eq!(
            evaluate(&tree_size_measure(), &p).unwrap(),
            size(&unravel(&p))
        );
        assert!(size(&p) <= evaluate(&tree_size_measure(), &p).unwrap());
    }

    #[test]
    fn log_depth_thresholds() {
        let m = log_depth_measure();
        // depth 8 within bound 3 (log2 8 = 3), depth 9 not
        assert!(m.within_bound(&Weight::from_u64(8), &Weight::from_u64(3)));
        assert!(!m.within_bound(&Weight::from_u64(9), &Weight::from_u64(3)));
        // a depth-0 proof satisfies every bound
        assert!(m.within_bound(&Weight::zero(), &Weight::zero()));
        assert_eq!(m.display_weight(&Weight::zero()), "0");
        assert_eq!(m.display_weight(&Weight::from_u64(8)), "3.000000");
    }

    #[test]
    fn log_depth_orders_like_depth() {
        // same argmin: the comparator is the numeric order on stored depth
        assert!(Weight::from_u64(2) < Weight::from_u64(4));
    }

    #[test]
    fn monotonicity_of_depth_and_tree_size() {
        let labels = vec![(
            vec![parse_gci("A <= B").unwrap()],
            parse_gci("A <= C").unwrap(),
        )];
        let multisets = vec![
            vec![Weight::from_u64(2), Weight::from_u64(3)],
            vec![Weight::one(), Weight::one()],
            vec![],
        ];
        assert!(check_monotone(&depth_measure(), &labels, &multisets).is_empty());
        assert!(check_monotone(&tree_size_measure(), &labels, &multisets).is_empty());
    }

    #[test]
    fn adversarial_measure_fails_monotonicity() {
        // edge = 1 + max - min is not monotone: {2,2} -> 1 but {0,2} -> 3.
        let adversarial = Measure::new(
            "maxminusmin",
            Arc::new(|_| Weight::zero()),
            Arc::new(|_, ws: &[Weight]| {
                let hi = weight::max(ws);
                let lo = ws.first().cloned().unwrap_or_else(Weight::zero);
                Some(hi.checked_sub(&lo).unwrap_or_else(Weight::zero) + &Weight::one())
            }),
            false,
        );
        let labels = vec![(vec![], parse_gci("A <= B").unwrap())];
        let multisets = vec![vec![Weight::from_u64(2), Weight::from_u64(2)]];
        let violations = check_monotone(&adversarial, &labels, &multisets);
        assert!(!violations.is_empty());
        assert_eq!(violations[0].after, Weight::from_u64(3));
        assert_eq!(violations[0].before, Weight::one());
    }

    #[test]
    fn partial_edge_function_surfaces_as_error() {
        let partial = Measure::new(
            "partial",
            Arc::new(|_| Weight::zero()),
            Arc::new(|_, _| None),
            true,
        );
        let p = figures::figure_proof();
        assert!(matches!(
            evaluate(&partial, &p),
            Err(EvalError::EdgeUndefined { .. })
        ));
    }
}
