//! Space-bounded Turing machines: a small declarative text format, a
//! bounded simulator used as the semantic oracle, and the reduction to
//! tree-size-bounded proof search over an ELI theory.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{append_pad_chain, GenError, ReductionInstance};
use crate::logic::{Concept, Dialect, Gci, Role, Theory};
use crate::weight::Weight;

/// A deterministic machine with an explicit space polynomial: on a word `w`
/// it may touch tape cells `0 ..= p(|w|)`.
#[derive(Clone, Debug)]
pub struct TuringMachine {
    pub states: Vec<String>,
    pub tape_alphabet: Vec<char>,
    pub blank: char,
    pub input_alphabet: Vec<char>,
    /// (state, symbol) -> (state, symbol, move); move is -1, 0, or +1.
    pub delta: HashMap<(usize, char), (usize, char, i8)>,
    pub initial: usize,
    pub accepting: BTreeSet<usize>,
    /// Coefficients of the space polynomial, lowest degree first.
    pub space_poly: Vec<u64>,
}

impl TuringMachine {
    pub fn space_bound(&self, input_len: usize) -> usize {
        let x = input_len as u64;
        let mut pow = 1u64;
        let mut total = 0u64;
        for &c in &self.space_poly {
            total += c * pow;
            pow = pow.saturating_mul(x.max(1)).min(1 << 40);
            if x == 0 {
                pow = 0; // higher powers of 0 vanish
            }
        }
        total as usize
    }

    fn validate(&self) -> Result<(), GenError> {
        let err = |m: String| Err(GenError::MachineSyntax(m));
        if !self.tape_alphabet.contains(&self.blank) {
            return err("blank symbol must be in the tape alphabet".into());
        }
        if self.input_alphabet.contains(&self.blank) {
            return err("blank symbol must not be in the input alphabet".into());
        }
        for a in &self.input_alphabet {
            if !self.tape_alphabet.contains(a) {
                return err(format!("input symbol '{a}' missing from the tape alphabet"));
            }
        }
        for ((q, a), (q2, b, d)) in &self.delta {
            if *q >= self.states.len() || *q2 >= self.states.len() {
                return err("transition references an unknown state".into());
            }
            if !self.tape_alphabet.contains(a) || !self.tape_alphabet.contains(b) {
                return err("transition references an unknown symbol".into());
            }
            if ![-1, 0, 1].contains(d) {
                return err("move must be L, S, or R".into());
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RunOutcome {
    Accept,
    Reject,
    /// The head left the allotted tape cells: the machine does not respect
    /// its declared space bound.
    SpaceExceeded,
}

/// Simulates the machine on `w` within cells `0 ..= k` for `k = p(|w|)`,
/// stopping after the configuration-count bound (a deterministic machine
/// running longer is looping, which counts as rejection).
pub fn tm_run(m: &TuringMachine, w: &str) -> Result<RunOutcome, GenError> {
    m.validate()?;
    let word: Vec<char> = w.chars().collect();
    for &c in &word {
        if !m.input_alphabet.contains(&c) {
            return Err(GenError::WordNotInAlphabet(c));
        }
    }
    let k = m.space_bound(word.len());
    let cells = k + 1;
    if word.len() > cells {
        return Err(GenError::WordTooLong { len: word.len(), cells });
    }
    let mut tape: Vec<char> = (0..cells)
        .map(|i| word.get(i).copied().unwrap_or(m.blank))
        .collect();
    let mut state = m.initial;
    let mut head: i64 = 0;
    let gamma = m.tape_alphabet.len() as u128;
    let max_steps = (m.states.len() as u128)
        * gamma.saturating_pow(cells as u32)
        * (cells as u128);

    let mut steps = 0u128;
    loop {
        if m.accepting.contains(&state) {
            return Ok(RunOutcome::Accept);
        }
        let Some(&(q2, b, d)) = m.delta.get(&(state, tape[head as usize])) else {
            return Ok(RunOutcome::Reject); // halt without acceptance
        };
        tape[head as usize] = b;
        state = q2;
        head += d as i64;
        if head < 0 || head >= cells as i64 {
            return Ok(RunOutcome::SpaceExceeded);
        }
        steps += 1;
        if steps > max_steps {
            return Ok(RunOutcome::Reject); // deterministic machine is looping
        }
    }
}

/// Parses the declarative machine format:
///
/// ```text
/// states: q0 q1 q2
/// input_alphabet: a b
/// tape_alphabet: a b _
/// blank: _
/// initial: q0
/// accepting: q2
/// space: 1 1        # p(x) = 1 + 1*x, lowest degree first
/// delta: q0 a -> q1 b R
/// delta: q1 b -> q2 b S
/// ```
pub fn parse_tm(src: &str) -> Result<TuringMachine, GenError> {
    let err = |m: String| GenError::MachineSyntax(m);
    let mut states: Vec<String> = Vec::new();
    let mut tape_alphabet = Vec::new();
    let mut input_alphabet = Vec::new();
    let mut blank = None;
    let mut initial = None;
    let mut accepting = Vec::new();
    let mut space_poly = Vec::new();
    let mut delta_lines = Vec::new();

    for line in src.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| err(format!("expected 'key: value', got {line:?}")))?;
        let rest = rest.trim();
        match key.trim() {
            "states" => states = rest.split_whitespace().map(str::to_string).collect(),
            "tape_alphabet" => {
                tape_alphabet = rest
                    .split_whitespace()
                    .map(|s| {
                        let mut it = s.chars();
                        match (it.next(), it.next()) {
                            (Some(c), None) => Ok(c),
                            _ => Err(err(format!("tape symbols are single characters: {s:?}"))),
                        }
                    })
                    .collect::<Result<_, _>>()?
            }
            "input_alphabet" => {
                input_alphabet = rest
                    .split_whitespace()
                    .map(|s| {
                        let mut it = s.chars();
                        match (it.next(), it.next()) {
                            (Some(c), None) => Ok(c),
                            _ => Err(err(format!("input symbols are single characters: {s:?}"))),
                        }
                    })
                    .collect::<Result<_, _>>()?
            }
            "blank" => {
                blank = rest.chars().next();
                if rest.chars().count() != 1 {
                    return Err(err("blank must be a single character".into()));
                }
            }
            "initial" => initial = Some(rest.to_string()),
            "accepting" => accepting = rest.split_whitespace().map(str::to_string).collect(),
            "space" => {
                space_poly = rest
                    .split_whitespace()
                    .map(|s| s.parse::<u64>().map_err(|_| err(format!("bad coefficient {s:?}"))))
                    .collect::<Result<_, _>>()?
            }
            "delta" => delta_lines.push(rest.to_string()),
            other => return Err(err(format!("unknown key {other:?}"))),
        }
    }

    let state_idx = |name: &str| -> Result<usize, GenError> {
        states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| err(format!("unknown state {name:?}")))
    };
    let initial = state_idx(&initial.ok_or_else(|| err("missing 'initial:'".into()))?)?;
    let accepting: BTreeSet<usize> = accepting
        .iter()
        .map(|s| state_idx(s))
        .collect::<Result<_, _>>()?;
    let blank = blank.ok_or_else(|| err("missing 'blank:'".into()))?;

    let mut delta = HashMap::new();
    for line in delta_lines {
        // q0 a -> q1 b R
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| err(format!("transition needs '->': {line:?}")))?;
        let l: Vec<&str> = lhs.split_whitespace().collect();
        let r: Vec<&str> = rhs.split_whitespace().collect();
        let ([q, a], [q2, b, mv]) = (l.as_slice(), r.as_slice()) else {
            return Err(err(format!("transition shape is 'q a -> q b M': {line:?}")));
        };
        let sym = |s: &str| -> Result<char, GenError> {
            let mut it = s.chars();
            match (it.next(), it.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(err(format!("symbols are single characters: {s:?}"))),
            }
        };
        let mv = match *mv {
            "L" => -1,
            "S" => 0,
            "R" => 1,
            other => return Err(err(format!("move must be L, S, or R, found {other:?}"))),
        };
        let key = (state_idx(q)?, sym(a)?);
        if delta.insert(key, (state_idx(q2)?, sym(b)?, mv)).is_some() {
            return Err(err(format!("duplicate transition for {line:?}")));
        }
    }

    let m = TuringMachine {
        states,
        tape_alphabet,
        blank,
        input_alphabet,
        delta,
        initial,
        accepting,
        space_poly,
    };
    m.validate()?;
    Ok(m)
}

/// The tree-size threshold: at most `|Q| * |Γ|^k` configurations, and each
/// configuration step costs a subproof of tree size `11k + 17`, giving the
/// bound `(|Q| * |Γ|^k + 1) * (11k + 22)` on an accepting run's proof.
pub fn tm_tree_size_threshold(states: usize, alphabet: usize, k: usize) -> u64 {
    let configs = (states as u64) * (alphabet as u64).pow(k as u32);
    (configs + 1) * (11 * k as u64 + 22)
}

fn sym_index(m: &TuringMachine, c: char) -> usize {
    m.tape_alphabet.iter().position(|&a| a == c).expect("validated symbol")
}

/// Encodes the machine's run on `w` as an ELI theory over configuration
/// conjunctions: `Start` pins the initial configuration, transition axioms
/// step to the successor configuration through the role while value
/// restrictions carry the untouched tape, accepting states raise `Accept`,
/// and `Accept` travels back along the inverse role. A proof of
/// `Start <= Accept` of tree size within the threshold exists exactly when
/// the machine accepts; the pad chain keeps the entailment unconditional.
pub fn tm_to_eli(m: &TuringMachine, w: &str) -> Result<ReductionInstance, GenError> {
    m.validate()?;
    let word: Vec<char> = w.chars().collect();
    for &c in &word {
        if !m.input_alphabet.contains(&c) {
            return Err(GenError::WordNotInAlphabet(c));
        }
    }
    let k = m.space_bound(word.len());
    if word.len() > k + 1 {
        return Err(GenError::WordTooLong { len: word.len(), cells: k + 1 });
    }
    let r = Role::plain("r");
    let start = || Concept::name("Start");
    let accept = || Concept::name("Accept");
    let state = |q: usize| Concept::Name(format!("St{q}"));
    let tape = |i: usize, s: usize| Concept::Name(format!("T{i}s{s}"));
    let head_at = |i: usize| Concept::Name(format!("Hp{i}"));
    let head_not = |i: usize| Concept::Name(format!("Hn{i}"));

    let mut axioms = Vec::new();
    // initial configuration
    axioms.push(Gci::new(start(), state(m.initial)));
    for i in 0..=k {
        let c = word.get(i).copied().unwrap_or(m.blank);
        axioms.push(Gci::new(start(), tape(i, sym_index(m, c))));
    }
    axioms.push(Gci::new(start(), head_at(0)));
    for i in 1..=k {
        axioms.push(Gci::new(start(), head_not(i)));
    }
    // transitions, one family per head position and delta entry
    for i in 0..=k {
        for (&(q, a), &(q2, b, d)) in &m.delta {
            let to = i as i64 + d as i64;
            if to < 0 || to > k as i64 {
                continue; // stepping off the tape: no successor configuration
            }
            let to = to as usize;
            let lhs = Concept::and([state(q), tape(i, sym_index(m, a)), head_at(i)]);
            axioms.push(Gci::new(lhs.clone(), Concept::exists(r.clone(), state(q2))));
            axioms.push(Gci::new(
                lhs.clone(),
                Concept::forall(r.clone(), tape(i, sym_index(m, b))),
            ));
            axioms.push(Gci::new(lhs.clone(), Concept::forall(r.clone(), head_at(to))));
            for j in (0..=k).filter(|&j| j != to) {
                axioms.push(Gci::new(lhs.clone(), Concept::forall(r.clone(), head_not(j))));
            }
        }
    }
    // unscanned tape cells persist
    for i in 0..=k {
        for s in 0..m.tape_alphabet.len() {
            axioms.push(Gci::new(
                Concept::and([tape(i, s), head_not(i)]),
                Concept::forall(r.clone(), tape(i, s)),
            ));
        }
    }
    // acceptance and its back-propagation
    for &f in &m.accepting {
        axioms.push(Gci::new(state(f), accept()));
    }
    axioms.push(Gci::new(accept(), Concept::forall(r.inverse(), accept())));

    let q = tm_tree_size_threshold(m.states.len(), m.tape_alphabet.len(), k);
    let mut theory = Theory::new(Dialect::Eli, axioms);
    append_pad_chain(&mut theory, "Start", "Accept", q as usize + 2)?;

    let mut meta = BTreeMap::new();
    meta.insert("construction".into(), "tm_to_eli".into());
    meta.insert("word".into(), w.to_string());
    meta.insert("cells".into(), (k + 1).to_string());
    meta.insert("states".into(), m.states.len().to_string());
    Ok(ReductionInstance {
        theory,
        goal: Gci::new(start(), accept()),
        threshold: Weight::from_u64(q),
        measure_name: "treesize".into(),
        meta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn accept_immediately() -> TuringMachine {
        parse_tm(
            "states: q0 q1\n\
             input_alphabet: a\n\
             tape_alphabet: a _\n\
             blank: _\n\
             initial: q0\n\
             accepting: q1\n\
             space: 1\n\
             delta: q0 _ -> q1 _ S\n\
             delta: q0 a -> q1 a S\n",
        )
        .unwrap()
    }

    #[test]
    fn trivial_accept_and_reject() {
        let m = accept_immediately();
        assert_eq!(tm_run(&m, "").unwrap(), RunOutcome::Accept);

        let mut rejecting = m.clone();
        rejecting.accepting = [].into(); // empty delta target is never accepting
        assert_eq!(tm_run(&rejecting, "").unwrap(), RunOutcome::Reject);
    }

    #[test]
    fn right_mover_walks_off_the_tape() {
        let m = parse_tm(
            "states: q0\n\
             input_alphabet: a b\n\
             tape_alphabet: a b _\n\
             blank: _\n\
             initial: q0\n\
             accepting:\n\
             space: 2\n\
             delta: q0 a -> q0 a R\n\
             delta: q0 b -> q0 b R\n\
             delta: q0 _ -> q0 _ R\n",
        )
        .unwrap();
        assert_eq!(tm_run(&m, "ab").unwrap(), RunOutcome::SpaceExceeded);
    }

    #[test]
    fn looping_machine_rejects_by_step_bound() {
        let m = parse_tm(
            "states: q0\n\
             input_alphabet: a\n\
             tape_alphabet: a _\n\
             blank: _\n\
             initial: q0\n\
             accepting:\n\
             space: 1\n\
             delta: q0 _ -> q0 _ S\n\
             delta: q0 a -> q0 a S\n",
        )
        .unwrap();
        assert_eq!(tm_run(&m, "a").unwrap(), RunOutcome::Reject);
    }

    #[test]
    fn threshold_formula_reference_value() {
        // two states, binary alphabet, one tape bound: (2*2 + 1)*(11 + 22)
        assert_eq!(tm_tree_size_threshold(2, 2, 1), 165);
    }

    #[test]
    fn word_validation() {
        let m = accept_immediately();
        assert!(matches!(tm_run(&m, "x"), Err(GenError::WordNotInAlphabet('x'))));
        assert!(matches!(
            tm_run(&m, "aaaaaaaa"),
            Err(GenError::WordTooLong { .. })
        ));
    }

    #[test]
    fn instance_entails_goal_even_when_rejecting() {
        let mut m = accept_immediately();
        m.accepting = [].into();
        let inst = tm_to_eli(&m, "").unwrap();
        assert!(crate::logic::entails(&inst.theory, &inst.goal).unwrap());
    }
}
