//! Nondeterministic Turing machines: each `(state, symbol)` maps to a set
//! of actions, and a run is a tree of configurations.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::tape::{Alphabet, Move, Symbol, Tape};
use crate::turing::{Action, Target, TmScheme};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NdScheme {
    pub states: Vec<String>,
    pub alphabet: Alphabet,
    pub initial: String,
    pub transitions: BTreeMap<(String, Symbol), BTreeSet<Action>>,
    pub finals: BTreeSet<String>,
}

impl NdScheme {
    pub fn new(states: impl IntoIterator<Item = impl Into<String>>, alphabet: Alphabet, initial: &str) -> NdScheme {
        NdScheme {
            states: states.into_iter().map(Into::into).collect(),
            alphabet,
            initial: initial.into(),
            transitions: BTreeMap::new(),
            finals: BTreeSet::new(),
        }
    }

    pub fn with(mut self, state: &str, read: Symbol, action: Action) -> NdScheme {
        self.transitions
            .entry((state.to_string(), read))
            .or_default()
            .insert(action);
        self
    }

    pub fn with_finals(mut self, finals: impl IntoIterator<Item = impl Into<String>>) -> NdScheme {
        self.finals = finals.into_iter().map(Into::into).collect();
        self
    }

    /// The deterministic machine seen as one with singleton choice sets.
    pub fn from_deterministic(scheme: &TmScheme) -> NdScheme {
        NdScheme {
            states: scheme.states.clone(),
            alphabet: scheme.alphabet.clone(),
            initial: scheme.initial.clone(),
            transitions: scheme
                .transitions
                .iter()
                .map(|(k, a)| (k.clone(), BTreeSet::from([a.clone()])))
                .collect(),
            finals: scheme.finals.clone(),
        }
    }

    /// Largest number of choices in any table cell.
    pub fn branching(&self) -> usize {
        self.transitions.values().map(BTreeSet::len).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NdConfig {
    pub tape: Tape,
    pub position: i64,
    /// `None` once a branch has taken a halt transition.
    pub state: Option<String>,
}

impl NdConfig {
    pub fn start(scheme: &NdScheme, tape: Tape, position: i64) -> NdConfig {
        NdConfig {
            tape,
            position,
            state: Some(scheme.initial.clone()),
        }
    }

    fn accepting(&self, scheme: &NdScheme) -> bool {
        self.state.as_ref().is_some_and(|q| scheme.finals.contains(q))
    }
}

fn apply(config: &NdConfig, action: &Action) -> NdConfig {
    let mut tape = config.tape.clone();
    tape.write(config.position, action.write)
        .expect("nondeterministic tapes are unbounded and the action writes a scheme symbol");
    NdConfig {
        tape,
        position: config.position + action.movement.delta(),
        state: match &action.target {
            Target::State(q) => Some(q.clone()),
            Target::Halt => None,
        },
    }
}

/// All one-step successors, without duplicates, in table order.
pub fn nd_successors(scheme: &NdScheme, config: &NdConfig) -> Vec<NdConfig> {
    let Some(state) = &config.state else {
        return Vec::new();
    };
    let read = config.tape.read(config.position);
    let mut out: Vec<NdConfig> = Vec::new();
    if let Some(actions) = scheme.transitions.get(&(state.clone(), read)) {
        for a in actions {
            let next = apply(config, a);
            if !out.contains(&next) {
                out.push(next);
            }
        }
    }
    out
}

/// Distinct configurations reachable in exactly `d` steps, for `d` in
/// `0..=depth`.
pub fn nd_frontiers(scheme: &NdScheme, start: &NdConfig, depth: usize) -> Vec<Vec<NdConfig>> {
    let mut levels = vec![vec![start.clone()]];
    for _ in 0..depth {
        let mut next: Vec<NdConfig> = Vec::new();
        for c in levels.last().expect("non-empty") {
            for s in nd_successors(scheme, c) {
                if !next.contains(&s) {
                    next.push(s);
                }
            }
        }
        levels.push(next);
    }
    levels
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Acceptance {
    pub accepted: bool,
    /// Actions taken along one accepting branch.
    pub witness: Option<Vec<Action>>,
    /// Distinct configurations visited.
    pub explored: usize,
}

/// Breadth-first search for a branch that enters a final state within
/// `depth` steps.
pub fn nd_accepts(scheme: &NdScheme, input: Tape, position: i64, depth: usize) -> Acceptance {
    let start = NdConfig::start(scheme, input, position);
    let mut parent: HashMap<NdConfig, Option<(NdConfig, Action)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((config, d)) = queue.pop_front() {
        if config.accepting(scheme) {
            let mut witness = Vec::new();
            let mut at = config;
            while let Some(Some((prev, action))) = parent.get(&at).cloned() {
                witness.push(action);
                at = prev;
            }
            witness.reverse();
            return Acceptance {
                accepted: true,
                witness: Some(witness),
                explored: parent.len(),
            };
        }
        if d == depth {
            continue;
        }
        let Some(state) = &config.state else { continue };
        let read = config.tape.read(config.position);
        for action in scheme.transitions.get(&(state.clone(), read)).into_iter().flatten() {
            let next = apply(&config, action);
            if !parent.contains_key(&next) {
                parent.insert(next.clone(), Some((config.clone(), action.clone())));
                queue.push_back((next, d + 1));
            }
        }
    }
    Acceptance {
        accepted: false,
        witness: None,
        explored: parent.len(),
    }
}

/// Guesses one bit per input cell and moves on only when the guess matches
/// the cell; accepts on reaching the blank after the input. Exactly one
/// branch survives, whose guesses spell the input.
pub fn guess_machine() -> NdScheme {
    let b = Symbol::BLANK;
    let mut s = NdScheme::new(["guess", "reject", "accept"], Alphabet::binary(), "guess").with_finals(["accept"]);
    for cell in [false, true] {
        for guess in [false, true] {
            let action = if guess == cell {
                Action::to(Symbol::from_bit(guess), Move::Right, "guess")
            } else {
                Action::to(Symbol::from_bit(cell), Move::Stay, "reject")
            };
            s = s.with("guess", Symbol::from_bit(cell), action);
        }
    }
    s.with("guess", b, Action::to(b, Move::Stay, "accept"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tape::Boundedness;
    use crate::turing::fixtures::unary_addition_scheme;
    use crate::turing::scheme_tape;

    fn bits_tape(s: &str) -> Tape {
        Tape::parse(s, Boundedness::Unbounded, Alphabet::binary()).unwrap()
    }

    #[test]
    fn deterministic_embedding_has_single_successors() {
        let det = unary_addition_scheme();
        let nd = NdScheme::from_deterministic(&det);
        let mut c = NdConfig::start(&nd, scheme_tape(&det, "l*l").unwrap(), 0);
        for _ in 0..2 {
            let next = nd_successors(&nd, &c);
            assert_eq!(next.len(), 1);
            c = next.into_iter().next().unwrap();
        }
        assert_eq!(c.state, None);
        assert_eq!(c.tape.literal(), "ll");
        assert!(nd_successors(&nd, &c).is_empty());
    }

    #[test]
    fn two_choices_two_successors() {
        let s = guess_machine();
        let c = NdConfig::start(&s, bits_tape("1"), 0);
        assert_eq!(nd_successors(&s, &c).len(), 2);
    }

    #[test]
    fn frontier_sizes_bounded_by_branching_power() {
        let s = guess_machine();
        let k = s.branching();
        let levels = nd_frontiers(&s, &NdConfig::start(&s, bits_tape("0110"), 0), 6);
        for (d, level) in levels.iter().enumerate() {
            assert!(level.len() <= k.pow(d as u32));
        }
    }

    #[test]
    fn guessing_accepts_with_witness() {
        let s = guess_machine();
        let a = nd_accepts(&s, bits_tape("1011"), 0, 10);
        assert!(a.accepted);
        let guesses: Vec<Symbol> = a.witness.unwrap().iter().map(|x| x.write).collect();
        assert_eq!(guesses, vec![Symbol::ONE, Symbol::ZERO, Symbol::ONE, Symbol::ONE, Symbol::BLANK]);
        assert!(!nd_accepts(&s, bits_tape("1011"), 0, 4).accepted);
    }

    #[test]
    fn no_final_state_never_accepts() {
        let s = guess_machine().with_finals(Vec::<String>::new());
        for depth in 0..8 {
            assert!(!nd_accepts(&s, bits_tape("10"), 0, depth).accepted);
        }
    }
}
