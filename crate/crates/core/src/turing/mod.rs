//! Particular Turing machines: a scheme ⟨Q, Σ, q0, t, F⟩ over one tape.
//!
//! Transitions either name a next state or the distinguished halt target
//! `!`. The set of final states `F` is kept for decision problems; reaching
//! a final state does not by itself stop a run.

mod file;
pub mod fixtures;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::tape::{Alphabet, Boundedness, Discipline, Head, HeadAction, Move, Symbol, Tape, TapeError};

pub use file::{parse_scheme, render_scheme, ParseError};

/// Where a transition leads.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Target {
    State(String),
    Halt,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::State(q) => f.write_str(q),
            Target::Halt => f.write_str("!"),
        }
    }
}

/// Right-hand side of one transition: write, move, then go to `target`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action {
    pub write: Symbol,
    pub movement: Move,
    pub target: Target,
}

impl Action {
    pub fn new(write: Symbol, movement: Move, target: Target) -> Action {
        Action {
            write,
            movement,
            target,
        }
    }

    pub fn to(write: Symbol, movement: Move, state: &str) -> Action {
        Action::new(write, movement, Target::State(state.to_string()))
    }

    pub fn halt(write: Symbol) -> Action {
        Action::new(write, Move::Stay, Target::Halt)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TmScheme {
    /// Declared states, in declaration order.
    pub states: Vec<String>,
    pub alphabet: Alphabet,
    pub initial: String,
    pub transitions: BTreeMap<(String, Symbol), Action>,
    pub finals: BTreeSet<String>,
}

/// One broken well-formedness rule of a scheme.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoStates,
    DuplicateState(String),
    InitialStateUnknown(String),
    FinalStateUnknown(String),
    StateIsSymbol(String),
    SourceStateUnknown(String),
    ReadSymbolUnknown(Symbol),
    WrittenSymbolUnknown(Symbol),
    TargetStateUnknown(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoStates => write!(f, "Q is empty"),
            Violation::DuplicateState(q) => write!(f, "state {q} declared twice"),
            Violation::InitialStateUnknown(q) => write!(f, "initial state unknown: {q}"),
            Violation::FinalStateUnknown(q) => write!(f, "final state unknown: {q}"),
            Violation::StateIsSymbol(q) => write!(f, "Q ∩ Σ ≠ ∅: {q} is both a state and a symbol"),
            Violation::SourceStateUnknown(q) => write!(f, "transition from unknown state {q}"),
            Violation::ReadSymbolUnknown(s) => write!(f, "transition reads unknown symbol {s}"),
            Violation::WrittenSymbolUnknown(s) => write!(f, "transition writes unknown symbol {s}"),
            Violation::TargetStateUnknown(q) => write!(f, "transition to unknown state {q}"),
        }
    }
}

impl TmScheme {
    pub fn new(
        states: impl IntoIterator<Item = impl Into<String>>,
        alphabet: Alphabet,
        initial: impl Into<String>,
    ) -> TmScheme {
        TmScheme {
            states: states.into_iter().map(Into::into).collect(),
            alphabet,
            initial: initial.into(),
            transitions: BTreeMap::new(),
            finals: BTreeSet::new(),
        }
    }

    pub fn with(mut self, state: &str, read: Symbol, action: Action) -> TmScheme {
        self.transitions.insert((state.to_string(), read), action);
        self
    }

    pub fn with_finals(mut self, finals: impl IntoIterator<Item = impl Into<String>>) -> TmScheme {
        self.finals = finals.into_iter().map(Into::into).collect();
        self
    }

    pub fn has_state(&self, q: &str) -> bool {
        self.states.iter().any(|s| s == q)
    }

    pub fn transition(&self, state: &str, read: Symbol) -> Option<&Action> {
        self.transitions.get(&(state.to_string(), read))
    }

    /// Every violated invariant; empty iff the scheme is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.states.is_empty() {
            out.push(Violation::NoStates);
        }
        let mut seen = BTreeSet::new();
        for q in &self.states {
            if !seen.insert(q) {
                out.push(Violation::DuplicateState(q.clone()));
            }
            let mut chars = q.chars();
            if let (Some(c), None) = (chars.next(), chars.next()) {
                if self.alphabet.contains(Symbol(c)) || (c == '_' && self.alphabet.contains(Symbol::BLANK)) {
                    out.push(Violation::StateIsSymbol(q.clone()));
                }
            }
        }
        if !self.has_state(&self.initial) {
            out.push(Violation::InitialStateUnknown(self.initial.clone()));
        }
        for q in &self.finals {
            if !self.has_state(q) {
                out.push(Violation::FinalStateUnknown(q.clone()));
            }
        }
        for ((q, read), action) in &self.transitions {
            if !self.has_state(q) {
                out.push(Violation::SourceStateUnknown(q.clone()));
            }
            if !self.alphabet.contains(*read) {
                out.push(Violation::ReadSymbolUnknown(*read));
            }
            if !self.alphabet.contains(action.write) {
                out.push(Violation::WrittenSymbolUnknown(action.write));
            }
            if let Target::State(next) = &action.target {
                if !self.has_state(next) {
                    out.push(Violation::TargetStateUnknown(next.clone()));
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// States in canonical order: the initial state, then the others in
    /// shortlex order of their names.
    pub fn canonical_states(&self) -> Vec<String> {
        let mut rest: Vec<&String> = self.states.iter().filter(|q| **q != self.initial).collect();
        rest.sort_by(|a, b| (a.len(), a.as_str()).cmp(&(b.len(), b.as_str())));
        rest.dedup();
        std::iter::once(self.initial.clone())
            .chain(rest.into_iter().cloned())
            .collect()
    }
}

/// A machine configuration between two steps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TmConfig {
    pub tape: Tape,
    pub head: Head,
    pub state: String,
    pub steps: u64,
}

impl TmConfig {
    pub fn new(tape: Tape, position: i64, state: impl Into<String>) -> Result<TmConfig, TapeError> {
        let head = Head::on(&tape, position, Discipline::ReadWriteBidirectional, true)?;
        Ok(TmConfig {
            tape,
            head,
            state: state.into(),
            steps: 0,
        })
    }

    pub fn initial(scheme: &TmScheme, tape: Tape, position: i64) -> Result<TmConfig, TapeError> {
        TmConfig::new(tape, position, scheme.initial.clone())
    }
}

/// One executed transition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub state: String,
    pub position: i64,
    pub read: Symbol,
    pub written: Symbol,
    pub movement: Move,
    pub next: Target,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Next(TraceEntry),
    Halted(TraceEntry),
    /// No transition is defined for `(state, read)`.
    Stuck { state: String, read: Symbol },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TmError {
    #[error("invalid scheme: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidScheme(Vec<Violation>),
    #[error(transparent)]
    Tape(#[from] TapeError),
}

/// Applies one transition to `config` in place. A `Stuck` outcome leaves
/// the configuration untouched.
pub fn tm_step(scheme: &TmScheme, config: &mut TmConfig) -> Result<StepOutcome, TapeError> {
    let read = config
        .head
        .apply(&mut config.tape, HeadAction::Read)?
        .expect("read head observes a symbol");
    let Some(action) = scheme.transition(&config.state, read) else {
        return Ok(StepOutcome::Stuck {
            state: config.state.clone(),
            read,
        });
    };
    let entry = TraceEntry {
        state: config.state.clone(),
        position: config.head.position(),
        read,
        written: action.write,
        movement: action.movement,
        next: action.target.clone(),
    };
    config.head.apply(&mut config.tape, HeadAction::Write(action.write))?;
    config.head.apply(&mut config.tape, HeadAction::Move(action.movement))?;
    config.steps += 1;
    match &action.target {
        Target::Halt => Ok(StepOutcome::Halted(entry)),
        Target::State(next) => {
            config.state = next.clone();
            Ok(StepOutcome::Next(entry))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Halted { tape: Tape, state: String },
    OutOfFuel { tape: Tape, state: String },
    Stuck { tape: Tape, state: String, read: Symbol },
}

impl Outcome {
    pub fn tape(&self) -> &Tape {
        match self {
            Outcome::Halted { tape, .. } | Outcome::OutOfFuel { tape, .. } | Outcome::Stuck { tape, .. } => tape,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Halted { .. } => "halted",
            Outcome::OutOfFuel { .. } => "out-of-fuel",
            Outcome::Stuck { .. } => "stuck",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub outcome: Outcome,
    pub trace: Vec<TraceEntry>,
}

/// Runs `scheme` from `start` for at most `max_steps` transitions.
pub fn tm_run(scheme: &TmScheme, tape: Tape, start: i64, max_steps: u64) -> Result<RunResult, TmError> {
    let violations = scheme.validate();
    if !violations.is_empty() {
        return Err(TmError::InvalidScheme(violations));
    }
    let mut config = TmConfig::initial(scheme, tape, start)?;
    let mut trace = Vec::new();
    loop {
        if config.steps >= max_steps {
            return Ok(RunResult {
                outcome: Outcome::OutOfFuel {
                    tape: config.tape,
                    state: config.state,
                },
                trace,
            });
        }
        match tm_step(scheme, &mut config)? {
            StepOutcome::Next(entry) => trace.push(entry),
            StepOutcome::Halted(entry) => {
                trace.push(entry);
                return Ok(RunResult {
                    outcome: Outcome::Halted {
                        tape: config.tape,
                        state: config.state,
                    },
                    trace,
                });
            }
            StepOutcome::Stuck { state, read } => {
                return Ok(RunResult {
                    outcome: Outcome::Stuck {
                        tape: config.tape,
                        state,
                        read,
                    },
                    trace,
                })
            }
        }
    }
}

/// Re-applies the writes and moves of `trace` to `tape`, starting at `start`.
pub fn replay_trace(tape: &Tape, start: i64, trace: &[TraceEntry]) -> Result<Tape, TapeError> {
    let mut tape = tape.clone();
    let mut head = Head::on(&tape, start, Discipline::ReadWriteBidirectional, true)?;
    for entry in trace {
        head.apply(&mut tape, HeadAction::Write(entry.written))?;
        head.apply(&mut tape, HeadAction::Move(entry.movement))?;
    }
    Ok(tape)
}

/// A tape over the scheme's alphabet, unbounded both ways.
pub fn scheme_tape(scheme: &TmScheme, literal: &str) -> Result<Tape, TapeError> {
    Tape::parse(literal, Boundedness::Unbounded, scheme.alphabet.clone())
}

#[cfg(test)]
mod tests {
    use super::fixtures::{fig2_scheme, unary_addition_scheme};
    use super::*;

    #[test]
    fn fig2_is_valid() {
        assert_eq!(fig2_scheme().validate(), vec![]);
        assert!(unary_addition_scheme().is_valid());
    }

    #[test]
    fn unknown_initial_state_reported() {
        let mut s = fig2_scheme();
        s.initial = "q9".into();
        let v = s.validate();
        assert!(v.contains(&Violation::InitialStateUnknown("q9".into())));
        assert!(v[0].to_string().contains("initial state unknown"));
    }

    #[test]
    fn state_symbol_overlap_reported() {
        let mut s = fig2_scheme();
        s.states.push("l".into());
        let v = s.validate();
        assert_eq!(v, vec![Violation::StateIsSymbol("l".into())]);
        assert!(v[0].to_string().contains("Q ∩ Σ ≠ ∅"));
    }

    #[test]
    fn bad_transition_targets_reported() {
        let s = fig2_scheme()
            .with("q7", Symbol('l'), Action::to(Symbol('x'), Move::Right, "q8"))
            .with_finals(["qz"]);
        let v = s.validate();
        assert!(v.contains(&Violation::SourceStateUnknown("q7".into())));
        assert!(v.contains(&Violation::WrittenSymbolUnknown(Symbol('x'))));
        assert!(v.contains(&Violation::TargetStateUnknown("q8".into())));
        assert!(v.contains(&Violation::FinalStateUnknown("qz".into())));
    }

    #[test]
    fn fig2_first_step_and_halt_entry() {
        let s = fig2_scheme();
        let mut c = TmConfig::initial(&s, scheme_tape(&s, "ll*lll").unwrap(), 0).unwrap();
        let out = tm_step(&s, &mut c).unwrap();
        assert_eq!(
            out,
            StepOutcome::Next(TraceEntry {
                state: "q0".into(),
                position: 0,
                read: Symbol('l'),
                written: Symbol::BLANK,
                movement: Move::Right,
                next: Target::State("q1".into()),
            })
        );
        assert_eq!(c.state, "q1");
        assert_eq!(c.head.position(), 1);
        assert_eq!(c.steps, 1);

        let mut c = TmConfig::initial(&s, scheme_tape(&s, "*").unwrap(), 0).unwrap();
        assert!(matches!(tm_step(&s, &mut c).unwrap(), StepOutcome::Halted(_)));
        assert_eq!(c.tape.read(0), Symbol::BLANK);
    }

    #[test]
    fn missing_entry_is_stuck() {
        let s = fig2_scheme();
        // (q0, Λ) has no entry in the table.
        let mut c = TmConfig::initial(&s, scheme_tape(&s, "").unwrap(), 0).unwrap();
        let before = c.clone();
        assert_eq!(
            tm_step(&s, &mut c).unwrap(),
            StepOutcome::Stuck {
                state: "q0".into(),
                read: Symbol::BLANK
            }
        );
        assert_eq!(c, before);
    }

    #[test]
    fn empty_table_is_stuck_at_step_zero() {
        let s = TmScheme::new(["q0"], Alphabet::binary(), "q0");
        let r = tm_run(&s, Tape::from_bits([true], Boundedness::Unbounded), 0, 10).unwrap();
        assert!(matches!(r.outcome, Outcome::Stuck { .. }));
        assert!(r.trace.is_empty());
    }

    #[test]
    fn zero_fuel_is_out_of_fuel() {
        let s = fig2_scheme();
        let r = tm_run(&s, scheme_tape(&s, "ll*lll").unwrap(), 0, 0).unwrap();
        assert!(matches!(r.outcome, Outcome::OutOfFuel { .. }));
        assert!(r.trace.is_empty());
    }

    #[test]
    fn invalid_scheme_refused() {
        let mut s = fig2_scheme();
        s.initial = "nope".into();
        assert!(matches!(
            tm_run(&s, scheme_tape(&s, "l").unwrap(), 0, 5),
            Err(TmError::InvalidScheme(_))
        ));
    }

    #[test]
    fn corrected_addition_small() {
        let s = unary_addition_scheme();
        let r = tm_run(&s, scheme_tape(&s, "ll*lll").unwrap(), 0, 100).unwrap();
        assert!(matches!(r.outcome, Outcome::Halted { .. }));
        assert_eq!(r.outcome.tape().literal(), "lllll");
    }
}
