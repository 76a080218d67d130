//! Tapes, symbols and heads.
//!
//! A [`Tape`] is a finite materialized window of cells with blank fill on
//! every side, growing on demand when a write lands outside the window.
//! A [`Head`] carries an access [`Discipline`]; every action it performs
//! goes through [`Head::apply`], which refuses anything the discipline
//! forbids instead of silently ignoring it. Forward-only heads are how the
//! machines in this crate encode the passage of time.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A tape symbol.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Symbol(pub char);

impl Symbol {
    /// The distinguished blank, written `Λ` (or `_` in literals).
    pub const BLANK: Symbol = Symbol('Λ');
    pub const ZERO: Symbol = Symbol('0');
    pub const ONE: Symbol = Symbol('1');

    pub fn from_bit(bit: bool) -> Symbol {
        if bit {
            Symbol::ONE
        } else {
            Symbol::ZERO
        }
    }

    /// `Some(bit)` for `0`/`1`, `None` for anything else.
    pub fn as_bit(self) -> Option<bool> {
        match self.0 {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        }
    }

    /// Parses one literal character; `_` is accepted as an alias for `Λ`.
    pub fn from_literal(c: char) -> Symbol {
        if c == '_' {
            Symbol::BLANK
        } else {
            Symbol(c)
        }
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite alphabet that always contains its blank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Arc<BTreeSet<Symbol>>,
    blank: Symbol,
}

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = Symbol>, blank: Symbol) -> Alphabet {
        let mut set: BTreeSet<Symbol> = symbols.into_iter().collect();
        set.insert(blank);
        Alphabet {
            symbols: Arc::new(set),
            blank,
        }
    }

    /// `{0, 1, Λ}`, shared between every binary tape.
    pub fn binary() -> Alphabet {
        static BINARY: OnceLock<Alphabet> = OnceLock::new();
        BINARY
            .get_or_init(|| Alphabet::new([Symbol::ZERO, Symbol::ONE], Symbol::BLANK))
            .clone()
    }

    pub fn blank(&self) -> Symbol {
        self.blank
    }

    pub fn contains(&self, symbol: Symbol) -> bool {
        self.symbols.contains(&symbol)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Symbols in canonical order: blank first, the rest by code point.
    pub fn canonical_order(&self) -> Vec<Symbol> {
        let mut out = vec![self.blank];
        out.extend(self.symbols.iter().copied().filter(|s| *s != self.blank));
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.symbols.iter().copied()
    }
}

/// Which directions a tape extends in. Bounded tapes reject positions past
/// their fixed end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Boundedness {
    Unbounded,
    /// Cells at indices `>= 0` only.
    LeftBounded,
    /// Cells at indices `<= last` only, where `last` is the final index of
    /// the initial window (0 for an empty window).
    RightBounded { last: i64 },
}

impl Boundedness {
    pub fn admits(self, position: i64) -> bool {
        match self {
            Boundedness::Unbounded => true,
            Boundedness::LeftBounded => position >= 0,
            Boundedness::RightBounded { last } => position <= last,
        }
    }
}

/// Head movement: `G` (left), `D` (right), `N` (stay).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Move {
    Left,
    Right,
    Stay,
}

impl Move {
    pub fn delta(self) -> i64 {
        match self {
            Move::Left => -1,
            Move::Right => 1,
            Move::Stay => 0,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Move::Left => 'G',
            Move::Right => 'D',
            Move::Stay => 'N',
        }
    }

    /// Accepts `G`/`D`/`N` as well as `L`/`R`.
    pub fn from_letter(c: char) -> Option<Move> {
        match c.to_ascii_uppercase() {
            'G' | 'L' => Some(Move::Left),
            'D' | 'R' => Some(Move::Right),
            'N' | 'S' => Some(Move::Stay),
            _ => None,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TapeError {
    #[error("{discipline:?} head cannot {action}")]
    DisciplineViolation {
        discipline: Discipline,
        action: HeadAction,
    },
    #[error("position {position} lies outside a {boundedness:?} tape")]
    BoundaryViolation {
        position: i64,
        boundedness: Boundedness,
    },
    #[error("symbol {0} is not in the tape alphabet")]
    UnknownSymbol(Symbol),
}

/// A tape: a materialized window of cells, blank everywhere else.
#[derive(Clone)]
pub struct Tape {
    cells: VecDeque<Symbol>,
    /// Index of `cells[0]`.
    origin: i64,
    boundedness: Boundedness,
    alphabet: Alphabet,
}

impl Tape {
    /// Materializes `window` at indices `0..len`.
    pub fn new(
        window: impl IntoIterator<Item = Symbol>,
        boundedness: Boundedness,
        alphabet: Alphabet,
    ) -> Result<Tape, TapeError> {
        let cells: VecDeque<Symbol> = window.into_iter().collect();
        if let Some(bad) = cells.iter().find(|s| !alphabet.contains(**s)) {
            return Err(TapeError::UnknownSymbol(*bad));
        }
        Ok(Tape {
            cells,
            origin: 0,
            boundedness,
            alphabet,
        })
    }

    /// Parses a tape literal: one character per cell, `Λ` or `_` for blank.
    pub fn parse(literal: &str, boundedness: Boundedness, alphabet: Alphabet) -> Result<Tape, TapeError> {
        Tape::new(literal.chars().map(Symbol::from_literal), boundedness, alphabet)
    }

    pub fn blank_binary(boundedness: Boundedness) -> Tape {
        Tape {
            cells: VecDeque::new(),
            origin: 0,
            boundedness,
            alphabet: Alphabet::binary(),
        }
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>, boundedness: Boundedness) -> Tape {
        Tape {
            cells: bits.into_iter().map(Symbol::from_bit).collect(),
            origin: 0,
            boundedness,
            alphabet: Alphabet::binary(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn blank(&self) -> Symbol {
        self.alphabet.blank
    }

    pub fn boundedness(&self) -> Boundedness {
        self.boundedness
    }

    pub fn read(&self, position: i64) -> Symbol {
        let offset = position - self.origin;
        if offset < 0 {
            return self.alphabet.blank;
        }
        self.cells
            .get(offset as usize)
            .copied()
            .unwrap_or(self.alphabet.blank)
    }

    /// Writes one cell, materializing the window up to it if needed.
    pub fn write(&mut self, position: i64, symbol: Symbol) -> Result<(), TapeError> {
        if !self.alphabet.contains(symbol) {
            return Err(TapeError::UnknownSymbol(symbol));
        }
        if !self.boundedness.admits(position) {
            return Err(TapeError::BoundaryViolation {
                position,
                boundedness: self.boundedness,
            });
        }
        let blank = self.alphabet.blank;
        if self.cells.is_empty() {
            self.origin = position;
        }
        while position < self.origin {
            self.cells.push_front(blank);
            self.origin -= 1;
        }
        let offset = (position - self.origin) as usize;
        while offset >= self.cells.len() {
            self.cells.push_back(blank);
        }
        self.cells[offset] = symbol;
        Ok(())
    }

    /// First materialized index and the materialized cells.
    pub fn window(&self) -> (i64, Vec<Symbol>) {
        (self.origin, self.cells.iter().copied().collect())
    }

    /// One past the last materialized index (at least 0).
    pub fn window_end(&self) -> i64 {
        (self.origin + self.cells.len() as i64).max(0)
    }

    /// Cells at indices `0..window_end()`.
    pub fn nonnegative_cells(&self) -> Vec<Symbol> {
        (0..self.window_end()).map(|i| self.read(i)).collect()
    }

    /// Replaces the cells at indices `>= 0` by `cells`, keeping the negative
    /// part of the tape untouched.
    pub fn set_nonnegative_cells(&mut self, cells: &[Symbol]) -> Result<(), TapeError> {
        if let Some(bad) = cells.iter().find(|s| !self.alphabet.contains(**s)) {
            return Err(TapeError::UnknownSymbol(*bad));
        }
        let negative: Vec<Symbol> = (self.origin.min(0)..0).map(|i| self.read(i)).collect();
        let start = self.origin.min(0);
        self.cells = negative.into_iter().chain(cells.iter().copied()).collect();
        self.origin = start;
        Ok(())
    }

    /// The non-negative bits of the tape, skipping blank cells.
    pub fn word(&self) -> crate::bits::BitString {
        self.nonnegative_cells()
            .into_iter()
            .filter_map(Symbol::as_bit)
            .collect()
    }

    /// Materialized content with the blank margins trimmed, as a literal.
    pub fn literal(&self) -> String {
        self.trimmed().1.iter().map(|s| s.0).collect()
    }

    /// First non-blank index and the trimmed cells; `(0, [])` for a blank tape.
    pub fn trimmed(&self) -> (i64, Vec<Symbol>) {
        let blank = self.alphabet.blank;
        let first = self.cells.iter().position(|s| *s != blank);
        let last = self.cells.iter().rposition(|s| *s != blank);
        match (first, last) {
            (Some(a), Some(b)) => (
                self.origin + a as i64,
                self.cells.range(a..=b).copied().collect(),
            ),
            _ => (0, Vec::new()),
        }
    }
}

impl fmt::Debug for Tape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (start, cells) = self.trimmed();
        let body: String = cells.iter().map(|s| s.0).collect();
        write!(f, "Tape({start}: {body:?})")
    }
}

impl PartialEq for Tape {
    fn eq(&self, other: &Tape) -> bool {
        self.boundedness == other.boundedness
            && self.alphabet.blank == other.alphabet.blank
            && self.trimmed() == other.trimmed()
    }
}

impl Eq for Tape {}

impl Hash for Tape {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.boundedness.hash(state);
        self.trimmed().hash(state);
    }
}

/// Access discipline of a head.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Discipline {
    ReadForwardOnly,
    WriteForwardOnly,
    ReadWriteBidirectional,
    WriteBidirectional,
}

impl Discipline {
    fn can_read(self) -> bool {
        matches!(
            self,
            Discipline::ReadForwardOnly | Discipline::ReadWriteBidirectional
        )
    }

    fn can_write(self) -> bool {
        !matches!(self, Discipline::ReadForwardOnly)
    }

    fn forward_only(self) -> bool {
        matches!(
            self,
            Discipline::ReadForwardOnly | Discipline::WriteForwardOnly
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HeadAction {
    Read,
    Write(Symbol),
    Move(Move),
}

impl fmt::Display for HeadAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeadAction::Read => write!(f, "read"),
            HeadAction::Write(s) => write!(f, "write {s}"),
            HeadAction::Move(m) => write!(f, "move {m}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Head {
    position: i64,
    discipline: Discipline,
    may_stagnate: bool,
}

impl Head {
    /// Forward-only heads never stagnate, whatever `may_stagnate` says.
    pub fn new(position: i64, discipline: Discipline, may_stagnate: bool) -> Head {
        Head {
            position,
            discipline,
            may_stagnate: may_stagnate && !discipline.forward_only(),
        }
    }

    /// A head placed on `tape`, checked against the tape's bounds.
    pub fn on(tape: &Tape, position: i64, discipline: Discipline, may_stagnate: bool) -> Result<Head, TapeError> {
        if !tape.boundedness.admits(position) {
            return Err(TapeError::BoundaryViolation {
                position,
                boundedness: tape.boundedness,
            });
        }
        Ok(Head::new(position, discipline, may_stagnate))
    }

    pub fn position(&self) -> i64 {
        self.position
    }

    pub fn discipline(&self) -> Discipline {
        self.discipline
    }

    pub fn may_stagnate(&self) -> bool {
        self.may_stagnate
    }

    /// Moves the head to `position` outright. Only heads that an explicit
    /// operand may reposition use this; forward-only heads are refused.
    pub fn reposition(&mut self, tape: &Tape, position: i64) -> Result<(), TapeError> {
        if self.discipline.forward_only() {
            return Err(TapeError::DisciplineViolation {
                discipline: self.discipline,
                action: HeadAction::Move(if position < self.position { Move::Left } else { Move::Right }),
            });
        }
        if !tape.boundedness.admits(position) {
            return Err(TapeError::BoundaryViolation {
                position,
                boundedness: tape.boundedness,
            });
        }
        self.position = position;
        Ok(())
    }

    /// Shifts the head after an insertion (`+1`) or deletion (`-1`) at
    /// `at` elsewhere on its tape, so it stays over the same logical cell.
    pub(crate) fn follow_shift(&mut self, at: i64, delta: i64) {
        if delta > 0 && self.position >= at {
            self.position += 1;
        } else if delta < 0 && self.position > at {
            self.position -= 1;
        }
    }

    /// Performs one action. On error neither the head nor the tape change.
    pub fn apply(&mut self, tape: &mut Tape, action: HeadAction) -> Result<Option<Symbol>, TapeError> {
        let violation = || TapeError::DisciplineViolation {
            discipline: self.discipline,
            action,
        };
        match action {
            HeadAction::Read => {
                if !self.discipline.can_read() {
                    return Err(violation());
                }
                Ok(Some(tape.read(self.position)))
            }
            HeadAction::Write(symbol) => {
                if !self.discipline.can_write() {
                    return Err(violation());
                }
                tape.write(self.position, symbol)?;
                Ok(None)
            }
            HeadAction::Move(m) => {
                let allowed = match m {
                    Move::Right => true,
                    Move::Left => !self.discipline.forward_only(),
                    Move::Stay => self.may_stagnate,
                };
                if !allowed {
                    return Err(violation());
                }
                let next = self.position + m.delta();
                if !tape.boundedness.admits(next) {
                    return Err(TapeError::BoundaryViolation {
                        position: next,
                        boundedness: tape.boundedness,
                    });
                }
                self.position = next;
                Ok(None)
            }
        }
    }
}

/// Value-semantics form of [`Head::apply`].
pub fn head_apply(tape: &Tape, head: &Head, action: HeadAction) -> Result<(Option<Symbol>, Head, Tape), TapeError> {
    let mut tape = tape.clone();
    let mut head = *head;
    let observed = head.apply(&mut tape, action)?;
    Ok((observed, head, tape))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig2_alphabet() -> Alphabet {
        Alphabet::new([Symbol('l'), Symbol('*')], Symbol::BLANK)
    }

    #[test]
    fn empty_tape_is_blank_everywhere() {
        let tape = Tape::parse("", Boundedness::Unbounded, Alphabet::binary()).unwrap();
        for i in -5..5 {
            assert_eq!(tape.read(i), Symbol::BLANK);
        }
    }

    #[test]
    fn literal_layout() {
        let tape = Tape::parse("ll*lll", Boundedness::LeftBounded, fig2_alphabet()).unwrap();
        let read: String = (0..7).map(|i| tape.read(i).0).collect();
        assert_eq!(read, "ll*lllΛ");
        let bits = Tape::parse("101", Boundedness::Unbounded, Alphabet::binary()).unwrap();
        assert_eq!(bits.read(0), Symbol::ONE);
        assert_eq!(bits.read(3), Symbol::BLANK);
    }

    #[test]
    fn underscore_is_blank() {
        let tape = Tape::parse("1_1", Boundedness::Unbounded, Alphabet::binary()).unwrap();
        assert_eq!(tape.read(1), Symbol::BLANK);
    }

    #[test]
    fn foreign_symbol_rejected() {
        let err = Tape::parse("10x", Boundedness::Unbounded, Alphabet::binary()).unwrap_err();
        assert_eq!(err, TapeError::UnknownSymbol(Symbol('x')));
    }

    #[test]
    fn read_does_not_change_anything() {
        let tape = Tape::parse("ll*", Boundedness::Unbounded, fig2_alphabet()).unwrap();
        let head = Head::new(0, Discipline::ReadWriteBidirectional, true);
        let (seen, head2, tape2) = head_apply(&tape, &head, HeadAction::Read).unwrap();
        assert_eq!(seen, Some(Symbol('l')));
        assert_eq!(head2, head);
        assert_eq!(tape2, tape);
    }

    #[test]
    fn forward_only_head_cannot_go_back() {
        let mut tape = Tape::from_bits([true, false], Boundedness::LeftBounded);
        let mut head = Head::new(1, Discipline::ReadForwardOnly, true);
        assert!(!head.may_stagnate());
        for m in [Move::Left, Move::Stay] {
            let err = head.apply(&mut tape, HeadAction::Move(m)).unwrap_err();
            assert!(matches!(err, TapeError::DisciplineViolation { .. }));
        }
        assert_eq!(head.position(), 1);
    }

    #[test]
    fn read_head_cannot_write_and_write_head_cannot_read() {
        let mut tape = Tape::blank_binary(Boundedness::LeftBounded);
        let mut r = Head::new(0, Discipline::ReadForwardOnly, false);
        assert!(r.apply(&mut tape, HeadAction::Write(Symbol::ONE)).is_err());
        let mut v = Head::new(0, Discipline::WriteForwardOnly, false);
        assert!(v.apply(&mut tape, HeadAction::Read).is_err());
        let mut b = Head::new(0, Discipline::WriteBidirectional, false);
        assert!(b.apply(&mut tape, HeadAction::Read).is_err());
        assert_eq!(tape, Tape::blank_binary(Boundedness::LeftBounded));
    }

    #[test]
    fn bounded_ends_are_enforced() {
        let mut tape = Tape::blank_binary(Boundedness::LeftBounded);
        let mut head = Head::new(0, Discipline::ReadWriteBidirectional, true);
        let err = head.apply(&mut tape, HeadAction::Move(Move::Left)).unwrap_err();
        assert!(matches!(err, TapeError::BoundaryViolation { position: -1, .. }));
        assert!(Head::on(&tape, -3, Discipline::ReadWriteBidirectional, true).is_err());
        let right = Tape::from_bits([true, true, true], Boundedness::RightBounded { last: 2 });
        let mut h = Head::new(2, Discipline::ReadWriteBidirectional, true);
        let mut right2 = right.clone();
        assert!(h.apply(&mut right2, HeadAction::Move(Move::Right)).is_err());
        assert!(h.apply(&mut right2, HeadAction::Move(Move::Left)).is_ok());
    }

    #[test]
    fn write_then_read_same_cell() {
        let mut tape = Tape::blank_binary(Boundedness::Unbounded);
        let mut head = Head::new(-2, Discipline::ReadWriteBidirectional, true);
        head.apply(&mut tape, HeadAction::Write(Symbol::ONE)).unwrap();
        assert_eq!(head.apply(&mut tape, HeadAction::Read).unwrap(), Some(Symbol::ONE));
        assert_eq!(tape.read(-1), Symbol::BLANK);
    }

    #[test]
    fn window_grows_both_ways() {
        let mut tape = Tape::from_bits([true], Boundedness::Unbounded);
        tape.write(-3, Symbol::ZERO).unwrap();
        tape.write(4, Symbol::ONE).unwrap();
        let (start, cells) = tape.window();
        assert_eq!(start, -3);
        assert_eq!(cells.len(), 8);
        assert_eq!(tape.literal(), "0ΛΛ1ΛΛΛ1");
    }

    fn action() -> impl Strategy<Value = HeadAction> {
        prop_oneof![
            Just(HeadAction::Read),
            any::<bool>().prop_map(|b| HeadAction::Write(Symbol::from_bit(b))),
            Just(HeadAction::Write(Symbol::BLANK)),
            Just(HeadAction::Move(Move::Left)),
            Just(HeadAction::Move(Move::Right)),
            Just(HeadAction::Move(Move::Stay)),
        ]
    }

    proptest! {
        #[test]
        fn read_forward_head_positions_strictly_increase(actions in proptest::collection::vec(action(), 0..60)) {
            let mut tape = Tape::from_bits([true, false, true], Boundedness::LeftBounded);
            let mut head = Head::new(0, Discipline::ReadForwardOnly, false);
            let mut last = head.position();
            for a in actions {
                let before = head.position();
                match head.apply(&mut tape, a) {
                    Ok(_) => {
                        if head.position() != before {
                            prop_assert_eq!(head.position(), last + 1);
                            last = head.position();
                        }
                    }
                    Err(_) => prop_assert_eq!(head.position(), before),
                }
            }
        }

        #[test]
        fn frame_property(cells in proptest::collection::vec(any::<bool>(), 0..8), pos in -3i64..10, bit: bool) {
            let tape = Tape::from_bits(cells, Boundedness::Unbounded);
            let head = Head::new(pos, Discipline::ReadWriteBidirectional, true);
            let (_, head2, tape2) = head_apply(&tape, &head, HeadAction::Write(Symbol::from_bit(bit))).unwrap();
            let (seen, _, _) = head_apply(&tape2, &head2, HeadAction::Read).unwrap();
            prop_assert_eq!(seen, Some(Symbol::from_bit(bit)));
            for i in -6..14 {
                if i != pos {
                    prop_assert_eq!(tape.read(i), tape2.read(i));
                }
            }
        }

        #[test]
        fn head_apply_is_deterministic(cells in proptest::collection::vec(any::<bool>(), 0..6), a in action()) {
            let tape = Tape::from_bits(cells, Boundedness::LeftBounded);
            let head = Head::new(1, Discipline::ReadWriteBidirectional, true);
            prop_assert_eq!(head_apply(&tape, &head, a), head_apply(&tape, &head, a));
        }
    }
}
