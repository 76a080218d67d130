//! The stochastic context: a finite probability space of events, each of
//! which edits one work tape by a single insertion, deletion or
//! substitution.
//!
//! Edits act on the non-negative part of a work tape, cells `0..n` where
//! `n` is the end of its materialized window. A "uniform" position is drawn
//! as a fraction `u` in `[0, 1)` when the event is sampled and resolved to
//! `floor(u * n)` (`floor(u * (n + 1))` for insertions) when it is applied,
//! so one sample means the same thing on any tape.

mod levenshtein;
pub mod nd;
mod space;

pub use levenshtein::{distance_matrix, levenshtein, word_distance};
pub use space::{sample_event, EventsFile, ProbabilitySpace, SpaceError};

use serde::{Deserialize, Serialize};

use crate::bits::Word;
use crate::tape::{Head, Symbol, Tape, TapeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EditKind {
    Substitute,
    Insert,
    Delete,
}

/// Where an event hits, as configured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PositionSpec {
    At(usize),
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BitSpec {
    Fixed(bool),
    Random,
}

/// Which machine an event hits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventTarget {
    Any,
    Machine(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventTemplate {
    pub id: String,
    pub target: EventTarget,
    pub kind: EditKind,
    pub position: PositionSpec,
    /// Ignored for deletions.
    pub bit: BitSpec,
}

/// Where a sampled event hits: an explicit index or a fraction of the
/// window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PositionDraw {
    At(usize),
    Fraction(f64),
}

/// A sampled event; everything random has been drawn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContextEvent {
    pub id: String,
    pub target: EventTarget,
    pub kind: EditKind,
    pub position: PositionDraw,
    pub bit: Option<bool>,
}

impl ContextEvent {
    pub fn substitute(position: usize, bit: bool) -> ContextEvent {
        ContextEvent {
            id: "substitute".into(),
            target: EventTarget::Any,
            kind: EditKind::Substitute,
            position: PositionDraw::At(position),
            bit: Some(bit),
        }
    }

    pub fn insert(position: usize, bit: bool) -> ContextEvent {
        ContextEvent {
            id: "insert".into(),
            target: EventTarget::Any,
            kind: EditKind::Insert,
            position: PositionDraw::At(position),
            bit: Some(bit),
        }
    }

    pub fn delete(position: usize) -> ContextEvent {
        ContextEvent {
            id: "delete".into(),
            target: EventTarget::Any,
            kind: EditKind::Delete,
            position: PositionDraw::At(position),
            bit: None,
        }
    }
}

/// An edit as it was carried out.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AppliedEdit {
    pub id: String,
    pub kind: EditKind,
    /// Cell index; `None` when the window was empty and nothing happened.
    pub position: Option<usize>,
    pub bit: Option<bool>,
    /// The configured position lay past the window and was pulled back.
    pub clamped: bool,
}

impl AppliedEdit {
    pub fn is_noop(&self) -> bool {
        self.position.is_none()
    }
}

/// Decides the concrete cell an event hits on a window of `n` cells.
pub fn resolve(event: &ContextEvent, n: usize) -> AppliedEdit {
    let slots = match event.kind {
        EditKind::Insert => n + 1,
        EditKind::Substitute | EditKind::Delete => n,
    };
    let (position, clamped) = if slots == 0 {
        (None, false)
    } else {
        match event.position {
            PositionDraw::At(i) if i < slots => (Some(i), false),
            PositionDraw::At(_) => (Some(slots - 1), true),
            PositionDraw::Fraction(u) => (Some(((u * slots as f64) as usize).min(slots - 1)), false),
        }
    };
    AppliedEdit {
        id: event.id.clone(),
        kind: event.kind,
        position,
        bit: match event.kind {
            EditKind::Delete => None,
            _ => event.bit,
        },
        clamped,
    }
}

/// Carries out a resolved edit on a word of cells.
pub fn apply_to_cells(cells: &mut Vec<Symbol>, edit: &AppliedEdit) {
    let Some(p) = edit.position else { return };
    let symbol = Symbol::from_bit(edit.bit.unwrap_or(false));
    match edit.kind {
        EditKind::Substitute => cells[p] = symbol,
        EditKind::Insert => cells.insert(p, symbol),
        EditKind::Delete => {
            cells.remove(p);
        }
    }
}

/// Applies a resolved edit to the non-negative part of `tape`; heads on
/// the tape keep pointing at the same logical cell.
pub fn apply_resolved(edit: &AppliedEdit, tape: &mut Tape, heads: &mut [&mut Head]) -> Result<(), TapeError> {
    let Some(p) = edit.position else { return Ok(()) };
    let mut cells = tape.nonnegative_cells();
    apply_to_cells(&mut cells, edit);
    tape.set_nonnegative_cells(&cells)?;
    let delta = match edit.kind {
        EditKind::Insert => 1,
        EditKind::Delete => -1,
        EditKind::Substitute => 0,
    };
    if delta != 0 {
        for h in heads.iter_mut() {
            h.follow_shift(p as i64, delta);
        }
    }
    Ok(())
}

/// Resolves `event` against `tape` and applies it.
pub fn apply_event(event: &ContextEvent, tape: &mut Tape, heads: &mut [&mut Head]) -> Result<AppliedEdit, TapeError> {
    let edit = resolve(event, tape.window_end() as usize);
    apply_resolved(&edit, tape, heads)?;
    Ok(edit)
}

/// Applies `event` to a bare word.
pub fn apply_to_word(event: &ContextEvent, word: &Word) -> (Word, AppliedEdit) {
    let mut cells: Vec<Symbol> = word.iter().map(Symbol::from_bit).collect();
    let edit = resolve(event, cells.len());
    apply_to_cells(&mut cells, &edit);
    (cells.into_iter().filter_map(Symbol::as_bit).collect(), edit)
}

/// Replays resolved edits on a word, in order.
pub fn replay_edits(word: &Word, edits: &[AppliedEdit]) -> Word {
    let mut cells: Vec<Symbol> = word.iter().map(Symbol::from_bit).collect();
    for e in edits {
        apply_to_cells(&mut cells, e);
    }
    cells.into_iter().filter_map(Symbol::as_bit).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::tape::{Boundedness, Discipline};

    #[test]
    fn substitute_example() {
        let (w, e) = apply_to_word(&ContextEvent::substitute(3, false), &bits("11111"));
        assert_eq!(w, bits("11101"));
        assert!(!e.clamped);
    }

    #[test]
    fn delete_single_cell() {
        let (w, _) = apply_to_word(&ContextEvent::delete(0), &bits("1"));
        assert_eq!(w, bits(""));
    }

    #[test]
    fn empty_window_is_noop_for_substitute_and_delete() {
        let (w, e) = apply_to_word(&ContextEvent::delete(0), &bits(""));
        assert!(e.is_noop());
        assert_eq!(w, bits(""));
        let (w, e) = apply_to_word(&ContextEvent::insert(5, true), &bits(""));
        assert_eq!(w, bits("1"));
        assert!(e.clamped);
    }

    #[test]
    fn positions_clamp_to_window_end() {
        let (w, e) = apply_to_word(&ContextEvent::substitute(99, false), &bits("111"));
        assert_eq!(w, bits("110"));
        assert!(e.clamped);
        let (w, _) = apply_to_word(&ContextEvent::insert(99, false), &bits("111"));
        assert_eq!(w, bits("1110"));
    }

    #[test]
    fn fractions_cover_the_window() {
        let mut e = ContextEvent::substitute(0, false);
        e.position = PositionDraw::Fraction(0.999_999);
        assert_eq!(resolve(&e, 4).position, Some(3));
        e.position = PositionDraw::Fraction(0.0);
        assert_eq!(resolve(&e, 4).position, Some(0));
        e.kind = EditKind::Insert;
        e.position = PositionDraw::Fraction(0.999_999);
        assert_eq!(resolve(&e, 4).position, Some(4));
    }

    #[test]
    fn heads_follow_insertions_and_deletions() {
        let mut tape = Tape::from_bits([true, false, true, true], Boundedness::Unbounded);
        let mut n = Head::new(2, Discipline::ReadWriteBidirectional, true);
        apply_event(&ContextEvent::insert(0, false), &mut tape, &mut [&mut n]).unwrap();
        assert_eq!(n.position(), 3);
        assert_eq!(tape.word(), bits("01011"));
        apply_event(&ContextEvent::delete(4), &mut tape, &mut [&mut n]).unwrap();
        assert_eq!(n.position(), 3);
        apply_event(&ContextEvent::delete(1), &mut tape, &mut [&mut n]).unwrap();
        assert_eq!(n.position(), 2);
        assert_eq!(tape.word(), bits("001"));
    }

    #[test]
    fn negative_cells_are_untouched() {
        let mut tape = Tape::from_bits([true, true], Boundedness::Unbounded);
        tape.write(-3, Symbol::ZERO).unwrap();
        apply_event(&ContextEvent::delete(0), &mut tape, &mut []).unwrap();
        assert_eq!(tape.read(-3), Symbol::ZERO);
        assert_eq!(tape.word(), bits("1"));
    }
}
