//! Built-in schemes.

use super::{Action, TmScheme};
use crate::tape::{Alphabet, Move, Symbol};

const STROKE: Symbol = Symbol('l');
const STAR: Symbol = Symbol('*');

fn stroke_alphabet() -> Alphabet {
    Alphabet::new([STROKE, STAR], Symbol::BLANK)
}

/// The three-state stroke-addition table, transcribed cell for cell.
///
/// Run on `ll*lll` from the first stroke it erases the first block and the
/// separator and leaves only the second block, so it does not compute the
/// sum it is usually described as computing. Kept verbatim on purpose; see
/// [`unary_addition_scheme`] for a machine that adds.
pub fn fig2_scheme() -> TmScheme {
    let b = Symbol::BLANK;
    TmScheme::new(["q0", "q1", "q2"], stroke_alphabet(), "q0")
        .with("q0", STROKE, Action::to(b, Move::Right, "q1"))
        .with("q0", STAR, Action::halt(b))
        .with("q1", b, Action::to(b, Move::Left, "q2"))
        .with("q1", STROKE, Action::to(STROKE, Move::Right, "q1"))
        .with("q1", STAR, Action::to(STAR, Move::Right, "q1"))
        .with("q2", b, Action::to(b, Move::Right, "q0"))
        .with("q2", STROKE, Action::to(STROKE, Move::Left, "q2"))
        .with("q2", STAR, Action::to(STAR, Move::Left, "q2"))
}

/// Unary addition `l^a * l^b -> l^(a+b)` for `a >= 1`: erase the leading
/// stroke, run right to the separator and overwrite it with a stroke.
pub fn unary_addition_scheme() -> TmScheme {
    let b = Symbol::BLANK;
    TmScheme::new(["q0", "q1"], stroke_alphabet(), "q0")
        .with("q0", STROKE, Action::to(b, Move::Right, "q1"))
        .with("q1", STROKE, Action::to(STROKE, Move::Right, "q1"))
        .with("q1", STAR, Action::halt(STROKE))
}
