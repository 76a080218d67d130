//! Text format for schemes.
//!
//! ```text
//! # comments run to end of line
//! states: q0, q1, q2
//! alphabet: l, *
//! initial: q0
//! finals: q2
//! (q0, l) -> (Λ, D, q1)
//! (q0, *) -> (Λ, !)
//! ```
//!
//! The blank is always part of the alphabet and may be written `Λ` or `_`.
//! A right-hand side is `(write, move, next)`, `(write, move, !)` or the
//! short halting form `(write, !)`, which does not move.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Action, Target, TmScheme};
use crate::tape::{Alphabet, Move, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

/// A comma-separated list with the 1-based column of each item.
fn list(body: &str, base_column: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in body.split(',') {
        let lead = part.len() - part.trim_start().len();
        let item = part.trim();
        if !item.is_empty() {
            out.push((base_column + body[..offset].chars().count() + part[..lead].chars().count(), item));
        }
        offset += part.len() + 1;
    }
    out
}

fn symbol(text: &str, line: usize, column: usize) -> Result<Symbol, ParseError> {
    let mut chars = text.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(Symbol::from_literal(c)),
        _ => Err(err(line, column, format!("expected a single-character symbol, found {text:?}"))),
    }
}

/// Splits `(a, b, c)` into its items; `column` is where `(` sits.
fn tuple(text: &str, line: usize, column: usize) -> Result<Vec<(usize, &str)>, ParseError> {
    let trimmed = text.trim();
    let lead = text.chars().count() - text.trim_start().chars().count();
    let open = column + lead;
    let Some(inner) = trimmed.strip_prefix('(') else {
        return Err(err(line, open, "expected '('"));
    };
    let Some(inner) = inner.strip_suffix(')') else {
        return Err(err(line, open + trimmed.chars().count() - 1, "expected ')'"));
    };
    Ok(list(inner, open + 1))
}

pub fn parse_scheme(text: &str) -> Result<TmScheme, ParseError> {
    let mut states: Option<Vec<String>> = None;
    let mut symbols: Option<Vec<Symbol>> = None;
    let mut initial: Option<String> = None;
    let mut finals = Vec::new();
    let mut transitions = BTreeMap::new();

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        if let Some((lhs, rhs)) = content.split_once("->") {
            let lhs_items = tuple(lhs, line, 1)?;
            let rhs_column = lhs.chars().count() + 3;
            let rhs_items = tuple(rhs, line, rhs_column)?;
            let [(sc, state), (rc, read)] = lhs_items[..] else {
                return Err(err(line, 1, "left-hand side must be (state, symbol)"));
            };
            let read = symbol(read, line, rc)?;
            let action = match rhs_items[..] {
                [(wc, write), (_, "!")] => Action::halt(symbol(write, line, wc)?),
                [(wc, write), (mc, mv), (_, next)] => {
                    let write = symbol(write, line, wc)?;
                    let mut mv_chars = mv.chars();
                    let movement = match (mv_chars.next().and_then(Move::from_letter), mv_chars.next()) {
                        (Some(m), None) => m,
                        _ => return Err(err(line, mc, format!("expected a move G, D or N, found {mv:?}"))),
                    };
                    let target = if next == "!" {
                        Target::Halt
                    } else {
                        Target::State(next.to_string())
                    };
                    Action::new(write, movement, target)
                }
                _ => {
                    return Err(err(
                        line,
                        rhs_column,
                        "right-hand side must be (write, move, next) or (write, !)",
                    ))
                }
            };
            if transitions
                .insert((state.to_string(), read), action)
                .is_some()
            {
                return Err(err(line, sc, format!("duplicate transition for ({state}, {read})")));
            }
            continue;
        }
        let Some((key, body)) = content.split_once(':') else {
            let column = raw.chars().count() - raw.trim_start().chars().count() + 1;
            return Err(err(line, column, "expected `key: value` or a transition"));
        };
        let key_name = key.trim();
        let body_column = key.chars().count() + 2;
        let items = list(body, body_column);
        match key_name {
            "states" => states = Some(items.iter().map(|(_, s)| s.to_string()).collect()),
            "alphabet" => {
                symbols = Some(
                    items
                        .iter()
                        .map(|(c, s)| symbol(s, line, *c))
                        .collect::<Result<_, _>>()?,
                )
            }
            "initial" => match items[..] {
                [(_, q)] => initial = Some(q.to_string()),
                _ => return Err(err(line, body_column, "expected exactly one initial state")),
            },
            "finals" => finals.extend(items.iter().map(|(_, s)| s.to_string())),
            other => {
                let column = key.chars().count() - key.trim_start().chars().count() + 1;
                return Err(err(line, column, format!("unknown key {other:?}")));
            }
        }
    }

    let last = text.lines().count().max(1);
    let states = states.ok_or_else(|| err(last, 1, "missing `states:`"))?;
    let symbols = symbols.ok_or_else(|| err(last, 1, "missing `alphabet:`"))?;
    let initial = initial.ok_or_else(|| err(last, 1, "missing `initial:`"))?;
    let mut scheme = TmScheme::new(states, Alphabet::new(symbols, Symbol::BLANK), initial);
    scheme.transitions = transitions;
    scheme.finals = finals.into_iter().collect();
    Ok(scheme)
}

/// Renders a scheme in the text format; [`parse_scheme`] reads it back.
pub fn render_scheme(scheme: &TmScheme) -> String {
    let mut out = String::new();
    out.push_str(&format!("states: {}\n", scheme.states.join(", ")));
    let alphabet: Vec<String> = scheme
        .alphabet
        .canonical_order()
        .into_iter()
        .filter(|s| *s != scheme.alphabet.blank())
        .map(|s| s.to_string())
        .collect();
    out.push_str(&format!("alphabet: {}\n", alphabet.join(", ")));
    out.push_str(&format!("initial: {}\n", scheme.initial));
    if !scheme.finals.is_empty() {
        let finals: Vec<&str> = scheme.finals.iter().map(String::as_str).collect();
        out.push_str(&format!("finals: {}\n", finals.join(", ")));
    }
    for ((q, read), action) in &scheme.transitions {
        match (&action.target, action.movement) {
            (Target::Halt, Move::Stay) => out.push_str(&format!("({q}, {read}) -> ({}, !)\n", action.write)),
            (target, m) => out.push_str(&format!("({q}, {read}) -> ({}, {m}, {target})\n", action.write)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turing::fixtures::fig2_scheme;

    const FIG2: &str = "\
# stroke table
states: q0, q1, q2
alphabet: l, *
initial: q0
(q0, l) -> (Λ, D, q1)
(q0, *) -> (Λ, !)
(q1, Λ) -> (Λ, G, q2)
(q1, l) -> (l, D, q1)
(q1, *) -> (*, D, q1)
(q2, _) -> (_, D, q0)
(q2, l) -> (l, G, q2)
(q2, *) -> (*, G, q2)
";

    #[test]
    fn parses_fig2() {
        assert_eq!(parse_scheme(FIG2).unwrap(), fig2_scheme());
    }

    #[test]
    fn render_round_trips() {
        let s = fig2_scheme();
        assert_eq!(parse_scheme(&render_scheme(&s)).unwrap(), s);
    }

    #[test]
    fn bad_move_has_position() {
        let text = "states: q0\nalphabet: l\ninitial: q0\n(q0, l) -> (l, X, q0)\n";
        let e = parse_scheme(text).unwrap_err();
        assert_eq!((e.line, e.column), (4, 16));
        assert!(e.to_string().starts_with("line 4, column 16"));
    }

    #[test]
    fn unknown_key_and_missing_sections() {
        let e = parse_scheme("states: q0\n  colours: red\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        let e = parse_scheme("states: q0\nalphabet: l\n").unwrap_err();
        assert!(e.message.contains("initial"));
    }

    #[test]
    fn duplicate_transition_rejected() {
        let text = "states: q0\nalphabet: l\ninitial: q0\n(q0, l) -> (l, !)\n(q0, l) -> (l, D, q0)\n";
        let e = parse_scheme(text).unwrap_err();
        assert_eq!(e.line, 5);
    }

    #[test]
    fn multi_char_symbol_rejected() {
        let e = parse_scheme("states: q0\nalphabet: ab\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 11));
    }
}
