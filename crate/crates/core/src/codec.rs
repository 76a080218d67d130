//! Self-delimiting binary code for symbols, states and moves, and the
//! program-tape encoding of whole schemes.
//!
//! Every code word is `1 0^k 1`. Moves take `k` in 1..=3, external symbols
//! take even `k >= 4` and states odd `k >= 5`, so two adjacent code words
//! always meet in a `11`.
//!
//! Scheme layout, token by token:
//!
//! ```text
//! External(0) .. External(|Σ|-1)     one token per symbol, blank first
//! State(0) .. State(|Q|-1)           one token per state, initial first
//! Move(N)                            end of header
//! State(f) ..                        final states
//! Move(N)                            end of finals
//! [State(q) External(read) External(write) Move State(next)] ..
//! ```
//!
//! `State(|Q|)` in the `next` slot stands for the halt target.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::bits::BitString;
use crate::tape::{Alphabet, Move, Symbol};
use crate::turing::{Action, Target, TmScheme, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Token {
    External(u32),
    State(u32),
    Move(Move),
}

impl Token {
    /// Number of zeros between the two delimiting ones.
    pub fn zeros(self) -> usize {
        match self {
            Token::Move(Move::Right) => 1,
            Token::Move(Move::Left) => 2,
            Token::Move(Move::Stay) => 3,
            Token::External(i) => 4 + 2 * i as usize,
            Token::State(j) => 5 + 2 * j as usize,
        }
    }

    /// The token with `k` zeros; `None` for `k = 0`.
    pub fn from_zeros(k: usize) -> Option<Token> {
        match k {
            0 => None,
            1 => Some(Token::Move(Move::Right)),
            2 => Some(Token::Move(Move::Left)),
            3 => Some(Token::Move(Move::Stay)),
            k if k % 2 == 0 => Some(Token::External(((k - 4) / 2) as u32)),
            k => Some(Token::State(((k - 5) / 2) as u32)),
        }
    }

    pub fn bits(self) -> BitString {
        let mut out = BitString::new();
        self.append_to(&mut out);
        out
    }

    pub fn append_to(self, out: &mut BitString) {
        out.push(true);
        for _ in 0..self.zeros() {
            out.push(false);
        }
        out.push(true);
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::External(i) => write!(f, "External({i})"),
            Token::State(j) => write!(f, "State({j})"),
            Token::Move(m) => write!(f, "Move({m})"),
        }
    }
}

pub fn encode_token(token: Token) -> BitString {
    token.bits()
}

pub fn encode_tokens(tokens: &[Token]) -> BitString {
    let mut out = BitString::new();
    for t in tokens {
        t.append_to(&mut out);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("malformed code at offset {offset}: {reason}")]
    MalformedCode { offset: usize, reason: &'static str },
    #[error("incomplete transition record at token {token_index}: expected {expected}")]
    Arity { token_index: usize, expected: &'static str },
    #[error("unexpected {found} at token {token_index}: expected {expected}")]
    Unexpected {
        token_index: usize,
        found: Token,
        expected: &'static str,
    },
    #[error("invalid scheme: {0:?}")]
    InvalidScheme(Vec<Violation>),
}

/// Splits a bit string into code words, left to right.
pub fn decode_sequence(bits: &BitString) -> Result<Vec<Token>, CodecError> {
    let b = bits.as_slice();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let start = i;
        if !b[i] {
            return Err(CodecError::MalformedCode {
                offset: start,
                reason: "a code word must start with 1",
            });
        }
        i += 1;
        let zeros_from = i;
        while i < b.len() && !b[i] {
            i += 1;
        }
        if i == b.len() {
            return Err(CodecError::MalformedCode {
                offset: start,
                reason: "unterminated code word",
            });
        }
        let token = Token::from_zeros(i - zeros_from).ok_or(CodecError::MalformedCode {
            offset: start,
            reason: "empty code word 11",
        })?;
        out.push(token);
        i += 1;
    }
    Ok(out)
}

/// Name given to the `i`-th decoded symbol: blank, then digits and letters.
pub fn canonical_symbol(index: usize) -> Symbol {
    const NAMED: &str = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
    if index == 0 {
        return Symbol::BLANK;
    }
    match NAMED.chars().nth(index - 1) {
        Some(c) => Symbol(c),
        None => Symbol(char::from_u32(0xE000 + (index - 1 - NAMED.len()) as u32).expect("private use area")),
    }
}

pub fn canonical_state(index: usize) -> String {
    format!("q{index}")
}

pub fn encode_scheme(scheme: &TmScheme) -> Result<BitString, CodecError> {
    let violations = scheme.validate();
    if !violations.is_empty() {
        return Err(CodecError::InvalidScheme(violations));
    }
    let symbols = scheme.alphabet.canonical_order();
    let states = scheme.canonical_states();
    let sym_index: BTreeMap<Symbol, u32> = symbols.iter().enumerate().map(|(i, s)| (*s, i as u32)).collect();
    let state_index: BTreeMap<&str, u32> = states.iter().enumerate().map(|(i, q)| (q.as_str(), i as u32)).collect();
    let halt = states.len() as u32;

    let mut tokens: Vec<Token> = (0..symbols.len() as u32).map(Token::External).collect();
    tokens.extend((0..states.len() as u32).map(Token::State));
    tokens.push(Token::Move(Move::Stay));
    let mut finals: Vec<u32> = scheme.finals.iter().map(|q| state_index[q.as_str()]).collect();
    finals.sort_unstable();
    tokens.extend(finals.into_iter().map(Token::State));
    tokens.push(Token::Move(Move::Stay));

    let mut records: Vec<[Token; 5]> = scheme
        .transitions
        .iter()
        .map(|((q, read), action)| {
            let next = match &action.target {
                Target::State(n) => state_index[n.as_str()],
                Target::Halt => halt,
            };
            [
                Token::State(state_index[q.as_str()]),
                Token::External(sym_index[read]),
                Token::External(sym_index[&action.write]),
                Token::Move(action.movement),
                Token::State(next),
            ]
        })
        .collect();
    records.sort();
    tokens.extend(records.into_iter().flatten());
    Ok(encode_tokens(&tokens))
}

/// Decodes a scheme; symbols and states get canonical names
/// ([`canonical_symbol`], [`canonical_state`]).
pub fn decode_scheme(bits: &BitString) -> Result<TmScheme, CodecError> {
    let tokens = decode_sequence(bits)?;
    let mut pos = 0;
    let unexpected = |pos: usize, expected: &'static str| -> CodecError {
        match tokens.get(pos) {
            Some(t) => CodecError::Unexpected {
                token_index: pos,
                found: *t,
                expected,
            },
            None => CodecError::Arity {
                token_index: pos,
                expected,
            },
        }
    };

    let mut n_symbols = 0u32;
    while let Some(Token::External(i)) = tokens.get(pos) {
        if *i != n_symbols {
            return Err(unexpected(pos, "symbols numbered in order"));
        }
        n_symbols += 1;
        pos += 1;
    }
    if n_symbols == 0 {
        return Err(unexpected(pos, "at least the blank symbol"));
    }
    let mut n_states = 0u32;
    while let Some(Token::State(j)) = tokens.get(pos) {
        if *j != n_states {
            return Err(unexpected(pos, "states numbered in order"));
        }
        n_states += 1;
        pos += 1;
    }
    if n_states == 0 {
        return Err(unexpected(pos, "at least one state"));
    }
    if tokens.get(pos) != Some(&Token::Move(Move::Stay)) {
        return Err(unexpected(pos, "end-of-header marker"));
    }
    pos += 1;

    let symbol = |i: u32, pos: usize| -> Result<Symbol, CodecError> {
        if i < n_symbols {
            Ok(canonical_symbol(i as usize))
        } else {
            Err(unexpected(pos, "a declared symbol"))
        }
    };
    let state = |j: u32, pos: usize| -> Result<String, CodecError> {
        if j < n_states {
            Ok(canonical_state(j as usize))
        } else {
            Err(unexpected(pos, "a declared state"))
        }
    };

    let mut finals = Vec::new();
    loop {
        match tokens.get(pos) {
            Some(Token::State(j)) => finals.push(state(*j, pos)?),
            Some(Token::Move(Move::Stay)) => break,
            _ => return Err(unexpected(pos, "final state or end-of-finals marker")),
        }
        pos += 1;
    }
    pos += 1;

    let alphabet = Alphabet::new((0..n_symbols as usize).map(canonical_symbol), Symbol::BLANK);
    let mut scheme = TmScheme::new((0..n_states as usize).map(canonical_state), alphabet, canonical_state(0))
        .with_finals(finals);
    while pos < tokens.len() {
        let Token::State(q) = tokens[pos] else {
            return Err(unexpected(pos, "record source state"));
        };
        let q = state(q, pos)?;
        let Some(Token::External(read)) = tokens.get(pos + 1) else {
            return Err(unexpected(pos + 1, "record read symbol"));
        };
        let read = symbol(*read, pos + 1)?;
        let Some(Token::External(write)) = tokens.get(pos + 2) else {
            return Err(unexpected(pos + 2, "record written symbol"));
        };
        let write = symbol(*write, pos + 2)?;
        let Some(Token::Move(movement)) = tokens.get(pos + 3) else {
            return Err(unexpected(pos + 3, "record move"));
        };
        let Some(Token::State(next)) = tokens.get(pos + 4) else {
            return Err(unexpected(pos + 4, "record next state"));
        };
        let target = if *next == n_states {
            Target::Halt
        } else {
            Target::State(state(*next, pos + 4)?)
        };
        if scheme.transition(&q, read).is_some() {
            return Err(unexpected(pos, "at most one record per (state, symbol)"));
        }
        scheme = scheme.with(&q, read, Action::new(write, *movement, target));
        pos += 5;
    }
    Ok(scheme)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::turing::fixtures::{fig2_scheme, unary_addition_scheme};
    use crate::turing::{scheme_tape, tm_run};
    use proptest::prelude::*;

    #[test]
    fn single_tokens() {
        assert_eq!(decode_sequence(&bits("100001")).unwrap(), vec![Token::External(0)]);
        assert_eq!(decode_sequence(&bits("1000001")).unwrap(), vec![Token::State(0)]);
        assert_eq!(encode_token(Token::External(0)), bits("100001"));
        assert_eq!(encode_token(Token::State(0)), bits("1000001"));
        assert_eq!(encode_token(Token::Move(Move::Right)), bits("101"));
        assert_eq!(encode_token(Token::Move(Move::Left)), bits("1001"));
        assert_eq!(encode_token(Token::Move(Move::Stay)), bits("10001"));
    }

    #[test]
    fn three_token_stream() {
        let tokens = decode_sequence(&bits("1000000110011000001")).unwrap();
        assert_eq!(tokens, vec![Token::External(1), Token::Move(Move::Left), Token::State(0)]);
        assert_eq!(tokens.iter().map(|t| t.zeros()).collect::<Vec<_>>(), vec![6, 2, 5]);
    }

    #[test]
    fn empty_stream() {
        assert_eq!(decode_sequence(&BitString::new()).unwrap(), vec![]);
    }

    #[test]
    fn residue_reports_offset() {
        let e = decode_sequence(&bits("10001001")).unwrap_err();
        assert!(matches!(e, CodecError::MalformedCode { offset: 5, .. }));
        let e = decode_sequence(&bits("11")).unwrap_err();
        assert!(matches!(e, CodecError::MalformedCode { offset: 0, .. }));
        let e = decode_sequence(&bits("1011000")).unwrap_err();
        assert!(matches!(e, CodecError::MalformedCode { offset: 3, .. }));
    }

    #[test]
    fn fig2_round_trip_is_isomorphic() {
        let s = fig2_scheme();
        let encoded = encode_scheme(&s).unwrap();
        let decoded = decode_scheme(&encoded).unwrap();
        assert!(decoded.is_valid());
        assert_eq!(encode_scheme(&decoded).unwrap(), encoded);
        // Same behaviour under the renaming Λ->Λ, *->0, l->1.
        let run = tm_run(&s, scheme_tape(&s, "ll*lll").unwrap(), 0, 100).unwrap();
        let run2 = tm_run(&decoded, scheme_tape(&decoded, "110111").unwrap(), 0, 100).unwrap();
        assert_eq!(run.trace.len(), run2.trace.len());
        assert_eq!(run2.outcome.tape().literal(), "111");
    }

    #[test]
    fn header_only_scheme() {
        let s = TmScheme::new(["a", "b"], Alphabet::binary(), "b").with_finals(["a"]);
        let decoded = decode_scheme(&encode_scheme(&s).unwrap()).unwrap();
        assert!(decoded.transitions.is_empty());
        assert_eq!(decoded.states.len(), 2);
        assert_eq!(decoded.finals.iter().collect::<Vec<_>>(), vec!["q1"]);
    }

    #[test]
    fn truncated_record_is_arity_error() {
        let mut tokens = decode_sequence(&encode_scheme(&unary_addition_scheme()).unwrap()).unwrap();
        tokens.truncate(tokens.len() - 2);
        let e = decode_scheme(&encode_tokens(&tokens)).unwrap_err();
        assert!(matches!(e, CodecError::Arity { .. }), "{e}");
    }

    #[test]
    fn invalid_scheme_not_encoded() {
        let mut s = fig2_scheme();
        s.initial = "zz".into();
        assert!(matches!(encode_scheme(&s), Err(CodecError::InvalidScheme(_))));
    }

    #[test]
    fn many_symbols_get_distinct_names() {
        let names: std::collections::BTreeSet<Symbol> = (0..200).map(canonical_symbol).collect();
        assert_eq!(names.len(), 200);
    }

    fn token() -> impl Strategy<Value = Token> {
        prop_oneof![
            (0u32..40).prop_map(Token::External),
            (0u32..40).prop_map(Token::State),
            prop_oneof![Just(Move::Left), Just(Move::Right), Just(Move::Stay)].prop_map(Token::Move),
        ]
    }

    proptest! {
        #[test]
        fn round_trip(tokens in proptest::collection::vec(token(), 0..30)) {
            prop_assert_eq!(decode_sequence(&encode_tokens(&tokens)).unwrap(), tokens);
        }

        #[test]
        fn decoded_tokens_reencode_identically(raw in proptest::collection::vec(any::<bool>(), 0..40)) {
            let b = BitString::from_bits(raw);
            if let Ok(tokens) = decode_sequence(&b) {
                prop_assert_eq!(encode_tokens(&tokens), b);
            }
        }
    }
}
