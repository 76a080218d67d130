//! Program-tape instruction set, its bit encoding and an incremental
//! decoder that the machines feed one program bit per step.
//!
//! An instruction is a short run of code words ([`crate::codec`]); the
//! opcode is a `State` token, operands are `External` or `Move` tokens.
//!
//! | opcode     | operands                                       | assembler            |
//! |------------|------------------------------------------------|----------------------|
//! | `State(0)` |                                                | `HALT`               |
//! | `State(1)` | `Move`                                         | `MOVE G`             |
//! | `State(2)` | `External(0 = Λ, 1 = 0, 2 = 1)`                | `WRITE 1`            |
//! | `State(3)` | three instructions, for Λ, 0 and 1             | `READ {HALT \| EMIT 0 \| EMIT 1}` |
//! | `State(4)` | `External(1 = 0, 2 = 1)`                       | `EMIT 0`             |
//! | `State(5)` | `Move` sign, `External(magnitude)`, bit        | `PWRITE -3 1`        |
//! | `State(6)` | `External(channel)`, bits.., `Move(N)`         | `SEND 0 101`         |
//! | `State(7)` | `External(0 = result, 1 = work, 2 + id)`       | `REPLICATE @4`       |
//!
//! The sign of `PWRITE` is `Move(D)` for `+`, `Move(G)` for `-` and
//! `Move(N)` for an offset of zero. Entries of `READ` cannot themselves be
//! `READ`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::bits::BitString;
use crate::codec::Token;
use crate::tape::{Move, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ReplicateTarget {
    Result,
    LocalWork,
    Remote(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Instruction {
    Halt,
    WorkMove(Move),
    WorkWrite(Symbol),
    /// Entries for a work cell holding Λ, 0 and 1.
    ReadDispatch(Box<[Instruction; 3]>),
    Emit(bool),
    ProgWrite { offset: i64, bit: bool },
    Send { channel: u32, payload: BitString },
    Replicate(ReplicateTarget),
}

fn symbol_index(s: Symbol) -> u32 {
    match s.as_bit() {
        None => 0,
        Some(false) => 1,
        Some(true) => 2,
    }
}

fn bit_token(bit: bool) -> Token {
    Token::External(1 + bit as u32)
}

impl Instruction {
    pub fn dispatch(on_blank: Instruction, on_zero: Instruction, on_one: Instruction) -> Instruction {
        Instruction::ReadDispatch(Box::new([on_blank, on_zero, on_one]))
    }

    pub fn tokens(&self) -> Vec<Token> {
        let mut out = Vec::new();
        self.push_tokens(&mut out);
        out
    }

    fn push_tokens(&self, out: &mut Vec<Token>) {
        match self {
            Instruction::Halt => out.push(Token::State(0)),
            Instruction::WorkMove(m) => out.extend([Token::State(1), Token::Move(*m)]),
            Instruction::WorkWrite(s) => out.extend([Token::State(2), Token::External(symbol_index(*s))]),
            Instruction::ReadDispatch(entries) => {
                out.push(Token::State(3));
                for e in entries.iter() {
                    e.push_tokens(out);
                }
            }
            Instruction::Emit(b) => out.extend([Token::State(4), bit_token(*b)]),
            Instruction::ProgWrite { offset, bit } => {
                let sign = match offset.signum() {
                    1 => Move::Right,
                    -1 => Move::Left,
                    _ => Move::Stay,
                };
                out.extend([
                    Token::State(5),
                    Token::Move(sign),
                    Token::External(offset.unsigned_abs() as u32),
                    bit_token(*bit),
                ]);
            }
            Instruction::Send { channel, payload } => {
                out.extend([Token::State(6), Token::External(*channel)]);
                out.extend(payload.iter().map(bit_token));
                out.push(Token::Move(Move::Stay));
            }
            Instruction::Replicate(target) => {
                let code = match target {
                    ReplicateTarget::Result => 0,
                    ReplicateTarget::LocalWork => 1,
                    ReplicateTarget::Remote(id) => 2 + id,
                };
                out.extend([Token::State(7), Token::External(code)]);
            }
        }
    }

    pub fn encode(&self) -> BitString {
        crate::codec::encode_tokens(&self.tokens())
    }
}

/// Concatenated encoding of a program.
pub fn program_bits(program: &[Instruction]) -> BitString {
    let mut out = BitString::new();
    for i in program {
        out.extend_from(&i.encode());
    }
    out
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Halt => write!(f, "HALT"),
            Instruction::WorkMove(m) => write!(f, "MOVE {m}"),
            Instruction::WorkWrite(s) => match s.as_bit() {
                Some(b) => write!(f, "WRITE {}", b as u8),
                None => write!(f, "WRITE _"),
            },
            Instruction::ReadDispatch(e) => write!(f, "READ {{{} | {} | {}}}", e[0], e[1], e[2]),
            Instruction::Emit(b) => write!(f, "EMIT {}", *b as u8),
            Instruction::ProgWrite { offset, bit } => {
                if *offset > 0 {
                    write!(f, "PWRITE +{offset} {}", *bit as u8)
                } else {
                    write!(f, "PWRITE {offset} {}", *bit as u8)
                }
            }
            Instruction::Send { channel, payload } => write!(f, "SEND {channel} {payload}"),
            Instruction::Replicate(ReplicateTarget::Result) => write!(f, "REPLICATE result"),
            Instruction::Replicate(ReplicateTarget::LocalWork) => write!(f, "REPLICATE work"),
            Instruction::Replicate(ReplicateTarget::Remote(id)) => write!(f, "REPLICATE @{id}"),
        }
    }
}

enum Parse {
    NeedMore,
    Done(Instruction, usize),
    Invalid(&'static str),
}

fn parse(tokens: &[Token], nested: bool) -> Parse {
    use Parse::*;
    let Some(first) = tokens.first() else {
        return NeedMore;
    };
    let Token::State(op) = *first else {
        return Invalid("opcode must be a state token");
    };
    let operand = |i: usize| tokens.get(i).copied();
    let bit_at = |i: usize| match operand(i) {
        None => Err(NeedMore),
        Some(Token::External(1)) => Ok(false),
        Some(Token::External(2)) => Ok(true),
        Some(_) => Err(Invalid("expected a bit operand")),
    };
    match op {
        0 => Done(Instruction::Halt, 1),
        1 => match operand(1) {
            None => NeedMore,
            Some(Token::Move(m)) => Done(Instruction::WorkMove(m), 2),
            Some(_) => Invalid("MOVE expects a move operand"),
        },
        2 => match operand(1) {
            None => NeedMore,
            Some(Token::External(0)) => Done(Instruction::WorkWrite(Symbol::BLANK), 2),
            Some(Token::External(1)) => Done(Instruction::WorkWrite(Symbol::ZERO), 2),
            Some(Token::External(2)) => Done(Instruction::WorkWrite(Symbol::ONE), 2),
            Some(_) => Invalid("WRITE expects Λ, 0 or 1"),
        },
        3 => {
            if nested {
                return Invalid("READ entries cannot be READ");
            }
            let mut at = 1;
            let mut entries = Vec::with_capacity(3);
            for _ in 0..3 {
                match parse(&tokens[at.min(tokens.len())..], true) {
                    Done(i, used) => {
                        entries.push(i);
                        at += used;
                    }
                    other => return other,
                }
            }
            let [a, b, c]: [Instruction; 3] = entries.try_into().expect("three entries");
            Done(Instruction::dispatch(a, b, c), at)
        }
        4 => match bit_at(1) {
            Ok(b) => Done(Instruction::Emit(b), 2),
            Err(p) => p,
        },
        5 => {
            let sign = match operand(1) {
                None => return NeedMore,
                Some(Token::Move(m)) => m,
                Some(_) => return Invalid("PWRITE expects a sign"),
            };
            let magnitude = match operand(2) {
                None => return NeedMore,
                Some(Token::External(k)) => k as i64,
                Some(_) => return Invalid("PWRITE expects a magnitude"),
            };
            let offset = match (sign, magnitude) {
                (Move::Stay, 0) => 0,
                (Move::Right, k) if k > 0 => k,
                (Move::Left, k) if k > 0 => -k,
                _ => return Invalid("PWRITE sign does not match magnitude"),
            };
            match bit_at(3) {
                Ok(bit) => Done(Instruction::ProgWrite { offset, bit }, 4),
                Err(p) => p,
            }
        }
        6 => {
            let channel = match operand(1) {
                None => return NeedMore,
                Some(Token::External(c)) => c,
                Some(_) => return Invalid("SEND expects a channel"),
            };
            let mut payload = BitString::new();
            let mut at = 2;
            loop {
                match operand(at) {
                    None => return NeedMore,
                    Some(Token::Move(Move::Stay)) if !payload.is_empty() => {
                        return Done(Instruction::Send { channel, payload }, at + 1)
                    }
                    Some(Token::External(1)) => payload.push(false),
                    Some(Token::External(2)) => payload.push(true),
                    Some(_) => return Invalid("SEND payload must be bits ended by Move(N)"),
                }
                at += 1;
            }
        }
        7 => match operand(1) {
            None => NeedMore,
            Some(Token::External(0)) => Done(Instruction::Replicate(ReplicateTarget::Result), 2),
            Some(Token::External(1)) => Done(Instruction::Replicate(ReplicateTarget::LocalWork), 2),
            Some(Token::External(k)) => Done(Instruction::Replicate(ReplicateTarget::Remote(k - 2)), 2),
            Some(_) => Invalid("REPLICATE expects a target"),
        },
        _ => Invalid("unknown opcode"),
    }
}

/// Outcome of feeding one bit to a [`Decoder`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feed {
    NeedMore,
    Complete(Instruction),
    Invalid(&'static str),
}

/// Assembles instructions from a bit stream, one bit at a time.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Decoder {
    /// `None` between code words, `Some(k)` after a leading 1 and `k` zeros.
    zeros: Option<usize>,
    tokens: Vec<Token>,
    invalid: Option<&'static str>,
}

impl Decoder {
    pub fn new() -> Decoder {
        Decoder::default()
    }

    /// True when no partial instruction is pending.
    pub fn is_idle(&self) -> bool {
        self.zeros.is_none() && self.tokens.is_empty() && self.invalid.is_none()
    }

    pub fn feed(&mut self, bit: bool) -> Feed {
        if let Some(reason) = self.invalid {
            return Feed::Invalid(reason);
        }
        let token = match (self.zeros, bit) {
            (None, true) => {
                self.zeros = Some(0);
                return Feed::NeedMore;
            }
            (None, false) => return self.fail("code word must start with 1"),
            (Some(k), false) => {
                self.zeros = Some(k + 1);
                return Feed::NeedMore;
            }
            (Some(k), true) => match Token::from_zeros(k) {
                Some(t) => t,
                None => return self.fail("empty code word"),
            },
        };
        self.zeros = None;
        self.tokens.push(token);
        match parse(&self.tokens, false) {
            Parse::NeedMore => Feed::NeedMore,
            Parse::Invalid(reason) => self.fail(reason),
            Parse::Done(instruction, used) => {
                debug_assert_eq!(used, self.tokens.len());
                self.tokens.clear();
                Feed::Complete(instruction)
            }
        }
    }

    /// What feeding `bit` would produce, without changing the decoder.
    pub fn peek(&self, bit: bool) -> Feed {
        self.clone().feed(bit)
    }

    fn fail(&mut self, reason: &'static str) -> Feed {
        self.invalid = Some(reason);
        Feed::Invalid(reason)
    }
}

/// Decodes a whole bit string into instructions. Returns the instructions
/// and, if the string does not end on an instruction boundary, the bit
/// offset where decoding stopped with a reason.
pub fn disassemble(bits: &BitString) -> (Vec<Instruction>, Option<(usize, &'static str)>) {
    let mut decoder = Decoder::new();
    let mut out = Vec::new();
    let mut start = 0;
    for (i, b) in bits.iter().enumerate() {
        match decoder.feed(b) {
            Feed::NeedMore => {}
            Feed::Complete(ins) => {
                out.push(ins);
                start = i + 1;
            }
            Feed::Invalid(reason) => return (out, Some((i, reason))),
        }
    }
    if decoder.is_idle() {
        (out, None)
    } else {
        (out, Some((start, "program ends inside an instruction")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct AsmError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn parse_bit(word: &str) -> Option<bool> {
    match word {
        "0" => Some(false),
        "1" => Some(true),
        _ => None,
    }
}

fn assemble_one(text: &str, nested: bool) -> Result<Instruction, String> {
    let text = text.trim();
    let (op, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    let rest = rest.trim();
    let args: Vec<&str> = rest.split_whitespace().collect();
    let op_upper = op.to_ascii_uppercase();
    let arity = |n: usize| -> Result<(), String> {
        if args.len() == n {
            Ok(())
        } else {
            Err(format!("{op_upper} takes {n} operand(s), found {}", args.len()))
        }
    };
    match op_upper.as_str() {
        "HALT" => arity(0).map(|_| Instruction::Halt),
        "MOVE" => {
            arity(1)?;
            let mut c = args[0].chars();
            match (c.next().and_then(Move::from_letter), c.next()) {
                (Some(m), None) => Ok(Instruction::WorkMove(m)),
                _ => Err(format!("bad move {:?}", args[0])),
            }
        }
        "WRITE" => {
            arity(1)?;
            match args[0] {
                "0" => Ok(Instruction::WorkWrite(Symbol::ZERO)),
                "1" => Ok(Instruction::WorkWrite(Symbol::ONE)),
                "_" | "Λ" => Ok(Instruction::WorkWrite(Symbol::BLANK)),
                other => Err(format!("bad symbol {other:?}")),
            }
        }
        "READ" => {
            if nested {
                return Err("READ entries cannot be READ".into());
            }
            let body = rest
                .strip_prefix('{')
                .and_then(|r| r.strip_suffix('}'))
                .ok_or("READ expects {blank | zero | one}")?;
            let entries: Vec<&str> = body.split('|').collect();
            if entries.len() != 3 {
                return Err(format!("READ needs 3 entries, found {}", entries.len()));
            }
            Ok(Instruction::dispatch(
                assemble_one(entries[0], true)?,
                assemble_one(entries[1], true)?,
                assemble_one(entries[2], true)?,
            ))
        }
        "EMIT" => {
            arity(1)?;
            parse_bit(args[0])
                .map(Instruction::Emit)
                .ok_or_else(|| format!("bad bit {:?}", args[0]))
        }
        "PWRITE" => {
            arity(2)?;
            let offset: i64 = args[0]
                .trim_start_matches('+')
                .parse()
                .map_err(|_| format!("bad offset {:?}", args[0]))?;
            let bit = parse_bit(args[1]).ok_or_else(|| format!("bad bit {:?}", args[1]))?;
            Ok(Instruction::ProgWrite { offset, bit })
        }
        "SEND" => {
            arity(2)?;
            let channel = args[0].parse().map_err(|_| format!("bad channel {:?}", args[0]))?;
            let payload: BitString = args[1].parse().map_err(|e| format!("bad payload: {e}"))?;
            if payload.is_empty() {
                return Err("SEND needs a non-empty payload".into());
            }
            Ok(Instruction::Send { channel, payload })
        }
        "REPLICATE" => {
            arity(1)?;
            let target = match args[0] {
                "result" => ReplicateTarget::Result,
                "work" => ReplicateTarget::LocalWork,
                other => ReplicateTarget::Remote(
                    other
                        .strip_prefix('@')
                        .and_then(|id| id.parse().ok())
                        .ok_or_else(|| format!("bad target {other:?}"))?,
                ),
            };
            Ok(Instruction::Replicate(target))
        }
        "" => Err("empty instruction".into()),
        other => Err(format!("unknown instruction {other:?}")),
    }
}

/// Assembles a program. Instructions are separated by newlines or `;`,
/// `#` starts a comment.
pub fn assemble(text: &str) -> Result<Vec<Instruction>, AsmError> {
    let mut out = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let mut column = 1;
        for piece in content.split(';') {
            if !piece.trim().is_empty() {
                let lead = piece.chars().count() - piece.trim_start().chars().count();
                out.push(assemble_one(piece, false).map_err(|message| AsmError {
                    line: index + 1,
                    column: column + lead,
                    message,
                })?);
            }
            column += piece.chars().count() + 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn decode_all(bits: &BitString) -> Vec<Feed> {
        let mut d = Decoder::new();
        bits.iter().map(|b| d.feed(b)).collect()
    }

    #[test]
    fn halt_is_state_zero() {
        assert_eq!(Instruction::Halt.encode().to_string(), "1000001");
        let feeds = decode_all(&Instruction::Halt.encode());
        assert_eq!(feeds.last(), Some(&Feed::Complete(Instruction::Halt)));
        assert!(feeds[..6].iter().all(|f| *f == Feed::NeedMore));
    }

    #[test]
    fn assembler_round_trip() {
        let text = "REPLICATE work; MOVE D\nREAD {HALT | EMIT 0 | EMIT 1}  # copy\nPWRITE -3 1; PWRITE 0 0; PWRITE +2 1\nSEND 3 101\nWRITE _; REPLICATE @5; REPLICATE result";
        let program = assemble(text).unwrap();
        assert_eq!(program.len(), 10);
        let bits = program_bits(&program);
        let (back, rest) = disassemble(&bits);
        assert_eq!(rest, None);
        assert_eq!(back, program);
        let rendered: Vec<String> = program.iter().map(|i| i.to_string()).collect();
        assert_eq!(assemble(&rendered.join("\n")).unwrap(), program);
    }

    #[test]
    fn assembler_errors_have_position() {
        let e = assemble("HALT\nMOVE D; JUMP 3").unwrap_err();
        assert_eq!((e.line, e.column), (2, 9));
        assert!(assemble("READ {READ {HALT|HALT|HALT} | HALT | HALT}").is_err());
        assert!(assemble("SEND 0").is_err());
    }

    #[test]
    fn invalid_streams() {
        assert!(matches!(decode_all(&crate::bits::bits("0"))[0], Feed::Invalid(_)));
        assert!(matches!(decode_all(&crate::bits::bits("11"))[1], Feed::Invalid(_)));
        // Opcode State(8) does not exist.
        let unknown = Token::State(8).bits();
        assert!(matches!(decode_all(&unknown).last(), Some(Feed::Invalid(_))));
        // An External token where an opcode belongs.
        assert!(matches!(decode_all(&Token::External(0).bits()).last(), Some(Feed::Invalid(_))));
        // PWRITE with sign D and magnitude 0.
        let t = crate::codec::encode_tokens(&[
            Token::State(5),
            Token::Move(Move::Right),
            Token::External(0),
            Token::External(1),
        ]);
        assert!(matches!(decode_all(&t).last(), Some(Feed::Invalid(_))));
    }

    #[test]
    fn peek_leaves_decoder_alone() {
        let bits = Instruction::Emit(true).encode();
        let mut d = Decoder::new();
        for b in bits.iter().take(bits.len() - 1) {
            d.feed(b);
        }
        let before = d.clone();
        assert_eq!(d.peek(true), Feed::Complete(Instruction::Emit(true)));
        assert_eq!(d, before);
    }

    fn leaf() -> impl Strategy<Value = Instruction> {
        prop_oneof![
            Just(Instruction::Halt),
            prop_oneof![Just(Move::Left), Just(Move::Right), Just(Move::Stay)].prop_map(Instruction::WorkMove),
            prop_oneof![Just(Symbol::BLANK), Just(Symbol::ZERO), Just(Symbol::ONE)].prop_map(Instruction::WorkWrite),
            any::<bool>().prop_map(Instruction::Emit),
            (-20i64..20, any::<bool>()).prop_map(|(offset, bit)| Instruction::ProgWrite { offset, bit }),
            (0u32..4, proptest::collection::vec(any::<bool>(), 1..5))
                .prop_map(|(channel, p)| Instruction::Send { channel, payload: BitString::from_bits(p) }),
            prop_oneof![
                Just(ReplicateTarget::Result),
                Just(ReplicateTarget::LocalWork),
                (0u32..6).prop_map(ReplicateTarget::Remote)
            ]
            .prop_map(Instruction::Replicate),
        ]
    }

    fn instruction() -> impl Strategy<Value = Instruction> {
        prop_oneof![
            3 => leaf(),
            1 => (leaf(), leaf(), leaf()).prop_map(|(a, b, c)| Instruction::dispatch(a, b, c)),
        ]
    }

    proptest! {
        #[test]
        fn encode_decode_identity(program in proptest::collection::vec(instruction(), 0..12)) {
            let (back, rest) = disassemble(&program_bits(&program));
            prop_assert_eq!(rest, None);
            prop_assert_eq!(back, program);
        }

        #[test]
        fn display_assembles_back(i in instruction()) {
            prop_assert_eq!(assemble(&i.to_string()).unwrap(), vec![i]);
        }
    }
}
