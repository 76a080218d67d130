//! The Universal Calculator: a program tape read forward one cell per step,
//! a bidirectional work tape and a result tape written forward.
//!
//! Program bits are decoded into [`Instruction`]s by [`Decoder`]; an
//! instruction takes effect in the step that reads its last bit. The
//! calculator has no program-write head and no links to other machines, so
//! `PWRITE`, `SEND` and `REPLICATE @id` are read and ignored.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::bits::BitString;
use crate::isa::{program_bits, Decoder, Feed, Instruction, ReplicateTarget};
use crate::tape::{Boundedness, Discipline, Head, HeadAction, Move, Symbol, Tape, TapeError};

/// What follows the explicit prefix of a program.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Suffix {
    /// Nothing: the tape is blank after the prefix.
    None,
    /// The pattern repeated forever.
    Cycle(BitString),
    /// Pseudo-random bits from [`crate::rng::random_bit`].
    Random(u64),
}

/// A possibly infinite program: explicit bits followed by a generated tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProgramSource {
    pub prefix: BitString,
    pub suffix: Suffix,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SourceError {
    #[error("unknown generator {0:?}; known: copy, idle, random:<seed>")]
    UnknownGenerator(String),
    #[error(transparent)]
    Bits(#[from] crate::bits::NotABit),
}

impl ProgramSource {
    pub fn finite(bits: BitString) -> ProgramSource {
        ProgramSource {
            prefix: bits,
            suffix: Suffix::None,
        }
    }

    pub fn program(instructions: &[Instruction]) -> ProgramSource {
        ProgramSource::finite(program_bits(instructions))
    }

    /// Built-in infinite programs:
    /// `copy` repeats `READ {HALT | EMIT 0 | EMIT 1}; MOVE D`,
    /// `idle` repeats `MOVE N`,
    /// `random:<seed>` is an endless pseudo-random bit stream.
    pub fn generator(name: &str) -> Result<ProgramSource, SourceError> {
        let suffix = match name {
            "copy" => Suffix::Cycle(program_bits(&copy_loop())),
            "idle" => Suffix::Cycle(Instruction::WorkMove(Move::Stay).encode()),
            other => match other.strip_prefix("random:").and_then(|s| s.parse().ok()) {
                Some(seed) => Suffix::Random(seed),
                None => return Err(SourceError::UnknownGenerator(name.to_string())),
            },
        };
        Ok(ProgramSource {
            prefix: BitString::new(),
            suffix,
        })
    }

    /// Parses a program file: ASCII bits (whitespace and `#` comments
    /// ignored), optionally followed by `@generator:<name>`.
    pub fn parse(text: &str) -> Result<ProgramSource, SourceError> {
        let text: String = text
            .lines()
            .map(|l| l.split_once('#').map_or(l, |(code, _)| code))
            .collect::<Vec<_>>()
            .join("\n");
        let (bits, generator) = match text.find("@generator:") {
            Some(at) => (&text[..at], Some(text[at + "@generator:".len()..].trim())),
            None => (text.as_str(), None),
        };
        let prefix: String = bits.chars().filter(|c| !c.is_whitespace()).collect();
        let prefix: BitString = prefix.parse()?;
        let suffix = match generator {
            Some(name) => ProgramSource::generator(name)?.suffix,
            None => Suffix::None,
        };
        Ok(ProgramSource { prefix, suffix })
    }

    pub fn then(mut self, suffix: Suffix) -> ProgramSource {
        self.suffix = suffix;
        self
    }

    /// The program bit at `index`, `None` past the end of a finite program.
    pub fn bit(&self, index: usize) -> Option<bool> {
        if let Some(b) = self.prefix.get(index) {
            return Some(b);
        }
        let rest = index - self.prefix.len();
        match &self.suffix {
            Suffix::None => None,
            Suffix::Cycle(p) if p.is_empty() => None,
            Suffix::Cycle(p) => p.get(rest % p.len()),
            Suffix::Random(seed) => Some(crate::rng::random_bit(*seed, rest as u64)),
        }
    }

    /// Appends one bit to the explicit prefix.
    pub fn push(&mut self, bit: bool) {
        self.prefix.push(bit);
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.suffix, Suffix::None) || matches!(&self.suffix, Suffix::Cycle(p) if p.is_empty())
    }
}

impl fmt::Display for ProgramSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.prefix)?;
        match &self.suffix {
            Suffix::None => Ok(()),
            Suffix::Cycle(p) => write!(f, "({p})*"),
            Suffix::Random(seed) => write!(f, "@generator:random:{seed}"),
        }
    }
}

/// `READ {HALT | EMIT 0 | EMIT 1}; MOVE D`: one round of copying the work
/// tape to the result tape.
pub fn copy_loop() -> Vec<Instruction> {
    vec![
        Instruction::dispatch(Instruction::Halt, Instruction::Emit(false), Instruction::Emit(true)),
        Instruction::WorkMove(Move::Right),
    ]
}

/// A finite program copying a work word of length `len` to the result tape.
pub fn copy_program(len: usize) -> Vec<Instruction> {
    let mut out: Vec<Instruction> = (0..len).flat_map(|_| copy_loop()).collect();
    out.push(copy_loop().remove(0));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    Running,
    Halted,
    /// The program bits do not decode to an instruction.
    Stuck,
    /// The read head found a blank program cell outside a copy.
    Exhausted,
}

/// What a calculator-shaped machine did in one step, as seen on its three
/// tapes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct StepRecord {
    pub step: u64,
    pub program_position: i64,
    pub program_read: Symbol,
    /// The instruction completed by this step's bit.
    pub instruction: Option<Instruction>,
    pub work_read: Option<Symbol>,
    pub work_write: Option<(i64, Symbol)>,
    pub work_head: i64,
    pub result_append: Option<bool>,
    /// The instruction needs a head or link this machine does not use.
    pub ignored: bool,
    pub status: Status,
}

/// Controller mode: decoding instructions, or copying the rest of the
/// program tape somewhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Mode {
    Fetch,
    Copy(ReplicateTarget),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cu {
    source: ProgramSource,
    program: Tape,
    work: Tape,
    result: Tape,
    r: Head,
    n: Head,
    v: Head,
    decoder: Decoder,
    mode: Mode,
    status: Status,
    steps: u64,
}

impl Cu {
    pub fn new(source: ProgramSource, data: &BitString) -> Cu {
        let program = Tape::blank_binary(Boundedness::LeftBounded);
        let work = Tape::from_bits(data.iter(), Boundedness::Unbounded);
        let result = Tape::blank_binary(Boundedness::LeftBounded);
        Cu {
            r: Head::new(0, Discipline::ReadForwardOnly, false),
            n: Head::new(0, Discipline::ReadWriteBidirectional, true),
            v: Head::new(0, Discipline::WriteForwardOnly, false),
            source,
            program,
            work,
            result,
            decoder: Decoder::new(),
            mode: Mode::Fetch,
            status: Status::Running,
            steps: 0,
        }
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn source_mut(&mut self) -> &mut ProgramSource {
        &mut self.source
    }

    pub fn work(&self) -> &Tape {
        &self.work
    }

    pub fn result_bits(&self) -> BitString {
        self.result.word()
    }

    /// The program cells read so far.
    pub fn consumed_prefix(&self) -> BitString {
        (0..self.r.position()).filter_map(|i| self.program.read(i).as_bit()).collect()
    }

    /// Runs one step. Errors signal a broken head discipline, which would
    /// be a bug in the controller.
    pub fn step(&mut self) -> Result<StepRecord, TapeError> {
        assert_eq!(self.status, Status::Running, "step on a stopped calculator");
        let position = self.r.position();
        if let Some(bit) = self.source.bit(position as usize) {
            self.program.write(position, Symbol::from_bit(bit))?;
        }
        let read = self.r.apply(&mut self.program, HeadAction::Read)?.expect("read");
        self.r.apply(&mut self.program, HeadAction::Move(Move::Right))?;
        self.steps += 1;
        let mut rec = StepRecord {
            step: self.steps - 1,
            program_position: position,
            program_read: read,
            instruction: None,
            work_read: None,
            work_write: None,
            work_head: self.n.position(),
            result_append: None,
            ignored: false,
            status: Status::Running,
        };
        match (read.as_bit(), self.mode) {
            (None, Mode::Copy(_)) => self.status = Status::Halted,
            (None, Mode::Fetch) => self.status = Status::Exhausted,
            (Some(bit), Mode::Copy(ReplicateTarget::Result)) => {
                self.emit(bit)?;
                rec.result_append = Some(bit);
            }
            (Some(bit), Mode::Copy(_)) => {
                let at = self.n.position();
                self.n.apply(&mut self.work, HeadAction::Write(Symbol::from_bit(bit)))?;
                self.n.apply(&mut self.work, HeadAction::Move(Move::Right))?;
                rec.work_write = Some((at, Symbol::from_bit(bit)));
            }
            (Some(bit), Mode::Fetch) => match self.decoder.feed(bit) {
                Feed::NeedMore => {}
                Feed::Invalid(_) => self.status = Status::Stuck,
                Feed::Complete(instruction) => {
                    self.execute(&instruction, &mut rec)?;
                    rec.instruction = Some(instruction);
                }
            },
        }
        rec.work_head = self.n.position();
        rec.status = self.status;
        Ok(rec)
    }

    fn emit(&mut self, bit: bool) -> Result<(), TapeError> {
        self.v.apply(&mut self.result, HeadAction::Write(Symbol::from_bit(bit)))?;
        self.v.apply(&mut self.result, HeadAction::Move(Move::Right))?;
        Ok(())
    }

    fn execute(&mut self, instruction: &Instruction, rec: &mut StepRecord) -> Result<(), TapeError> {
        match instruction {
            Instruction::Halt => self.status = Status::Halted,
            Instruction::WorkMove(m) => {
                self.n.apply(&mut self.work, HeadAction::Move(*m))?;
            }
            Instruction::WorkWrite(s) => {
                self.n.apply(&mut self.work, HeadAction::Write(*s))?;
                rec.work_write = Some((self.n.position(), *s));
            }
            Instruction::ReadDispatch(entries) => {
                let seen = self.n.apply(&mut self.work, HeadAction::Read)?.expect("read");
                rec.work_read = Some(seen);
                let entry = match seen.as_bit() {
                    None => &entries[0],
                    Some(false) => &entries[1],
                    Some(true) => &entries[2],
                };
                self.execute(entry, rec)?;
            }
            Instruction::Emit(bit) => {
                self.emit(*bit)?;
                rec.result_append = Some(*bit);
            }
            Instruction::Replicate(target @ (ReplicateTarget::Result | ReplicateTarget::LocalWork)) => {
                self.mode = Mode::Copy(*target);
            }
            Instruction::ProgWrite { .. } | Instruction::Send { .. } | Instruction::Replicate(_) => {
                rec.ignored = true;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CuEnd {
    Halted,
    OutOfFuel,
    Stuck,
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CuRun {
    /// The result word; only defined when the run halted.
    pub output: Option<BitString>,
    /// Whatever the result tape holds when the run stopped.
    pub result_tape: BitString,
    pub consumed_prefix: BitString,
    pub halted: bool,
    pub steps: u64,
    pub end: CuEnd,
}

fn finish(cu: &Cu) -> CuRun {
    let end = match cu.status {
        Status::Running => CuEnd::OutOfFuel,
        Status::Halted => CuEnd::Halted,
        Status::Stuck => CuEnd::Stuck,
        Status::Exhausted => CuEnd::Exhausted,
    };
    let halted = end == CuEnd::Halted;
    CuRun {
        output: halted.then(|| cu.result_bits()),
        result_tape: cu.result_bits(),
        consumed_prefix: cu.consumed_prefix(),
        halted,
        steps: cu.steps,
        end,
    }
}

/// Runs the calculator on `data` for at most `fuel` steps, recording every
/// step.
pub fn cu_run_traced(source: &ProgramSource, data: &BitString, fuel: u64) -> (CuRun, Vec<StepRecord>) {
    let mut cu = Cu::new(source.clone(), data);
    let mut trace = Vec::new();
    while cu.status == Status::Running && cu.steps < fuel {
        trace.push(cu.step().expect("calculator heads respect their disciplines"));
    }
    (finish(&cu), trace)
}

pub fn cu_run(source: &ProgramSource, data: &BitString, fuel: u64) -> CuRun {
    let mut cu = Cu::new(source.clone(), data);
    while cu.status == Status::Running && cu.steps < fuel {
        cu.step().expect("calculator heads respect their disciplines");
    }
    finish(&cu)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CuError {
    #[error("the calculator does not halt within {fuel} steps ({end:?}); its result is undefined")]
    Undefined { fuel: u64, end: CuEnd },
    /// A copy stopped on the blank after the program; any bits appended
    /// there would be copied too, so no prefix decides the result.
    #[error("the calculator halted on the blank after the program's {len} bits; it has no reduced program")]
    HaltedOnProgramEnd { len: usize },
}

/// The program cells actually read before halting.
pub fn reduced_program(source: &ProgramSource, data: &BitString, fuel: u64) -> Result<BitString, CuError> {
    let run = cu_run(source, data, fuel);
    if !run.halted {
        return Err(CuError::Undefined { fuel, end: run.end });
    }
    if run.steps as usize > run.consumed_prefix.len() {
        return Err(CuError::HaltedOnProgramEnd {
            len: run.consumed_prefix.len(),
        });
    }
    Ok(run.consumed_prefix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::isa::assemble;

    fn asm(text: &str) -> ProgramSource {
        ProgramSource::program(&assemble(text).unwrap())
    }

    #[test]
    fn copy_program_copies_data() {
        for s in ["", "101", "0", "110100111"] {
            let data = bits(s);
            let run = cu_run(&ProgramSource::program(&copy_program(data.len())), &data, 10_000);
            assert_eq!(run.output, Some(data.clone()), "finite copy of {s}");
            let run = cu_run(&ProgramSource::generator("copy").unwrap(), &data, 10_000);
            assert_eq!(run.output, Some(data), "generator copy of {s}");
        }
    }

    #[test]
    fn copy_to_the_end_has_no_reduced_program() {
        let p = asm("REPLICATE result; EMIT 1");
        let run = cu_run(&p, &bits("1"), 1000);
        assert!(run.halted);
        assert!(matches!(
            reduced_program(&p, &bits("1"), 1000),
            Err(CuError::HaltedOnProgramEnd { .. })
        ));
    }

    #[test]
    fn halt_first_reads_exactly_the_halt_record() {
        let p = asm("HALT; EMIT 1; EMIT 1");
        let run = cu_run(&p, &bits("1011"), 100);
        assert_eq!(run.output, Some(BitString::new()));
        assert_eq!(run.consumed_prefix, Instruction::Halt.encode());
        assert_eq!(run.steps, 7);
    }

    #[test]
    fn non_halting_is_undefined() {
        let p = ProgramSource::generator("idle").unwrap();
        let run = cu_run(&p, &bits("1"), 100);
        assert!(!run.halted);
        assert_eq!(run.output, None);
        assert_eq!(run.end, CuEnd::OutOfFuel);
        assert_eq!(run.steps, 100);
        assert!(matches!(reduced_program(&p, &bits("1"), 100), Err(CuError::Undefined { .. })));
    }

    #[test]
    fn running_off_a_finite_program_is_exhaustion() {
        let run = cu_run(&asm("EMIT 1"), &BitString::new(), 100);
        assert_eq!(run.end, CuEnd::Exhausted);
        assert_eq!(run.output, None);
        assert_eq!(run.result_tape, bits("1"));
    }

    #[test]
    fn bad_program_is_stuck() {
        let run = cu_run(&ProgramSource::finite(bits("0111")), &BitString::new(), 100);
        assert_eq!(run.end, CuEnd::Stuck);
        assert_eq!(run.steps, 1);
    }

    #[test]
    fn reduced_program_twice_reads_one_copy() {
        let p = asm("MOVE D; READ {HALT | EMIT 0 | EMIT 1}; EMIT 1; HALT");
        let data = bits("01");
        let pr = reduced_program(&p, &data, 1000).unwrap();
        let doubled = pr.concat(&pr);
        let run = cu_run(&ProgramSource::finite(doubled), &data, 1000);
        assert_eq!(run.consumed_prefix.len(), pr.len());
        assert_eq!(run.output, cu_run(&p, &data, 1000).output);
    }

    #[test]
    fn read_head_position_equals_steps() {
        let mut cu = Cu::new(ProgramSource::generator("random:9").unwrap(), &bits("1011"));
        while cu.status() == Status::Running && cu.steps() < 500 {
            cu.step().unwrap();
            assert_eq!(cu.r.position() as u64, cu.steps());
        }
    }

    #[test]
    fn calculator_ignores_machine_only_instructions() {
        let p = asm("PWRITE +1 1; SEND 0 1; REPLICATE @3; EMIT 0; HALT");
        let (run, trace) = cu_run_traced(&p, &BitString::new(), 1000);
        assert_eq!(run.output, Some(bits("0")));
        assert_eq!(trace.iter().filter(|r| r.ignored).count(), 3);
    }

    #[test]
    fn replicate_to_result_copies_rest_of_program() {
        let p = asm("REPLICATE result");
        let genome = p.prefix.concat(&bits("0110"));
        let run = cu_run(&ProgramSource::finite(genome), &BitString::new(), 1000);
        assert_eq!(run.output, Some(bits("0110")));
    }

    #[test]
    fn program_file_syntax() {
        let p = ProgramSource::parse("1000 001\n@generator:idle").unwrap();
        assert_eq!(p.prefix, bits("1000001"));
        assert!(!p.is_finite());
        assert!(ProgramSource::parse("@generator:nope").is_err());
        assert!(ProgramSource::parse("10x").is_err());
    }
}
