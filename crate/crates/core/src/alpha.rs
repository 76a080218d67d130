//! The α-machine: a calculator with a second head on its program tape that
//! can write, and links to other machines.
//!
//! Heads: `r` reads the program forward, `b` writes the program anywhere,
//! `v` writes the result forward (or sends bits to another machine during
//! a remote copy), `n` reads and writes the work tape. Every step runs the
//! same cycle:
//!
//! 1. apply the context edit drawn for this step, if any;
//! 2. deliver pending messages onto the work tape;
//! 3. `r` reads one program cell;
//! 4. execute the instruction that cell completes, if any.
//!
//! With variability off the machine behaves exactly like a
//! [`crate::cu::Cu`]: `PWRITE`, `SEND` and `REPLICATE @id` are read,
//! logged as ignored and otherwise skipped.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::context::{apply_event, apply_resolved, AppliedEdit, ContextEvent};
use crate::cu::{Mode, ProgramSource, Status, StepRecord};
use crate::isa::{assemble, AsmError, Decoder, Feed, Instruction, ReplicateTarget};
use crate::tape::{Alphabet, Boundedness, Discipline, Head, HeadAction, Move, Symbol, Tape, TapeError};

pub type MachineId = u32;

/// First cell of the context region, the ring of work cells where bits
/// written by other machines land.
pub const CONTEXT_REGION_START: i64 = -64;
pub const CONTEXT_REGION_LEN: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Destination {
    Channel(u32),
    Machine(MachineId),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Message {
    pub src: MachineId,
    pub dst: Destination,
    pub payload: BitString,
    pub issued_step: u64,
}

/// Where delivered bits are written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Landing {
    /// Successive cells of the context region.
    ContextRegion,
    /// From the work head rightwards; the head does not move.
    AtWorkHead,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Delivery {
    pub src: MachineId,
    /// The channel the bits travelled on; `None` for a remote copy.
    pub channel: Option<u32>,
    pub issued_step: u64,
    pub payload: BitString,
    pub landing: Landing,
}

/// One access to the work tape, in the order it happened.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum WorkOp {
    Read { position: i64, seen: Symbol },
    Write { position: i64, before: Symbol, after: Symbol },
    Edit(AppliedEdit),
}

/// Everything one step changed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepEffects {
    pub machine: MachineId,
    /// The tape-level record; `None` when the step was skipped.
    pub record: Option<StepRecord>,
    pub context_edit: Option<AppliedEdit>,
    pub deliveries: Vec<Delivery>,
    pub work_ops: Vec<WorkOp>,
    pub program_writes: Vec<(i64, bool)>,
    pub messages_out: Vec<Message>,
    /// Instruction read but not carried out because variability is off.
    pub ignored: Option<Instruction>,
    /// The machine waited on a rendezvous and did not read its program.
    pub blocked: bool,
    pub stuck_reason: Option<String>,
    pub work_head: i64,
    pub region_cursor: usize,
    pub mode: Mode,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaMachine {
    id: MachineId,
    source: ProgramSource,
    /// Program cells `0..materialized` have been drawn from `source`.
    materialized: i64,
    program: Tape,
    work: Tape,
    result: Tape,
    r: Head,
    b: Head,
    v: Head,
    n: Head,
    decoder: Decoder,
    mode: Mode,
    status: Status,
    steps: u64,
    variability: bool,
    region_cursor: usize,
}

impl AlphaMachine {
    pub fn new(id: MachineId, source: ProgramSource, work: Tape, variability: bool) -> AlphaMachine {
        AlphaMachine {
            id,
            source,
            materialized: 0,
            program: Tape::blank_binary(Boundedness::LeftBounded),
            work,
            result: Tape::blank_binary(Boundedness::LeftBounded),
            r: Head::new(0, Discipline::ReadForwardOnly, false),
            b: Head::new(0, Discipline::WriteBidirectional, true),
            v: Head::new(0, Discipline::WriteForwardOnly, false),
            n: Head::new(0, Discipline::ReadWriteBidirectional, true),
            decoder: Decoder::new(),
            mode: Mode::Fetch,
            status: Status::Running,
            steps: 0,
            variability,
            region_cursor: 0,
        }
    }

    /// A machine whose work tape holds `data` from cell 0.
    pub fn with_data(id: MachineId, source: ProgramSource, data: &BitString, variability: bool) -> AlphaMachine {
        AlphaMachine::new(id, source, Tape::from_bits(data.iter(), Boundedness::Unbounded), variability)
    }

    pub fn id(&self) -> MachineId {
        self.id
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_running(&self) -> bool {
        self.status == Status::Running
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn variability_enabled(&self) -> bool {
        self.variability
    }

    pub fn work(&self) -> &Tape {
        &self.work
    }

    pub(crate) fn work_mut(&mut self) -> &mut Tape {
        &mut self.work
    }

    pub fn work_head(&self) -> i64 {
        self.n.position()
    }

    pub fn result_bits(&self) -> BitString {
        self.result.word()
    }

    pub fn read_head(&self) -> i64 {
        self.r.position()
    }

    pub fn source_mut(&mut self) -> &mut ProgramSource {
        &mut self.source
    }

    /// Program cells read so far.
    pub fn consumed_prefix(&self) -> BitString {
        (0..self.r.position()).filter_map(|i| self.program.read(i).as_bit()).collect()
    }

    /// Program cell `position`, drawing it from the source if needed.
    pub fn program_cell(&mut self, position: i64) -> Symbol {
        self.materialize(position);
        self.program.read(position)
    }

    /// The program tape from cell 0 up to its last materialized cell.
    pub fn program_window(&self) -> Vec<Symbol> {
        self.program.nonnegative_cells()
    }

    /// Turns variability off. Idempotent.
    pub fn disable_variability(&mut self) {
        self.variability = false;
    }

    /// Starts copying the program tape from the read head onwards to
    /// `target`, one cell per step.
    pub fn start_replication(&mut self, target: ReplicateTarget) {
        self.mode = Mode::Copy(target);
    }

    fn materialize(&mut self, upto: i64) {
        while self.materialized <= upto {
            if let Some(bit) = self.source.bit(self.materialized as usize) {
                self.program
                    .write(self.materialized, Symbol::from_bit(bit))
                    .expect("program cells are non-negative bits");
            }
            self.materialized += 1;
        }
    }

    /// What the instruction decoder would complete on this machine's next
    /// program read.
    pub fn peek_instruction(&self) -> Option<Instruction> {
        if self.status != Status::Running || self.mode != Mode::Fetch {
            return None;
        }
        let at = self.r.position();
        let cell = if at < self.materialized {
            self.program.read(at)
        } else {
            self.source.bit(at as usize).map_or(Symbol::BLANK, Symbol::from_bit)
        };
        match cell.as_bit() {
            Some(bit) => match self.decoder.peek(bit) {
                Feed::Complete(i) => Some(i),
                _ => None,
            },
            None => None,
        }
    }

    fn empty_effects(&self) -> StepEffects {
        StepEffects {
            machine: self.id,
            record: None,
            context_edit: None,
            deliveries: Vec::new(),
            work_ops: Vec::new(),
            program_writes: Vec::new(),
            messages_out: Vec::new(),
            ignored: None,
            blocked: false,
            stuck_reason: None,
            work_head: self.n.position(),
            region_cursor: self.region_cursor,
            mode: self.mode,
            status: self.status,
        }
    }

    fn close(&self, mut fx: StepEffects) -> StepEffects {
        fx.work_head = self.n.position();
        fx.region_cursor = self.region_cursor;
        fx.mode = self.mode;
        fx.status = self.status;
        fx
    }

    fn apply_context(&mut self, event: Option<&ContextEvent>, fx: &mut StepEffects) -> Result<(), TapeError> {
        if let Some(e) = event {
            let edit = apply_event(e, &mut self.work, &mut [&mut self.n])?;
            fx.work_ops.push(WorkOp::Edit(edit.clone()));
            fx.context_edit = Some(edit);
        }
        Ok(())
    }

    fn write_work(&mut self, position: i64, after: Symbol, fx: &mut StepEffects) -> Result<(), TapeError> {
        let before = self.work.read(position);
        self.work.write(position, after)?;
        fx.work_ops.push(WorkOp::Write { position, before, after });
        Ok(())
    }

    fn deliver(&mut self, delivery: Delivery, fx: &mut StepEffects) -> Result<(), TapeError> {
        for (i, bit) in delivery.payload.iter().enumerate() {
            let position = match delivery.landing {
                Landing::ContextRegion => {
                    let p = CONTEXT_REGION_START + self.region_cursor as i64;
                    self.region_cursor = (self.region_cursor + 1) % CONTEXT_REGION_LEN;
                    p
                }
                Landing::AtWorkHead => self.n.position() + i as i64,
            };
            self.write_work(position, Symbol::from_bit(bit), fx)?;
        }
        fx.deliveries.push(delivery);
        Ok(())
    }

    /// A step in which the machine does not run (it waits, or has
    /// stopped): the context edit and deliveries happen, `r` stays put.
    pub fn wait_step(&mut self, inbox: Vec<Delivery>, event: Option<&ContextEvent>) -> Result<StepEffects, TapeError> {
        let mut fx = self.empty_effects();
        self.apply_context(event, &mut fx)?;
        for d in inbox {
            self.deliver(d, &mut fx)?;
        }
        Ok(self.close(fx))
    }

    /// One step stamped with the machine's own step count.
    pub fn step(&mut self, inbox: Vec<Delivery>, event: Option<&ContextEvent>) -> Result<StepEffects, TapeError> {
        let now = self.steps;
        self.step_at(now, inbox, event)
    }

    /// One step; messages sent are stamped `now`.
    pub fn step_at(
        &mut self,
        now: u64,
        inbox: Vec<Delivery>,
        event: Option<&ContextEvent>,
    ) -> Result<StepEffects, TapeError> {
        assert_eq!(self.status, Status::Running, "step on a stopped machine");
        let mut fx = self.empty_effects();
        self.apply_context(event, &mut fx)?;
        for d in inbox {
            self.deliver(d, &mut fx)?;
        }

        let position = self.r.position();
        self.materialize(position);
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
            (Some(bit), Mode::Copy(target)) => self.copy_bit(now, bit, target, &mut rec, &mut fx)?,
            (Some(bit), Mode::Fetch) => match self.decoder.feed(bit) {
                Feed::NeedMore => {}
                Feed::Invalid(reason) => {
                    self.status = Status::Stuck;
                    fx.stuck_reason = Some(reason.to_string());
                }
                Feed::Complete(instruction) => {
                    self.execute(now, &instruction, &mut rec, &mut fx)?;
                    rec.instruction = Some(instruction);
                }
            },
        }
        rec.work_head = self.n.position();
        rec.status = self.status;
        fx.record = Some(rec);
        Ok(self.close(fx))
    }

    fn copy_bit(
        &mut self,
        now: u64,
        bit: bool,
        target: ReplicateTarget,
        rec: &mut StepRecord,
        fx: &mut StepEffects,
    ) -> Result<(), TapeError> {
        match target {
            ReplicateTarget::Result => self.emit(bit, rec),
            ReplicateTarget::LocalWork => {
                let at = self.n.position();
                self.write_work(at, Symbol::from_bit(bit), fx)?;
                self.n.apply(&mut self.work, HeadAction::Move(Move::Right))?;
                rec.work_write = Some((at, Symbol::from_bit(bit)));
                Ok(())
            }
            ReplicateTarget::Remote(id) => {
                fx.messages_out.push(Message {
                    src: self.id,
                    dst: Destination::Machine(id),
                    payload: BitString::from_bits(vec![bit]),
                    issued_step: now,
                });
                Ok(())
            }
        }
    }

    fn emit(&mut self, bit: bool, rec: &mut StepRecord) -> Result<(), TapeError> {
        self.v.apply(&mut self.result, HeadAction::Write(Symbol::from_bit(bit)))?;
        self.v.apply(&mut self.result, HeadAction::Move(Move::Right))?;
        rec.result_append = Some(bit);
        Ok(())
    }

    fn execute(
        &mut self,
        now: u64,
        instruction: &Instruction,
        rec: &mut StepRecord,
        fx: &mut StepEffects,
    ) -> Result<(), TapeError> {
        let variable = matches!(
            instruction,
            Instruction::ProgWrite { .. } | Instruction::Send { .. } | Instruction::Replicate(ReplicateTarget::Remote(_))
        );
        if variable && !self.variability {
            rec.ignored = true;
            fx.ignored = Some(instruction.clone());
            return Ok(());
        }
        match instruction {
            Instruction::Halt => self.status = Status::Halted,
            Instruction::WorkMove(m) => {
                self.n.apply(&mut self.work, HeadAction::Move(*m))?;
            }
            Instruction::WorkWrite(s) => {
                let at = self.n.position();
                self.write_work(at, *s, fx)?;
                rec.work_write = Some((at, *s));
            }
            Instruction::ReadDispatch(entries) => {
                let at = self.n.position();
                let seen = self.n.apply(&mut self.work, HeadAction::Read)?.expect("read");
                fx.work_ops.push(WorkOp::Read { position: at, seen });
                rec.work_read = Some(seen);
                let entry = match seen.as_bit() {
                    None => &entries[0],
                    Some(false) => &entries[1],
                    Some(true) => &entries[2],
                };
                self.execute(now, entry, rec, fx)?;
            }
            Instruction::Emit(bit) => self.emit(*bit, rec)?,
            Instruction::ProgWrite { offset, bit } => {
                let target = self.r.position() + offset;
                if target < 0 {
                    self.status = Status::Stuck;
                    fx.stuck_reason = Some(format!("program write at cell {target}"));
                    return Ok(());
                }
                self.materialize(target);
                self.b.reposition(&self.program, target)?;
                self.b.apply(&mut self.program, HeadAction::Write(Symbol::from_bit(*bit)))?;
                fx.program_writes.push((target, *bit));
            }
            Instruction::Send { channel, payload } => fx.messages_out.push(Message {
                src: self.id,
                dst: Destination::Channel(*channel),
                payload: payload.clone(),
                issued_step: now,
            }),
            Instruction::Replicate(target) => self.mode = Mode::Copy(*target),
        }
        Ok(())
    }
}

/// Rebuilds a machine's final state from its initial state and the
/// effects of its steps, without executing any instruction.
pub fn replay(initial: &AlphaMachine, log: &[StepEffects]) -> Result<AlphaMachine, TapeError> {
    let mut m = initial.clone();
    for fx in log {
        for op in &fx.work_ops {
            match op {
                WorkOp::Read { .. } => {}
                WorkOp::Write { position, after, .. } => m.work.write(*position, *after)?,
                WorkOp::Edit(edit) => apply_resolved(edit, &mut m.work, &mut [])?,
            }
        }
        if let Some(rec) = &fx.record {
            let at = m.r.position();
            m.materialize(at);
            m.r.apply(&mut m.program, HeadAction::Move(Move::Right))?;
            m.steps += 1;
            if let (Some(bit), Mode::Fetch) = (rec.program_read.as_bit(), m.mode) {
                m.decoder.feed(bit);
            }
            if let Some(bit) = rec.result_append {
                m.v.apply(&mut m.result, HeadAction::Write(Symbol::from_bit(bit)))?;
                m.v.apply(&mut m.result, HeadAction::Move(Move::Right))?;
            }
        }
        for (position, bit) in &fx.program_writes {
            m.materialize(*position);
            m.b.reposition(&m.program, *position)?;
            m.b.apply(&mut m.program, HeadAction::Write(Symbol::from_bit(*bit)))?;
        }
        m.n.reposition(&m.work, fx.work_head)?;
        m.region_cursor = fx.region_cursor;
        m.mode = fx.mode;
        m.status = fx.status;
    }
    Ok(m)
}

/// Runs a machine alone, with no messages and no context, for at most
/// `fuel` steps.
pub fn run_alone(machine: &mut AlphaMachine, fuel: u64) -> Result<Vec<StepEffects>, TapeError> {
    let mut log = Vec::new();
    while machine.is_running() && (log.len() as u64) < fuel {
        log.push(machine.step(Vec::new(), None)?);
    }
    Ok(log)
}

/// Copies `machine`'s program tape, from its read head on, to `target`.
/// Returns the effects of every copy step.
pub fn replicate(machine: &mut AlphaMachine, target: ReplicateTarget, fuel: u64) -> Result<Vec<StepEffects>, TapeError> {
    machine.start_replication(target);
    run_alone(machine, fuel)
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("machine spec: {0}")]
    Toml(String),
    #[error("machine {id}: give exactly one of `program` (assembler) or `bits`")]
    ProgramChoice { id: MachineId },
    #[error("machine {id}: {source}")]
    Assembler { id: MachineId, source: AsmError },
    #[error("machine {id}: {source}")]
    Source {
        id: MachineId,
        source: crate::cu::SourceError,
    },
    #[error("machine {id}: work tape: {source}")]
    Work { id: MachineId, source: TapeError },
}

/// A machine as written in a spec file (TOML):
///
/// ```toml
/// id = 0
/// program = "REPLICATE result"   # assembler, or:
/// # bits = "1000000000000011"
/// generator = "copy"             # optional endless tail after the program
/// work = "1011"                  # work tape literal from cell 0, `_` for blank
/// variability = true
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineSpec {
    pub id: MachineId,
    #[serde(default)]
    pub program: Option<String>,
    #[serde(default)]
    pub bits: Option<String>,
    #[serde(default)]
    pub generator: Option<String>,
    #[serde(default)]
    pub work: String,
    #[serde(default = "default_variability")]
    pub variability: bool,
}

fn default_variability() -> bool {
    true
}

impl MachineSpec {
    pub fn parse(text: &str) -> Result<MachineSpec, SpecError> {
        toml::from_str(text).map_err(|e| SpecError::Toml(e.to_string()))
    }

    pub fn build(&self) -> Result<AlphaMachine, SpecError> {
        let id = self.id;
        let prefix = match (&self.program, &self.bits) {
            (Some(asm), None) => {
                crate::isa::program_bits(&assemble(asm).map_err(|source| SpecError::Assembler { id, source })?)
            }
            (None, Some(bits)) => ProgramSource::parse(bits)
                .map_err(|source| SpecError::Source { id, source })?
                .prefix,
            (None, None) if self.generator.is_some() => BitString::new(),
            _ => return Err(SpecError::ProgramChoice { id }),
        };
        let mut source = ProgramSource::finite(prefix);
        if let Some(g) = &self.generator {
            source.suffix = ProgramSource::generator(g)
                .map_err(|source| SpecError::Source { id, source })?
                .suffix;
        }
        let work = Tape::parse(&self.work, Boundedness::Unbounded, Alphabet::binary())
            .map_err(|source| SpecError::Work { id, source })?;
        Ok(AlphaMachine::new(id, source, work, self.variability))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::context::{word_distance, ContextEvent};
    use crate::cu::cu_run_traced;
    use crate::isa::{assemble, program_bits};

    fn machine(text: &str, data: &str, variability: bool) -> AlphaMachine {
        AlphaMachine::with_data(
            0,
            ProgramSource::program(&assemble(text).unwrap()),
            &bits(data),
            variability,
        )
    }

    fn records(log: &[StepEffects]) -> Vec<StepRecord> {
        log.iter().filter_map(|fx| fx.record.clone()).collect()
    }

    #[test]
    fn disabled_machine_matches_calculator_on_copy() {
        let source = ProgramSource::generator("copy").unwrap();
        let data = bits("1011");
        let mut m = AlphaMachine::with_data(0, source.clone(), &data, false);
        let log = run_alone(&mut m, 1000).unwrap();
        let (run, trace) = cu_run_traced(&source, &data, 1000);
        assert_eq!(records(&log), trace);
        assert_eq!(Some(m.result_bits()), run.output);
    }

    #[test]
    fn self_modification_is_observed_later() {
        // PWRITE +0 writes the very next program cell. The next instruction
        // starts with 1, so writing 0 there derails decoding into Stuck.
        let text = "PWRITE 0 0; EMIT 1; HALT";
        let mut enabled = machine(text, "", true);
        let log = run_alone(&mut enabled, 100).unwrap();
        let pw = log.iter().find(|fx| !fx.program_writes.is_empty()).unwrap();
        let (pos, bit) = pw.program_writes[0];
        assert!(!bit);
        let later = log
            .iter()
            .filter_map(|fx| fx.record.as_ref())
            .find(|r| r.program_position == pos)
            .unwrap();
        assert_eq!(later.program_read, Symbol::ZERO);
        assert_eq!(enabled.status(), Status::Stuck);

        let mut disabled = machine(text, "", false);
        run_alone(&mut disabled, 100).unwrap();
        assert_eq!(disabled.status(), Status::Halted);
        assert_eq!(disabled.result_bits(), bits("1"));
    }

    #[test]
    fn halt_record_halts_with_no_effects() {
        let mut m = machine("HALT", "1", true);
        let log = run_alone(&mut m, 100).unwrap();
        let last = log.last().unwrap();
        assert_eq!(last.status, Status::Halted);
        assert!(last.program_writes.is_empty() && last.messages_out.is_empty() && last.work_ops.is_empty());
    }

    #[test]
    fn disable_is_idempotent() {
        let mut a = machine("SEND 0 1; HALT", "", true);
        a.disable_variability();
        let once = a.clone();
        a.disable_variability();
        assert_eq!(a, once);
        let log = run_alone(&mut a, 100).unwrap();
        assert!(log.iter().any(|fx| fx.ignored.is_some()));
        assert!(log.iter().all(|fx| fx.messages_out.is_empty()));
    }

    #[test]
    fn send_and_remote_replication_emit_messages() {
        let mut m = machine("SEND 2 101; REPLICATE @7", "", true);
        m.source_mut().prefix.extend_from(&bits("01"));
        let log = run_alone(&mut m, 1000).unwrap();
        let msgs: Vec<&Message> = log.iter().flat_map(|fx| &fx.messages_out).collect();
        assert_eq!(msgs[0].dst, Destination::Channel(2));
        assert_eq!(msgs[0].payload, bits("101"));
        assert_eq!(msgs[1].dst, Destination::Machine(7));
        assert_eq!(msgs.len(), 3);
        assert_eq!(m.status(), Status::Halted);
    }

    #[test]
    fn backward_program_write_is_dead() {
        let text = "PWRITE -4 0; EMIT 1; HALT";
        let mut enabled = machine(text, "", true);
        let log = run_alone(&mut enabled, 1000).unwrap();
        let (pos, _) = log.iter().flat_map(|fx| fx.program_writes.clone()).next().unwrap();
        assert!(pos < log.iter().position(|fx| !fx.program_writes.is_empty()).unwrap() as i64);
        let mut disabled = machine(text, "", false);
        let log2 = run_alone(&mut disabled, 1000).unwrap();
        let strip = |log: &[StepEffects]| -> Vec<StepRecord> {
            records(log)
                .into_iter()
                .map(|mut r| {
                    r.ignored = false;
                    r
                })
                .collect()
        };
        assert_eq!(strip(&log), strip(&log2));
        assert_eq!(enabled.result_bits(), bits("1"));
    }

    #[test]
    fn replicate_copies_program_window() {
        let genome = bits("1101001110");
        let mut m = AlphaMachine::with_data(0, ProgramSource::finite(genome.clone()), &BitString::new(), true);
        replicate(&mut m, ReplicateTarget::LocalWork, 1000).unwrap();
        assert_eq!(m.status(), Status::Halted);
        assert_eq!(word_distance(&m.work().word(), &genome), 0);

        let mut m = AlphaMachine::with_data(0, ProgramSource::finite(genome.clone()), &BitString::new(), true);
        replicate(&mut m, ReplicateTarget::Result, 1000).unwrap();
        assert_eq!(m.result_bits(), genome);
    }

    #[test]
    fn deliveries_land_in_context_region_before_the_read() {
        let mut m = machine("MOVE N", "", true);
        let fx = m
            .step(
                vec![Delivery {
                    src: 1,
                    channel: Some(0),
                    issued_step: 0,
                    payload: bits("101"),
                    landing: Landing::ContextRegion,
                }],
                None,
            )
            .unwrap();
        assert_eq!(fx.region_cursor, 3);
        let region: String = (CONTEXT_REGION_START..CONTEXT_REGION_START + 3)
            .map(|i| m.work().read(i).0)
            .collect();
        assert_eq!(region, "101");
    }

    #[test]
    fn replay_rebuilds_final_state() {
        let text = "WRITE 1; MOVE D; PWRITE +20 1; READ {EMIT 1 | EMIT 0 | MOVE G}; REPLICATE work";
        let mut bits_ = program_bits(&assemble(text).unwrap());
        bits_.extend_from(&bits("0110"));
        let mut m = AlphaMachine::with_data(3, ProgramSource::finite(bits_), &bits("0"), true);
        let initial = m.clone();
        let mut log = Vec::new();
        let mut step = 0;
        while m.is_running() && step < 200 {
            let event = (step % 7 == 3).then(|| ContextEvent::insert(step % 3, step % 2 == 0));
            let inbox = if step == 5 {
                vec![Delivery {
                    src: 9,
                    channel: None,
                    issued_step: 4,
                    payload: bits("11"),
                    landing: Landing::AtWorkHead,
                }]
            } else {
                Vec::new()
            };
            log.push(m.step(inbox, event.as_ref()).unwrap());
            step += 1;
        }
        assert_eq!(replay(&initial, &log).unwrap(), m);
    }

    #[test]
    fn spec_file() {
        let spec = MachineSpec::parse("id = 2\nprogram = \"EMIT 1; HALT\"\nwork = \"1_0\"\n").unwrap();
        let mut m = spec.build().unwrap();
        assert!(m.variability_enabled());
        run_alone(&mut m, 100).unwrap();
        assert_eq!(m.result_bits(), bits("1"));
        assert_eq!(m.work().read(1), Symbol::BLANK);
        assert!(MachineSpec::parse("id = 1\nprogram = \"HALT\"\nbits = \"1\"\n").unwrap().build().is_err());
        assert!(MachineSpec::parse("id = 1\ncolour = 3\n").is_err());
    }
}
