//! Networks of α-machines linked by channels.
//!
//! A round samples at most one context event, then gives every machine one
//! slot in a seeded random order. Messages produced in a slot are routed at
//! once:
//!
//! - direct writes queue on the other endpoints and land in their context
//!   regions at the start of their next slot (later this round, or next
//!   round if they already went);
//! - shared tapes are swapped in as the work tape of an endpoint for the
//!   duration of its slot, and `SEND` writes into the shared context region;
//! - rendezvous pairs are matched before the round from what each machine
//!   is about to execute. An unmatched sender waits: its `r` head does not
//!   advance and the wait is counted.
//!
//! The global step is the round index.

mod serial;

pub use serial::*;

use std::collections::BTreeMap;
use std::mem;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alpha::{
    AlphaMachine, Delivery, Destination, Landing, MachineId, MachineSpec, Message, SpecError, StepEffects, WorkOp,
    CONTEXT_REGION_LEN, CONTEXT_REGION_START,
};
use crate::bits::{BitString, Word};
use crate::context::{sample_event, ContextEvent, EventTarget, EventsFile, ProbabilitySpace, SpaceError};
use crate::isa::Instruction;
use crate::rng::{rng, stream, SimRng};
use crate::tape::{Alphabet, Boundedness, Symbol, Tape, TapeError};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChannelMode {
    DirectWrite,
    SharedTape(String),
    Rendezvous,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Channel {
    pub id: u32,
    pub mode: ChannelMode,
    pub endpoints: Vec<MachineId>,
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("network spec: {0}")]
    Toml(String),
    #[error("duplicate machine id {0}")]
    DuplicateMachine(MachineId),
    #[error("duplicate channel id {0}")]
    DuplicateChannel(u32),
    #[error("channel {channel}: unknown endpoint {machine}")]
    UnknownEndpoint { channel: u32, machine: MachineId },
    #[error("channel {0}: a rendezvous links exactly two machines")]
    RendezvousArity(u32),
    #[error("machine {0} is attached to more than one shared tape")]
    SharedTwice(MachineId),
    #[error("channel {channel}: mode {mode:?} {problem}")]
    ChannelMode { channel: u32, mode: String, problem: String },
    #[error("shared tape {0:?}: {1}")]
    SharedTape(String, TapeError),
    #[error(transparent)]
    Machine(#[from] SpecError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Tape(#[from] TapeError),
}

/// Orders the machines of each round by a seeded shuffle.
#[derive(Clone, Debug)]
pub struct RoundScheduler {
    rng: SimRng,
}

impl RoundScheduler {
    pub fn new(seed: u64) -> RoundScheduler {
        RoundScheduler {
            rng: rng(seed, stream::SCHEDULER),
        }
    }

    pub fn order<T: Copy>(&mut self, items: &[T]) -> Vec<T> {
        let mut v = items.to_vec();
        v.shuffle(&mut self.rng);
        v
    }
}

#[derive(Clone, Debug)]
struct SharedTapeState {
    tape: Tape,
    cursor: usize,
}

/// How a delivery reached its machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeliveryMode {
    Direct,
    Shared,
    Rendezvous,
    Remote,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Effect {
    /// A context event drawn this round and who it hits.
    Context { event: ContextEvent },
    Step { effects: StepEffects },
    /// A rendezvous sender that waited for its receiver.
    Blocked {
        channel: u32,
        waiting: u64,
        effects: StepEffects,
    },
    Delivered {
        src: MachineId,
        channel: Option<u32>,
        mode: DeliveryMode,
        issued_step: u64,
        delivered_step: u64,
        payload: BitString,
    },
    /// A rendezvous send completed; the receiver took the bits this round.
    Rendezvous { channel: u32, receiver: MachineId },
    RoutingError { message: Option<Message>, reason: String },
}

/// One line of the event log.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogRecord {
    pub step: u64,
    pub machine: MachineId,
    #[serde(flatten)]
    pub effect: Effect,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundLog {
    pub round: u64,
    pub order: Vec<MachineId>,
    pub records: Vec<LogRecord>,
    pub shared: Vec<SharedRound>,
}

#[derive(Clone, Debug)]
pub struct Network {
    machines: BTreeMap<MachineId, AlphaMachine>,
    channels: Vec<Channel>,
    shared: BTreeMap<String, SharedTapeState>,
    shared_of: BTreeMap<MachineId, String>,
    inboxes: BTreeMap<MachineId, Vec<Delivery>>,
    space: ProbabilitySpace,
    events: SimRng,
    scheduler: RoundScheduler,
    round: u64,
    waiting: BTreeMap<MachineId, u64>,
}

fn blank_tape() -> Tape {
    Tape::blank_binary(Boundedness::Unbounded)
}

impl Network {
    pub fn new(seed: u64) -> Network {
        Network {
            machines: BTreeMap::new(),
            channels: Vec::new(),
            shared: BTreeMap::new(),
            shared_of: BTreeMap::new(),
            inboxes: BTreeMap::new(),
            space: ProbabilitySpace::quiet(),
            events: rng(seed, stream::EVENTS),
            scheduler: RoundScheduler::new(seed),
            round: 0,
            waiting: BTreeMap::new(),
        }
    }

    pub fn with_space(mut self, space: ProbabilitySpace) -> Network {
        self.space = space;
        self
    }

    pub fn set_space(&mut self, space: ProbabilitySpace) {
        self.space = space;
    }

    pub fn add_machine(&mut self, machine: AlphaMachine) -> Result<(), NetworkError> {
        let id = machine.id();
        if self.machines.contains_key(&id) {
            return Err(NetworkError::DuplicateMachine(id));
        }
        self.machines.insert(id, machine);
        self.inboxes.insert(id, Vec::new());
        self.waiting.insert(id, 0);
        Ok(())
    }

    /// Gives a shared tape its starting content. Tapes named by channels
    /// but never set start blank.
    pub fn set_shared_tape(&mut self, name: &str, tape: Tape) {
        self.shared.insert(name.to_string(), SharedTapeState { tape, cursor: 0 });
    }

    pub fn add_channel(&mut self, channel: Channel) -> Result<(), NetworkError> {
        if self.channels.iter().any(|c| c.id == channel.id) {
            return Err(NetworkError::DuplicateChannel(channel.id));
        }
        for m in &channel.endpoints {
            if !self.machines.contains_key(m) {
                return Err(NetworkError::UnknownEndpoint {
                    channel: channel.id,
                    machine: *m,
                });
            }
        }
        match &channel.mode {
            ChannelMode::Rendezvous if channel.endpoints.len() != 2 || channel.endpoints[0] == channel.endpoints[1] => {
                return Err(NetworkError::RendezvousArity(channel.id));
            }
            ChannelMode::SharedTape(name) => {
                for m in &channel.endpoints {
                    match self.shared_of.get(m) {
                        Some(other) if other != name => return Err(NetworkError::SharedTwice(*m)),
                        _ => {}
                    }
                }
                for m in &channel.endpoints {
                    self.shared_of.insert(*m, name.clone());
                }
                self.shared.entry(name.clone()).or_insert_with(|| SharedTapeState {
                    tape: blank_tape(),
                    cursor: 0,
                });
            }
            _ => {}
        }
        self.channels.push(channel);
        Ok(())
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn machine(&self, id: MachineId) -> Option<&AlphaMachine> {
        self.machines.get(&id)
    }

    pub fn machines(&self) -> impl Iterator<Item = &AlphaMachine> {
        self.machines.values()
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    /// Rounds each machine has spent waiting on a rendezvous.
    pub fn waiting_rounds(&self, id: MachineId) -> u64 {
        self.waiting.get(&id).copied().unwrap_or(0)
    }

    pub fn shared_tape(&self, name: &str) -> Option<&Tape> {
        self.shared.get(name).map(|s| &s.tape)
    }

    /// The tape a machine computes on: its shared tape if it has one.
    pub fn visible_work(&self, id: MachineId) -> Option<&Tape> {
        match self.shared_of.get(&id) {
            Some(name) => self.shared_tape(name),
            None => self.machines.get(&id).map(AlphaMachine::work),
        }
    }

    /// Non-negative work words of every machine, by id.
    pub fn work_words(&self) -> Vec<Word> {
        self.machines
            .keys()
            .map(|id| word_of(self.visible_work(*id).expect("known machine")))
            .collect()
    }

    pub fn all_stopped(&self) -> bool {
        self.machines.values().all(|m| !m.is_running())
    }

    fn draw_event(&mut self, ids: &[MachineId], records: &mut Vec<LogRecord>) -> Option<(MachineId, ContextEvent)> {
        let event = sample_event(&self.space, &mut self.events)?;
        let target = match event.target {
            EventTarget::Any if ids.is_empty() => None,
            EventTarget::Any => Some(ids[self.events.gen_range(0..ids.len())]),
            EventTarget::Machine(id) => Some(id),
        };
        match target {
            Some(id) if self.machines.contains_key(&id) => {
                records.push(LogRecord {
                    step: self.round,
                    machine: id,
                    effect: Effect::Context { event: event.clone() },
                });
                Some((id, event))
            }
            other => {
                records.push(LogRecord {
                    step: self.round,
                    machine: other.unwrap_or(MachineId::MAX),
                    effect: Effect::RoutingError {
                        message: None,
                        reason: format!("context event {:?} targets no machine", event.id),
                    },
                });
                None
            }
        }
    }

    /// Pairs rendezvous senders with ready receivers. Returns the matched
    /// receivers (with sender, channel and payload), the matched senders
    /// and the blocked senders.
    #[allow(clippy::type_complexity)]
    fn match_rendezvous(
        &self,
    ) -> (
        BTreeMap<MachineId, (MachineId, u32, BitString)>,
        BTreeMap<MachineId, u32>,
        BTreeMap<MachineId, u32>,
    ) {
        let peeks: BTreeMap<MachineId, Option<Instruction>> =
            self.machines.iter().map(|(id, m)| (*id, m.peek_instruction())).collect();
        let mut receivers = BTreeMap::new();
        let mut senders = BTreeMap::new();
        let mut blocked = BTreeMap::new();
        for ch in self.channels.iter().filter(|c| c.mode == ChannelMode::Rendezvous) {
            let (a, b) = (ch.endpoints[0], ch.endpoints[1]);
            for (s, r) in [(a, b), (b, a)] {
                let Some(Instruction::Send { channel, payload }) = &peeks[&s] else {
                    continue;
                };
                if *channel != ch.id || senders.contains_key(&s) || blocked.contains_key(&s) {
                    continue;
                }
                let ready = matches!(peeks[&r], Some(Instruction::ReadDispatch(_))) && !receivers.contains_key(&r);
                if ready {
                    receivers.insert(r, (s, ch.id, payload.clone()));
                    senders.insert(s, ch.id);
                } else {
                    blocked.insert(s, ch.id);
                }
            }
        }
        (receivers, senders, blocked)
    }

    /// Runs one round.
    pub fn step(&mut self) -> Result<RoundLog, TapeError> {
        let now = self.round;
        let ids: Vec<MachineId> = self.machines.keys().copied().collect();
        let mut records = Vec::new();
        let event = self.draw_event(&ids, &mut records);
        let order = self.scheduler.order(&ids);
        let (receivers, senders, blocked) = self.match_rendezvous();
        let mut rounds: BTreeMap<String, SharedRound> = self
            .shared
            .iter()
            .map(|(name, s)| {
                (
                    name.clone(),
                    SharedRound {
                        tape: name.clone(),
                        round: now,
                        before: s.tape.clone(),
                        after: s.tape.clone(),
                        ops: Vec::new(),
                    },
                )
            })
            .collect();

        for id in &order {
            let id = *id;
            let hit = event.as_ref().filter(|(t, _)| *t == id).map(|(_, e)| e);
            let mut inbox = mem::take(self.inboxes.get_mut(&id).expect("known machine"));
            let running = self.machines[&id].is_running();
            if !running && hit.is_none() && inbox.is_empty() {
                continue;
            }
            if let Some((src, channel, payload)) = receivers.get(&id) {
                inbox.push(Delivery {
                    src: *src,
                    channel: Some(*channel),
                    issued_step: now,
                    payload: payload.clone(),
                    landing: Landing::AtWorkHead,
                });
            }
            let shared_name = self.shared_of.get(&id).cloned();
            let machine = self.machines.get_mut(&id).expect("known machine");
            if let Some(name) = &shared_name {
                mem::swap(machine.work_mut(), &mut self.shared.get_mut(name).expect("declared").tape);
            }
            let result = match blocked.get(&id) {
                _ if !running => machine.wait_step(inbox, hit).map(|fx| Effect::Step { effects: fx }),
                Some(channel) => machine.wait_step(inbox, hit).map(|mut fx| {
                    fx.blocked = true;
                    let w = self.waiting.get_mut(&id).expect("known machine");
                    *w += 1;
                    Effect::Blocked {
                        channel: *channel,
                        waiting: *w,
                        effects: fx,
                    }
                }),
                None => machine.step_at(now, inbox, hit).map(|fx| Effect::Step { effects: fx }),
            };
            if let Some(name) = &shared_name {
                mem::swap(machine.work_mut(), &mut self.shared.get_mut(name).expect("declared").tape);
            }
            let effect = result?;
            let fx = match &effect {
                Effect::Step { effects } | Effect::Blocked { effects, .. } => effects.clone(),
                _ => unreachable!("slot effects are steps"),
            };
            if let Some(name) = &shared_name {
                let round = rounds.get_mut(name).expect("declared");
                for op in &fx.work_ops {
                    let seq = round.ops.len();
                    round.ops.push(SharedOp {
                        seq,
                        machine: id,
                        op: op.clone(),
                    });
                }
            }
            records.push(LogRecord {
                step: now,
                machine: id,
                effect,
            });
            for d in &fx.deliveries {
                let mode = match (d.landing, d.channel) {
                    (Landing::AtWorkHead, _) => DeliveryMode::Rendezvous,
                    (_, None) => DeliveryMode::Remote,
                    (_, Some(_)) => DeliveryMode::Direct,
                };
                records.push(LogRecord {
                    step: now,
                    machine: id,
                    effect: Effect::Delivered {
                        src: d.src,
                        channel: d.channel,
                        mode,
                        issued_step: d.issued_step,
                        delivered_step: now,
                        payload: d.payload.clone(),
                    },
                });
            }
            for msg in fx.messages_out {
                self.route(now, msg, &senders, &receivers, &mut rounds, &mut records)?;
            }
        }

        let mut shared = Vec::new();
        for (name, mut r) in rounds {
            r.after = self.shared[&name].tape.clone();
            if !r.ops.is_empty() {
                shared.push(r);
            }
        }
        self.round += 1;
        Ok(RoundLog {
            round: now,
            order,
            records,
            shared,
        })
    }

    fn route(
        &mut self,
        now: u64,
        msg: Message,
        senders: &BTreeMap<MachineId, u32>,
        receivers: &BTreeMap<MachineId, (MachineId, u32, BitString)>,
        rounds: &mut BTreeMap<String, SharedRound>,
        records: &mut Vec<LogRecord>,
    ) -> Result<(), TapeError> {
        let src = msg.src;
        let fail = |records: &mut Vec<LogRecord>, msg: Message, reason: String| {
            records.push(LogRecord {
                step: now,
                machine: msg.src,
                effect: Effect::RoutingError {
                    message: Some(msg),
                    reason,
                },
            });
        };
        let channel_id = match msg.dst {
            Destination::Machine(dst) => {
                match self.inboxes.get_mut(&dst) {
                    Some(inbox) => inbox.push(Delivery {
                        src,
                        channel: None,
                        issued_step: msg.issued_step,
                        payload: msg.payload,
                        landing: Landing::ContextRegion,
                    }),
                    None => fail(records, msg, format!("unknown machine {dst}")),
                }
                return Ok(());
            }
            Destination::Channel(c) => c,
        };
        let Some(channel) = self.channels.iter().find(|c| c.id == channel_id).cloned() else {
            fail(records, msg, format!("unknown channel {channel_id}"));
            return Ok(());
        };
        if !channel.endpoints.contains(&src) {
            fail(records, msg, format!("machine {src} is not an endpoint of channel {channel_id}"));
            return Ok(());
        }
        match &channel.mode {
            ChannelMode::DirectWrite => {
                for e in channel.endpoints.iter().filter(|e| **e != src) {
                    self.inboxes.get_mut(e).expect("endpoints are machines").push(Delivery {
                        src,
                        channel: Some(channel_id),
                        issued_step: msg.issued_step,
                        payload: msg.payload.clone(),
                        landing: Landing::ContextRegion,
                    });
                }
            }
            ChannelMode::SharedTape(name) => {
                let state = self.shared.get_mut(name).expect("declared");
                let round = rounds.get_mut(name).expect("declared");
                for bit in msg.payload.iter() {
                    let position = CONTEXT_REGION_START + state.cursor as i64;
                    state.cursor = (state.cursor + 1) % CONTEXT_REGION_LEN;
                    let before = state.tape.read(position);
                    let after = Symbol::from_bit(bit);
                    state.tape.write(position, after)?;
                    let seq = round.ops.len();
                    round.ops.push(SharedOp {
                        seq,
                        machine: src,
                        op: WorkOp::Write { position, before, after },
                    });
                }
                records.push(LogRecord {
                    step: now,
                    machine: src,
                    effect: Effect::Delivered {
                        src,
                        channel: Some(channel_id),
                        mode: DeliveryMode::Shared,
                        issued_step: msg.issued_step,
                        delivered_step: now,
                        payload: msg.payload,
                    },
                });
            }
            ChannelMode::Rendezvous => {
                let receiver = receivers
                    .iter()
                    .find(|(_, (s, c, _))| *s == src && *c == channel_id)
                    .map(|(r, _)| *r);
                match (senders.get(&src), receiver) {
                    (Some(c), Some(receiver)) if *c == channel_id => records.push(LogRecord {
                        step: now,
                        machine: src,
                        effect: Effect::Rendezvous {
                            channel: channel_id,
                            receiver,
                        },
                    }),
                    _ => fail(
                        records,
                        msg,
                        format!("rendezvous send on channel {channel_id} was not matched to a receive"),
                    ),
                }
            }
        }
        Ok(())
    }

    /// Runs `rounds` rounds and returns their logs.
    pub fn run(&mut self, rounds: u64) -> Result<Vec<RoundLog>, TapeError> {
        (0..rounds).map(|_| self.step()).collect()
    }
}

/// The non-negative word of a tape (context region excluded, blanks
/// skipped).
pub fn word_of(tape: &Tape) -> Word {
    tape.word()
}

/// Work words of every machine (by id) before the first round and after
/// each of `rounds` rounds, under the context `space`.
pub fn process_trajectory(
    network: &mut Network,
    space: &ProbabilitySpace,
    rounds: u64,
) -> Result<Vec<Vec<Word>>, TapeError> {
    network.set_space(space.clone());
    let mut out = vec![network.work_words()];
    for _ in 0..rounds {
        network.step()?;
        out.push(network.work_words());
    }
    Ok(out)
}

/// Flat event log of a run, in order.
pub fn event_log(rounds: &[RoundLog]) -> Vec<&LogRecord> {
    rounds.iter().flat_map(|r| r.records.iter()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Direct,
    Shared,
    Rendezvous,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub id: u32,
    pub mode: ModeName,
    pub endpoints: Vec<MachineId>,
    /// Shared tape name; required for `shared`, refused otherwise.
    #[serde(default)]
    pub tape: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharedTapeSpec {
    pub id: String,
    #[serde(default)]
    pub content: String,
}

/// A network as written in a spec file (TOML):
///
/// ```toml
/// seed = 7
///
/// [[machine]]
/// id = 0
/// program = "SEND 0 101; HALT"
///
/// [[machine]]
/// id = 1
/// program = "MOVE D\nHALT"
///
/// [[channel]]
/// id = 0
/// mode = "direct"        # direct | shared | rendezvous
/// endpoints = [0, 1]
/// # tape = "t"           # shared mode only
///
/// [[shared_tape]]        # optional starting content of a shared tape
/// id = "t"
/// content = "0000"
///
/// [events]               # optional context, as in an events file
/// no_event = 0.9
/// [[events.event]]
/// id = "flip"
/// kind = "substitute"
/// probability = 0.1
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, rename = "machine")]
    pub machines: Vec<MachineSpec>,
    #[serde(default, rename = "channel")]
    pub channels: Vec<ChannelSpec>,
    #[serde(default, rename = "shared_tape")]
    pub shared_tapes: Vec<SharedTapeSpec>,
    #[serde(default)]
    pub events: Option<EventsFile>,
}

impl NetworkSpec {
    pub fn parse(text: &str) -> Result<NetworkSpec, NetworkError> {
        toml::from_str(text).map_err(|e| NetworkError::Toml(e.to_string()))
    }

    /// Builds the network; `seed` overrides the file's seed.
    pub fn build(&self, seed: Option<u64>) -> Result<Network, NetworkError> {
        let mut net = Network::new(seed.unwrap_or(self.seed));
        if let Some(events) = &self.events {
            net.set_space(events.space()?);
        }
        for m in &self.machines {
            net.add_machine(m.build()?)?;
        }
        for t in &self.shared_tapes {
            let tape = Tape::parse(&t.content, Boundedness::Unbounded, Alphabet::binary())
                .map_err(|e| NetworkError::SharedTape(t.id.clone(), e))?;
            net.set_shared_tape(&t.id, tape);
        }
        for c in &self.channels {
            let bad = |problem: &str| NetworkError::ChannelMode {
                channel: c.id,
                mode: format!("{:?}", c.mode).to_lowercase(),
                problem: problem.into(),
            };
            let mode = match (&c.mode, &c.tape) {
                (ModeName::Shared, Some(t)) => ChannelMode::SharedTape(t.clone()),
                (ModeName::Shared, None) => return Err(bad("needs `tape`")),
                (_, Some(_)) => return Err(bad("takes no `tape`")),
                (ModeName::Direct, None) => ChannelMode::DirectWrite,
                (ModeName::Rendezvous, None) => ChannelMode::Rendezvous,
            };
            net.add_channel(Channel {
                id: c.id,
                mode,
                endpoints: c.endpoints.clone(),
            })?;
        }
        Ok(net)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::context::ContextEvent;
    use crate::cu::{ProgramSource, Status};
    use crate::isa::assemble;

    fn machine(id: MachineId, asm: &str, data: &str) -> AlphaMachine {
        AlphaMachine::with_data(id, ProgramSource::program(&assemble(asm).unwrap()), &bits(data), true)
    }

    fn pair(mode: ChannelMode, a: &str, b: &str, seed: u64) -> Network {
        let mut net = Network::new(seed);
        net.add_machine(machine(0, a, "")).unwrap();
        net.add_machine(machine(1, b, "")).unwrap();
        net.add_channel(Channel {
            id: 0,
            mode,
            endpoints: vec![0, 1],
        })
        .unwrap();
        net
    }

    fn region(tape: &Tape, len: usize) -> String {
        (0..len as i64).map(|i| tape.read(CONTEXT_REGION_START + i).0).collect()
    }

    #[test]
    fn lone_machine_matches_alpha_step() {
        let prog = "READ {WRITE 1 | WRITE 1 | WRITE 0}; MOVE D; READ {HALT | MOVE D | MOVE D}; EMIT 1; HALT";
        let mut alone = machine(0, prog, "0110");
        let mut net = Network::new(3);
        net.add_machine(alone.clone()).unwrap();
        for round in 0.. {
            if !alone.is_running() {
                break;
            }
            let expected = alone.step_at(round, Vec::new(), None).unwrap();
            let log = net.step().unwrap();
            assert_eq!(log.records.len(), 1);
            match &log.records[0].effect {
                Effect::Step { effects } => assert_eq!(*effects, expected),
                other => panic!("unexpected {other:?}"),
            }
        }
        assert_eq!(net.machine(0).unwrap().work(), alone.work());
    }

    #[test]
    fn direct_write_lands_before_next_read() {
        for seed in 0..16 {
            let mut net = pair(ChannelMode::DirectWrite, "SEND 0 101; HALT", "MOVE D; MOVE D; MOVE D; HALT", seed);
            let mut seen = false;
            for _ in 0..300 {
                let log = net.step().unwrap();
                for r in &log.records {
                    if let Effect::Delivered {
                        issued_step,
                        delivered_step,
                        ..
                    } = r.effect
                    {
                        assert!(delivered_step >= issued_step);
                        let sender_slot = log.order.iter().position(|m| *m == 0).unwrap();
                        let receiver_slot = log.order.iter().position(|m| *m == 1).unwrap();
                        if delivered_step == issued_step {
                            assert!(receiver_slot > sender_slot);
                        }
                        seen = true;
                    }
                }
            }
            assert!(seen);
            assert_eq!(region(net.machine(1).unwrap().work(), 3), "101");
        }
    }

    #[test]
    fn rendezvous_without_receiver_blocks_forever() {
        let mut net = pair(ChannelMode::Rendezvous, "SEND 0 1; HALT", "MOVE D; MOVE G", 1);
        // the receiver idles forever by reading an endless copy of nothing
        let mut net2 = Network::new(1);
        net2.add_machine(machine(0, "SEND 0 1; HALT", "")).unwrap();
        let looping = AlphaMachine::new(
            1,
            ProgramSource::generator("idle").unwrap(),
            Tape::blank_binary(Boundedness::Unbounded),
            true,
        );
        net2.add_machine(looping).unwrap();
        net2.add_channel(Channel {
            id: 0,
            mode: ChannelMode::Rendezvous,
            endpoints: vec![0, 1],
        })
        .unwrap();
        while net2.waiting_rounds(0) == 0 {
            net2.step().unwrap();
        }
        for n in 2..=50 {
            net2.step().unwrap();
            assert_eq!(net2.waiting_rounds(0), n);
        }
        assert!(net2.machine(0).unwrap().is_running());
        net.run(400).unwrap();
        assert!(net.waiting_rounds(0) >= 1);
    }

    #[test]
    fn rendezvous_delivers_at_receive() {
        let sender = "MOVE D; MOVE D; SEND 0 11; HALT";
        let receiver = "READ {MOVE D | MOVE D | MOVE D}; READ {HALT | HALT | HALT}";
        for seed in 0..20 {
            let mut net = pair(ChannelMode::Rendezvous, sender, receiver, seed);
            let mut delivered = 0;
            for _ in 0..600 {
                let log = net.step().unwrap();
                for r in &log.records {
                    match &r.effect {
                        Effect::Delivered {
                            mode: DeliveryMode::Rendezvous,
                            issued_step,
                            delivered_step,
                            ..
                        } => {
                            assert_eq!(issued_step, delivered_step);
                            assert_eq!(r.machine, 1);
                            delivered += 1;
                        }
                        Effect::RoutingError { reason, .. } => panic!("{reason}"),
                        _ => {}
                    }
                }
                // the receive and the payload share a step record
                for r in &log.records {
                    if let Effect::Step { effects } = &r.effect {
                        if !effects.deliveries.is_empty() {
                            let rec = effects.record.as_ref().unwrap();
                            assert!(matches!(rec.instruction, Some(Instruction::ReadDispatch(_))));
                        }
                    }
                }
            }
            assert_eq!(delivered, 1, "seed {seed}");
            assert_eq!(net.machine(0).unwrap().status(), Status::Halted);
        }
    }

    #[test]
    fn shared_tape_rounds_serialize() {
        let a = "WRITE 1; MOVE D; WRITE 1; SEND 0 1; HALT";
        let b = "MOVE D; READ {WRITE 0 | WRITE 0 | WRITE 1}; HALT";
        for seed in 0..20 {
            let mut net = pair(ChannelMode::SharedTape("t".into()), a, b, seed);
            let logs = net.run(400).unwrap();
            let mut rounds = 0;
            for log in &logs {
                for r in &log.shared {
                    check_round(r).unwrap();
                    rounds += 1;
                }
            }
            assert!(rounds > 0);
            assert_eq!(net.shared_tape("t").unwrap().read(CONTEXT_REGION_START), Symbol::ONE);
        }
    }

    #[test]
    fn unknown_destination_is_logged() {
        let mut net = Network::new(0);
        net.add_machine(machine(0, "SEND 4 1; REPLICATE @9; HALT", "")).unwrap();
        let logs = net.run(400).unwrap();
        let errors = event_log(&logs)
            .iter()
            .filter(|r| matches!(r.effect, Effect::RoutingError { .. }))
            .count();
        assert!(errors >= 2);
    }

    #[test]
    fn same_seed_same_log() {
        let spec = NetworkSpec::parse(
            r#"
seed = 5
[[machine]]
id = 0
program = "SEND 0 101; MOVE D; WRITE 1; HALT"
[[machine]]
id = 1
program = "MOVE D; WRITE 1; MOVE G; READ {HALT | HALT | HALT}"
[[channel]]
id = 0
mode = "direct"
endpoints = [0, 1]
[events]
no_event = 0.5
[[events.event]]
id = "flip"
kind = "substitute"
probability = 0.5
"#,
        )
        .unwrap();
        let render = |seed| {
            let mut net = spec.build(seed).unwrap();
            let logs = net.run(20).unwrap();
            serde_json::to_string(&event_log(&logs)).unwrap()
        };
        assert_eq!(render(None), render(None));
        assert_ne!(render(None), render(Some(6)));
    }

    #[test]
    fn trajectory_starts_at_initial_words() {
        let mut net = Network::new(0);
        net.add_machine(machine(0, "WRITE 1; HALT", "01")).unwrap();
        let t = process_trajectory(&mut net, &ProbabilitySpace::quiet(), 0).unwrap();
        assert_eq!(t, vec![vec![bits("01")]]);
        let t = process_trajectory(&mut net, &ProbabilitySpace::quiet(), 100).unwrap();
        assert_eq!(t.last().unwrap()[0], bits("11"));
    }

    #[test]
    fn events_hit_stopped_machines() {
        let mut net = Network::new(0).with_space(ProbabilitySpace::substitutions(1.0).unwrap());
        net.add_machine(machine(0, "HALT", "0000")).unwrap();
        let logs = net.run(5).unwrap();
        let steps = event_log(&logs)
            .iter()
            .filter(|r| matches!(&r.effect, Effect::Step { effects } if effects.context_edit.is_some()))
            .count();
        assert_eq!(steps, 5);
        let _ = ContextEvent::delete(0);
    }
}
