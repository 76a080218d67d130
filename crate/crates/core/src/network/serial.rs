//! Serializability of accesses to a shared tape.
//!
//! Each machine step on a shared tape is one transaction. Two accesses
//! conflict when they touch the same cell and at least one writes; an edit
//! (insertion, deletion, substitution drawn from the context) conflicts
//! with everything. The precedence graph has an edge `A -> B` whenever an
//! access of `A` precedes a conflicting access of `B`. An acyclic graph
//! yields a serial witness order, which [`verify_witness`] replays.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::alpha::{MachineId, WorkOp};
use crate::context::apply_resolved;
use crate::tape::Tape;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SharedOp {
    /// Position in the round's sequence of accesses to this tape.
    pub seq: usize,
    pub machine: MachineId,
    pub op: WorkOp,
}

/// Everything that happened to one shared tape during one round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SharedRound {
    pub tape: String,
    pub round: u64,
    #[serde(skip)]
    pub before: Tape,
    #[serde(skip)]
    pub after: Tape,
    pub ops: Vec<SharedOp>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConflictEdge {
    pub from: MachineId,
    pub to: MachineId,
    pub from_seq: usize,
    pub to_seq: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Serializability {
    Serializable(Vec<MachineId>),
    /// A cycle of the precedence graph, one edge per hop.
    Conflict(Vec<ConflictEdge>),
}

fn touches(op: &WorkOp) -> Option<(i64, bool)> {
    match op {
        WorkOp::Read { position, .. } => Some((*position, false)),
        WorkOp::Write { position, .. } => Some((*position, true)),
        WorkOp::Edit(_) => None,
    }
}

fn conflict(a: &WorkOp, b: &WorkOp) -> bool {
    match (touches(a), touches(b)) {
        (Some((pa, wa)), Some((pb, wb))) => pa == pb && (wa || wb),
        _ => true,
    }
}

/// Precedence edges, keyed by (from, to), with the first witnessing pair.
pub fn precedence_graph(ops: &[SharedOp]) -> BTreeMap<(MachineId, MachineId), ConflictEdge> {
    let mut sorted: Vec<&SharedOp> = ops.iter().collect();
    sorted.sort_by_key(|o| o.seq);
    let mut edges = BTreeMap::new();
    for (i, a) in sorted.iter().enumerate() {
        for b in &sorted[i + 1..] {
            if a.machine != b.machine && conflict(&a.op, &b.op) {
                edges.entry((a.machine, b.machine)).or_insert(ConflictEdge {
                    from: a.machine,
                    to: b.machine,
                    from_seq: a.seq,
                    to_seq: b.seq,
                });
            }
        }
    }
    edges
}

/// A serial order of the transactions equivalent to the observed
/// interleaving, or a precedence cycle. Among valid orders the one taking
/// the lowest machine id first at each point is returned.
pub fn serialize_check(ops: &[SharedOp]) -> Serializability {
    let machines: BTreeSet<MachineId> = ops.iter().map(|o| o.machine).collect();
    let edges = precedence_graph(ops);
    let mut indegree: BTreeMap<MachineId, usize> = machines.iter().map(|m| (*m, 0)).collect();
    for (_, to) in edges.keys() {
        *indegree.get_mut(to).expect("edge endpoint is a machine") += 1;
    }
    let mut ready: BTreeSet<MachineId> = indegree.iter().filter(|(_, d)| **d == 0).map(|(m, _)| *m).collect();
    let mut order = Vec::new();
    while let Some(m) = ready.pop_first() {
        order.push(m);
        for (_, to) in edges.keys().filter(|(from, _)| *from == m) {
            let d = indegree.get_mut(to).expect("known");
            *d -= 1;
            if *d == 0 {
                ready.insert(*to);
            }
        }
    }
    if order.len() == machines.len() {
        return Serializability::Serializable(order);
    }
    Serializability::Conflict(find_cycle(&machines, &edges, &order))
}

fn find_cycle(
    machines: &BTreeSet<MachineId>,
    edges: &BTreeMap<(MachineId, MachineId), ConflictEdge>,
    sorted: &[MachineId],
) -> Vec<ConflictEdge> {
    // Every machine left out of the topological order lies on or behind a
    // cycle; walking successors inside that set must revisit a machine.
    let rest: BTreeSet<MachineId> = machines.iter().filter(|m| !sorted.contains(m)).copied().collect();
    let mut path = vec![*rest.first().expect("a cycle exists")];
    loop {
        let here = *path.last().expect("non-empty");
        let next = edges
            .keys()
            .find(|(from, to)| *from == here && rest.contains(to))
            .map(|(_, to)| *to)
            .expect("every remaining machine has a remaining predecessor chain");
        if let Some(start) = path.iter().position(|m| *m == next) {
            let mut cycle: Vec<MachineId> = path[start..].to_vec();
            cycle.push(next);
            return cycle.windows(2).map(|w| edges[&(w[0], w[1])].clone()).collect();
        }
        path.push(next);
    }
}

/// Replays the transactions serially in `order` from `before`: every read
/// must see what it saw in the log and the end state must equal `after`.
pub fn verify_witness(before: &Tape, after: &Tape, ops: &[SharedOp], order: &[MachineId]) -> bool {
    let mut tape = before.clone();
    let mut by_machine: BTreeMap<MachineId, Vec<&SharedOp>> = BTreeMap::new();
    for o in ops {
        by_machine.entry(o.machine).or_default().push(o);
    }
    if by_machine.len() != order.len() || !order.iter().all(|m| by_machine.contains_key(m)) {
        return false;
    }
    for m in order {
        let mut mine = by_machine[m].clone();
        mine.sort_by_key(|o| o.seq);
        for o in mine {
            match &o.op {
                WorkOp::Read { position, seen } => {
                    if tape.read(*position) != *seen {
                        return false;
                    }
                }
                WorkOp::Write { position, after, .. } => {
                    if tape.write(*position, *after).is_err() {
                        return false;
                    }
                }
                WorkOp::Edit(edit) => {
                    if apply_resolved(edit, &mut tape, &mut []).is_err() {
                        return false;
                    }
                }
            }
        }
    }
    tape == *after
}

/// Checks one shared round end to end: serializable, and the witness
/// replays.
pub fn check_round(round: &SharedRound) -> Result<Vec<MachineId>, String> {
    match serialize_check(&round.ops) {
        Serializability::Serializable(order) => {
            if verify_witness(&round.before, &round.after, &round.ops, &order) {
                Ok(order)
            } else {
                Err(format!("witness {order:?} does not replay"))
            }
        }
        Serializability::Conflict(cycle) => Err(format!("conflict cycle {cycle:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tape::{Boundedness, Symbol};

    fn read(seq: usize, machine: MachineId, position: i64, seen: Symbol) -> SharedOp {
        SharedOp {
            seq,
            machine,
            op: WorkOp::Read { position, seen },
        }
    }

    fn write(seq: usize, machine: MachineId, position: i64, before: Symbol, after: Symbol) -> SharedOp {
        SharedOp {
            seq,
            machine,
            op: WorkOp::Write { position, before, after },
        }
    }

    #[test]
    fn disjoint_writers_serialize_in_id_order() {
        let ops = vec![
            write(0, 2, 0, Symbol::BLANK, Symbol::ONE),
            write(1, 1, 5, Symbol::BLANK, Symbol::ONE),
        ];
        assert_eq!(serialize_check(&ops), Serializability::Serializable(vec![1, 2]));
        let before = Tape::blank_binary(Boundedness::Unbounded);
        let mut after = before.clone();
        after.write(0, Symbol::ONE).unwrap();
        after.write(5, Symbol::ONE).unwrap();
        assert!(verify_witness(&before, &after, &ops, &[1, 2]));
        assert!(verify_witness(&before, &after, &ops, &[2, 1]));
    }

    #[test]
    fn write_then_read_orders_writer_first() {
        let ops = vec![
            write(0, 2, 3, Symbol::BLANK, Symbol::ONE),
            read(1, 1, 3, Symbol::ONE),
        ];
        assert_eq!(serialize_check(&ops), Serializability::Serializable(vec![2, 1]));
    }

    #[test]
    fn unrepeatable_read_is_a_cycle() {
        let ops = vec![
            read(0, 1, 0, Symbol::ZERO),
            write(1, 2, 0, Symbol::ZERO, Symbol::ONE),
            read(2, 1, 0, Symbol::ONE),
        ];
        match serialize_check(&ops) {
            Serializability::Conflict(cycle) => {
                let hops: Vec<(MachineId, MachineId)> = cycle.iter().map(|e| (e.from, e.to)).collect();
                assert!(hops == vec![(1, 2), (2, 1)] || hops == vec![(2, 1), (1, 2)]);
            }
            other => panic!("expected a conflict, got {other:?}"),
        }
    }
}
