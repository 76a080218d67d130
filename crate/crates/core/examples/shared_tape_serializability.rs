//! Rounds of two machines on one shared tape, each checked for an
//! equivalent serial order; then a hand-built round with a conflict cycle.

use alphamachine::alpha::WorkOp;
use alphamachine::network::{check_round, serialize_check, NetworkSpec, SharedOp};
use alphamachine::tape::Symbol;

fn main() {
    let spec = NetworkSpec::parse(include_str!("../fixtures/shared.net.toml")).unwrap();
    for seed in 0..4 {
        let mut net = spec.build(Some(seed)).unwrap();
        let logs = net.run(400).unwrap();
        for log in &logs {
            for round in &log.shared {
                let order = check_round(round).unwrap();
                println!("seed {seed} round {:>3}: {} ops, serial order {order:?}", round.round, round.ops.len());
            }
        }
    }

    let op = |seq, machine, op| SharedOp { seq, machine, op };
    let read = |position| WorkOp::Read { position, seen: Symbol::ZERO };
    let write = |position| WorkOp::Write {
        position,
        before: Symbol::ZERO,
        after: Symbol::ONE,
    };
    let cycle = [op(0, 1, read(0)), op(1, 2, write(0)), op(2, 2, read(1)), op(3, 1, write(1))];
    println!("{:?}", serialize_check(&cycle));
}
