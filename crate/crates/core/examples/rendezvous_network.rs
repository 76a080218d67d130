//! Two machines joined by a rendezvous channel: the sender waits until the
//! receiver reads, and the bits land in the receiver's step.

use alphamachine::network::{event_log, DeliveryMode, Effect, NetworkSpec};

fn main() {
    let spec = NetworkSpec::parse(include_str!("../fixtures/rendezvous.net.toml")).unwrap();
    let mut net = spec.build(None).unwrap();
    let logs = net.run(400).unwrap();
    for r in event_log(&logs) {
        match &r.effect {
            Effect::Blocked { waiting, .. } if *waiting % 5 == 1 => {
                println!("round {:>3}: machine {} waiting ({} rounds)", r.step, r.machine, waiting)
            }
            Effect::Rendezvous { receiver, .. } => {
                println!("round {:>3}: machine {} meets machine {receiver}", r.step, r.machine)
            }
            Effect::Delivered {
                mode: DeliveryMode::Rendezvous,
                payload,
                issued_step,
                delivered_step,
                ..
            } => println!(
                "round {:>3}: machine {} receives {payload} (sent {issued_step}, read {delivered_step})",
                r.step, r.machine
            ),
            _ => {}
        }
    }
    for m in net.machines() {
        println!("machine {}: {:?}, waited {} rounds", m.id(), m.status(), net.waiting_rounds(m.id()));
    }
}
