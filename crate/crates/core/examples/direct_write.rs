//! One machine writes into another's context region; the event log is
//! printed as line-delimited JSON.

use alphamachine::network::{event_log, Effect, NetworkSpec};
use alphamachine::trace::to_jsonl;

fn main() {
    let spec = NetworkSpec::parse(include_str!("../fixtures/direct.net.toml")).unwrap();
    let mut net = spec.build(None).unwrap();
    let logs = net.run(300).unwrap();
    let records = event_log(&logs);
    let interesting: Vec<_> = records
        .into_iter()
        .filter(|r| !matches!(r.effect, Effect::Step { .. }))
        .collect();
    print!("{}", to_jsonl("net-events", &interesting));
    let receiver = net.machine(1).unwrap();
    let (start, cells) = receiver.work().trimmed();
    let text: String = cells.iter().map(|s| s.0).collect();
    println!("receiver work tape from cell {start}: {text}");
}
