//! Breadth-first exploration of a nondeterministic machine that guesses its
//! input one bit at a time.

use alphamachine::context::nd::{guess_machine, nd_accepts, nd_frontiers, NdConfig};
use alphamachine::tape::{Alphabet, Boundedness, Tape};

fn main() {
    let scheme = guess_machine();
    let input = Tape::parse("1101", Boundedness::Unbounded, Alphabet::binary()).unwrap();
    let levels = nd_frontiers(&scheme, &NdConfig::start(&scheme, input.clone(), 0), 5);
    for (d, level) in levels.iter().enumerate() {
        println!("depth {d}: {} configurations (at most {})", level.len(), scheme.branching().pow(d as u32));
    }
    let verdict = nd_accepts(&scheme, input, 0, 8);
    println!("accepted: {} after exploring {}", verdict.accepted, verdict.explored);
    if let Some(w) = verdict.witness {
        let guesses: String = w.iter().filter_map(|a| a.write.as_bit()).map(|b| if b { '1' } else { '0' }).collect();
        println!("witness guesses: {guesses}");
    }
}
