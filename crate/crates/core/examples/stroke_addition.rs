//! The verbatim stroke-addition table next to a corrected adder.

use alphamachine::turing::fixtures::{fig2_scheme, unary_addition_scheme};
use alphamachine::turing::{scheme_tape, tm_run};

fn main() {
    let verbatim = fig2_scheme();
    let run = tm_run(&verbatim, scheme_tape(&verbatim, "ll*lll").unwrap(), 0, 1000).unwrap();
    println!("verbatim table on ll*lll:");
    for (i, e) in run.trace.iter().enumerate() {
        println!("  {i:>2}  {} @{} read {} write {} move {:?}", e.state, e.position, e.read, e.written, e.movement);
    }
    println!("  {} with tape {:?}", run.outcome.label(), run.outcome.tape().literal());

    let adder = unary_addition_scheme();
    for (a, b) in [(1, 1), (2, 3), (7, 5)] {
        let input = format!("{}*{}", "l".repeat(a), "l".repeat(b));
        let run = tm_run(&adder, scheme_tape(&adder, &input).unwrap(), 0, 1000).unwrap();
        println!("adder: {input} -> {}", run.outcome.tape().literal());
    }
}
