//! The three-tape calculator: a copy program, its reduced program, and the
//! output's independence from whatever follows the reduced program.

use alphamachine::bits::BitString;
use alphamachine::cu::{copy_program, cu_run, reduced_program, ProgramSource};
use alphamachine::isa::program_bits;

fn main() {
    let data: BitString = "1011".parse().unwrap();
    let program = program_bits(&copy_program(data.len()));
    // a tail the calculator never reaches
    let noisy = program.concat(&"0110111010".parse().unwrap());

    let run = cu_run(&ProgramSource::finite(noisy.clone()), &data, 10_000);
    println!("output {:?} after {} steps", run.output.as_ref().map(ToString::to_string), run.steps);

    let pr = reduced_program(&ProgramSource::finite(noisy), &data, 10_000).unwrap();
    println!("reduced program: {} of {} bits", pr.len(), program.len() + 10);
    for tail in ["", "1", "000111", "1111111111111"] {
        let p = pr.concat(&tail.parse().unwrap());
        let again = cu_run(&ProgramSource::finite(p), &data, 10_000);
        println!("  pr + {tail:<13} -> {}", again.output.unwrap());
    }

    let looping = ProgramSource::generator("idle").unwrap();
    let run = cu_run(&looping, &data, 100);
    println!("endless program with 100 steps of fuel: halted={} end={:?}", run.halted, run.end);
}
