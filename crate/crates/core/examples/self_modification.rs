//! A machine that rewrites its own program before reading it, run with the
//! program-write head on and off.

use alphamachine::alpha::{run_alone, AlphaMachine};
use alphamachine::cu::ProgramSource;
use alphamachine::isa::{assemble, program_bits};
use alphamachine::tape::{Boundedness, Tape};

fn main() {
    let text = "PWRITE +29 1; EMIT 0; EMIT 1; HALT";
    let bits = program_bits(&assemble(text).unwrap());
    println!("{text}\n{bits}");

    for variability in [true, false] {
        let mut m = AlphaMachine::new(
            0,
            ProgramSource::finite(bits.clone()),
            Tape::blank_binary(Boundedness::Unbounded),
            variability,
        );
        let log = run_alone(&mut m, 1000).unwrap();
        let writes: Vec<_> = log.iter().flat_map(|fx| fx.program_writes.iter()).collect();
        let ignored = log.iter().filter(|fx| fx.ignored.is_some()).count();
        println!(
            "variability {variability}: {:?}, result {:?}, program writes {writes:?}, ignored {ignored}",
            m.status(),
            m.result_bits().to_string()
        );
    }
}
