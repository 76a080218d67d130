//! Sampling context events, their effect on a word, and the trajectory of
//! a small network's work words under them.

use alphamachine::bits::BitString;
use alphamachine::context::{apply_to_word, sample_event, word_distance, EventsFile};
use alphamachine::network::{process_trajectory, NetworkSpec};
use alphamachine::rng::{rng, stream};

fn main() {
    let space = EventsFile::parse(include_str!("../fixtures/events.toml"))
        .unwrap()
        .space()
        .unwrap();

    let mut r = rng(1, stream::EVENTS);
    let mut word: BitString = "1011001110".parse().unwrap();
    let mut edits = 0;
    for _ in 0..2000 {
        if let Some(event) = sample_event(&space, &mut r) {
            let (next, applied) = apply_to_word(&event, &word);
            assert!(word_distance(&word, &next) <= 1);
            if !applied.is_noop() {
                edits += 1;
            }
            word = next;
        }
    }
    println!("after 2000 draws and {edits} edits: {word}");

    let spec = NetworkSpec::parse(include_str!("../fixtures/direct.net.toml")).unwrap();
    let mut net = spec.build(None).unwrap();
    let trajectory = process_trajectory(&mut net, &space, 200).unwrap();
    for (t, words) in trajectory.iter().enumerate().step_by(25) {
        let words: Vec<String> = words.iter().map(ToString::to_string).collect();
        println!("t={t:>3} {words:?}");
    }
}
