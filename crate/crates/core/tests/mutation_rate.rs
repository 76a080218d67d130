//! Substitutions during one copy of a 1134-bit genome follow the binomial
//! model: one draw per round, one bit copied per round.

use alphamachine::context::ProbabilitySpace;
use alphamachine::rng::{rng, stream};
use alphamachine::scenarios::genome::{random_word, replicate_once};
use rand::Rng;

#[test]
fn substitution_counts_match_the_rate() {
    let rate = 0.01;
    let genome = random_word(1134, 1);
    let space = ProbabilitySpace::substitutions(rate).unwrap();
    let mut seeds = rng(8, stream::SCENARIO);
    let trials = 200;
    let total: usize = (0..trials)
        .map(|_| replicate_once(&genome, &space, seeds.gen()).unwrap().1.len())
        .sum();
    let mean = total as f64 / trials as f64;
    let expected = 1134.0 * rate;
    let sigma = (1134.0 * rate * (1.0 - rate) / trials as f64).sqrt();
    assert!((mean - expected).abs() <= 3.0 * sigma, "mean {mean}, expected {expected} +- {}", 3.0 * sigma);
}
