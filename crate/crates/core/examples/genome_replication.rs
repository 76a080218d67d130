//! A genome copied over several generations under point mutations, with the
//! distance matrix of the lineage and two synthetic pairs at fixed distance.

use alphamachine::context::word_distance;
use alphamachine::context::ProbabilitySpace;
use alphamachine::scenarios::genome::{
    bits_to_dna, dna_to_bits, genetic_replicate, phylo_distance_matrix, synthetic_pair,
};

fn main() {
    let ancestor = dna_to_bits("ATGGCCATTGTAATGGGCCGCTGAAAGGGTGCCCGATAG").unwrap();
    let space = ProbabilitySpace::substitutions(0.02).unwrap();
    let lineage = genetic_replicate(&ancestor, &space, 5, 42).unwrap();
    assert!(lineage.is_consistent());
    for (i, g) in lineage.generations.iter().enumerate() {
        println!("{i}: {} ({} edits)", bits_to_dna(&g.genome).unwrap_or_else(|_| g.genome.to_string()), g.events.len());
    }
    for row in phylo_distance_matrix(&lineage.genomes()) {
        println!("{row:?}");
    }

    for k in [31, 120] {
        let (a, b) = synthetic_pair(1134, k, 9);
        println!("synthetic pair, {k} substitutions over 1134: distance {}", word_distance(&a, &b));
    }
}
