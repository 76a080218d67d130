//! Genome replication under a stochastic context, and distances between
//! sequences.
//!
//! A generation is one α-machine whose program is `REPLICATE work`
//! followed by the parent genome. It copies the genome onto its own work
//! tape, one bit per round, while context events edit the part copied so
//! far. The child is the work word once the copy halts.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alpha::AlphaMachine;
use crate::bits::{BitString, Word};
use crate::context::{distance_matrix, replay_edits, word_distance, AppliedEdit, ProbabilitySpace};
use crate::cu::{ProgramSource, Status};
use crate::isa::{Instruction, ReplicateTarget};
use crate::network::{word_of, Effect, Network};
use crate::rng::{rng, stream};
use crate::tape::{Boundedness, Tape, TapeError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generation {
    pub genome: Word,
    /// Edits that hit the copy, in the order they happened.
    pub events: Vec<AppliedEdit>,
    /// Index of the parent generation; `None` for the ancestor.
    pub parent: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lineage {
    pub generations: Vec<Generation>,
}

impl Lineage {
    /// Every child equals its parent with its events replayed.
    pub fn is_consistent(&self) -> bool {
        self.generations.iter().all(|g| match g.parent {
            None => g.events.is_empty(),
            Some(p) => replay_edits(&self.generations[p].genome, &g.events) == g.genome,
        })
    }

    pub fn genomes(&self) -> Vec<Word> {
        self.generations.iter().map(|g| g.genome.clone()).collect()
    }
}

/// Machine that copies `genome` onto its work tape and halts.
pub fn replicator(genome: &Word) -> AlphaMachine {
    let program = ProgramSource::program(&[Instruction::Replicate(ReplicateTarget::LocalWork)]);
    let source = ProgramSource::finite(program.prefix.concat(genome));
    AlphaMachine::new(0, source, Tape::blank_binary(Boundedness::Unbounded), true)
}

/// One copy of `genome` under `space`: the child and the edits applied.
pub fn replicate_once(genome: &Word, space: &ProbabilitySpace, seed: u64) -> Result<(Word, Vec<AppliedEdit>), TapeError> {
    let mut net = Network::new(seed).with_space(space.clone());
    net.add_machine(replicator(genome)).expect("a single machine");
    let mut events = Vec::new();
    while net.machine(0).expect("added").status() == Status::Running {
        for record in net.step()?.records {
            if let Effect::Step { effects } = record.effect {
                events.extend(effects.context_edit);
            }
        }
    }
    Ok((word_of(net.machine(0).expect("added").work()), events))
}

/// `generations` successive copies, each of the previous genome.
pub fn genetic_replicate(
    genome: &Word,
    space: &ProbabilitySpace,
    generations: usize,
    seed: u64,
) -> Result<Lineage, TapeError> {
    let mut seeds = rng(seed, stream::SCENARIO);
    let mut lineage = Lineage {
        generations: vec![Generation {
            genome: genome.clone(),
            events: Vec::new(),
            parent: None,
        }],
    };
    for g in 0..generations {
        let parent = &lineage.generations[g].genome;
        let (child, events) = replicate_once(parent, space, seeds.gen())?;
        lineage.generations.push(Generation {
            genome: child,
            events,
            parent: Some(g),
        });
    }
    Ok(lineage)
}

/// Pairwise edit distances between sequences.
pub fn phylo_distance_matrix(sequences: &[Word]) -> Vec<Vec<usize>> {
    distance_matrix(sequences)
}

pub fn random_word(len: usize, seed: u64) -> Word {
    let mut r = rng(seed, stream::SCENARIO);
    BitString::from_bits((0..len).map(|_| r.gen()).collect())
}

/// A random word of length `len` and a copy with exactly `substitutions`
/// of its zeros turned to ones. Each substitution changes the number of
/// ones by one, so the edit distance between the two is exactly
/// `substitutions`.
pub fn synthetic_pair(len: usize, substitutions: usize, seed: u64) -> (Word, Word) {
    let mut r = rng(seed, stream::SCENARIO);
    let mut bits: Vec<bool> = (0..len).map(|_| r.gen()).collect();
    let zeros = bits.iter().filter(|b| !**b).count();
    if zeros < substitutions {
        // clear enough random cells first
        for i in sample(&mut r, len, substitutions.min(len)).into_iter() {
            bits[i] = false;
        }
    }
    let zero_at: Vec<usize> = (0..len).filter(|i| !bits[*i]).collect();
    let mut other = bits.clone();
    for k in sample(&mut r, zero_at.len(), substitutions).into_iter() {
        other[zero_at[k]] = true;
    }
    (BitString::from_bits(bits), BitString::from_bits(other))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DnaError {
    #[error("not a nucleotide: {0:?}")]
    Nucleotide(char),
    #[error("odd number of bits: {0}")]
    OddLength(usize),
}

/// Two bits per nucleotide: A=00, C=01, G=10, T=11.
pub fn dna_to_bits(dna: &str) -> Result<Word, DnaError> {
    let mut out = BitString::new();
    for c in dna.chars().filter(|c| !c.is_whitespace()) {
        let pair = match c.to_ascii_uppercase() {
            'A' => [false, false],
            'C' => [false, true],
            'G' => [true, false],
            'T' => [true, true],
            _ => return Err(DnaError::Nucleotide(c)),
        };
        out.push(pair[0]);
        out.push(pair[1]);
    }
    Ok(out)
}

pub fn bits_to_dna(word: &Word) -> Result<String, DnaError> {
    if !word.len().is_multiple_of(2) {
        return Err(DnaError::OddLength(word.len()));
    }
    Ok(word
        .as_slice()
        .chunks(2)
        .map(|p| match (p[0], p[1]) {
            (false, false) => 'A',
            (false, true) => 'C',
            (true, false) => 'G',
            (true, true) => 'T',
        })
        .collect())
}

/// Largest distance between a generation and its parent, relative to the
/// number of edits it received: never above 1.
pub fn distance_per_event(lineage: &Lineage) -> Vec<(usize, usize)> {
    lineage
        .generations
        .iter()
        .filter_map(|g| {
            let p = g.parent?;
            Some((word_distance(&lineage.generations[p].genome, &g.genome), g.events.len()))
        })
        .collect()
}
