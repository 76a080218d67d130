//! The two worked demonstrations: a flock of boids, and a genome copied
//! from generation to generation under random edits.

pub mod boids;
pub mod genome;
