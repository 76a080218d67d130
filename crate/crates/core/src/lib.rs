pub mod bits;
pub mod tape;
pub mod turing;
pub mod codec;
pub mod isa;
pub mod cu;
pub mod rng;
pub mod context;
pub mod alpha;
pub mod network;
pub mod trace;
pub mod scenarios;
pub mod cli;
