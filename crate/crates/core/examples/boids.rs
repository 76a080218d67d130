//! A flock of 30 boids over 2000 steps; prints how tight it gets and writes
//! the trajectory as CSV to the path given, if any.

use alphamachine::scenarios::boids::{boids_run, FlockParams};

fn main() {
    let params = FlockParams::default();
    let run = boids_run(30, 2000, &params, 3);
    for m in run.metrics.iter().step_by(250) {
        println!("step {:>4}: mean distance {:>7.3}, closest pair {:>6.3}", m.step, m.mean_distance, m.min_distance);
    }
    println!("contraction {:.3}", run.contraction());
    println!("spacing kept after step 200: {:.3}", run.spacing_rate(200, params.min_distance));
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, run.trace_csv()).unwrap();
        println!("trace written to {path}");
    }
}
