//! Flocking. Each boid looks at the boids within its perception radius and
//! picks the first rule that applies, in this order:
//!
//! 1. separation: some neighbor is closer than the minimum distance; back
//!    away from the close ones by the missing distance, at most cruise speed;
//! 2. obstacle ahead: turn onto the tangent of the obstacle;
//! 3. regrouping: a boid that had to dodge (rule 1 or 2) flies at boost
//!    speed towards the flock barycenter while it is farther than the
//!    perception radius from it;
//! 4. cohesion: drift towards the barycenter of the neighbors while being
//!    pushed off neighbors inside a comfort distance; the step never takes
//!    up more than half of the room left to any neighbor ahead.
//!
//! A boid with no rule to apply keeps its velocity. Every controller reads
//! the same snapshot of the flock, so the order in which the scheduler runs
//! them is not observable.

use std::fmt::Write as _;
use std::ops::{Add, Mul, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::network::RoundScheduler;
use crate::rng::{rng, stream};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Vec2 {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    /// Unit vector, or `None` for (near) zero.
    pub fn unit(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 1e-12).then(|| self * (1.0 / n))
    }

    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

pub fn barycenter(points: impl IntoIterator<Item = Vec2>) -> Option<Vec2> {
    let (sum, n) = points.into_iter().fold((Vec2::ZERO, 0usize), |(s, n), p| (s + p, n + 1));
    (n > 0).then(|| sum * (1.0 / n as f64))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Obstacle {
    Point(Vec2),
    Segment(Vec2, Vec2),
}

impl Obstacle {
    /// The obstacle point nearest to `p`.
    pub fn closest(&self, p: Vec2) -> Vec2 {
        match *self {
            Obstacle::Point(c) => c,
            Obstacle::Segment(a, b) => {
                let ab = b - a;
                let len2 = ab.dot(ab);
                if len2 == 0.0 {
                    return a;
                }
                let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
                a + ab * t
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlockParams {
    pub perception_radius: f64,
    pub min_distance: f64,
    pub cruise_speed: f64,
    pub boost_speed: f64,
    pub obstacles: Vec<Obstacle>,
    /// Arena `[0, width] × [0, height]`; its walls are obstacles too.
    pub width: f64,
    pub height: f64,
    /// Boids start uniformly in a disc of this radius at the arena center.
    pub spawn_radius: f64,
    /// Fraction of the way to the neighbor barycenter covered per step.
    pub cohesion_gain: f64,
    /// While closing in, neighbors nearer than this push back...
    pub comfort_distance: f64,
    /// ...by this much per unit of intrusion.
    pub spacing_gain: f64,
}

impl Default for FlockParams {
    fn default() -> FlockParams {
        FlockParams {
            perception_radius: 10.0,
            min_distance: 2.0,
            cruise_speed: 1.0,
            boost_speed: 2.0,
            obstacles: Vec::new(),
            width: 100.0,
            height: 100.0,
            spawn_radius: 18.0,
            cohesion_gain: 0.03,
            comfort_distance: 3.5,
            spacing_gain: 0.15,
        }
    }
}

impl FlockParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0 < self.min_distance && self.min_distance < self.perception_radius) {
            return Err("need 0 < min_distance < perception_radius".into());
        }
        if !(0.0 < self.cruise_speed && self.cruise_speed < self.boost_speed) {
            return Err("need 0 < cruise_speed < boost_speed".into());
        }
        if !(self.width > 0.0 && self.height > 0.0) {
            return Err("arena must have positive size".into());
        }
        Ok(())
    }

    fn walls(&self) -> [Obstacle; 4] {
        let (w, h) = (self.width, self.height);
        let c = [Vec2::new(0.0, 0.0), Vec2::new(w, 0.0), Vec2::new(w, h), Vec2::new(0.0, h)];
        [
            Obstacle::Segment(c[0], c[1]),
            Obstacle::Segment(c[1], c[2]),
            Obstacle::Segment(c[2], c[3]),
            Obstacle::Segment(c[3], c[0]),
        ]
    }

    pub fn max_speed(&self) -> f64 {
        self.boost_speed
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Boid {
    pub id: u32,
    pub position: Vec2,
    pub velocity: Vec2,
    /// Dodged something and has not yet rejoined the flock.
    pub regrouping: bool,
}

/// Which rule set a boid's velocity this step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Separation,
    Obstacle,
    Regroup,
    Cohesion,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flock {
    pub step: u64,
    pub boids: Vec<Boid>,
}

impl Flock {
    /// `n` boids placed uniformly in the spawn disc, heading in uniform
    /// directions at cruise speed.
    pub fn spawn(n: usize, params: &FlockParams, seed: u64) -> Flock {
        let mut r = rng(seed, stream::SCENARIO);
        let center = Vec2::new(params.width / 2.0, params.height / 2.0);
        let boids = (0..n)
            .map(|i| {
                let radius = params.spawn_radius * r.gen::<f64>().sqrt();
                let angle = r.gen::<f64>() * std::f64::consts::TAU;
                let heading = r.gen::<f64>() * std::f64::consts::TAU;
                Boid {
                    id: i as u32,
                    position: center + Vec2::new(angle.cos(), angle.sin()) * radius,
                    velocity: Vec2::new(heading.cos(), heading.sin()) * params.cruise_speed,
                    regrouping: false,
                }
            })
            .collect();
        Flock { step: 0, boids }
    }

    pub fn barycenter(&self) -> Option<Vec2> {
        barycenter(self.boids.iter().map(|b| b.position))
    }

    pub fn mean_distance_to_barycenter(&self) -> f64 {
        let Some(c) = self.barycenter() else { return 0.0 };
        self.boids.iter().map(|b| b.position.dist(c)).sum::<f64>() / self.boids.len() as f64
    }

    /// Smallest distance between two boids; infinite below two boids.
    pub fn min_pairwise_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.boids.iter().enumerate() {
            for b in &self.boids[i + 1..] {
                best = best.min(a.position.dist(b.position));
            }
        }
        best
    }
}

/// What one controller sees: its neighbors and the flock barycenter.
struct Perception {
    neighbors: Vec<Vec2>,
    flock_center: Vec2,
}

fn perceive(flock: &Flock, me: usize, params: &FlockParams) -> Perception {
    let p = flock.boids[me].position;
    let neighbors = flock
        .boids
        .iter()
        .enumerate()
        .filter(|(j, b)| *j != me && b.position.dist(p) <= params.perception_radius)
        .map(|(_, b)| b.position)
        .collect();
    Perception {
        neighbors,
        flock_center: flock.barycenter().unwrap_or(p),
    }
}

fn fallback_direction(id: u32) -> Vec2 {
    let a = id as f64 * 2.399_963_229_728_653; // golden angle
    Vec2::new(a.cos(), a.sin())
}

/// Velocity from separation, if a neighbor is too close.
fn separation(boid: &Boid, seen: &Perception, params: &FlockParams) -> Option<Vec2> {
    let close: Vec<Vec2> = seen
        .neighbors
        .iter()
        .filter(|q| boid.position.dist(**q) < params.min_distance)
        .copied()
        .collect();
    if close.is_empty() {
        return None;
    }
    let away = close.iter().fold(Vec2::ZERO, |acc, q| {
        acc + (boid.position - *q).unit().unwrap_or_else(|| fallback_direction(boid.id))
    });
    let dir = away.unit().unwrap_or_else(|| fallback_direction(boid.id));
    let nearest = close.iter().map(|q| boid.position.dist(*q)).fold(f64::INFINITY, f64::min);
    Some(dir * params.cruise_speed.min(params.min_distance - nearest))
}

/// The nearest obstacle point straight ahead, within perception range and
/// closer to the flight line than the minimum distance.
fn obstacle_ahead(boid: &Boid, params: &FlockParams) -> Option<Vec2> {
    let heading = boid.velocity.unit()?;
    params
        .obstacles
        .iter()
        .chain(params.walls().iter())
        .map(|o| o.closest(boid.position))
        .filter(|c| {
            let rel = *c - boid.position;
            let along = rel.dot(heading);
            let off = (rel - heading * along).norm();
            along > 0.0 && rel.norm() <= params.perception_radius && off < params.min_distance
        })
        .min_by(|a, b| boid.position.dist(*a).total_cmp(&boid.position.dist(*b)))
}

/// The velocity turned onto the tangent of the obstacle at `point`, the
/// tangent closest to the current heading, speed unchanged.
pub fn tangent_velocity(position: Vec2, velocity: Vec2, point: Vec2) -> Vec2 {
    let speed = velocity.norm();
    let Some(radial) = (point - position).unit() else {
        return velocity;
    };
    let t = radial.perp();
    let t = if t.dot(velocity) >= 0.0 { t } else { t * -1.0 };
    t * speed
}

fn cohesion(boid: &Boid, seen: &Perception, params: &FlockParams) -> Option<Vec2> {
    let center = barycenter(seen.neighbors.iter().copied())?;
    let mut step = (center - boid.position) * params.cohesion_gain;
    // keep some elbow room while closing in
    for q in &seen.neighbors {
        let gap = boid.position.dist(*q);
        if gap < params.comfort_distance {
            let away = (boid.position - *q).unit().unwrap_or_else(|| fallback_direction(boid.id));
            step = step + away * (params.spacing_gain * (params.comfort_distance - gap));
        }
    }
    let Some(dir) = step.unit() else {
        return Some(Vec2::ZERO);
    };
    let len = step
        .norm()
        .min(params.cruise_speed)
        .min(safe_length(boid.position, dir, &seen.neighbors, params));
    Some(dir * len)
}

/// Longest step along `dir` that approaches no neighbor by more than half
/// of its spare distance: two boids closing in on each other at once still
/// keep the minimum distance.
fn safe_length(p: Vec2, dir: Vec2, neighbors: &[Vec2], params: &FlockParams) -> f64 {
    neighbors
        .iter()
        .filter(|q| dir.dot(**q - p) > 0.0)
        .map(|q| ((p.dist(*q) - params.min_distance) / 2.0 - 1e-9).max(0.0))
        .fold(f64::INFINITY, f64::min)
}

/// One controller decision.
pub fn steer(flock: &Flock, me: usize, params: &FlockParams) -> (Vec2, bool, Rule) {
    let boid = &flock.boids[me];
    let seen = perceive(flock, me, params);
    if let Some(v) = separation(boid, &seen, params) {
        return (v, true, Rule::Separation);
    }
    if let Some(point) = obstacle_ahead(boid, params) {
        return (tangent_velocity(boid.position, boid.velocity, point), true, Rule::Obstacle);
    }
    if boid.regrouping {
        let gap = seen.flock_center - boid.position;
        if gap.norm() > params.perception_radius {
            let dir = gap.unit().expect("far from the center");
            return (dir * params.boost_speed, true, Rule::Regroup);
        }
    }
    match cohesion(boid, &seen, params) {
        Some(v) => (v, false, Rule::Cohesion),
        None => (boid.velocity, false, Rule::None),
    }
}

fn clamp_into(p: Vec2, params: &FlockParams) -> Vec2 {
    Vec2::new(p.x.clamp(0.0, params.width), p.y.clamp(0.0, params.height))
}

/// Advances the flock by one step, running the controllers in `order`
/// (indices into the boid list). Returns the rule each boid followed.
pub fn boids_step_ordered(flock: &mut Flock, params: &FlockParams, order: &[usize]) -> Vec<Rule> {
    let snapshot = flock.clone();
    let mut rules = vec![Rule::None; flock.boids.len()];
    for &i in order {
        let (velocity, regrouping, rule) = steer(&snapshot, i, params);
        let b = &mut flock.boids[i];
        b.velocity = velocity;
        b.regrouping = regrouping;
        b.position = clamp_into(b.position + velocity, params);
        rules[i] = rule;
    }
    flock.step += 1;
    rules
}

/// Advances the flock by one step.
pub fn boids_step(flock: &mut Flock, params: &FlockParams) -> Vec<Rule> {
    let order: Vec<usize> = (0..flock.boids.len()).collect();
    boids_step_ordered(flock, params, &order)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlockMetrics {
    pub step: u64,
    pub mean_distance: f64,
    pub min_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoidsRun {
    /// The flock before the first step and after each step.
    pub trace: Vec<Flock>,
    pub metrics: Vec<FlockMetrics>,
}

fn metrics_of(flock: &Flock) -> FlockMetrics {
    FlockMetrics {
        step: flock.step,
        mean_distance: flock.mean_distance_to_barycenter(),
        min_distance: flock.min_pairwise_distance(),
    }
}

/// Spawns `n` boids and runs `steps` steps. Controllers are scheduled in a
/// seeded order each step.
pub fn boids_run(n: usize, steps: u64, params: &FlockParams, seed: u64) -> BoidsRun {
    let mut flock = Flock::spawn(n, params, seed);
    let mut scheduler = RoundScheduler::new(seed);
    let ids: Vec<usize> = (0..n).collect();
    let mut trace = vec![flock.clone()];
    let mut metrics = vec![metrics_of(&flock)];
    for _ in 0..steps {
        let order = scheduler.order(&ids);
        boids_step_ordered(&mut flock, params, &order);
        metrics.push(metrics_of(&flock));
        trace.push(flock.clone());
    }
    BoidsRun { trace, metrics }
}

impl BoidsRun {
    /// `step,id,x,y,vx,vy`, one row per boid per step.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("step,id,x,y,vx,vy\n");
        for f in &self.trace {
            for b in &f.boids {
                writeln!(
                    out,
                    "{},{},{:.6},{:.6},{:.6},{:.6}",
                    f.step, b.id, b.position.x, b.position.y, b.velocity.x, b.velocity.y
                )
                .expect("writing to a string");
            }
        }
        out
    }

    /// `step,mean_distance,min_distance`, one row per step.
    pub fn metrics_csv(&self) -> String {
        let mut out = String::from("step,mean_distance,min_distance\n");
        for m in &self.metrics {
            writeln!(out, "{},{:.6},{:.6}", m.step, m.mean_distance, m.min_distance).expect("writing to a string");
        }
        out
    }

    /// Final over initial mean distance to the barycenter.
    pub fn contraction(&self) -> f64 {
        let first = self.metrics.first().map_or(0.0, |m| m.mean_distance);
        let last = self.metrics.last().map_or(0.0, |m| m.mean_distance);
        if first == 0.0 {
            1.0
        } else {
            last / first
        }
    }

    /// Fraction of steps from `warmup` on whose closest pair keeps at
    /// least `min_distance` apart.
    pub fn spacing_rate(&self, warmup: u64, min_distance: f64) -> f64 {
        let after: Vec<&FlockMetrics> = self.metrics.iter().filter(|m| m.step >= warmup).collect();
        if after.is_empty() {
            return 1.0;
        }
        after.iter().filter(|m| m.min_distance >= min_distance).count() as f64 / after.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open_params() -> FlockParams {
        FlockParams {
            width: 1e6,
            height: 1e6,
            ..FlockParams::default()
        }
    }

    fn boid(id: u32, x: f64, y: f64, vx: f64, vy: f64) -> Boid {
        Boid {
            id,
            position: Vec2::new(x, y),
            velocity: Vec2::new(vx, vy),
            regrouping: false,
        }
    }

    #[test]
    fn lone_boid_flies_straight() {
        let params = open_params();
        let mut flock = Flock {
            step: 0,
            boids: vec![boid(0, 500.0, 500.0, 0.6, 0.8)],
        };
        for k in 1..=50 {
            boids_step(&mut flock, &params);
            let p = flock.boids[0].position;
            assert!((p.x - (500.0 + 0.6 * k as f64)).abs() < 1e-9);
            assert!((p.y - (500.0 + 0.8 * k as f64)).abs() < 1e-9);
            assert!((flock.boids[0].velocity.norm() - params.cruise_speed).abs() < 1e-12);
        }
    }

    #[test]
    fn close_pair_separates() {
        let params = open_params();
        let mut flock = Flock {
            step: 0,
            boids: vec![boid(0, 500.0, 500.0, 1.0, 0.0), boid(1, 501.0, 500.0, -1.0, 0.0)],
        };
        let before = flock.min_pairwise_distance();
        let rules = boids_step(&mut flock, &params);
        assert_eq!(rules, vec![Rule::Separation, Rule::Separation]);
        assert!(flock.min_pairwise_distance() > before);
    }

    #[test]
    fn obstacle_turns_onto_tangent() {
        let point = Vec2::new(505.0, 500.3);
        let params = FlockParams {
            obstacles: vec![Obstacle::Point(point)],
            ..open_params()
        };
        let mut flock = Flock {
            step: 0,
            boids: vec![boid(0, 500.0, 500.0, 1.0, 0.0)],
        };
        let rules = boids_step(&mut flock, &params);
        assert_eq!(rules[0], Rule::Obstacle);
        let v = flock.boids[0].velocity;
        let radial = (point - Vec2::new(500.0, 500.0)).unit().unwrap();
        assert!(v.unit().unwrap().dot(radial).abs() < 1e-6);
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dodging_boid_boosts_back() {
        let params = open_params();
        let mut flock = Flock {
            step: 0,
            boids: vec![
                boid(0, 500.0, 500.0, 0.0, 0.0),
                boid(1, 500.5, 500.0, 0.0, 0.0),
                boid(2, 560.0, 500.0, 0.0, 0.0),
                boid(3, 560.0, 502.5, 0.0, 0.0),
            ],
        };
        boids_step(&mut flock, &params);
        let rules = boids_step(&mut flock, &params);
        assert_eq!(rules[0], Rule::Regroup);
        assert!((flock.boids[0].velocity.norm() - params.boost_speed).abs() < 1e-12);
    }

    #[test]
    fn zero_steps_is_the_spawn() {
        let params = FlockParams::default();
        let run = boids_run(5, 0, &params, 3);
        assert_eq!(run.trace, vec![Flock::spawn(5, &params, 3)]);
        assert_eq!(run.metrics.len(), 1);
    }

    #[test]
    fn seeded_runs_repeat() {
        let params = FlockParams::default();
        assert_eq!(boids_run(10, 50, &params, 9), boids_run(10, 50, &params, 9));
        assert_ne!(boids_run(10, 50, &params, 9), boids_run(10, 50, &params, 10));
    }

    #[test]
    fn speeds_stay_bounded() {
        let params = FlockParams::default();
        let run = boids_run(30, 300, &params, 1);
        for f in &run.trace {
            for b in &f.boids {
                assert!(b.velocity.norm() <= params.max_speed() + 1e-9);
                assert!(b.position.x >= 0.0 && b.position.x <= params.width);
            }
        }
    }

    #[test]
    fn csv_columns() {
        let run = boids_run(2, 1, &FlockParams::default(), 0);
        let csv = run.trace_csv();
        assert!(csv.starts_with("step,id,x,y,vx,vy\n"));
        assert_eq!(csv.lines().count(), 1 + 2 * 2);
    }
}
