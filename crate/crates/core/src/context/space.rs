use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{BitSpec, ContextEvent, EditKind, EventTarget, EventTemplate, PositionDraw, PositionSpec};

const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("probability of {id:?} is {p}, outside [0, 1]")]
    OutOfRange { id: String, p: f64 },
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("bad event {id:?}: {message}")]
    BadEvent { id: String, message: String },
    #[error("events file: {0}")]
    Toml(String),
}

/// A finite list of events with their probabilities, plus the mass of
/// "nothing happens".
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbabilitySpace {
    events: Vec<(EventTemplate, f64)>,
    no_event: f64,
}

fn check(id: &str, p: f64) -> Result<(), SpaceError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SpaceError::OutOfRange { id: id.into(), p });
    }
    Ok(())
}

impl ProbabilitySpace {
    pub fn new(events: Vec<(EventTemplate, f64)>, no_event: f64) -> Result<ProbabilitySpace, SpaceError> {
        check("no event", no_event)?;
        for (e, p) in &events {
            check(&e.id, *p)?;
        }
        let total: f64 = events.iter().map(|(_, p)| p).sum::<f64>() + no_event;
        if (total - 1.0).abs() > TOLERANCE {
            return Err(SpaceError::NotNormalized(total));
        }
        Ok(ProbabilitySpace { events, no_event })
    }

    /// The "no event" mass is whatever the listed events leave over.
    pub fn with_remainder(events: Vec<(EventTemplate, f64)>) -> Result<ProbabilitySpace, SpaceError> {
        let listed: f64 = events.iter().map(|(_, p)| p).sum();
        let rest = if (listed - 1.0).abs() <= TOLERANCE { 0.0 } else { 1.0 - listed };
        ProbabilitySpace::new(events, rest)
    }

    /// Nothing ever happens.
    pub fn quiet() -> ProbabilitySpace {
        ProbabilitySpace {
            events: Vec::new(),
            no_event: 1.0,
        }
    }

    /// One substitution template at a uniform position with a random bit.
    pub fn substitutions(rate: f64) -> Result<ProbabilitySpace, SpaceError> {
        ProbabilitySpace::with_remainder(vec![(
            EventTemplate {
                id: "substitute".into(),
                target: EventTarget::Any,
                kind: EditKind::Substitute,
                position: PositionSpec::Uniform,
                bit: BitSpec::Random,
            },
            rate,
        )])
    }

    pub fn events(&self) -> &[(EventTemplate, f64)] {
        &self.events
    }

    pub fn no_event(&self) -> f64 {
        self.no_event
    }

    pub fn is_quiet(&self) -> bool {
        self.events.iter().all(|(_, p)| *p == 0.0)
    }
}

/// Draws at most one event. Consumes one uniform draw for the choice, then
/// one for a uniform position and one for a random bit when the chosen
/// template asks for them.
pub fn sample_event<R: Rng + ?Sized>(space: &ProbabilitySpace, rng: &mut R) -> Option<ContextEvent> {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let chosen = space.events.iter().find(|(_, p)| {
        acc += p;
        *p > 0.0 && u < acc
    })?;
    let t = &chosen.0;
    let position = match t.position {
        PositionSpec::At(i) => PositionDraw::At(i),
        PositionSpec::Uniform => PositionDraw::Fraction(rng.gen()),
    };
    let bit = match (t.kind, t.bit) {
        (EditKind::Delete, _) => None,
        (_, BitSpec::Fixed(b)) => Some(b),
        (_, BitSpec::Random) => Some(rng.gen()),
    };
    Some(ContextEvent {
        id: t.id.clone(),
        target: t.target,
        kind: t.kind,
        position,
        bit,
    })
}

/// Events file (TOML):
///
/// ```toml
/// no_event = 0.9          # optional; defaults to the remainder
///
/// [[event]]
/// id = "flip"
/// kind = "substitute"     # substitute | insert | delete
/// target = "any"          # or a machine id
/// position = "uniform"    # or a cell index
/// bit = "random"          # or 0 / 1
/// probability = 0.1
/// ```
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventsFile {
    #[serde(default)]
    pub no_event: Option<f64>,
    #[serde(default, rename = "event")]
    pub events: Vec<EventEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NameOrNumber {
    Name(String),
    Number(i64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventEntry {
    pub id: String,
    pub kind: EditKind,
    #[serde(default = "any")]
    pub target: NameOrNumber,
    #[serde(default = "uniform")]
    pub position: NameOrNumber,
    #[serde(default = "random")]
    pub bit: NameOrNumber,
    pub probability: f64,
}

fn any() -> NameOrNumber {
    NameOrNumber::Name("any".into())
}

fn uniform() -> NameOrNumber {
    NameOrNumber::Name("uniform".into())
}

fn random() -> NameOrNumber {
    NameOrNumber::Name("random".into())
}

impl EventsFile {
    pub fn parse(text: &str) -> Result<EventsFile, SpaceError> {
        toml::from_str(text).map_err(|e| SpaceError::Toml(e.to_string()))
    }

    pub fn space(&self) -> Result<ProbabilitySpace, SpaceError> {
        let mut events = Vec::new();
        for e in &self.events {
            let bad = |message: &str| SpaceError::BadEvent {
                id: e.id.clone(),
                message: message.into(),
            };
            let target = match &e.target {
                NameOrNumber::Name(n) if n == "any" => EventTarget::Any,
                NameOrNumber::Number(id) if *id >= 0 => EventTarget::Machine(*id as u32),
                _ => return Err(bad("target must be \"any\" or a machine id")),
            };
            let position = match &e.position {
                NameOrNumber::Name(n) if n == "uniform" => PositionSpec::Uniform,
                NameOrNumber::Number(i) if *i >= 0 => PositionSpec::At(*i as usize),
                _ => return Err(bad("position must be \"uniform\" or a cell index")),
            };
            let bit = match &e.bit {
                NameOrNumber::Name(n) if n == "random" => BitSpec::Random,
                NameOrNumber::Number(0) => BitSpec::Fixed(false),
                NameOrNumber::Number(1) => BitSpec::Fixed(true),
                _ => return Err(bad("bit must be 0, 1 or \"random\"")),
            };
            events.push((
                EventTemplate {
                    id: e.id.clone(),
                    target,
                    kind: e.kind,
                    position,
                    bit,
                },
                e.probability,
            ));
        }
        match self.no_event {
            Some(p) => ProbabilitySpace::new(events, p),
            None => ProbabilitySpace::with_remainder(events),
        }
    }
}
