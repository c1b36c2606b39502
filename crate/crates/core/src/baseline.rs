//! Scripted reference controllers.

use crate::episode::Controller;
use crate::sensors::{encode_action, SensorVector, OUTPUT_COUNT};
use crate::sim::{ActionCommand, UnitId, Vec2, WorldState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Never moves, always attacks.
    StandAndFire,
    /// Runs from the nearest enemy, never attacks.
    Flee,
    /// Uniform random outputs.
    Random,
    /// Never moves, never attacks.
    Idle,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown policy {0:?} (expected stand_and_fire, flee, random or idle)")]
pub struct UnknownPolicy(pub String);

impl Policy {
    pub const ALL: [Policy; 4] = [
        Policy::StandAndFire,
        Policy::Flee,
        Policy::Random,
        Policy::Idle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Policy::StandAndFire => "stand_and_fire",
            Policy::Flee => "flee",
            Policy::Random => "random",
            Policy::Idle => "idle",
        }
    }

    pub fn controller(self, seed: u64) -> Box<dyn Controller + Send> {
        match self {
            Policy::StandAndFire => Box::new(Constant([0.5, 0.5, 1.0])),
            Policy::Idle => Box::new(Constant([0.5, 0.5, 0.0])),
            Policy::Flee => Box::new(Flee::default()),
            Policy::Random => Box::new(RandomPolicy::new(seed)),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Policy {
    type Err = UnknownPolicy;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == norm)
            .ok_or_else(|| UnknownPolicy(s.to_string()))
    }
}

/// Same outputs every tick.
#[derive(Debug, Clone, Copy)]
pub struct Constant(pub [f64; OUTPUT_COUNT]);

impl Controller for Constant {
    fn act(&mut self, _: &WorldState, _: UnitId, _: &SensorVector) -> [f64; OUTPUT_COUNT] {
        self.0
    }
}

#[derive(Debug, Clone)]
pub struct RandomPolicy {
    rng: ChaCha8Rng,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        RandomPolicy {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Controller for RandomPolicy {
    fn act(&mut self, _: &WorldState, _: UnitId, _: &SensorVector) -> [f64; OUTPUT_COUNT] {
        [self.rng.random(), self.rng.random(), self.rng.random()]
    }
}

/// Greedy evasion: samples headings and picks the one whose look-ahead point
/// (clamped to the map) is farthest from the nearest enemy. Clamping makes
/// headings into a wall look short, so units slide along walls and out of
/// corners instead of getting pinned.
#[derive(Debug, Clone, Copy)]
pub struct Flee {
    pub headings: usize,
    pub lookahead: f64,
}

impl Default for Flee {
    fn default() -> Self {
        Flee {
            headings: 32,
            lookahead: 8.0,
        }
    }
}

impl Controller for Flee {
    fn act(&mut self, world: &WorldState, unit: UnitId, _: &SensorVector) -> [f64; OUTPUT_COUNT] {
        let Some(me) = world.unit(unit) else {
            return [0.5, 0.5, 0.0];
        };
        let enemies: Vec<Vec2> = world.team(me.team.opponent()).map(|u| u.position).collect();
        if enemies.is_empty() {
            return [0.5, 0.5, 0.0];
        }
        let clearance = |q: Vec2| {
            enemies
                .iter()
                .map(|e| e.distance(q))
                .fold(f64::INFINITY, f64::min)
        };
        let mut best = (f64::NEG_INFINITY, Vec2::ZERO);
        for k in 0..self.headings {
            let a = TAU * k as f64 / self.headings as f64;
            let dir = Vec2::new(a.cos(), a.sin());
            let q = world.bounds.clamp(me.position + dir * self.lookahead);
            let score = clearance(q);
            if score > best.0 {
                best = (score, dir);
            }
        }
        let offset = best.1 * world.move_scale;
        encode_action(ActionCommand::move_by(offset.x, offset.y), world.move_scale)
    }
}
