//! Spawn configurations and training sets.
//!
//! Fixed geometry: groups are packed on a square grid with
//! [`GROUP_SPACING`]; corner groups sit [`CORNER_OFFSET`] from both map
//! edges; ring formations use radius [`RING_RADIUS`] around the centroid of
//! the central group, starting due east and going counter-clockwise.

use crate::sim::{
    Bounds, Team, UnitId, UnitKind, UnitState, UnitStats, Vec2, WorldState, DEFAULT_DT,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

pub const GROUP_SPACING: f64 = 1.0;
pub const CORNER_OFFSET: f64 = 8.0;
pub const RING_RADIUS: f64 = 10.0;
pub const DEFAULT_MAP_SIZE: f64 = 64.0;
pub const DEFAULT_FRAME_BUDGET: u64 = 3000;
pub const DEFAULT_MOVE_SCALE: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formation {
    /// Ranged group in the south-west corner, melee group in the north-east.
    Diagonal,
    ReversedDiagonal,
    /// Same y, ranged group west, melee group east.
    SideBySide,
    ReversedSideBySide,
    /// Ranged units ringed around a central melee group.
    Surround,
    /// Melee units ringed around a central ranged group.
    Surrounded,
    /// Every unit uniform over the map.
    Random,
}

impl Formation {
    pub const ALL: [Formation; 7] = [
        Formation::Diagonal,
        Formation::ReversedDiagonal,
        Formation::SideBySide,
        Formation::ReversedSideBySide,
        Formation::Surround,
        Formation::Surrounded,
        Formation::Random,
    ];

    /// The six starting positions used for generalization sweeps.
    pub const SWEEP_DEFAULT: [Formation; 6] = [
        Formation::Diagonal,
        Formation::ReversedDiagonal,
        Formation::SideBySide,
        Formation::Surround,
        Formation::Surrounded,
        Formation::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Formation::Diagonal => "diagonal",
            Formation::ReversedDiagonal => "reversed_diagonal",
            Formation::SideBySide => "side_by_side",
            Formation::ReversedSideBySide => "reversed_side_by_side",
            Formation::Surround => "surround",
            Formation::Surrounded => "surrounded",
            Formation::Random => "random",
        }
    }
}

impl fmt::Display for Formation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Formation {
    type Err = ScenarioError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        Formation::ALL
            .into_iter()
            .find(|f| f.name() == norm)
            .ok_or_else(|| ScenarioError::UnknownFormation(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("unknown formation {0:?}")]
    UnknownFormation(String),
    #[error("scenario spec {0:?} is not formation:zealots[:seed]")]
    BadSpec(String),
    #[error("invalid scenario: {0}")]
    Invalid(&'static str),
    #[error("{team} group of {count} does not fit on the map")]
    DoesNotFit { team: Team, count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub formation: Formation,
    pub ranged_count: usize,
    pub melee_count: usize,
    pub ranged_unit: UnitKind,
    pub melee_unit: UnitKind,
    pub map_width: f64,
    pub map_height: f64,
    pub frame_budget: u64,
    pub spawn_seed: u64,
    pub dt: f64,
    pub move_scale: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            formation: Formation::Diagonal,
            ranged_count: 5,
            melee_count: 25,
            ranged_unit: UnitKind::Vulture,
            melee_unit: UnitKind::Zealot,
            map_width: DEFAULT_MAP_SIZE,
            map_height: DEFAULT_MAP_SIZE,
            frame_budget: DEFAULT_FRAME_BUDGET,
            spawn_seed: 0,
            dt: DEFAULT_DT,
            move_scale: DEFAULT_MOVE_SCALE,
        }
    }
}

impl Scenario {
    /// Five vultures against `zealots` zealots with default map and budget.
    pub fn new(formation: Formation, zealots: usize) -> Self {
        Scenario {
            formation,
            melee_count: zealots,
            ..Scenario::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.spawn_seed = seed;
        self
    }

    pub fn ranged_stats(&self) -> UnitStats {
        self.ranged_unit.stats()
    }

    pub fn melee_stats(&self) -> UnitStats {
        self.melee_unit.stats()
    }

    pub fn bounds(&self) -> Bounds {
        Bounds::sized(self.map_width, self.map_height)
    }

    /// Largest fitness reachable: every melee unit dead, no damage taken.
    pub fn max_fitness(&self) -> f64 {
        self.melee_count as f64 * self.melee_stats().hitpoints_max
            + self.ranged_count as f64 * self.ranged_stats().hitpoints_max
    }

    /// Short label, e.g. `diagonal:25`.
    pub fn label(&self) -> String {
        format!("{}:{}", self.formation, self.melee_count)
    }

    /// Parses `formation:zealots[:seed]` on top of `template`.
    pub fn parse_spec(spec: &str, template: &Scenario) -> Result<Scenario, ScenarioError> {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(ScenarioError::BadSpec(spec.to_string()));
        }
        let formation = parts[0].parse()?;
        let melee_count = parts[1]
            .trim()
            .parse()
            .map_err(|_| ScenarioError::BadSpec(spec.to_string()))?;
        let spawn_seed = match parts.get(2) {
            Some(s) => s
                .trim()
                .parse()
                .map_err(|_| ScenarioError::BadSpec(spec.to_string()))?,
            None => template.spawn_seed,
        };
        Ok(Scenario {
            formation,
            melee_count,
            spawn_seed,
            ..template.clone()
        })
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.ranged_count == 0 || self.melee_count == 0 {
            return Err(ScenarioError::Invalid("unit counts must be positive"));
        }
        if !(self.map_width.is_finite()
            && self.map_width > 0.0
            && self.map_height.is_finite()
            && self.map_height > 0.0)
        {
            return Err(ScenarioError::Invalid("map dimensions must be positive"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(ScenarioError::Invalid("dt must be positive"));
        }
        if !(self.move_scale.is_finite() && self.move_scale > 0.0) {
            return Err(ScenarioError::Invalid("move_scale must be positive"));
        }
        let diag = self.bounds().diagonal();
        if self.ranged_stats().attack_range > diag || self.melee_stats().attack_range > diag {
            return Err(ScenarioError::Invalid("attack range exceeds map diagonal"));
        }
        Ok(())
    }
}

/// Grid offsets for `n` units around their group center.
fn grid_offsets(n: usize) -> Vec<Vec2> {
    let cols = (n as f64).sqrt().ceil() as usize;
    let rows = n.div_ceil(cols.max(1));
    let cx = (cols as f64 - 1.0) / 2.0;
    let cy = (rows as f64 - 1.0) / 2.0;
    (0..n)
        .map(|k| {
            let (c, r) = ((k % cols) as f64, (k / cols) as f64);
            Vec2::new((c - cx) * GROUP_SPACING, (r - cy) * GROUP_SPACING)
        })
        .collect()
}

fn grid(center: Vec2, n: usize) -> Vec<Vec2> {
    grid_offsets(n).into_iter().map(|o| center + o).collect()
}

fn ring(center: Vec2, n: usize) -> Vec<Vec2> {
    (0..n)
        .map(|k| {
            let a = TAU * k as f64 / n as f64;
            center + Vec2::new(RING_RADIUS * a.cos(), RING_RADIUS * a.sin())
        })
        .collect()
}

fn centroid(points: &[Vec2]) -> Vec2 {
    let sum = points.iter().fold(Vec2::ZERO, |acc, &p| acc + p);
    sum * (1.0 / points.len() as f64)
}

/// Spawn positions `(ranged, melee)` for a scenario.
pub fn spawn_positions(scenario: &Scenario) -> Result<(Vec<Vec2>, Vec<Vec2>), ScenarioError> {
    scenario.validate()?;
    let b = scenario.bounds();
    let (nr, nm) = (scenario.ranged_count, scenario.melee_count);
    let sw = Vec2::new(b.min.x + CORNER_OFFSET, b.min.y + CORNER_OFFSET);
    let ne = Vec2::new(b.max.x - CORNER_OFFSET, b.max.y - CORNER_OFFSET);
    let west = Vec2::new(b.min.x + CORNER_OFFSET, b.center().y);
    let east = Vec2::new(b.max.x - CORNER_OFFSET, b.center().y);
    let (ranged, melee) = match scenario.formation {
        Formation::Diagonal => (grid(sw, nr), grid(ne, nm)),
        Formation::ReversedDiagonal => (grid(ne, nr), grid(sw, nm)),
        Formation::SideBySide => (grid(west, nr), grid(east, nm)),
        Formation::ReversedSideBySide => (grid(east, nr), grid(west, nm)),
        Formation::Surround => {
            let melee = grid(b.center(), nm);
            let ranged = ring(centroid(&melee), nr);
            (ranged, melee)
        }
        Formation::Surrounded => {
            let ranged = grid(b.center(), nr);
            let melee = ring(centroid(&ranged), nm);
            (ranged, melee)
        }
        Formation::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(scenario.spawn_seed);
            let mut draw = |n: usize| -> Vec<Vec2> {
                (0..n)
                    .map(|_| {
                        Vec2::new(
                            rng.random_range(b.min.x..=b.max.x),
                            rng.random_range(b.min.y..=b.max.y),
                        )
                    })
                    .collect()
            };
            let ranged = draw(nr);
            (ranged, draw(nm))
        }
    };
    for (team, points) in [(Team::Ranged, &ranged), (Team::Melee, &melee)] {
        if !points.iter().all(|&p| b.contains(p)) {
            return Err(ScenarioError::DoesNotFit {
                team,
                count: points.len(),
            });
        }
    }
    Ok((ranged, melee))
}

/// Builds the initial world. Ranged units get ids `0..ranged_count`, melee
/// units follow.
pub fn spawn(scenario: &Scenario) -> Result<WorldState, ScenarioError> {
    let (ranged, melee) = spawn_positions(scenario)?;
    let mut world = WorldState::new(scenario.bounds(), scenario.dt, scenario.move_scale);
    let rs = scenario.ranged_stats();
    let ms = scenario.melee_stats();
    let units = ranged
        .into_iter()
        .map(|p| (Team::Ranged, p, rs))
        .chain(melee.into_iter().map(|p| (Team::Melee, p, ms)));
    for (i, (team, p, stats)) in units.enumerate() {
        world
            .add_unit(UnitState::spawn(UnitId(i as u32), team, p, stats))
            .expect("positions validated");
    }
    Ok(world)
}

/// Ordered scenarios summed into one fitness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TrainingSet(Vec<Scenario>);

impl TrainingSet {
    pub fn new(scenarios: Vec<Scenario>) -> Result<Self, ScenarioError> {
        if scenarios.is_empty() {
            return Err(ScenarioError::Invalid("training set is empty"));
        }
        for s in &scenarios {
            s.validate()?;
        }
        Ok(TrainingSet(scenarios))
    }

    pub fn single(scenario: Scenario) -> Self {
        TrainingSet(vec![scenario])
    }

    /// The ten training scenarios, five vultures each, on `template`'s map.
    pub fn standard(template: &Scenario) -> Self {
        use Formation::*;
        let list = [
            (Diagonal, 25),
            (ReversedDiagonal, 20),
            (SideBySide, 10),
            (ReversedSideBySide, 15),
            (Surround, 20),
            (Surround, 10),
            (Surrounded, 20),
            (Surrounded, 25),
            (Random, 15),
            (Random, 25),
        ];
        TrainingSet(
            list.iter()
                .enumerate()
                .map(|(i, &(formation, zealots))| Scenario {
                    formation,
                    melee_count: zealots,
                    spawn_seed: i as u64,
                    ..template.clone()
                })
                .collect(),
        )
    }

    pub fn scenarios(&self) -> &[Scenario] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Same scenarios with spawn seeds derived from `(run_seed, generation)`,
    /// so every genome in a generation faces the same layouts while layouts
    /// change between generations.
    pub fn for_generation(&self, run_seed: u64, generation: u32) -> TrainingSet {
        TrainingSet(
            self.0
                .iter()
                .map(|s| Scenario {
                    spawn_seed: mix_seed(&[s.spawn_seed, run_seed, generation as u64]),
                    ..s.clone()
                })
                .collect(),
        )
    }

    pub fn max_fitness(&self) -> f64 {
        self.0.iter().map(Scenario::max_fitness).sum()
    }
}

/// SplitMix64-style mixing of several words into one seed.
pub fn mix_seed(words: &[u64]) -> u64 {
    let mut h: u64 = 0x9E37_79B9_7F4A_7C15;
    for &w in words {
        let mut z = h ^ w.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h = z ^ (z >> 31);
    }
    h
}
