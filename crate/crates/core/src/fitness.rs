//! Episode fitness.

use crate::sim::{Team, WorldState};
use serde::{Deserialize, Serialize};

/// End-of-episode summary the fitness is computed from.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FitnessInputs {
    /// Melee units at spawn.
    pub starting_melee: usize,
    pub melee_hp_max: f64,
    /// Hitpoints of each surviving melee unit.
    pub melee_hp: Vec<f64>,
    /// Hitpoints of each surviving ranged unit.
    pub ranged_hp: Vec<f64>,
}

impl FitnessInputs {
    /// Reads the survivors of a (possibly unfinished) episode.
    pub fn from_world(world: &WorldState) -> Self {
        let melee_hp_max = world
            .team(Team::Melee)
            .map(|u| u.stats.hitpoints_max)
            .next()
            .unwrap_or(0.0);
        FitnessInputs {
            starting_melee: world.roster.melee,
            melee_hp_max,
            melee_hp: world.team(Team::Melee).map(|u| u.hp).collect(),
            ranged_hp: world.team(Team::Ranged).map(|u| u.hp).collect(),
        }
    }

    pub fn remaining_melee(&self) -> usize {
        self.melee_hp.len()
    }

    pub fn remaining_ranged(&self) -> usize {
        self.ranged_hp.len()
    }

    /// Whether the survivor lists are consistent with the spawn counts.
    pub fn is_consistent(&self) -> bool {
        self.melee_hp.len() <= self.starting_melee
            && self
                .melee_hp
                .iter()
                .all(|&h| h > 0.0 && h <= self.melee_hp_max)
            && self.ranged_hp.iter().all(|&h| h > 0.0)
    }
}

/// `Nz·Hzmax + ΣHh − ΣHz` over the surviving units. Non-negative whenever
/// the inputs are consistent.
pub fn fitness(inputs: &FitnessInputs) -> f64 {
    let dealt_budget = inputs.starting_melee as f64 * inputs.melee_hp_max;
    let kept: f64 = inputs.ranged_hp.iter().sum();
    let left: f64 = inputs.melee_hp.iter().sum();
    dealt_budget + kept - left
}
