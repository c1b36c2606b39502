//! Running one scenario under a controller.

use crate::fitness::{fitness, FitnessInputs};
use crate::neat::{Genome, Network};
use crate::replay::{Replay, ReplayAction, ReplayHeader, ReplayRecord};
use crate::scenario::{spawn, Scenario, ScenarioError};
use crate::sensors::{
    decode, encode, SensorVector, INITIAL_ATTACK_OUTPUT, OUTPUT_COUNT, SENSOR_COUNT,
};
use crate::sim::{ActionCommand, SimError, StepReport, Team, UnitId, WorldState};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EpisodeError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("controller genome has {inputs} inputs / {outputs} outputs, expected {SENSOR_COUNT} / {OUTPUT_COUNT}")]
    Layout { inputs: usize, outputs: usize },
}

/// Produces raw network-style outputs for one ranged unit.
///
/// Called once per tick for every living ranged unit, in id order.
pub trait Controller {
    fn act(
        &mut self,
        world: &WorldState,
        unit: UnitId,
        sensors: &SensorVector,
    ) -> [f64; OUTPUT_COUNT];
}

impl<C: Controller + ?Sized> Controller for &mut C {
    fn act(
        &mut self,
        world: &WorldState,
        unit: UnitId,
        sensors: &SensorVector,
    ) -> [f64; OUTPUT_COUNT] {
        (**self).act(world, unit, sensors)
    }
}

impl<C: Controller + ?Sized> Controller for Box<C> {
    fn act(
        &mut self,
        world: &WorldState,
        unit: UnitId,
        sensors: &SensorVector,
    ) -> [f64; OUTPUT_COUNT] {
        (**self).act(world, unit, sensors)
    }
}

/// Wraps a closure over the sensor vector.
pub struct FnController<F>(pub F);

impl<F: FnMut(&SensorVector) -> [f64; OUTPUT_COUNT]> Controller for FnController<F> {
    fn act(&mut self, _: &WorldState, _: UnitId, sensors: &SensorVector) -> [f64; OUTPUT_COUNT] {
        (self.0)(sensors)
    }
}

/// One network instance per ranged unit, so recurrent state is per unit.
#[derive(Debug, Clone)]
pub struct GenomeController {
    prototype: Network,
    networks: BTreeMap<UnitId, Network>,
}

impl GenomeController {
    pub fn new(genome: &Genome) -> Result<Self, EpisodeError> {
        if genome.inputs != SENSOR_COUNT || genome.outputs != OUTPUT_COUNT {
            return Err(EpisodeError::Layout {
                inputs: genome.inputs,
                outputs: genome.outputs,
            });
        }
        Ok(GenomeController {
            prototype: Network::from_genome(genome),
            networks: BTreeMap::new(),
        })
    }
}

impl Controller for GenomeController {
    fn act(&mut self, _: &WorldState, unit: UnitId, sensors: &SensorVector) -> [f64; OUTPUT_COUNT] {
        let net = self
            .networks
            .entry(unit)
            .or_insert_with(|| self.prototype.clone());
        let out = net.activate(sensors.as_slice());
        [out[0], out[1], out[2]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EpisodeOptions {
    /// Keep a tick-by-tick replay.
    pub record: bool,
    /// Melee units stand still and attack whatever is in range instead of
    /// pursuing.
    pub hold_melee: bool,
}

impl EpisodeOptions {
    pub fn recorded() -> Self {
        EpisodeOptions {
            record: true,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    /// Ticks simulated.
    pub frames: u64,
    pub inputs: FitnessInputs,
    pub fitness: f64,
    /// Surviving units and their hp, by id.
    pub survivors: Vec<(UnitId, Team, f64)>,
    pub replay: Option<Replay>,
}

impl EpisodeResult {
    pub fn remaining_ranged(&self) -> usize {
        self.inputs.remaining_ranged()
    }

    pub fn remaining_melee(&self) -> usize {
        self.inputs.remaining_melee()
    }
}

/// Runs `scenario` until a side is wiped out or the frame budget is spent.
pub fn run_episode(
    scenario: &Scenario,
    controller: &mut dyn Controller,
    options: EpisodeOptions,
) -> Result<EpisodeResult, EpisodeError> {
    let mut world = spawn(scenario)?;
    let mut prev_attack: BTreeMap<UnitId, f64> = world
        .team(Team::Ranged)
        .map(|u| (u.id, INITIAL_ATTACK_OUTPUT))
        .collect();
    let mut records = Vec::new();

    while world.frame < scenario.frame_budget
        && world.alive_count(Team::Ranged) > 0
        && world.alive_count(Team::Melee) > 0
    {
        let mut commands = BTreeMap::new();
        let ranged: Vec<UnitId> = world.team(Team::Ranged).map(|u| u.id).collect();
        for id in ranged {
            let sensors = encode(&world, id, prev_attack[&id])?;
            let raw = controller.act(&world, id, &sensors);
            prev_attack.insert(id, raw[2]);
            commands.insert(id, decode(raw, world.move_scale));
        }
        if options.hold_melee {
            for u in world.team(Team::Melee) {
                commands.insert(u.id, ActionCommand::attack());
            }
        }
        let before = options.record.then(|| world.clone());
        let report = world.step(&commands)?;
        if let Some(before) = before {
            push_records(&mut records, &before, &report);
        }
    }

    if options.record {
        for u in &world.units {
            records.push(ReplayRecord {
                frame: world.frame,
                id: u.id,
                team: u.team,
                x: u.position.x,
                y: u.position.y,
                hp: u.hp,
                action: None,
                fired: false,
                target: None,
            });
        }
    }

    let inputs = FitnessInputs {
        melee_hp_max: scenario.melee_stats().hitpoints_max,
        ..FitnessInputs::from_world(&world)
    };
    Ok(EpisodeResult {
        frames: world.frame,
        fitness: fitness(&inputs),
        inputs,
        survivors: world.units.iter().map(|u| (u.id, u.team, u.hp)).collect(),
        replay: options.record.then(|| Replay {
            header: ReplayHeader::new(scenario),
            records,
        }),
    })
}

fn push_records(records: &mut Vec<ReplayRecord>, before: &WorldState, report: &StepReport) {
    for u in &before.units {
        let cmd = report.commands[&u.id];
        let shot = report.attacks.iter().find(|a| a.attacker == u.id);
        records.push(ReplayRecord {
            frame: before.frame,
            id: u.id,
            team: u.team,
            x: u.position.x,
            y: u.position.y,
            hp: u.hp,
            action: Some(ReplayAction {
                dx: cmd.target_offset.x,
                dy: cmd.target_offset.y,
                attack: cmd.attack,
            }),
            fired: shot.is_some(),
            target: shot.map(|a| a.target),
        });
    }
}

/// Runs a genome-controlled episode.
pub fn run_genome(
    genome: &Genome,
    scenario: &Scenario,
    options: EpisodeOptions,
) -> Result<EpisodeResult, EpisodeError> {
    let mut c = GenomeController::new(genome)?;
    run_episode(scenario, &mut c, options)
}
