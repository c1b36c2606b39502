use super::geometry::{Bounds, Vec2};
use super::unit::{Team, UnitId, UnitState};
use super::SimError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Default tick length in seconds.
pub const DEFAULT_DT: f64 = 1.0 / 16.0;

/// Desired displacement relative to the unit, plus the fire/move switch.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ActionCommand {
    pub target_offset: Vec2,
    pub attack: bool,
}

impl ActionCommand {
    pub const IDLE: ActionCommand = ActionCommand {
        target_offset: Vec2::ZERO,
        attack: false,
    };

    pub fn move_by(dx: f64, dy: f64) -> Self {
        ActionCommand {
            target_offset: Vec2::new(dx, dy),
            attack: false,
        }
    }

    pub fn attack() -> Self {
        ActionCommand {
            target_offset: Vec2::ZERO,
            attack: true,
        }
    }
}

/// Number of units each side started with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Roster {
    pub ranged: usize,
    pub melee: usize,
}

impl Roster {
    pub fn count(&self, team: Team) -> usize {
        match team {
            Team::Ranged => self.ranged,
            Team::Melee => self.melee,
        }
    }
}

/// One resolved attack within a tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackEvent {
    pub attacker: UnitId,
    pub target: UnitId,
    pub damage: f64,
}

/// What happened during a single [`WorldState::step`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepReport {
    /// The command each unit executed this tick, including engine-driven melee units.
    pub commands: BTreeMap<UnitId, ActionCommand>,
    pub attacks: Vec<AttackEvent>,
    pub deaths: Vec<UnitId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    /// Living units, sorted by id.
    pub units: Vec<UnitState>,
    pub bounds: Bounds,
    pub frame: u64,
    pub dt: f64,
    /// Radius used to decode network outputs and cap scripted move offsets.
    pub move_scale: f64,
    pub roster: Roster,
}

impl WorldState {
    pub fn new(bounds: Bounds, dt: f64, move_scale: f64) -> Self {
        WorldState {
            units: Vec::new(),
            bounds,
            frame: 0,
            dt,
            move_scale,
            roster: Roster::default(),
        }
    }

    /// Adds a unit and counts it in the roster. Units are kept sorted by id.
    pub fn add_unit(&mut self, unit: UnitState) -> Result<(), SimError> {
        if !self.bounds.contains(unit.position) {
            return Err(SimError::OutOfBounds(unit.id));
        }
        if !unit.stats.is_valid() {
            return Err(SimError::InvalidStats(unit.id));
        }
        match self.units.binary_search_by_key(&unit.id, |u| u.id) {
            Ok(_) => Err(SimError::DuplicateUnit(unit.id)),
            Err(at) => {
                match unit.team {
                    Team::Ranged => self.roster.ranged += 1,
                    Team::Melee => self.roster.melee += 1,
                }
                self.units.insert(at, unit);
                Ok(())
            }
        }
    }

    pub fn unit(&self, id: UnitId) -> Option<&UnitState> {
        self.units
            .binary_search_by_key(&id, |u| u.id)
            .ok()
            .map(|i| &self.units[i])
    }

    pub fn team(&self, team: Team) -> impl Iterator<Item = &UnitState> {
        self.units.iter().filter(move |u| u.team == team)
    }

    pub fn alive_count(&self, team: Team) -> usize {
        self.team(team).count()
    }

    pub fn elapsed_seconds(&self) -> f64 {
        self.frame as f64 * self.dt
    }

    /// Nearest living enemy of `unit`, optionally restricted to `max_range`.
    /// Distance ties go to the lowest id.
    pub fn nearest_enemy(
        &self,
        unit: &UnitState,
        max_range: Option<f64>,
    ) -> Option<(&UnitState, f64)> {
        let mut best: Option<(&UnitState, f64)> = None;
        // `units` is id-sorted, so strict `<` keeps the lowest id on ties.
        for other in self.team(unit.team.opponent()) {
            let d = unit.position.distance(other.position);
            if max_range.is_some_and(|r| d > r) {
                continue;
            }
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((other, d));
            }
        }
        best
    }

    /// Advances the world by one tick.
    ///
    /// Every living ranged unit needs a command. Melee units follow
    /// [`zealot_ai`] unless `commands` carries an explicit override for them.
    /// Attacks are resolved against the pre-move snapshot and applied
    /// simultaneously; units killed this tick are removed afterwards.
    /// On error the world is left untouched.
    pub fn step(
        &mut self,
        commands: &BTreeMap<UnitId, ActionCommand>,
    ) -> Result<StepReport, SimError> {
        for (&id, cmd) in commands {
            if self.unit(id).is_none() {
                return Err(SimError::UnknownUnit(id));
            }
            if !cmd.target_offset.is_finite() {
                return Err(SimError::NonFiniteCommand(id));
            }
        }
        let mut executed = BTreeMap::new();
        for unit in &self.units {
            let cmd = match (commands.get(&unit.id), unit.team) {
                (Some(cmd), _) => *cmd,
                (None, Team::Melee) => zealot_ai(self, unit.id)?,
                (None, Team::Ranged) => return Err(SimError::MissingCommand(unit.id)),
            };
            executed.insert(unit.id, cmd);
        }

        let dt = self.dt;
        for unit in &mut self.units {
            unit.cooldown_remaining = (unit.cooldown_remaining - dt).max(0.0);
        }

        let mut attacks = Vec::new();
        for unit in &self.units {
            let cmd = executed[&unit.id];
            if !cmd.attack || !unit.weapon_ready() {
                continue;
            }
            if let Some((target, _)) = self.nearest_enemy(unit, Some(unit.stats.attack_range)) {
                attacks.push(AttackEvent {
                    attacker: unit.id,
                    target: target.id,
                    damage: unit.stats.damage,
                });
            }
        }

        let bounds = self.bounds;
        for unit in &mut self.units {
            let cmd = executed[&unit.id];
            unit.attack_move_flag = cmd.attack;
            if !cmd.attack {
                let step = cmd.target_offset.clamp_length(unit.stats.speed * dt);
                unit.position = bounds.clamp(unit.position + step);
            }
        }

        for ev in &attacks {
            let i = self
                .units
                .binary_search_by_key(&ev.attacker, |u| u.id)
                .expect("attacker exists");
            self.units[i].cooldown_remaining = self.units[i].stats.cooldown;
            let t = self
                .units
                .binary_search_by_key(&ev.target, |u| u.id)
                .expect("target exists");
            self.units[t].hp = (self.units[t].hp - ev.damage).max(0.0);
        }

        let deaths: Vec<UnitId> = self
            .units
            .iter()
            .filter(|u| !u.is_alive())
            .map(|u| u.id)
            .collect();
        self.units.retain(UnitState::is_alive);
        self.frame += 1;

        Ok(StepReport {
            commands: executed,
            attacks,
            deaths,
        })
    }
}

/// Scripted melee behaviour: attack the nearest enemy when it is in range,
/// otherwise walk straight at it.
pub fn zealot_ai(world: &WorldState, zealot: UnitId) -> Result<ActionCommand, SimError> {
    let me = world.unit(zealot).ok_or(SimError::UnknownUnit(zealot))?;
    let Some((target, dist)) = world.nearest_enemy(me, None) else {
        return Ok(ActionCommand::IDLE);
    };
    if dist <= me.stats.attack_range {
        return Ok(ActionCommand::attack());
    }
    Ok(ActionCommand {
        target_offset: (target.position - me.position).clamp_length(world.move_scale),
        attack: false,
    })
}
