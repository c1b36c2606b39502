use super::geometry::Vec2;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Stat block shared by every unit of a type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitStats {
    pub hitpoints_max: f64,
    /// Damage per attack.
    pub damage: f64,
    pub attack_range: f64,
    /// World units per second.
    pub speed: f64,
    /// Seconds between attacks.
    pub cooldown: f64,
}

impl UnitStats {
    pub const VULTURE: UnitStats = UnitStats {
        hitpoints_max: 80.0,
        damage: 20.0,
        attack_range: 5.0,
        speed: 4.96,
        cooldown: 1.26,
    };

    /// Hellions use single-target attacks here; there is no splash.
    pub const HELLION: UnitStats = UnitStats {
        hitpoints_max: 90.0,
        damage: 13.0,
        attack_range: 5.0,
        speed: 5.95,
        cooldown: 1.78,
    };

    pub const ZEALOT: UnitStats = UnitStats {
        hitpoints_max: 100.0,
        damage: 16.0,
        attack_range: 0.1,
        speed: 3.15,
        cooldown: 0.857,
    };

    pub fn is_valid(&self) -> bool {
        [
            self.hitpoints_max,
            self.damage,
            self.attack_range,
            self.speed,
            self.cooldown,
        ]
        .iter()
        .all(|v| v.is_finite() && *v > 0.0)
    }
}

/// Named stat presets, as they appear in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitKind {
    Vulture,
    Hellion,
    Zealot,
}

impl UnitKind {
    pub fn stats(self) -> UnitStats {
        match self {
            UnitKind::Vulture => UnitStats::VULTURE,
            UnitKind::Hellion => UnitStats::HELLION,
            UnitKind::Zealot => UnitStats::ZEALOT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Team {
    /// The network-controlled side.
    Ranged,
    /// The scripted side.
    Melee,
}

impl Team {
    pub fn opponent(self) -> Team {
        match self {
            Team::Ranged => Team::Melee,
            Team::Melee => Team::Ranged,
        }
    }
}

impl fmt::Display for Team {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Team::Ranged => "ranged",
            Team::Melee => "melee",
        })
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct UnitId(pub u32);

impl fmt::Display for UnitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitState {
    pub id: UnitId,
    pub team: Team,
    pub position: Vec2,
    pub hp: f64,
    pub cooldown_remaining: f64,
    /// Whether the last executed command was an attack.
    pub attack_move_flag: bool,
    pub stats: UnitStats,
}

impl UnitState {
    /// A freshly spawned unit: full hp, weapon ready, attack posture.
    pub fn spawn(id: UnitId, team: Team, position: Vec2, stats: UnitStats) -> Self {
        UnitState {
            id,
            team,
            position,
            hp: stats.hitpoints_max,
            cooldown_remaining: 0.0,
            attack_move_flag: true,
            stats,
        }
    }

    pub fn is_alive(&self) -> bool {
        self.hp > 0.0
    }

    pub fn weapon_ready(&self) -> bool {
        self.cooldown_remaining <= 0.0
    }
}
