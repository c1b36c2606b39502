//! Deterministic fixed-timestep 2D combat.
//!
//! A [`WorldState`] holds living units and advances one tick per
//! [`WorldState::step`]. Movement is straight-line toward a commanded
//! offset, attacks are instant-hit and resolved simultaneously, and there is
//! no collision between units.

mod geometry;
mod unit;
mod world;

pub use geometry::{Bounds, Vec2};
pub use unit::{Team, UnitId, UnitKind, UnitState, UnitStats};
pub use world::{
    zealot_ai, ActionCommand, AttackEvent, Roster, StepReport, WorldState, DEFAULT_DT,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("unit {0} does not exist or is dead")]
    UnknownUnit(UnitId),
    #[error("command for unit {0} has a non-finite offset")]
    NonFiniteCommand(UnitId),
    #[error("no command supplied for living ranged unit {0}")]
    MissingCommand(UnitId),
    #[error("unit {0} lies outside the map")]
    OutOfBounds(UnitId),
    #[error("unit {0} has a non-positive stat")]
    InvalidStats(UnitId),
    #[error("unit id {0} is already in use")]
    DuplicateUnit(UnitId),
}
