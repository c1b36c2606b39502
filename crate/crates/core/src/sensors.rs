//! The 40-input sensor layout and the 3-output action decoding.
//!
//! Input order is frozen because genomes address inputs positionally:
//!
//! | index  | content                                        |
//! |--------|------------------------------------------------|
//! | 0..8   | enemy average distance, regions R1..R8         |
//! | 8..16  | friendly average distance, regions R1..R8      |
//! | 16..24 | enemy count, regions R1..R8                    |
//! | 24..32 | friendly count, regions R1..R8                 |
//! | 32..36 | boundary distance north, south, east, west     |
//! | 36     | own weapon cooldown                            |
//! | 37     | own hitpoints                                  |
//! | 38     | executed attack/move state of the last tick    |
//! | 39     | raw attack output of the last tick             |
//!
//! Regions are world-axis aligned. Quadrant Q1 is `(+x, +y)`, Q2 `(-x, +y)`,
//! Q3 `(-x, -y)`, Q4 `(+x, -y)`; a relative position lying on an axis goes to
//! the lower-numbered neighbouring quadrant, and the controlled unit's own
//! position counts as Q1. R1..R4 are the parts of Q1..Q4 within the unit's
//! attack range (inclusive), R5..R8 the parts beyond it.
//!
//! Scaling: counts divide by the number of units that side spawned with;
//! inner distances divide by attack range, outer distances by the map
//! diagonal; an empty region reads count 0 and distance 1. Boundary sensors
//! divide by map height (N/S) or width (E/W).

use crate::sim::{ActionCommand, SimError, UnitId, Vec2, WorldState};

pub const SENSOR_COUNT: usize = 40;
pub const OUTPUT_COUNT: usize = 3;
pub const REGION_COUNT: usize = 8;

pub const ENEMY_DISTANCE: usize = 0;
pub const FRIENDLY_DISTANCE: usize = 8;
pub const ENEMY_COUNT: usize = 16;
pub const FRIENDLY_COUNT: usize = 24;
pub const BOUNDARY: usize = 32;
pub const SELF_COOLDOWN: usize = 36;
pub const SELF_HP: usize = 37;
pub const ATTACK_STATE: usize = 38;
pub const PREV_ATTACK_OUTPUT: usize = 39;

/// Value fed to the recurrent attack input on the first tick of an episode.
pub const INITIAL_ATTACK_OUTPUT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorVector(pub [f64; SENSOR_COUNT]);

impl SensorVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn enemy_distance(&self, region: usize) -> f64 {
        self.0[ENEMY_DISTANCE + region]
    }

    pub fn friendly_distance(&self, region: usize) -> f64 {
        self.0[FRIENDLY_DISTANCE + region]
    }

    pub fn enemy_count(&self, region: usize) -> f64 {
        self.0[ENEMY_COUNT + region]
    }

    pub fn friendly_count(&self, region: usize) -> f64 {
        self.0[FRIENDLY_COUNT + region]
    }

    /// North, south, east, west.
    pub fn boundary(&self) -> [f64; 4] {
        [
            self.0[BOUNDARY],
            self.0[BOUNDARY + 1],
            self.0[BOUNDARY + 2],
            self.0[BOUNDARY + 3],
        ]
    }
}

/// Region partition around one controlled unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPartition {
    pub center: Vec2,
    pub attack_range: f64,
}

impl RegionPartition {
    /// Zero-based quadrant index (0 = Q1) of a relative position.
    pub fn quadrant(rel: Vec2) -> usize {
        if rel.x >= 0.0 && rel.y >= 0.0 {
            0
        } else if rel.x < 0.0 && rel.y >= 0.0 {
            1
        } else if rel.x <= 0.0 {
            2
        } else {
            3
        }
    }

    /// Zero-based region index (0 = R1) and distance of a point.
    pub fn classify(&self, p: Vec2) -> (usize, f64) {
        let rel = p - self.center;
        let dist = rel.length();
        let q = Self::quadrant(rel);
        if dist <= self.attack_range {
            (q, dist)
        } else {
            (q + 4, dist)
        }
    }
}

/// Raw (unscaled) per-region tallies for one side.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RegionTally {
    pub counts: [usize; REGION_COUNT],
    pub distance_sums: [f64; REGION_COUNT],
}

/// Tallies every other living unit by region, split by enemy/friendly.
pub fn tally_regions(
    world: &WorldState,
    unit_id: UnitId,
) -> Result<(RegionTally, RegionTally), SimError> {
    let me = world.unit(unit_id).ok_or(SimError::UnknownUnit(unit_id))?;
    let partition = RegionPartition {
        center: me.position,
        attack_range: me.stats.attack_range,
    };
    let mut enemies = RegionTally::default();
    let mut friends = RegionTally::default();
    for other in &world.units {
        if other.id == unit_id {
            continue;
        }
        let (region, dist) = partition.classify(other.position);
        let tally = if other.team == me.team {
            &mut friends
        } else {
            &mut enemies
        };
        tally.counts[region] += 1;
        tally.distance_sums[region] += dist;
    }
    Ok((enemies, friends))
}

fn ratio(value: f64, max: f64) -> f64 {
    if max > 0.0 {
        (value / max).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Builds the sensor vector for `unit_id`.
///
/// `prev_attack_output` is the raw third network output of the previous
/// tick, or [`INITIAL_ATTACK_OUTPUT`] on the first tick.
pub fn encode(
    world: &WorldState,
    unit_id: UnitId,
    prev_attack_output: f64,
) -> Result<SensorVector, SimError> {
    let me = world.unit(unit_id).ok_or(SimError::UnknownUnit(unit_id))?;
    let (enemies, friends) = tally_regions(world, unit_id)?;
    let range = me.stats.attack_range;
    let diagonal = world.bounds.diagonal();
    let enemy_total = world
        .roster
        .count(me.team.opponent())
        .max(world.alive_count(me.team.opponent()));
    let friend_total = world.roster.count(me.team).max(world.alive_count(me.team));

    let mut s = [0.0; SENSOR_COUNT];
    for (tally, dist_base, count_base, total) in [
        (&enemies, ENEMY_DISTANCE, ENEMY_COUNT, enemy_total),
        (&friends, FRIENDLY_DISTANCE, FRIENDLY_COUNT, friend_total),
    ] {
        for r in 0..REGION_COUNT {
            let n = tally.counts[r];
            s[count_base + r] = ratio(n as f64, total as f64);
            s[dist_base + r] = if n == 0 {
                1.0
            } else {
                let scale = if r < 4 { range } else { diagonal };
                ratio(tally.distance_sums[r] / n as f64, scale)
            };
        }
    }

    let b = &world.bounds;
    let p = me.position;
    s[BOUNDARY] = ratio(b.max.y - p.y, b.height());
    s[BOUNDARY + 1] = ratio(p.y - b.min.y, b.height());
    s[BOUNDARY + 2] = ratio(b.max.x - p.x, b.width());
    s[BOUNDARY + 3] = ratio(p.x - b.min.x, b.width());
    s[SELF_COOLDOWN] = ratio(me.cooldown_remaining, me.stats.cooldown);
    s[SELF_HP] = ratio(me.hp, me.stats.hitpoints_max);
    s[ATTACK_STATE] = if me.attack_move_flag { 1.0 } else { 0.0 };
    s[PREV_ATTACK_OUTPUT] = if prev_attack_output.is_nan() {
        0.0
    } else {
        prev_attack_output.clamp(0.0, 1.0)
    };
    Ok(SensorVector(s))
}

/// Maps raw network outputs onto a move offset within `±move_scale` and an
/// attack flag (strictly above 0.5). Outputs are clamped to `[0, 1]`.
pub fn decode(raw: [f64; OUTPUT_COUNT], move_scale: f64) -> ActionCommand {
    let c = |v: f64| if v.is_nan() { 0.5 } else { v.clamp(0.0, 1.0) };
    let dx = (c(raw[0]) - 0.5) * 2.0 * move_scale;
    let dy = (c(raw[1]) - 0.5) * 2.0 * move_scale;
    ActionCommand {
        target_offset: Vec2::new(dx, dy),
        attack: c(raw[2]) > 0.5,
    }
}

/// Raw outputs that [`decode`] maps back onto `cmd`.
pub fn encode_action(cmd: ActionCommand, move_scale: f64) -> [f64; OUTPUT_COUNT] {
    let o = |d: f64| (d / (2.0 * move_scale) + 0.5).clamp(0.0, 1.0);
    [
        o(cmd.target_offset.x),
        o(cmd.target_offset.y),
        if cmd.attack { 1.0 } else { 0.0 },
    ]
}
