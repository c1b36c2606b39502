//! Replay logs and kiting analysis.
//!
//! A replay file is JSON Lines. The first line is the header,
//! `{"type":"header","format":"kiteneat-replay","version":1,"scenario":{..},
//! "ranged_range":5.0,"melee_range":0.1}`; every further line is one unit on
//! one tick:
//!
//! ```text
//! {"type":"unit","frame":12,"id":3,"team":"ranged","x":9.1,"y":8.7,"hp":80.0,
//!  "action":{"dx":-4.2,"dy":1.0,"attack":false},"fired":false,"target":null}
//! ```
//!
//! `x`, `y` and `hp` are the unit's state at the start of the tick and
//! `action` the command it executed during it. After the last tick each
//! survivor gets one more line with `"action":null`.

use crate::scenario::Scenario;
use crate::sim::{Team, UnitId, Vec2};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use thiserror::Error;

pub const REPLAY_FORMAT: &str = "kiteneat-replay";
pub const REPLAY_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("replay I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("replay line {line}: {source}")]
    Json {
        line: usize,
        source: serde_json::Error,
    },
    #[error("replay has no header line")]
    MissingHeader,
    #[error("unsupported replay {format:?} version {version}")]
    Unsupported { format: String, version: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayHeader {
    pub format: String,
    pub version: u32,
    pub scenario: Scenario,
    pub ranged_range: f64,
    pub melee_range: f64,
}

impl ReplayHeader {
    pub fn new(scenario: &Scenario) -> Self {
        ReplayHeader {
            format: REPLAY_FORMAT.to_string(),
            version: REPLAY_VERSION,
            scenario: scenario.clone(),
            ranged_range: scenario.ranged_stats().attack_range,
            melee_range: scenario.melee_stats().attack_range,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplayAction {
    pub dx: f64,
    pub dy: f64,
    pub attack: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayRecord {
    pub frame: u64,
    pub id: UnitId,
    pub team: Team,
    pub x: f64,
    pub y: f64,
    pub hp: f64,
    pub action: Option<ReplayAction>,
    pub fired: bool,
    pub target: Option<UnitId>,
}

impl ReplayRecord {
    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line {
    Header(ReplayHeader),
    Unit(ReplayRecord),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub header: ReplayHeader,
    /// Ordered by frame, then unit id.
    pub records: Vec<ReplayRecord>,
}

impl Replay {
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<(), ReplayError> {
        serde_json::to_writer(&mut w, &Line::Header(self.header.clone()))
            .map_err(|source| ReplayError::Json { line: 1, source })?;
        w.write_all(b"\n")?;
        for (i, r) in self.records.iter().enumerate() {
            serde_json::to_writer(&mut w, &Line::Unit(r.clone())).map_err(|source| {
                ReplayError::Json {
                    line: i + 2,
                    source,
                }
            })?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self, ReplayError> {
        let mut header = None;
        let mut records = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str(&line).map_err(|source| ReplayError::Json {
                line: i + 1,
                source,
            })? {
                Line::Header(h) => {
                    if h.format != REPLAY_FORMAT || h.version != REPLAY_VERSION {
                        return Err(ReplayError::Unsupported {
                            format: h.format,
                            version: h.version,
                        });
                    }
                    header = Some(h);
                }
                Line::Unit(rec) => records.push(rec),
            }
        }
        Ok(Replay {
            header: header.ok_or(ReplayError::MissingHeader)?,
            records,
        })
    }

    /// Number of simulated ticks.
    pub fn frame_count(&self) -> u64 {
        self.records
            .iter()
            .filter(|r| r.action.is_some())
            .map(|r| r.frame + 1)
            .max()
            .unwrap_or(0)
    }

    /// Records of one tick.
    pub fn frames(&self) -> BTreeMap<u64, Vec<&ReplayRecord>> {
        let mut out: BTreeMap<u64, Vec<&ReplayRecord>> = BTreeMap::new();
        for r in &self.records {
            out.entry(r.frame).or_default().push(r);
        }
        out
    }
}

/// Kiting statistics of the ranged side.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct KitingReport {
    pub fires: usize,
    /// Shots followed by at least one retreating tick before the unit's next shot.
    pub alternations: usize,
    /// `alternations / fires`, 0 without shots.
    pub fire_retreat_rate: f64,
    /// Largest nearest-melee distance at a shot.
    pub max_fire_distance: f64,
    /// Whether every shot happened with a melee unit within ranged attack range.
    pub fires_within_range: bool,
    /// Mean distance to the nearest melee unit over ranged unit-ticks.
    pub mean_nearest_distance: f64,
    /// Share of ranged unit-ticks with a melee unit within melee range.
    pub contact_fraction: f64,
    pub ranged_ticks: usize,
}

/// Post-processes a replay into fire/retreat statistics.
///
/// A retreating tick is a move command with a positive component away from
/// the nearest melee unit.
pub fn analyze_kiting(replay: &Replay) -> KitingReport {
    let mut report = KitingReport {
        fires_within_range: true,
        ..Default::default()
    };
    // Per unit: waiting for a retreat since its last shot.
    let mut pending: BTreeMap<UnitId, bool> = BTreeMap::new();
    let mut distance_sum = 0.0;
    let mut contact = 0usize;

    for (_, recs) in replay.frames() {
        let melee: Vec<Vec2> = recs
            .iter()
            .filter(|r| r.team == Team::Melee)
            .map(|r| r.position())
            .collect();
        for r in recs.iter().filter(|r| r.team == Team::Ranged) {
            let Some(action) = r.action else { continue };
            let p = r.position();
            let Some(nearest) = melee
                .iter()
                .copied()
                .min_by(|a, b| a.distance(p).total_cmp(&b.distance(p)))
            else {
                continue;
            };
            let d = nearest.distance(p);
            report.ranged_ticks += 1;
            distance_sum += d;
            if d <= replay.header.melee_range {
                contact += 1;
            }
            if r.fired {
                report.fires += 1;
                report.max_fire_distance = report.max_fire_distance.max(d);
                if d > replay.header.ranged_range {
                    report.fires_within_range = false;
                }
                pending.insert(r.id, true);
                continue;
            }
            let away = p - nearest;
            let retreating = !action.attack && (action.dx * away.x + action.dy * away.y) > 0.0;
            if retreating && pending.get(&r.id) == Some(&true) {
                report.alternations += 1;
                pending.insert(r.id, false);
            }
        }
    }
    if report.fires > 0 {
        report.fire_retreat_rate = report.alternations as f64 / report.fires as f64;
    }
    if report.ranged_ticks > 0 {
        report.mean_nearest_distance = distance_sum / report.ranged_ticks as f64;
        report.contact_fraction = contact as f64 / report.ranged_ticks as f64;
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Formation;

    fn rec(
        frame: u64,
        id: u32,
        team: Team,
        x: f64,
        action: Option<(f64, bool)>,
        fired: bool,
    ) -> ReplayRecord {
        ReplayRecord {
            frame,
            id: UnitId(id),
            team,
            x,
            y: 0.0,
            hp: 1.0,
            action: action.map(|(dx, attack)| ReplayAction {
                dx,
                dy: 0.0,
                attack,
            }),
            fired,
            target: None,
        }
    }

    fn replay(records: Vec<ReplayRecord>) -> Replay {
        Replay {
            header: ReplayHeader::new(&Scenario::new(Formation::Diagonal, 1)),
            records,
        }
    }

    #[test]
    fn fire_then_retreat_counts_once() {
        // Ranged unit at x, melee unit east of it at x + 4.
        let mut recs = Vec::new();
        let script = [
            (true, true),
            (false, false),
            (false, false),
            (true, true),
            (true, false),
        ];
        for (f, &(attack, fired)) in script.iter().enumerate() {
            let dx = if attack { 0.0 } else { -1.0 };
            recs.push(rec(
                f as u64,
                0,
                Team::Ranged,
                10.0,
                Some((dx, attack)),
                fired,
            ));
            recs.push(rec(
                f as u64,
                1,
                Team::Melee,
                14.0,
                Some((0.0, false)),
                false,
            ));
        }
        let k = analyze_kiting(&replay(recs));
        assert_eq!(k.fires, 2);
        assert_eq!(k.alternations, 1);
        assert_eq!(k.fire_retreat_rate, 0.5);
        assert!(k.fires_within_range);
        assert_eq!(k.mean_nearest_distance, 4.0);
        assert_eq!(k.contact_fraction, 0.0);
    }

    #[test]
    fn moving_toward_is_not_retreat() {
        let recs = vec![
            rec(0, 0, Team::Ranged, 10.0, Some((0.0, true)), true),
            rec(0, 1, Team::Melee, 14.0, None, false),
            rec(1, 0, Team::Ranged, 10.0, Some((1.0, false)), false),
            rec(1, 1, Team::Melee, 14.0, None, false),
        ];
        assert_eq!(analyze_kiting(&replay(recs)).alternations, 0);
    }

    #[test]
    fn jsonl_round_trip() {
        let r = replay(vec![
            rec(0, 0, Team::Ranged, 1.5, Some((0.25, false)), false),
            rec(1, 0, Team::Ranged, 1.75, None, false),
        ]);
        let mut buf = Vec::new();
        r.write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("{\"type\":\"header\""));
        assert_eq!(Replay::read_jsonl(&buf[..]).unwrap(), r);
        assert_eq!(r.frame_count(), 1);
    }

    #[test]
    fn missing_header_is_an_error() {
        let line =
            serde_json::to_string(&Line::Unit(rec(0, 0, Team::Ranged, 0.0, None, false))).unwrap();
        assert!(matches!(
            Replay::read_jsonl(line.as_bytes()),
            Err(ReplayError::MissingHeader)
        ));
    }
}
