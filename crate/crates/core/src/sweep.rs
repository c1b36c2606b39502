//! Generalization sweeps over formations and melee group sizes.

use crate::episode::{run_episode, Controller, EpisodeError, EpisodeOptions, GenomeController};
use crate::neat::Genome;
use crate::scenario::{Formation, Scenario};
use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

pub const SWEEP_HEADER: &str =
    "formation,zealots,repeats,mean_remaining_ranged,mean_remaining_melee,mean_fitness";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("sweep needs at least one formation, zealot count and repeat")]
    Empty,
    #[error(transparent)]
    Episode(#[from] EpisodeError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub formations: Vec<Formation>,
    /// Zealot counts run from 1 to this, inclusive.
    pub max_zealots: usize,
    pub repeats: usize,
    /// Repeat `r` spawns with seed `base_seed + r`.
    pub base_seed: u64,
    /// Map, budget and unit types for every cell.
    pub template: Scenario,
    pub workers: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            formations: Formation::SWEEP_DEFAULT.to_vec(),
            max_zealots: 30,
            repeats: 10,
            base_seed: 0,
            template: Scenario::default(),
            workers: 1,
        }
    }
}

impl SweepOptions {
    /// Scenarios of every cell, row-major by formation then zealot count.
    pub fn cells(&self) -> Vec<(Formation, usize)> {
        self.formations
            .iter()
            .flat_map(|&f| (1..=self.max_zealots).map(move |z| (f, z)))
            .collect()
    }

    pub fn scenario(&self, formation: Formation, zealots: usize, repeat: usize) -> Scenario {
        Scenario {
            formation,
            melee_count: zealots,
            spawn_seed: self.base_seed.wrapping_add(repeat as u64),
            ..self.template.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub formation: Formation,
    pub zealots: usize,
    pub repeats: usize,
    pub mean_remaining_ranged: f64,
    pub mean_remaining_melee: f64,
    pub mean_fitness: f64,
}

/// Runs every (formation, zealot count) cell `repeats` times. `make` builds
/// a fresh controller for each episode.
pub fn sweep<F>(make: F, options: &SweepOptions) -> Result<Vec<SweepRow>, SweepError>
where
    F: Fn() -> Box<dyn Controller> + Sync,
{
    if options.formations.is_empty() || options.max_zealots == 0 || options.repeats == 0 {
        return Err(SweepError::Empty);
    }
    let cells = options.cells();
    let run_cell = |&(formation, zealots): &(Formation, usize)| -> Result<SweepRow, SweepError> {
        let (mut ranged, mut melee, mut fit) = (0.0, 0.0, 0.0);
        for r in 0..options.repeats {
            let s = options.scenario(formation, zealots, r);
            let res = run_episode(&s, &mut make(), EpisodeOptions::default())?;
            ranged += res.remaining_ranged() as f64;
            melee += res.remaining_melee() as f64;
            fit += res.fitness;
        }
        let n = options.repeats as f64;
        Ok(SweepRow {
            formation,
            zealots,
            repeats: options.repeats,
            mean_remaining_ranged: ranged / n,
            mean_remaining_melee: melee / n,
            mean_fitness: fit / n,
        })
    };

    let workers = options.workers.clamp(1, cells.len());
    let chunk = cells.len().div_ceil(workers);
    let parts: Vec<Result<Vec<SweepRow>, SweepError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cells
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(run_cell).collect()))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep thread"))
            .collect()
    });
    let mut rows = Vec::with_capacity(cells.len());
    for p in parts {
        rows.extend(p?);
    }
    Ok(rows)
}

/// Sweep of a genome controller.
pub fn sweep_genome(genome: &Genome, options: &SweepOptions) -> Result<Vec<SweepRow>, SweepError> {
    let proto = GenomeController::new(genome).map_err(SweepError::Episode)?;
    sweep(move || Box::new(proto.clone()), options)
}

pub fn write_sweep_csv<W: Write>(w: W, rows: &[SweepRow]) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(w);
    if rows.is_empty() {
        out.write_record(SWEEP_HEADER.split(','))?;
    }
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

/// Per-formation digest of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub formation: Formation,
    pub min_mean_remaining_ranged: f64,
    /// Largest zealot count up to which every cell ended with no zealots left.
    pub annihilated_up_to: usize,
}

pub fn summarize(rows: &[SweepRow]) -> Vec<SweepSummary> {
    let mut out: Vec<SweepSummary> = Vec::new();
    for r in rows {
        let idx = match out.iter().position(|s| s.formation == r.formation) {
            Some(i) => i,
            None => {
                out.push(SweepSummary {
                    formation: r.formation,
                    min_mean_remaining_ranged: f64::INFINITY,
                    annihilated_up_to: 0,
                });
                out.len() - 1
            }
        };
        let s = &mut out[idx];
        s.min_mean_remaining_ranged = s.min_mean_remaining_ranged.min(r.mean_remaining_ranged);
        if r.mean_remaining_melee == 0.0 && r.zealots == s.annihilated_up_to + 1 {
            s.annihilated_up_to = r.zealots;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::Constant;

    fn idle() -> Box<dyn Controller> {
        Box::new(Constant([0.5, 0.5, 0.0]))
    }

    #[test]
    fn row_count_is_formations_times_zealots() {
        let opts = SweepOptions {
            formations: vec![Formation::Diagonal, Formation::Surrounded],
            max_zealots: 3,
            repeats: 1,
            template: Scenario {
                frame_budget: 5,
                ..Scenario::default()
            },
            workers: 2,
            ..Default::default()
        };
        let rows = sweep(idle, &opts).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[3].formation, Formation::Surrounded);
        assert_eq!(rows[3].zealots, 1);
    }

    #[test]
    fn empty_sweeps_are_rejected() {
        let opts = SweepOptions {
            max_zealots: 0,
            ..Default::default()
        };
        assert_eq!(sweep(idle, &opts), Err(SweepError::Empty));
    }

    #[test]
    fn header_is_stable() {
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim_end(), SWEEP_HEADER);
    }

    #[test]
    fn summary_tracks_annihilation_prefix() {
        let row = |z, melee| SweepRow {
            formation: Formation::Random,
            zealots: z,
            repeats: 1,
            mean_remaining_ranged: 5.0 - z as f64,
            mean_remaining_melee: melee,
            mean_fitness: 0.0,
        };
        let s = summarize(&[row(1, 0.0), row(2, 0.0), row(3, 1.0), row(4, 0.0)]);
        assert_eq!(s[0].annihilated_up_to, 2);
        assert_eq!(s[0].min_mean_remaining_ranged, 1.0);
    }
}
