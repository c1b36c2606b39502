//! Fitness evaluation of genomes over a training set, locally or through a
//! pool of workers.

mod pool;
mod socket;

pub use pool::{InProcessWorker, PoolError, Worker, WorkerError, WorkerPool, MAX_ATTEMPTS};
pub use socket::{
    read_frame, serve, serve_connection, write_frame, Request, Response, SocketWorker,
    MAX_FRAME_BYTES,
};

use crate::episode::{run_genome, EpisodeError, EpisodeOptions, EpisodeResult};
use crate::neat::Genome;
use crate::scenario::TrainingSet;

/// Per-scenario episode results of one genome.
pub fn evaluate_breakdown(
    genome: &Genome,
    set: &TrainingSet,
) -> Result<Vec<EpisodeResult>, EpisodeError> {
    set.scenarios()
        .iter()
        .map(|s| run_genome(genome, s, EpisodeOptions::default()))
        .collect()
}

/// Summed fitness of `genome` over every scenario of `set`.
pub fn evaluate_genome(genome: &Genome, set: &TrainingSet) -> Result<f64, EpisodeError> {
    Ok(evaluate_breakdown(genome, set)?
        .iter()
        .map(|r| r.fitness)
        .sum())
}
