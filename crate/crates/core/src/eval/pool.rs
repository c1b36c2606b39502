use crate::episode::{run_genome, EpisodeOptions};
use crate::neat::Genome;
use crate::scenario::TrainingSet;
use std::collections::VecDeque;
use std::sync::{Condvar, Mutex};
use thiserror::Error;

/// Attempts per genome before it is given fitness 0.
pub const MAX_ATTEMPTS: u32 = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorkerError {
    /// This job failed; the worker can take more.
    #[error("job failed: {0}")]
    Job(String),
    /// The worker is gone.
    #[error("worker lost: {0}")]
    Lost(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PoolError {
    #[error("worker pool is empty")]
    NoWorkers,
    #[error("all workers died with {pending} genomes unevaluated")]
    AllWorkersDead { pending: usize },
}

/// Something that can score genomes against a training set.
pub trait Worker: Send {
    /// Installs the scenarios later jobs refer to by index.
    fn setup(&mut self, set: &TrainingSet) -> Result<(), WorkerError>;
    /// Summed fitness over the given scenario indices.
    fn evaluate(&mut self, genome: &Genome, scenarios: &[usize]) -> Result<f64, WorkerError>;
}

/// Evaluates on the calling thread.
#[derive(Debug, Clone, Default)]
pub struct InProcessWorker {
    set: Option<TrainingSet>,
}

impl Worker for InProcessWorker {
    fn setup(&mut self, set: &TrainingSet) -> Result<(), WorkerError> {
        self.set = Some(set.clone());
        Ok(())
    }

    fn evaluate(&mut self, genome: &Genome, scenarios: &[usize]) -> Result<f64, WorkerError> {
        let set = self
            .set
            .as_ref()
            .ok_or_else(|| WorkerError::Job("no scenarios installed".into()))?;
        let mut total = 0.0;
        for &i in scenarios {
            let s = set
                .scenarios()
                .get(i)
                .ok_or_else(|| WorkerError::Job(format!("scenario index {i} out of range")))?;
            total += run_genome(genome, s, EpisodeOptions::default())
                .map_err(|e| WorkerError::Job(e.to_string()))?
                .fitness;
        }
        Ok(total)
    }
}

struct Queue {
    /// (genome index, failed attempts so far)
    pending: VecDeque<(usize, u32)>,
    in_flight: usize,
    results: Vec<Option<f64>>,
    alive: usize,
}

/// A fixed set of workers, one thread each.
pub struct WorkerPool {
    workers: Vec<Box<dyn Worker>>,
}

impl WorkerPool {
    pub fn new(workers: Vec<Box<dyn Worker>>) -> Self {
        WorkerPool { workers }
    }

    pub fn in_process(n: usize) -> Self {
        WorkerPool::new(
            (0..n.max(1))
                .map(|_| Box::new(InProcessWorker::default()) as Box<dyn Worker>)
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.workers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.workers.is_empty()
    }

    /// Fitness of every genome, in population order.
    ///
    /// Results do not depend on the number of workers or on completion
    /// order. A job whose worker fails is queued again; after
    /// [`MAX_ATTEMPTS`] failures the genome scores 0. Workers that report
    /// [`WorkerError::Lost`] are dropped from the pool.
    pub fn evaluate_population(
        &mut self,
        population: &[Genome],
        set: &TrainingSet,
    ) -> Result<Vec<f64>, PoolError> {
        if self.workers.is_empty() {
            return Err(PoolError::NoWorkers);
        }
        let all: Vec<usize> = (0..set.len()).collect();
        let state = Mutex::new(Queue {
            pending: (0..population.len()).map(|i| (i, 0)).collect(),
            in_flight: 0,
            results: vec![None; population.len()],
            alive: self.workers.len(),
        });
        let wake = Condvar::new();
        let mut lost = vec![false; self.workers.len()];

        std::thread::scope(|scope| {
            for (w, dead) in self.workers.iter_mut().zip(lost.iter_mut()) {
                let (state, wake, all) = (&state, &wake, &all);
                scope.spawn(move || {
                    let retire = |dead: &mut bool| {
                        *dead = true;
                        state.lock().unwrap().alive -= 1;
                        wake.notify_all();
                    };
                    if let Err(e) = w.setup(set) {
                        log::warn!("worker setup failed: {e}");
                        retire(dead);
                        return;
                    }
                    loop {
                        let (job, attempts) = {
                            let mut q = state.lock().unwrap();
                            loop {
                                if let Some(j) = q.pending.pop_front() {
                                    q.in_flight += 1;
                                    break j;
                                }
                                if q.in_flight == 0 {
                                    return;
                                }
                                q = wake.wait(q).unwrap();
                            }
                        };
                        let outcome = w.evaluate(&population[job], all);
                        let mut q = state.lock().unwrap();
                        q.in_flight -= 1;
                        let worker_lost = matches!(outcome, Err(WorkerError::Lost(_)));
                        match outcome {
                            Ok(f) => q.results[job] = Some(f),
                            Err(e) if attempts + 1 >= MAX_ATTEMPTS => {
                                log::warn!(
                                    "genome {job} failed {MAX_ATTEMPTS} times, scoring 0: {e}"
                                );
                                q.results[job] = Some(0.0);
                            }
                            Err(e) => {
                                log::info!("genome {job} attempt {} failed: {e}", attempts + 1);
                                q.pending.push_back((job, attempts + 1));
                            }
                        }
                        drop(q);
                        wake.notify_all();
                        if worker_lost {
                            retire(dead);
                            return;
                        }
                    }
                });
            }
        });

        let mut i = 0;
        self.workers.retain(|_| {
            i += 1;
            !lost[i - 1]
        });
        let q = state.into_inner().unwrap();
        let missing = q.results.iter().filter(|r| r.is_none()).count();
        if missing > 0 {
            return Err(PoolError::AllWorkersDead { pending: missing });
        }
        Ok(q.results.into_iter().map(|r| r.unwrap()).collect())
    }
}
