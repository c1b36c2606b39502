//! The generational loop, its statistics stream and checkpoints.

use crate::eval::{PoolError, WorkerPool};
use crate::neat::{
    next_generation, seed_population, EvolutionConfig, Genome, InnovationRegistry, SpeciesSet,
};
use crate::scenario::TrainingSet;
use crate::sensors::{OUTPUT_COUNT, SENSOR_COUNT};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const CHECKPOINT_FORMAT: &str = "kiteneat-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;
pub const DEFAULT_CHECKPOINT_EVERY: u32 = 5;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Config(#[from] crate::neat::ConfigError),
    #[error("evaluation failed in generation {generation}: {source}")]
    Pool { generation: u32, source: PoolError },
    #[error("checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },
    #[error("writing statistics: {0}")]
    Stats(#[from] csv::Error),
}

/// One row of the statistics stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: u32,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_so_far: f64,
    pub species: usize,
    pub compat_threshold: f64,
    pub mean_connections: f64,
    pub mean_hidden: f64,
}

/// Everything needed to continue a run exactly where it stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionState {
    pub config: EvolutionConfig,
    pub training_set: TrainingSet,
    /// Generation about to be evaluated.
    pub generation: u32,
    pub population: Vec<Genome>,
    pub species: SpeciesSet,
    pub registry: InnovationRegistry,
    pub rng: ChaCha8Rng,
    pub history: Vec<GenerationStats>,
    pub best: Option<Genome>,
    /// Generation the best genome was evaluated in.
    pub best_generation: u32,
}

impl EvolutionState {
    pub fn new(config: EvolutionConfig, training_set: TrainingSet) -> Result<Self, TrainError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let registry = InnovationRegistry::new(SENSOR_COUNT, OUTPUT_COUNT);
        let population = seed_population(&config, &registry, SENSOR_COUNT, OUTPUT_COUNT, &mut rng);
        Ok(EvolutionState {
            species: SpeciesSet::new(config.initial_threshold),
            config,
            training_set,
            generation: 0,
            population,
            registry,
            rng,
            history: Vec::new(),
            best: None,
            best_generation: 0,
        })
    }

    pub fn is_finished(&self) -> bool {
        self.generation > self.config.generations
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub config_hash: String,
    pub state: EvolutionState,
}

impl Checkpoint {
    pub fn new(state: &EvolutionState) -> Self {
        Checkpoint {
            format: CHECKPOINT_FORMAT.to_string(),
            version: CHECKPOINT_VERSION,
            config_hash: state.config.hash(),
            state: state.clone(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), TrainError> {
        let err = |reason: String| TrainError::Checkpoint {
            path: path.to_path_buf(),
            reason,
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| err(e.to_string()))?;
        }
        let json = serde_json::to_string(self).map_err(|e| err(e.to_string()))?;
        std::fs::write(path, json).map_err(|e| err(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, TrainError> {
        let err = |reason: String| TrainError::Checkpoint {
            path: path.to_path_buf(),
            reason,
        };
        let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        let cp: Checkpoint = serde_json::from_str(&text).map_err(|e| err(e.to_string()))?;
        if cp.format != CHECKPOINT_FORMAT {
            return Err(err(format!("not a checkpoint (format {:?})", cp.format)));
        }
        if cp.version != CHECKPOINT_VERSION {
            return Err(err(format!("unsupported version {}", cp.version)));
        }
        if cp.config_hash != cp.state.config.hash() {
            return Err(err("config hash does not match the embedded config".into()));
        }
        Ok(cp)
    }

    pub fn file_name(generation: u32) -> String {
        format!("gen_{generation:04}.json")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    /// Write a checkpoint at the start of every generation divisible by this
    /// (0 disables).
    pub checkpoint_every: u32,
    pub checkpoint_dir: Option<PathBuf>,
    pub workers: usize,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            checkpoint_every: DEFAULT_CHECKPOINT_EVERY,
            checkpoint_dir: None,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// All-time best genome, with the fitness it was evaluated at.
    pub best: Genome,
    pub best_generation: u32,
    pub history: Vec<GenerationStats>,
}

pub struct Trainer {
    state: EvolutionState,
    pool: WorkerPool,
    options: TrainOptions,
    started_at: u32,
}

impl Trainer {
    pub fn new(state: EvolutionState, pool: WorkerPool, options: TrainOptions) -> Self {
        Trainer {
            started_at: state.generation,
            state,
            pool,
            options,
        }
    }

    pub fn resume(checkpoint: Checkpoint, pool: WorkerPool, options: TrainOptions) -> Self {
        Trainer::new(checkpoint.state, pool, options)
    }

    pub fn state(&self) -> &EvolutionState {
        &self.state
    }

    fn checkpoint_path(&self, generation: u32) -> Option<PathBuf> {
        self.options
            .checkpoint_dir
            .as_ref()
            .map(|d| d.join(Checkpoint::file_name(generation)))
    }

    /// Evaluates, speciates and (unless this was the last generation)
    /// reproduces one generation. Returns `None` once the run is complete.
    pub fn step(&mut self) -> Result<Option<GenerationStats>, TrainError> {
        if self.state.is_finished() {
            return Ok(None);
        }
        let g = self.state.generation;
        let every = self.options.checkpoint_every;
        if every > 0 && g.is_multiple_of(every) && g != self.started_at {
            if let Some(path) = self.checkpoint_path(g) {
                Checkpoint::new(&self.state).save(&path)?;
            }
        }

        let set = self
            .state
            .training_set
            .for_generation(self.state.config.seed, g);
        let fitnesses = match self.pool.evaluate_population(&self.state.population, &set) {
            Ok(f) => f,
            Err(source) => {
                if let Some(path) = self.checkpoint_path(g) {
                    Checkpoint::new(&self.state).save(&path)?;
                }
                return Err(TrainError::Pool {
                    generation: g,
                    source,
                });
            }
        };
        let st = &mut self.state;
        for (genome, f) in st.population.iter_mut().zip(&fitnesses) {
            genome.fitness = *f;
        }
        st.species.speciate(&st.population, &st.config, g);

        let n = st.population.len() as f64;
        let champion = st
            .population
            .iter()
            .reduce(|a, b| if b.fitness > a.fitness { b } else { a })
            .expect("non-empty population");
        if st
            .best
            .as_ref()
            .is_none_or(|b| champion.fitness > b.fitness)
        {
            st.best = Some(champion.clone());
            st.best_generation = g;
        }
        let stats = GenerationStats {
            generation: g,
            best_fitness: champion.fitness,
            mean_fitness: fitnesses.iter().sum::<f64>() / n,
            best_so_far: st.best.as_ref().map_or(f64::NEG_INFINITY, |b| b.fitness),
            species: st.species.len(),
            compat_threshold: st.species.threshold,
            mean_connections: st
                .population
                .iter()
                .map(|g| g.connections.len() as f64)
                .sum::<f64>()
                / n,
            mean_hidden: st
                .population
                .iter()
                .map(|g| g.hidden_count() as f64)
                .sum::<f64>()
                / n,
        };
        log::info!(
            "generation {g}: best {:.1} mean {:.1} species {}",
            stats.best_fitness,
            stats.mean_fitness,
            stats.species
        );
        st.history.push(stats.clone());

        if g < st.config.generations {
            let (next, _) = next_generation(
                &st.population,
                &st.species,
                &mut st.registry,
                &st.config,
                g,
                &mut st.rng,
            );
            st.population = next;
        }
        st.generation += 1;
        Ok(Some(stats))
    }

    pub fn run(&mut self) -> Result<TrainOutcome, TrainError> {
        while self.step()?.is_some() {}
        Ok(TrainOutcome {
            best: self
                .state
                .best
                .clone()
                .expect("at least one generation evaluated"),
            best_generation: self.state.best_generation,
            history: self.state.history.clone(),
        })
    }

    pub fn into_state(self) -> EvolutionState {
        self.state
    }
}

/// Runs a fresh training run with an in-process pool.
pub fn train(
    config: EvolutionConfig,
    set: TrainingSet,
    options: TrainOptions,
) -> Result<TrainOutcome, TrainError> {
    let state = EvolutionState::new(config, set)?;
    let pool = WorkerPool::in_process(options.workers);
    Trainer::new(state, pool, options).run()
}

/// Writes the statistics stream as CSV with a header row.
pub fn write_stats_csv<W: Write>(w: W, history: &[GenerationStats]) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(w);
    if history.is_empty() {
        out.write_record([
            "generation",
            "best_fitness",
            "mean_fitness",
            "best_so_far",
            "species",
            "compat_threshold",
            "mean_connections",
            "mean_hidden",
        ])?;
    }
    for row in history {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}
