//! Stops a run part way, reloads the checkpoint and finishes it, then checks
//! the result against an uninterrupted run.

use kiteneat::eval::WorkerPool;
use kiteneat::neat::EvolutionConfig;
use kiteneat::scenario::{Formation, Scenario, TrainingSet};
use kiteneat::training::{Checkpoint, EvolutionState, TrainOptions, Trainer};

fn main() {
    let dir = std::env::temp_dir().join("kiteneat-checkpoints");
    let config = EvolutionConfig {
        population_size: 30,
        generations: 8,
        seed: 11,
        ..EvolutionConfig::default()
    };
    let set = TrainingSet::single(Scenario::new(Formation::Random, 6).with_seed(2));
    let options = TrainOptions {
        checkpoint_every: 4,
        checkpoint_dir: Some(dir.clone()),
        workers: 1,
    };

    let full = Trainer::new(
        EvolutionState::new(config.clone(), set.clone()).unwrap(),
        WorkerPool::in_process(1),
        options.clone(),
    )
    .run()
    .unwrap();

    let mut first = Trainer::new(
        EvolutionState::new(config, set).unwrap(),
        WorkerPool::in_process(1),
        options.clone(),
    );
    while first.state().generation < 5 {
        let stats = first.step().unwrap().unwrap();
        println!("gen {}: best {:.1}", stats.generation, stats.best_fitness);
    }
    drop(first);
    let path = dir.join(Checkpoint::file_name(4));
    println!("interrupted, resuming from {}", path.display());

    let resumed = Trainer::resume(
        Checkpoint::load(&path).unwrap(),
        WorkerPool::in_process(1),
        options,
    )
    .run()
    .unwrap();
    for s in &resumed.history[4..] {
        println!("gen {}: best {:.1}", s.generation, s.best_fitness);
    }
    println!("identical to the uninterrupted run: {}", resumed == full);
}
