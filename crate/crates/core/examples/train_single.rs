//! Evolves a controller on one scenario and compares it with the baselines.
//!
//! `cargo run --release --example train_single -- [generations] [seed]`

use kiteneat::baseline::Policy;
use kiteneat::episode::{run_episode, EpisodeOptions};
use kiteneat::neat::EvolutionConfig;
use kiteneat::scenario::{Formation, Scenario, TrainingSet};
use kiteneat::training::{train, TrainOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let generations = args.next().and_then(|a| a.parse().ok()).unwrap_or(30);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let scenario = Scenario::new(Formation::Diagonal, 25);
    let config = EvolutionConfig {
        generations,
        seed,
        ..EvolutionConfig::default()
    };
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let start = std::time::Instant::now();
    let out = train(
        config,
        TrainingSet::single(scenario.clone()),
        TrainOptions {
            workers,
            ..TrainOptions::default()
        },
    )
    .expect("training");
    for row in &out.history {
        println!(
            "gen {:>3}  best {:>7.1}  mean {:>7.1}  species {:>2}  conns {:>5.1}",
            row.generation, row.best_fitness, row.mean_fitness, row.species, row.mean_connections
        );
    }
    println!("trained in {:.1?}", start.elapsed());
    println!("evolved          {:>7.1}", out.best.fitness);
    for p in [Policy::StandAndFire, Policy::Random, Policy::Flee] {
        let r = run_episode(
            &scenario,
            &mut p.controller(seed),
            EpisodeOptions::default(),
        )
        .expect("episode");
        println!("{:<16} {:>7.1}", p, r.fitness);
    }
}
