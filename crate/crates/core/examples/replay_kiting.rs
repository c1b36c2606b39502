//! Records episodes as JSONL replays and measures how often shots are
//! followed by a retreat.
//!
//! `cargo run --release --example replay_kiting -- [replay.jsonl]`

use kiteneat::baseline::Policy;
use kiteneat::episode::{run_episode, run_genome, EpisodeOptions};
use kiteneat::neat::EvolutionConfig;
use kiteneat::replay::{analyze_kiting, Replay};
use kiteneat::scenario::{Formation, Scenario, TrainingSet};
use kiteneat::training::{train, TrainOptions};
use std::io::{BufReader, BufWriter};

fn main() {
    let scenario = Scenario::new(Formation::Diagonal, 25);
    let config = EvolutionConfig {
        population_size: 50,
        generations: 20,
        ..EvolutionConfig::default()
    };
    let outcome = train(
        config,
        TrainingSet::single(scenario.clone()),
        TrainOptions::default(),
    )
    .unwrap();
    let evolved = run_genome(&outcome.best, &scenario, EpisodeOptions::recorded()).unwrap();
    let stand = run_episode(
        &scenario,
        &mut Policy::StandAndFire.controller(0),
        EpisodeOptions::recorded(),
    )
    .unwrap();

    let path = std::env::args().nth(1).unwrap_or_else(|| {
        std::env::temp_dir()
            .join("kiting.jsonl")
            .display()
            .to_string()
    });
    evolved
        .replay
        .as_ref()
        .unwrap()
        .write_jsonl(BufWriter::new(std::fs::File::create(&path).unwrap()))
        .unwrap();
    let reread = Replay::read_jsonl(BufReader::new(std::fs::File::open(&path).unwrap())).unwrap();
    println!("wrote {} frames to {path}", reread.frame_count());

    for (name, replay, fitness) in [
        ("evolved", &reread, evolved.fitness),
        (
            "stand_and_fire",
            stand.replay.as_ref().unwrap(),
            stand.fitness,
        ),
    ] {
        let k = analyze_kiting(replay);
        println!(
            "{name:<15} fitness {fitness:7.1}  shots {:4}  fire-then-retreat {:.3}  mean gap {:.2}  contact {:.3}",
            k.fires, k.fire_retreat_rate, k.mean_nearest_distance, k.contact_fraction
        );
    }
}
