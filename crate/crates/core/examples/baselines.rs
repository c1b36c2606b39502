//! Scores the scripted policies on a few scenarios.

use kiteneat::baseline::Policy;
use kiteneat::episode::{run_episode, EpisodeOptions};
use kiteneat::scenario::{Formation, Scenario};

fn main() {
    let scenarios = [
        Scenario::new(Formation::Diagonal, 25),
        Scenario::new(Formation::Diagonal, 1),
        Scenario::new(Formation::Surrounded, 10),
        Scenario::new(Formation::Random, 15).with_seed(7),
    ];
    println!(
        "{:<16} {:<14} {:>9} {:>7} {:>7} {:>6}",
        "scenario", "policy", "fitness", "ranged", "melee", "frames"
    );
    for s in &scenarios {
        for p in Policy::ALL {
            let r =
                run_episode(s, &mut p.controller(1), EpisodeOptions::default()).expect("episode");
            println!(
                "{:<16} {:<14} {:>9.1} {:>7} {:>7} {:>6}",
                s.label(),
                p,
                r.fitness,
                r.remaining_ranged(),
                r.remaining_melee(),
                r.frames
            );
        }
    }
}
