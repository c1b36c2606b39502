//! Loads a run configuration, shows the training set it defines and prints
//! the fully resolved TOML.
//!
//! `cargo run --example config_file -- [path]`

use kiteneat::config::load_config;
use std::path::PathBuf;

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/paper_sim.cfg"));
    let config = match load_config(&path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    let set = config.training_set().unwrap();
    println!(
        "population {}, {} generations, seed {}, config hash {}",
        config.evolution.population_size,
        config.evolution.generations,
        config.evolution.seed,
        config.evolution.hash()
    );
    for s in set.scenarios() {
        println!("  {:<16} max fitness {}", s.label(), s.max_fitness());
    }
    println!("total max fitness {}\n", set.max_fitness());
    print!("{}", config.to_toml());
}
