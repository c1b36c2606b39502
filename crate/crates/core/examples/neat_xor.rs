//! Uses the NEAT engine on its own to evolve an XOR network.
//!
//! The third input is a constant 1 that acts as a bias.

use kiteneat::neat::{
    activate_once, champion_index, next_generation, seed_population, EvolutionConfig,
    InnovationRegistry, SpeciesSet,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CASES: [([f64; 3], f64); 4] = [
    ([0.0, 0.0, 1.0], 0.0),
    ([0.0, 1.0, 1.0], 1.0),
    ([1.0, 0.0, 1.0], 1.0),
    ([1.0, 1.0, 1.0], 0.0),
];

fn main() {
    let config = EvolutionConfig {
        population_size: 150,
        target_species: 10,
        initial_connection_probability: 1.0,
        p_add_node: 0.03,
        p_add_connection: 0.1,
        seed: 2,
        ..EvolutionConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut registry = InnovationRegistry::new(3, 1);
    let mut pop = seed_population(&config, &registry, 3, 1, &mut rng);
    let mut species = SpeciesSet::new(config.initial_threshold);

    for generation in 0..300 {
        for g in &mut pop {
            let err: f64 = CASES
                .iter()
                .map(|(x, y)| (activate_once(g, x)[0] - y).powi(2))
                .sum();
            g.fitness = 4.0 - err;
        }
        species.speciate(&pop, &config, generation);
        let best = &pop[champion_index(&pop).unwrap()];
        if generation % 20 == 0 || best.fitness > 3.9 {
            println!(
                "gen {generation:3}: best {:.4}, {} hidden, {} species",
                best.fitness,
                best.hidden_count(),
                species.len()
            );
        }
        if best.fitness > 3.9 {
            for (x, y) in CASES {
                println!(
                    "  {:?} -> {:.3} (want {y})",
                    &x[..2],
                    activate_once(best, &x)[0]
                );
            }
            return;
        }
        pop = next_generation(&pop, &species, &mut registry, &config, generation, &mut rng).0;
    }
    println!("no solution within 300 generations");
}
