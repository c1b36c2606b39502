use kiteneat::neat::{
    activate_once, add_connection, add_node, compatibility_distance, crossover, mutate,
    next_generation, seed_population, CompatibilityCoefficients, ConnectionGene, EvolutionConfig,
    Genome, Innovation, InnovationRegistry, Network, NodeId, SpeciesSet,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

fn gene(innovation: u64, source: u32, target: u32, weight: f64) -> ConnectionGene {
    ConnectionGene {
        innovation: Innovation(innovation),
        source: NodeId(source),
        target: NodeId(target),
        weight,
        enabled: true,
    }
}

/// A random genome grown from a seeded population member by structural
/// and weight mutations.
fn grown(seed: u64, steps: usize) -> (Genome, InnovationRegistry) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = EvolutionConfig {
        population_size: 1,
        p_add_node: 0.3,
        p_add_connection: 0.5,
        ..Default::default()
    };
    let mut registry = InnovationRegistry::new(40, 3);
    let mut g = seed_population(&config, &registry, 40, 3, &mut rng).remove(0);
    for _ in 0..steps {
        mutate(&mut g, &mut registry, &config, &mut rng);
    }
    (g, registry)
}

#[test]
fn disconnected_network_outputs_one_half() {
    assert_eq!(
        activate_once(&Genome::minimal(40, 3), &[0.7; 40]),
        vec![0.5; 3]
    );
    let mut g = Genome::minimal(40, 3);
    g.insert_connection(gene(2, 0, 42, 0.0));
    assert_eq!(activate_once(&g, &[1.0; 40])[2], 0.5);
}

#[test]
fn split_rule_is_canonical() {
    let mut g = Genome::minimal(2, 1);
    g.insert_connection(gene(0, 0, 2, -1.5));
    let mut registry = InnovationRegistry::new(2, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert!(add_node(&mut g, &mut registry, &mut rng));
    assert!(!g.connections[0].enabled);
    let h = NodeId(3);
    let incoming = g.connections.iter().find(|c| c.target == h).unwrap();
    let outgoing = g.connections.iter().find(|c| c.source == h).unwrap();
    assert_eq!((incoming.source, incoming.weight), (NodeId(0), 1.0));
    assert_eq!((outgoing.target, outgoing.weight), (NodeId(2), -1.5));
    g.validate().unwrap();
}

#[test]
fn add_node_without_enabled_connections_is_a_no_op() {
    let mut g = Genome::minimal(2, 1);
    let mut registry = InnovationRegistry::new(2, 1);
    assert!(!add_node(
        &mut g,
        &mut registry,
        &mut ChaCha8Rng::seed_from_u64(1)
    ));
    assert_eq!(g, Genome::minimal(2, 1));
}

#[test]
fn fully_connected_genome_rejects_new_connections() {
    let mut g = Genome::minimal(1, 1);
    g.insert_connection(gene(0, 0, 1, 0.5));
    g.insert_connection(gene(1, 1, 1, 0.5));
    let mut registry = InnovationRegistry::new(1, 1);
    let before = g.clone();
    assert!(!add_connection(
        &mut g,
        &mut registry,
        5.0,
        &mut ChaCha8Rng::seed_from_u64(2)
    ));
    assert_eq!(g, before);
}

#[test]
fn same_new_edge_in_one_generation_shares_its_number() {
    let mut registry = InnovationRegistry::new(40, 3);
    let h = NodeId(50);
    let a = registry.connection(NodeId(1), h);
    let b = registry.connection(NodeId(1), h);
    assert_eq!(a, b);
    registry.reset_generation();
    let c = registry.connection(NodeId(1), h);
    assert!(c.0 > a.0);
}

#[test]
fn zero_probabilities_leave_genomes_unchanged() {
    let (g, mut registry) = grown(3, 20);
    let config = EvolutionConfig {
        p_weight_mutation: 0.0,
        p_add_node: 0.0,
        p_add_connection: 0.0,
        p_delete_connection: 0.0,
        ..Default::default()
    };
    let mut m = g.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        mutate(&mut m, &mut registry, &config, &mut rng);
    }
    assert_eq!(m, g);
}

#[test]
fn crossover_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (g, _) = grown(6, 30);
    let child = crossover(&g, &g, 0.25, &mut rng);
    assert_eq!(child.nodes, g.nodes);
    let innovs = |x: &Genome| {
        x.connections
            .iter()
            .map(|c| c.innovation.0)
            .collect::<Vec<_>>()
    };
    assert_eq!(innovs(&child), innovs(&g));

    let mut fit = Genome::minimal(3, 1);
    for (i, s) in [(0, 0), (1, 1), (5, 2)] {
        fit.insert_connection(gene(i, s, 3, 1.0));
    }
    fit.fitness = 10.0;
    let mut weak = Genome::minimal(3, 1);
    for (i, s) in [(0, 0), (1, 1)] {
        weak.insert_connection(gene(i, s, 3, -1.0));
    }
    weak.fitness = 1.0;
    for (a, b) in [(&fit, &weak), (&weak, &fit)] {
        assert_eq!(innovs(&crossover(a, b, 0.25, &mut rng)), vec![0, 1, 5]);
    }

    let mut a = Genome::minimal(2, 1);
    a.insert_connection(gene(0, 0, 2, 1.0));
    let mut b = Genome::minimal(2, 1);
    b.insert_connection(gene(1, 1, 2, 1.0));
    assert_eq!(innovs(&crossover(&a, &b, 0.25, &mut rng)), vec![0, 1]);
}

#[test]
fn distance_of_one_weight_difference() {
    let mut a = Genome::minimal(2, 1);
    a.insert_connection(gene(0, 0, 2, 1.0));
    let mut b = a.clone();
    b.connections[0].weight = 3.0;
    let c = CompatibilityCoefficients::default();
    assert!((compatibility_distance(&a, &b, &c) - 0.8).abs() < 1e-12);
    assert_eq!(
        compatibility_distance(&Genome::minimal(2, 1), &Genome::minimal(2, 1), &c),
        0.0
    );
}

#[test]
fn speciation_edge_cases() {
    let config = EvolutionConfig::default();
    let (g, _) = grown(8, 10);
    let clones = vec![g; 12];
    let mut s = SpeciesSet::new(3.0);
    s.speciate(&clones, &config, 0);
    assert_eq!(s.len(), 1);

    let distinct: Vec<Genome> = (0..6).map(|i| grown(100 + i, 15).0).collect();
    let mut s = SpeciesSet::new(0.0);
    let zero = EvolutionConfig {
        min_threshold: 0.0,
        ..config
    };
    s.speciate(&distinct, &zero, 0);
    assert_eq!(s.len(), distinct.len());
}

fn evaluated_population(
    config: &EvolutionConfig,
    seed: u64,
) -> (Vec<Genome>, SpeciesSet, InnovationRegistry, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let registry = InnovationRegistry::new(40, 3);
    let mut pop = seed_population(config, &registry, 40, 3, &mut rng);
    for g in &mut pop {
        g.fitness = rng.random_range(0.0..100.0);
    }
    let mut species = SpeciesSet::new(config.initial_threshold);
    species.speciate(&pop, config, 0);
    (pop, species, registry, rng)
}

#[test]
fn asexual_only_reproduction_never_crosses() {
    let config = EvolutionConfig {
        asexual_proportion: 1.0,
        sexual_proportion: 0.0,
        ..Default::default()
    };
    let (pop, species, mut registry, mut rng) = evaluated_population(&config, 9);
    let (next, stats) = next_generation(&pop, &species, &mut registry, &config, 0, &mut rng);
    assert_eq!(stats.crossovers, 0);
    assert_eq!(next.len(), config.population_size);
}

#[test]
fn seeded_reproduction_is_deterministic() {
    let config = EvolutionConfig::default();
    let run = || {
        let (pop, species, mut registry, mut rng) = evaluated_population(&config, 10);
        next_generation(&pop, &species, &mut registry, &config, 0, &mut rng).0
    };
    assert_eq!(run(), run());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_symmetric(a in 0u64..1000, b in 0u64..1000, steps in 0usize..40) {
        let (ga, _) = grown(a, steps);
        let (gb, _) = grown(b, steps / 2);
        let c = CompatibilityCoefficients::default();
        let d = compatibility_distance(&ga, &gb, &c);
        prop_assert!(d >= 0.0);
        prop_assert_eq!(d, compatibility_distance(&gb, &ga, &c));
        prop_assert_eq!(compatibility_distance(&ga, &ga, &c), 0.0);
    }

    #[test]
    fn mutated_genomes_stay_valid(seed in any::<u64>(), steps in 0usize..60) {
        let (g, _) = grown(seed, steps);
        prop_assert!(g.validate().is_ok(), "{:?}", g.validate());
        prop_assert!(g.validate_weights(5.0).is_ok());
        let mut enabled = BTreeSet::new();
        for c in g.enabled_connections() {
            prop_assert!(enabled.insert((c.source, c.target)));
        }
    }

    #[test]
    fn outputs_are_total_and_bounded(seed in any::<u64>(), steps in 0usize..60, inputs in prop::collection::vec(0.0..=1.0f64, 40)) {
        let (g, _) = grown(seed, steps);
        let mut a = Network::from_genome(&g);
        let mut b = Network::from_genome(&g);
        for _ in 0..5 {
            let oa = a.activate(&inputs).to_vec();
            let ob = b.activate(&inputs).to_vec();
            prop_assert_eq!(oa.len(), 3);
            prop_assert!(oa.iter().all(|v| (0.0..=1.0).contains(v)));
            prop_assert_eq!(oa, ob);
        }
    }

    #[test]
    fn children_of_valid_parents_are_valid(a in any::<u64>(), b in any::<u64>(), fa in 0.0..10.0f64, fb in 0.0..10.0f64) {
        let config = EvolutionConfig {
            p_add_node: 0.3,
            p_add_connection: 0.5,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(a ^ b);
        let mut registry = InnovationRegistry::new(40, 3);
        let mut pop = seed_population(&config, &registry, 40, 3, &mut rng);
        for g in &mut pop {
            for _ in 0..30 {
                mutate(g, &mut registry, &config, &mut rng);
            }
        }
        let (mut ga, mut gb) = (pop[0].clone(), pop[1].clone());
        ga.fitness = fa;
        gb.fitness = fb;
        let child = crossover(&ga, &gb, 0.25, &mut rng);
        prop_assert!(child.validate().is_ok(), "{:?}", child.validate());
        let parents: BTreeSet<u64> = ga.connections.iter().chain(&gb.connections).map(|c| c.innovation.0).collect();
        prop_assert!(child.connections.iter().all(|c| parents.contains(&c.innovation.0)));
    }
}
