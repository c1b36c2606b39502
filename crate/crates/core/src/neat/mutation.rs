use super::config::EvolutionConfig;
use super::genome::{ConnectionGene, Genome, NodeGene, NodeKind};
use super::innovation::InnovationRegistry;
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Which operators fired on one offspring.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MutationLog {
    pub weights: bool,
    pub add_node: bool,
    pub add_connection: bool,
    pub delete_connection: bool,
}

/// Applies each operator with its own independent probability: add-node,
/// add-connection, delete-connection and finally weight mutation.
pub fn mutate<R: Rng + ?Sized>(
    genome: &mut Genome,
    registry: &mut InnovationRegistry,
    config: &EvolutionConfig,
    rng: &mut R,
) -> MutationLog {
    let mut log = MutationLog::default();
    if rng.random_bool(config.p_add_node) {
        log.add_node = add_node(genome, registry, rng);
    }
    if rng.random_bool(config.p_add_connection) {
        log.add_connection = add_connection(genome, registry, config.weight_range, rng);
    }
    if rng.random_bool(config.p_delete_connection) {
        log.delete_connection = delete_connection(genome, rng);
    }
    if rng.random_bool(config.p_weight_mutation) {
        mutate_weights(genome, config, rng);
        log.weights = true;
    }
    log
}

pub fn mutate_weights<R: Rng + ?Sized>(genome: &mut Genome, config: &EvolutionConfig, rng: &mut R) {
    let w = config.weight_range;
    let wm = config.weight_mutation;
    let normal = Normal::new(0.0, wm.perturb_sigma).expect("sigma validated");
    for c in &mut genome.connections {
        if !rng.random_bool(wm.connection_rate) {
            continue;
        }
        c.weight = if rng.random_bool(wm.replace_rate) {
            rng.random_range(-w..=w)
        } else {
            (c.weight + normal.sample(rng)).clamp(-w, w)
        };
    }
}

/// Splits a random enabled connection `a → b` into `a → h` (weight 1) and
/// `h → b` (old weight), disabling the original. No-op without enabled
/// connections.
pub fn add_node<R: Rng + ?Sized>(
    genome: &mut Genome,
    registry: &mut InnovationRegistry,
    rng: &mut R,
) -> bool {
    let enabled: Vec<usize> = genome
        .connections
        .iter()
        .enumerate()
        .filter(|(_, c)| c.enabled)
        .map(|(i, _)| i)
        .collect();
    if enabled.is_empty() {
        return false;
    }
    let idx = enabled[rng.random_range(0..enabled.len())];
    let old = genome.connections[idx];
    let split = registry.split(old.innovation, old.source, old.target);
    if genome.has_node(split.node) {
        return false;
    }
    genome.connections[idx].enabled = false;
    genome.insert_node(NodeGene::hidden(split.node));
    genome.insert_connection(ConnectionGene {
        innovation: split.incoming,
        source: old.source,
        target: split.node,
        weight: 1.0,
        enabled: true,
    });
    genome.insert_connection(ConnectionGene {
        innovation: split.outgoing,
        source: split.node,
        target: old.target,
        weight: old.weight,
        enabled: true,
    });
    true
}

/// Adds a connection between a random node pair that has no gene yet.
/// Recurrent edges and self-loops are allowed; inputs are never targets.
pub fn add_connection<R: Rng + ?Sized>(
    genome: &mut Genome,
    registry: &mut InnovationRegistry,
    weight_range: f64,
    rng: &mut R,
) -> bool {
    let mut candidates = Vec::new();
    for s in &genome.nodes {
        for t in genome.nodes.iter().filter(|t| t.kind != NodeKind::Input) {
            if !genome.has_edge(s.id, t.id) {
                candidates.push((s.id, t.id));
            }
        }
    }
    if candidates.is_empty() {
        return false;
    }
    let (source, target) = candidates[rng.random_range(0..candidates.len())];
    let innovation = registry.connection(source, target);
    if genome.connection(innovation).is_some() {
        return false;
    }
    genome.insert_connection(ConnectionGene {
        innovation,
        source,
        target,
        weight: rng.random_range(-weight_range..=weight_range),
        enabled: true,
    });
    true
}

/// Removes one connection gene chosen uniformly, then drops hidden nodes
/// left without connections.
pub fn delete_connection<R: Rng + ?Sized>(genome: &mut Genome, rng: &mut R) -> bool {
    if genome.connections.is_empty() {
        return false;
    }
    let idx = rng.random_range(0..genome.connections.len());
    genome.connections.remove(idx);
    genome.prune_orphans();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neat::genome::{Innovation, NodeId};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single(w: f64) -> (Genome, InnovationRegistry) {
        let mut g = Genome::minimal(2, 1);
        let r = InnovationRegistry::new(2, 1);
        g.insert_connection(ConnectionGene {
            innovation: r.seed_innovation(0, 0),
            source: NodeId(0),
            target: NodeId(2),
            weight: w,
            enabled: true,
        });
        (g, r)
    }

    #[test]
    fn zero_probabilities_are_identity() {
        let (mut g, mut r) = single(1.25);
        let before = g.clone();
        let cfg = EvolutionConfig {
            p_weight_mutation: 0.0,
            p_add_node: 0.0,
            p_add_connection: 0.0,
            p_delete_connection: 0.0,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(
                mutate(&mut g, &mut r, &cfg, &mut rng),
                MutationLog::default()
            );
        }
        assert_eq!(g, before);
    }

    #[test]
    fn add_node_splits_canonically() {
        let (mut g, mut r) = single(-3.5);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(add_node(&mut g, &mut r, &mut rng));
        g.validate().unwrap();
        let h = NodeId(3);
        assert!(g.has_node(h));
        let old = g.connection(Innovation(0)).unwrap();
        assert!(!old.enabled);
        let a_h = g
            .connections
            .iter()
            .find(|c| c.source == NodeId(0) && c.target == h)
            .unwrap();
        let h_b = g
            .connections
            .iter()
            .find(|c| c.source == h && c.target == NodeId(2))
            .unwrap();
        assert_eq!(a_h.weight, 1.0);
        assert_eq!(h_b.weight, -3.5);
        assert!(a_h.enabled && h_b.enabled);
    }

    #[test]
    fn add_node_without_enabled_connections_is_noop() {
        let (mut g, mut r) = single(1.0);
        g.connections[0].enabled = false;
        let before = g.clone();
        assert!(!add_node(&mut g, &mut r, &mut ChaCha8Rng::seed_from_u64(0)));
        assert_eq!(g, before);
    }

    #[test]
    fn add_connection_on_full_genome_is_noop() {
        let mut g = Genome::minimal(1, 1);
        let mut r = InnovationRegistry::new(1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // Possible edges: in0->out1 and out1->out1.
        assert!(add_connection(&mut g, &mut r, 5.0, &mut rng));
        assert!(add_connection(&mut g, &mut r, 5.0, &mut rng));
        let before = g.clone();
        assert!(!add_connection(&mut g, &mut r, 5.0, &mut rng));
        assert_eq!(g, before);
        g.validate().unwrap();
    }

    #[test]
    fn parallel_discoveries_share_numbers() {
        // With in0->out1 present, the only missing edge is the out1 self-loop.
        let mut r = InnovationRegistry::new(1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut base = Genome::minimal(1, 1);
        base.insert_connection(ConnectionGene {
            innovation: r.seed_innovation(0, 0),
            source: NodeId(0),
            target: NodeId(1),
            weight: 0.0,
            enabled: true,
        });
        let (mut a, mut b) = (base.clone(), base.clone());
        assert!(add_connection(&mut a, &mut r, 5.0, &mut rng));
        assert!(add_connection(&mut b, &mut r, 5.0, &mut rng));
        assert_eq!(a.connections[1].innovation, b.connections[1].innovation);

        r.reset_generation();
        let mut c = base.clone();
        assert!(add_connection(&mut c, &mut r, 5.0, &mut rng));
        assert!(c.connections[1].innovation > a.connections[1].innovation);
    }

    #[test]
    fn delete_connection_prunes_orphans() {
        let (mut g, mut r) = single(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        add_node(&mut g, &mut r, &mut rng);
        while !g.connections.is_empty() {
            delete_connection(&mut g, &mut rng);
            g.validate().unwrap();
        }
        assert_eq!(g.hidden_count(), 0);
        assert!(!delete_connection(&mut g, &mut rng));
    }

    #[test]
    fn weights_stay_in_range() {
        let (mut g, _) = single(4.9);
        let cfg = EvolutionConfig {
            weight_mutation: crate::neat::WeightMutation {
                connection_rate: 1.0,
                replace_rate: 0.2,
                perturb_sigma: 3.0,
            },
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            mutate_weights(&mut g, &cfg, &mut rng);
            g.validate_weights(cfg.weight_range).unwrap();
        }
    }
}
