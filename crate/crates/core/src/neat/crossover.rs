use super::config::CompatibilityCoefficients;
use super::genome::{ConnectionGene, Genome, NodeKind};
use rand::Rng;
use std::cmp::Ordering;
use std::collections::HashSet;

/// Which parent may contribute unmatched genes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Donor {
    A,
    B,
    Both,
}

/// Aligns the two parents' connection genes by innovation number.
///
/// Matching genes come from either parent at random. Disjoint and excess
/// genes come from the fitter parent, or from both on a fitness tie. A gene
/// disabled in either parent is inherited disabled, except that it is
/// re-enabled with probability `reenable_probability`. When two parents
/// carry the same edge under different markings, the lower marking wins.
pub fn crossover<R: Rng + ?Sized>(
    a: &Genome,
    b: &Genome,
    reenable_probability: f64,
    rng: &mut R,
) -> Genome {
    let donor = match a.fitness.partial_cmp(&b.fitness) {
        Some(Ordering::Greater) => Donor::A,
        Some(Ordering::Less) => Donor::B,
        _ => Donor::Both,
    };

    let mut inherited: Vec<ConnectionGene> = Vec::new();
    let settle = |gene: ConnectionGene, either_disabled: bool, rng: &mut R| {
        let mut g = gene;
        g.enabled = if either_disabled {
            rng.random_bool(reenable_probability)
        } else {
            true
        };
        g
    };

    let (mut i, mut j) = (0, 0);
    let (ca, cb) = (&a.connections, &b.connections);
    while i < ca.len() || j < cb.len() {
        let order = match (ca.get(i), cb.get(j)) {
            (Some(x), Some(y)) => x.innovation.cmp(&y.innovation),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        match order {
            Ordering::Equal => {
                let (x, y) = (ca[i], cb[j]);
                let pick = if rng.random_bool(0.5) { x } else { y };
                inherited.push(settle(pick, !x.enabled || !y.enabled, rng));
                i += 1;
                j += 1;
            }
            Ordering::Less => {
                if donor != Donor::B {
                    let x = ca[i];
                    inherited.push(settle(x, !x.enabled, rng));
                }
                i += 1;
            }
            Ordering::Greater => {
                if donor != Donor::A {
                    let y = cb[j];
                    inherited.push(settle(y, !y.enabled, rng));
                }
                j += 1;
            }
        }
    }

    let mut child = Genome::minimal(a.inputs, a.outputs);
    let mut seen = HashSet::new();
    for gene in inherited {
        if seen.insert((gene.source, gene.target)) {
            child.connections.push(gene);
        }
    }
    let endpoints: Vec<_> = child
        .connections
        .iter()
        .flat_map(|c| [c.source, c.target])
        .collect();
    for id in endpoints {
        if !child.has_node(id) {
            let node = a
                .node(id)
                .or_else(|| b.node(id))
                .copied()
                .expect("parent gene endpoints exist");
            debug_assert_eq!(node.kind, NodeKind::Hidden);
            child.insert_node(node);
        }
    }
    child
}

/// Excess, disjoint and matching-gene statistics of a genome pair.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GeneAlignment {
    pub excess: usize,
    pub disjoint: usize,
    pub matching: usize,
    pub weight_difference_sum: f64,
}

pub fn align(a: &Genome, b: &Genome) -> GeneAlignment {
    let (ca, cb) = (&a.connections, &b.connections);
    let mut out = GeneAlignment::default();
    let (mut i, mut j) = (0, 0);
    while i < ca.len() && j < cb.len() {
        match ca[i].innovation.cmp(&cb[j].innovation) {
            Ordering::Equal => {
                out.matching += 1;
                out.weight_difference_sum += (ca[i].weight - cb[j].weight).abs();
                i += 1;
                j += 1;
            }
            Ordering::Less => {
                out.disjoint += 1;
                i += 1;
            }
            Ordering::Greater => {
                out.disjoint += 1;
                j += 1;
            }
        }
    }
    out.excess = (ca.len() - i) + (cb.len() - j);
    out
}

/// `c1·E/N + c2·D/N + c3·W̄`, where `N` is the larger connection count
/// (1 when both genomes have fewer than 20 genes) and `W̄` the mean absolute
/// weight difference of matching genes.
pub fn compatibility_distance(a: &Genome, b: &Genome, c: &CompatibilityCoefficients) -> f64 {
    let al = align(a, b);
    let larger = a.connections.len().max(b.connections.len());
    if larger == 0 {
        return 0.0;
    }
    let n = if larger < 20 { 1.0 } else { larger as f64 };
    let mean_w = if al.matching > 0 {
        al.weight_difference_sum / al.matching as f64
    } else {
        0.0
    };
    c.excess * al.excess as f64 / n + c.disjoint * al.disjoint as f64 / n + c.weight * mean_w
}
