use super::config::EvolutionConfig;
use super::crossover::crossover;
use super::genome::{ConnectionGene, Genome, NodeId};
use super::innovation::InnovationRegistry;
use super::mutation::mutate;
use super::species::SpeciesSet;
use rand::Rng;

/// Random minimal genomes: every input→output edge present independently
/// with `initial_connection_probability`, weights uniform in `±weight_range`.
pub fn seed_population<R: Rng + ?Sized>(
    config: &EvolutionConfig,
    registry: &InnovationRegistry,
    inputs: usize,
    outputs: usize,
    rng: &mut R,
) -> Vec<Genome> {
    let w = config.weight_range;
    (0..config.population_size)
        .map(|_| {
            let mut g = Genome::minimal(inputs, outputs);
            for i in 0..inputs {
                for j in 0..outputs {
                    if rng.random_bool(config.initial_connection_probability) {
                        g.connections.push(ConnectionGene {
                            innovation: registry.seed_innovation(i, j),
                            source: NodeId(i as u32),
                            target: NodeId((inputs + j) as u32),
                            weight: rng.random_range(-w..=w),
                            enabled: true,
                        });
                    }
                }
            }
            g
        })
        .collect()
}

/// Counters describing one reproduction step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReproductionStats {
    pub elites: usize,
    pub asexual: usize,
    pub crossovers: usize,
    pub interspecies: usize,
    pub species_reproducing: usize,
}

/// Offspring counts per species, proportional to mean species fitness.
///
/// Stagnant species get nothing unless they hold the population champion,
/// which always keeps at least one slot. Fractions are resolved by largest
/// remainder, ties going to the earlier species.
pub fn offspring_quotas(
    population: &[Genome],
    species: &SpeciesSet,
    config: &EvolutionConfig,
    generation: u32,
) -> Vec<usize> {
    let total = config.population_size;
    let champion = champion_index(population);
    let champion_species = champion.and_then(|c| species.species_of(c));
    let eligible: Vec<bool> = species
        .species
        .iter()
        .enumerate()
        .map(|(k, s)| {
            Some(k) == champion_species || !s.is_stagnant(generation, config.stagnation_limit)
        })
        .collect();
    let means: Vec<f64> = species
        .species
        .iter()
        .zip(&eligible)
        .map(|(s, &e)| {
            if e {
                s.mean_fitness(population).max(0.0)
            } else {
                0.0
            }
        })
        .collect();
    let sum: f64 = means.iter().sum();
    let eligible_count = eligible.iter().filter(|&&e| e).count().max(1);
    let shares: Vec<f64> = means
        .iter()
        .zip(&eligible)
        .map(|(&m, &e)| {
            if sum > 0.0 {
                m / sum * total as f64
            } else if e {
                total as f64 / eligible_count as f64
            } else {
                0.0
            }
        })
        .collect();

    let mut quotas: Vec<usize> = shares.iter().map(|s| s.floor() as usize).collect();
    let mut remaining = total.saturating_sub(quotas.iter().sum());
    let mut order: Vec<usize> = (0..shares.len()).filter(|&k| eligible[k]).collect();
    order.sort_by(|&a, &b| {
        let fa = shares[a] - shares[a].floor();
        let fb = shares[b] - shares[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    let mut cursor = 0;
    while remaining > 0 && !order.is_empty() {
        quotas[order[cursor % order.len()]] += 1;
        remaining -= 1;
        cursor += 1;
    }

    if let Some(cs) = champion_species {
        if quotas[cs] == 0 {
            let donor = (0..quotas.len())
                .max_by_key(|&k| (quotas[k], std::cmp::Reverse(k)))
                .expect("at least one species");
            quotas[donor] -= 1;
            quotas[cs] += 1;
        }
    }
    quotas
}

/// Index of the fittest genome; ties go to the lowest index.
pub fn champion_index(population: &[Genome]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, g) in population.iter().enumerate() {
        if best.is_none_or(|b| g.fitness > population[b].fitness) {
            best = Some(i);
        }
    }
    best
}

fn roulette<R: Rng + ?Sized>(pool: &[usize], population: &[Genome], rng: &mut R) -> usize {
    let total: f64 = pool.iter().map(|&i| population[i].fitness.max(0.0)).sum();
    if total <= 0.0 {
        return pool[rng.random_range(0..pool.len())];
    }
    let mut x = rng.random_range(0.0..total);
    for &i in pool {
        x -= population[i].fitness.max(0.0);
        if x < 0.0 {
            return i;
        }
    }
    *pool.last().expect("non-empty pool")
}

/// Builds the next population from an evaluated, speciated one.
///
/// Per species: the top `elitism_proportion` members are copied unchanged
/// (the champion's species always keeps its champion), parents are drawn
/// fitness-proportionally from the top `selection_proportion`, and the rest
/// of the quota is split into asexual (mutation only) and sexual (crossover
/// then mutation) offspring. A sexual offspring takes its second parent from
/// another species with probability `interspecies_mating`. The registry is
/// reset at the start, so identical structural mutations in this step share
/// innovation numbers.
pub fn next_generation<R: Rng + ?Sized>(
    population: &[Genome],
    species: &SpeciesSet,
    registry: &mut InnovationRegistry,
    config: &EvolutionConfig,
    generation: u32,
    rng: &mut R,
) -> (Vec<Genome>, ReproductionStats) {
    registry.reset_generation();
    let quotas = offspring_quotas(population, species, config, generation);
    let champion = champion_index(population);
    let mut stats = ReproductionStats::default();

    let pools: Vec<Vec<usize>> = species
        .species
        .iter()
        .map(|s| {
            let ranked = s.ranked_members(population);
            let keep = ((config.selection_proportion * ranked.len() as f64).ceil() as usize)
                .clamp(1, ranked.len());
            ranked[..keep].to_vec()
        })
        .collect();

    let mut next = Vec::with_capacity(config.population_size);
    for (k, s) in species.species.iter().enumerate() {
        let quota = quotas[k];
        if quota == 0 {
            continue;
        }
        stats.species_reproducing += 1;
        let ranked = s.ranked_members(population);
        let mut elites =
            ((config.elitism_proportion * ranked.len() as f64).round() as usize).min(quota);
        if champion.is_some_and(|c| s.members.contains(&c)) {
            elites = elites.max(1);
        }
        for &i in ranked.iter().take(elites) {
            next.push(population[i].clone());
        }
        stats.elites += elites;

        let offspring = quota - elites;
        let share =
            config.asexual_proportion / (config.asexual_proportion + config.sexual_proportion);
        let asexual = (offspring as f64 * share).round() as usize;
        let pool = &pools[k];
        let others: Vec<usize> = (0..species.len()).filter(|&o| o != k).collect();

        for n in 0..offspring {
            let p1 = roulette(pool, population, rng);
            let partner = if n < asexual {
                None
            } else if !others.is_empty() && rng.random_bool(config.interspecies_mating) {
                let other = others[rng.random_range(0..others.len())];
                stats.interspecies += 1;
                Some(roulette(&pools[other], population, rng))
            } else if pool.len() > 1 {
                let rest: Vec<usize> = pool.iter().copied().filter(|&i| i != p1).collect();
                Some(roulette(&rest, population, rng))
            } else {
                None
            };
            let mut child = match partner {
                Some(p2) => {
                    stats.crossovers += 1;
                    crossover(
                        &population[p1],
                        &population[p2],
                        config.reenable_probability,
                        rng,
                    )
                }
                None => {
                    stats.asexual += 1;
                    population[p1].clone()
                }
            };
            mutate(&mut child, registry, config, rng);
            child.fitness = 0.0;
            next.push(child);
        }
    }
    debug_assert_eq!(next.len(), config.population_size);
    (next, stats)
}
