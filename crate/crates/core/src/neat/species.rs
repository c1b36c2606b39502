use super::config::EvolutionConfig;
use super::crossover::compatibility_distance;
use super::genome::Genome;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Species {
    pub id: u32,
    /// Compared against candidates during assignment. After assignment it
    /// becomes the species champion for the next generation's round.
    pub representative: Genome,
    /// Indices into the current population.
    pub members: Vec<usize>,
    pub best_fitness: f64,
    pub last_improved: u32,
    /// Best member fitness per generation the species existed.
    pub history: Vec<f64>,
}

impl Species {
    pub fn mean_fitness(&self, population: &[Genome]) -> f64 {
        if self.members.is_empty() {
            return 0.0;
        }
        self.members
            .iter()
            .map(|&i| population[i].fitness)
            .sum::<f64>()
            / self.members.len() as f64
    }

    pub fn is_stagnant(&self, generation: u32, limit: u32) -> bool {
        generation.saturating_sub(self.last_improved) >= limit
    }

    /// Members sorted by fitness, best first; ties keep population order.
    pub fn ranked_members(&self, population: &[Genome]) -> Vec<usize> {
        let mut m = self.members.clone();
        m.sort_by(|&a, &b| population[b].fitness.total_cmp(&population[a].fitness));
        m
    }
}

/// All species plus the dynamic compatibility threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesSet {
    pub species: Vec<Species>,
    pub threshold: f64,
    pub next_id: u32,
}

impl SpeciesSet {
    pub fn new(threshold: f64) -> Self {
        SpeciesSet {
            species: Vec::new(),
            threshold,
            next_id: 0,
        }
    }

    /// Assigns every genome to the first species whose representative lies
    /// within the threshold, founding new species as needed, then nudges the
    /// threshold by `threshold_step` toward `target_species`.
    ///
    /// Genomes must already carry their fitness.
    pub fn speciate(&mut self, population: &[Genome], config: &EvolutionConfig, generation: u32) {
        for s in &mut self.species {
            s.members.clear();
        }
        for (i, g) in population.iter().enumerate() {
            let home = self.species.iter().position(|s| {
                compatibility_distance(&s.representative, g, &config.compatibility)
                    <= self.threshold
            });
            match home {
                Some(k) => self.species[k].members.push(i),
                None => {
                    self.species.push(Species {
                        id: self.next_id,
                        representative: g.clone(),
                        members: vec![i],
                        best_fitness: f64::NEG_INFINITY,
                        last_improved: generation,
                        history: Vec::new(),
                    });
                    self.next_id += 1;
                }
            }
        }
        self.species.retain(|s| !s.members.is_empty());

        for s in &mut self.species {
            let champion = s.ranked_members(population)[0];
            let best = population[champion].fitness;
            if best > s.best_fitness {
                s.best_fitness = best;
                s.last_improved = generation;
            }
            s.history.push(best);
            s.representative = population[champion].clone();
        }

        let count = self.species.len();
        if count < config.target_species {
            self.threshold *= 1.0 - config.threshold_step;
        } else if count > config.target_species {
            self.threshold *= 1.0 + config.threshold_step;
        }
        self.threshold = self.threshold.max(config.min_threshold);
    }

    pub fn len(&self) -> usize {
        self.species.len()
    }

    pub fn is_empty(&self) -> bool {
        self.species.is_empty()
    }

    /// Index of the species holding population member `i`.
    pub fn species_of(&self, i: usize) -> Option<usize> {
        self.species.iter().position(|s| s.members.contains(&i))
    }
}
