//! NeuroEvolution of Augmenting Topologies.
//!
//! Genomes carry node and connection genes with historical markings;
//! [`InnovationRegistry`] hands those markings out. A generation runs
//! evaluate → [`SpeciesSet::speciate`] → [`next_generation`]. Phenotypes are
//! evaluated through [`Network`].

mod config;
mod crossover;
mod genome;
mod innovation;
mod io;
mod mutation;
mod network;
mod reproduction;
mod species;

pub use config::{CompatibilityCoefficients, ConfigError, EvolutionConfig, WeightMutation};
pub use crossover::{align, compatibility_distance, crossover, GeneAlignment};
pub use genome::{
    Activation, ConnectionGene, Genome, GenomeError, Innovation, NodeGene, NodeId, NodeKind,
};
pub use innovation::{InnovationRegistry, SplitInnovation};
pub use io::{
    load_genome, save_genome, GenomeFile, GenomeFileError, GenomeMetadata, GENOME_FORMAT,
    GENOME_VERSION,
};
pub use mutation::{
    add_connection, add_node, delete_connection, mutate, mutate_weights, MutationLog,
};
pub use network::{activate_once, Network};
pub use reproduction::{
    champion_index, next_generation, offspring_quotas, seed_population, ReproductionStats,
};
pub use species::{Species, SpeciesSet};
