use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid evolution config: {field} {reason}")]
pub struct ConfigError {
    pub field: &'static str,
    pub reason: String,
}

/// Coefficients of the compatibility distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompatibilityCoefficients {
    pub excess: f64,
    pub disjoint: f64,
    pub weight: f64,
}

impl Default for CompatibilityCoefficients {
    fn default() -> Self {
        CompatibilityCoefficients {
            excess: 1.0,
            disjoint: 1.0,
            weight: 0.4,
        }
    }
}

/// How a triggered weight mutation touches individual connections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightMutation {
    /// Chance that each connection is touched.
    pub connection_rate: f64,
    /// Chance that a touched weight is redrawn instead of perturbed.
    pub replace_rate: f64,
    /// Standard deviation of the Gaussian perturbation.
    pub perturb_sigma: f64,
}

impl Default for WeightMutation {
    fn default() -> Self {
        WeightMutation {
            connection_rate: 0.3,
            replace_rate: 0.1,
            perturb_sigma: 0.5,
        }
    }
}

/// Hyper-parameters of a NEAT run. Defaults are the simulation preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub generations: u32,
    pub target_species: usize,
    pub initial_connection_probability: f64,
    pub elitism_proportion: f64,
    pub selection_proportion: f64,
    pub asexual_proportion: f64,
    pub sexual_proportion: f64,
    pub interspecies_mating: f64,
    /// Weights stay within `±weight_range`.
    pub weight_range: f64,
    pub p_weight_mutation: f64,
    pub p_add_node: f64,
    pub p_add_connection: f64,
    pub p_delete_connection: f64,
    pub seed: u64,

    pub compatibility: CompatibilityCoefficients,
    pub initial_threshold: f64,
    /// Fractional threshold step used to steer toward `target_species`.
    pub threshold_step: f64,
    pub min_threshold: f64,
    pub reenable_probability: f64,
    /// Generations without improvement before a species stops reproducing.
    pub stagnation_limit: u32,
    pub weight_mutation: WeightMutation,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            population_size: 50,
            generations: 100,
            target_species: 5,
            initial_connection_probability: 0.2,
            elitism_proportion: 0.2,
            selection_proportion: 0.2,
            asexual_proportion: 0.5,
            sexual_proportion: 0.5,
            interspecies_mating: 0.01,
            weight_range: 5.0,
            p_weight_mutation: 0.95,
            p_add_node: 0.01,
            p_add_connection: 0.025,
            p_delete_connection: 0.025,
            seed: 0,
            compatibility: CompatibilityCoefficients::default(),
            initial_threshold: 3.0,
            threshold_step: 0.1,
            min_threshold: 0.01,
            reenable_probability: 0.25,
            stagnation_limit: 15,
            weight_mutation: WeightMutation::default(),
        }
    }
}

impl EvolutionConfig {
    /// The StarCraft II column of the hyper-parameter table, for comparison runs.
    pub fn starcraft_preset() -> Self {
        EvolutionConfig {
            initial_connection_probability: 0.1,
            asexual_proportion: 0.8,
            sexual_proportion: 0.2,
            weight_range: 7.0,
            p_add_node: 0.02,
            p_add_connection: 0.04,
            ..EvolutionConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |field, reason: &str| {
            Err(ConfigError {
                field,
                reason: reason.to_string(),
            })
        };
        if self.population_size == 0 {
            return err("population_size", "must be positive");
        }
        if self.target_species == 0 {
            return err("target_species", "must be positive");
        }
        let probabilities = [
            (
                "initial_connection_probability",
                self.initial_connection_probability,
            ),
            ("elitism_proportion", self.elitism_proportion),
            ("selection_proportion", self.selection_proportion),
            ("asexual_proportion", self.asexual_proportion),
            ("sexual_proportion", self.sexual_proportion),
            ("interspecies_mating", self.interspecies_mating),
            ("p_weight_mutation", self.p_weight_mutation),
            ("p_add_node", self.p_add_node),
            ("p_add_connection", self.p_add_connection),
            ("p_delete_connection", self.p_delete_connection),
            ("reenable_probability", self.reenable_probability),
            (
                "weight_mutation.connection_rate",
                self.weight_mutation.connection_rate,
            ),
            (
                "weight_mutation.replace_rate",
                self.weight_mutation.replace_rate,
            ),
        ];
        for (field, p) in probabilities {
            if !(0.0..=1.0).contains(&p) {
                return err(field, "must lie in [0, 1]");
            }
        }
        if (self.asexual_proportion + self.sexual_proportion - 1.0).abs() > 1e-9 {
            return err(
                "sexual_proportion",
                "asexual and sexual proportions must sum to 1",
            );
        }
        if !(self.weight_range.is_finite() && self.weight_range > 0.0) {
            return err("weight_range", "must be positive");
        }
        if !(self.initial_threshold.is_finite() && self.initial_threshold >= 0.0) {
            return err("initial_threshold", "must be non-negative");
        }
        if !(self.weight_mutation.perturb_sigma.is_finite()
            && self.weight_mutation.perturb_sigma >= 0.0)
        {
            return err("weight_mutation.perturb_sigma", "must be non-negative");
        }
        let c = self.compatibility;
        if [c.excess, c.disjoint, c.weight]
            .iter()
            .any(|v| !v.is_finite() || *v < 0.0)
        {
            return err("compatibility", "coefficients must be non-negative");
        }
        Ok(())
    }

    /// Short stable digest of the config, stamped into genome and checkpoint files.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&json);
        hex::encode(&digest[..8])
    }
}
