use serde::{Deserialize, Serialize};

use super::{GaError, RoyalRoad};
use crate::protocol::js_number;

/// GA parameters served to every client as part of the experiment config.
///
/// Missing fields deserialize to the defaults, so a config file only needs
/// to name what it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaParams {
    pub genome_length: usize,
    pub population_size: usize,
    #[serde(serialize_with = "js_number::serialize")]
    pub replacement_fraction: f64,
    #[serde(serialize_with = "js_number::serialize")]
    pub crossover_priority: f64,
    #[serde(serialize_with = "js_number::serialize")]
    pub mutation_priority: f64,
    #[serde(serialize_with = "js_number::serialize")]
    pub per_bit_mutation_rate: f64,
    pub block_size: usize,
    #[serde(serialize_with = "js_number::serialize")]
    pub block_reward: f64,
    /// Also pass crossover offspring through bit-flip mutation. Off by
    /// default: each offspring comes from exactly one operator.
    pub mutate_after_crossover: bool,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            genome_length: 256,
            population_size: 100,
            replacement_fraction: 0.5,
            crossover_priority: 0.8,
            mutation_priority: 0.2,
            per_bit_mutation_rate: 0.01,
            block_size: 8,
            block_reward: 8.0,
            mutate_after_crossover: false,
        }
    }
}

const PRIORITY_TOLERANCE: f64 = 1e-9;

fn probability(field: &'static str, value: f64) -> Result<(), GaError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(GaError::config(field, format!("must be in [0, 1], got {value}")))
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<(), GaError> {
        if self.genome_length == 0 {
            return Err(GaError::config("genome_length", "must be positive"));
        }
        if self.genome_length % 4 != 0 {
            return Err(GaError::config(
                "genome_length",
                format!("{} is not a multiple of 4 (hex wire encoding)", self.genome_length),
            ));
        }
        if self.block_size == 0 {
            return Err(GaError::config("block_size", "must be positive"));
        }
        if self.genome_length % self.block_size != 0 {
            return Err(GaError::config(
                "genome_length",
                format!(
                    "{} is not a multiple of block_size {}",
                    self.genome_length, self.block_size
                ),
            ));
        }
        if self.population_size == 0 {
            return Err(GaError::config("population_size", "must be positive"));
        }
        if !(self.replacement_fraction > 0.0 && self.replacement_fraction <= 1.0) {
            return Err(GaError::config(
                "replacement_fraction",
                format!("must be in (0, 1], got {}", self.replacement_fraction),
            ));
        }
        let offspring = self.population_size as f64 * self.replacement_fraction;
        if (offspring - offspring.round()).abs() > 1e-9 || offspring.round() < 1.0 {
            return Err(GaError::config(
                "replacement_fraction",
                format!(
                    "population_size × replacement_fraction = {offspring} is not a positive integer"
                ),
            ));
        }
        probability("crossover_priority", self.crossover_priority)?;
        probability("mutation_priority", self.mutation_priority)?;
        probability("per_bit_mutation_rate", self.per_bit_mutation_rate)?;
        if (self.crossover_priority + self.mutation_priority - 1.0).abs() > PRIORITY_TOLERANCE {
            return Err(GaError::config(
                "mutation_priority",
                format!(
                    "crossover_priority + mutation_priority must be 1, got {}",
                    self.crossover_priority + self.mutation_priority
                ),
            ));
        }
        RoyalRoad::new(self.block_size, self.block_reward)?;
        Ok(())
    }

    /// New individuals bred per generation.
    pub fn offspring_per_generation(&self) -> usize {
        (self.population_size as f64 * self.replacement_fraction).round() as usize
    }

    pub fn royal_road(&self) -> Result<RoyalRoad, GaError> {
        RoyalRoad::new(self.block_size, self.block_reward)
    }

    pub fn max_fitness(&self) -> f64 {
        self.block_reward * (self.genome_length / self.block_size) as f64
    }
}
