use rand::Rng;

use super::operators::{mutate, one_point_crossover, rank_select};
use super::{Fitness, GaError, GaParams, Genome, Individual, Population, RoyalRoad};

/// Outcome of one segment of generations run between two server exchanges.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentResult {
    pub best: Individual,
    /// Fitness evaluations spent in this segment:
    /// `generations_run × offspring_per_generation`.
    pub evaluations_delta: u64,
    pub generations_run: u32,
}

/// The steady-state GA with a fixed parameter set and fitness function.
#[derive(Debug, Clone)]
pub struct SteadyState<F = RoyalRoad> {
    params: GaParams,
    fitness: F,
}

impl SteadyState<RoyalRoad> {
    pub fn new(params: GaParams) -> Result<Self, GaError> {
        params.validate()?;
        let fitness = params.royal_road()?;
        Ok(SteadyState { params, fitness })
    }
}

impl<F: Fitness> SteadyState<F> {
    pub fn with_fitness(params: GaParams, fitness: F) -> Result<Self, GaError> {
        params.validate()?;
        Ok(SteadyState { params, fitness })
    }

    pub fn params(&self) -> &GaParams {
        &self.params
    }

    pub fn fitness(&self) -> &F {
        &self.fitness
    }

    pub fn evaluate(&self, genome: Genome) -> Individual {
        Individual::evaluate(genome, &self.fitness)
    }

    /// `population_size` uniformly random individuals at generation 0.
    pub fn random_population<R: Rng + ?Sized>(&self, rng: &mut R) -> Population {
        let members = (0..self.params.population_size)
            .map(|_| self.evaluate(Genome::random(self.params.genome_length, rng)))
            .collect();
        Population::new(members, 0)
    }

    /// Breeds one generation in place and returns the number of fitness
    /// evaluations it cost (one per offspring).
    ///
    /// Every offspring is produced by exactly one operator: one-point
    /// crossover of two rank-selected parents with probability
    /// `crossover_priority`, otherwise bit-flip mutation of one
    /// rank-selected parent. With `mutate_after_crossover` set, crossover
    /// children are mutated as well.
    pub fn breed_generation<R: Rng + ?Sized>(&self, population: &mut Population, rng: &mut R) -> u64 {
        debug_assert_eq!(population.len(), self.params.population_size);
        let p = &self.params;
        let count = p.offspring_per_generation();
        let mut offspring = Vec::with_capacity(count);
        for _ in 0..count {
            let child = if rng.random_bool(p.crossover_priority) {
                let a = rank_select(population, rng).expect("population is non-empty");
                let b = rank_select(population, rng).expect("population is non-empty");
                let child = one_point_crossover(a.genome(), b.genome(), rng)
                    .expect("population genomes share one length");
                if p.mutate_after_crossover {
                    mutate(&child, p.per_bit_mutation_rate, rng)
                } else {
                    child
                }
            } else {
                let parent = rank_select(population, rng).expect("population is non-empty");
                mutate(parent.genome(), p.per_bit_mutation_rate, rng)
            };
            offspring.push(self.evaluate(child));
        }
        population.replace_worst(offspring);
        population.advance_generation();
        count as u64
    }

    /// Puts the immigrant in place of the current worst member.
    pub fn incorporate_immigrant(
        &self,
        population: &mut Population,
        immigrant: Individual,
    ) -> Result<(), GaError> {
        if immigrant.genome().len() != self.params.genome_length {
            return Err(GaError::LengthMismatch {
                expected: self.params.genome_length,
                actual: immigrant.genome().len(),
            });
        }
        population.replace_worst(vec![immigrant]);
        Ok(())
    }

    /// Runs `generations` generations and reports the resulting best.
    pub fn run_segment<R: Rng + ?Sized>(
        &self,
        population: &mut Population,
        generations: u32,
        rng: &mut R,
    ) -> SegmentResult {
        let evaluations_delta = (0..generations)
            .map(|_| self.breed_generation(population, rng))
            .sum();
        SegmentResult {
            best: population.best().expect("population is non-empty").clone(),
            evaluations_delta,
            generations_run: generations,
        }
    }
}
