use serde::{Deserialize, Serialize};

use super::{Fitness, Genome};

/// A genome with its cached fitness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    genome: Genome,
    fitness: f64,
}

impl Individual {
    pub fn evaluate<F: Fitness + ?Sized>(genome: Genome, fitness: &F) -> Self {
        let value = fitness.evaluate(&genome);
        Individual {
            genome,
            fitness: value,
        }
    }

    /// Pairs a genome with an already-known fitness. The caller vouches
    /// that `fitness` is what the active fitness function would return.
    pub fn with_fitness(genome: Genome, fitness: f64) -> Self {
        Individual { genome, fitness }
    }

    pub fn genome(&self) -> &Genome {
        &self.genome
    }

    pub fn fitness(&self) -> f64 {
        self.fitness
    }

    pub fn into_genome(self) -> Genome {
        self.genome
    }
}

/// A client's population, kept sorted by descending fitness.
///
/// Sorting is stable: among equal fitness, the member that comes first in
/// the collection keeps the better rank. Incoming members are placed ahead
/// of the survivors before sorting, so a newcomer outranks an incumbent of
/// equal fitness and neutral variation is not the first to be deleted.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    members: Vec<Individual>,
    generation: u64,
}

impl Population {
    pub fn new(mut members: Vec<Individual>, generation: u64) -> Self {
        sort_desc(&mut members);
        Population {
            members,
            generation,
        }
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn best(&self) -> Option<&Individual> {
        self.members.first()
    }

    pub fn worst(&self) -> Option<&Individual> {
        self.members.last()
    }

    /// Drops the `incoming.len()` worst members and merges `incoming` in,
    /// ahead of survivors with the same fitness.
    pub(crate) fn replace_worst(&mut self, incoming: Vec<Individual>) {
        let keep = self.members.len().saturating_sub(incoming.len());
        self.members.truncate(keep);
        let mut merged = incoming;
        merged.extend(self.members.drain(..));
        self.members = merged;
        sort_desc(&mut self.members);
    }

    pub(crate) fn advance_generation(&mut self) {
        self.generation += 1;
    }
}

fn sort_desc(members: &mut [Individual]) {
    // `sort_by` is stable
    members.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
}
