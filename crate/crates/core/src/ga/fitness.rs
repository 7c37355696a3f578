use super::{GaError, Genome};

/// A fitness function to be maximised.
///
/// Royal Road is the only shipped implementation; the trait is the single
/// extension point for other problems.
pub trait Fitness {
    fn evaluate(&self, genome: &Genome) -> f64;
}

impl<F: Fitness + ?Sized> Fitness for &F {
    fn evaluate(&self, genome: &Genome) -> f64 {
        (**self).evaluate(genome)
    }
}

/// Royal Road R1: the genome is cut into aligned, contiguous blocks of
/// `block_size` bits and each block whose bits are all set earns
/// `block_reward`. Partially set blocks earn nothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoyalRoad {
    block_size: usize,
    block_reward: f64,
}

impl RoyalRoad {
    pub fn new(block_size: usize, block_reward: f64) -> Result<Self, GaError> {
        if block_size == 0 {
            return Err(GaError::config("block_size", "must be positive"));
        }
        if !(block_reward.is_finite() && block_reward >= 0.0) {
            return Err(GaError::config(
                "block_reward",
                format!("must be finite and non-negative, got {block_reward}"),
            ));
        }
        Ok(RoyalRoad {
            block_size,
            block_reward,
        })
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn block_reward(&self) -> f64 {
        self.block_reward
    }

    /// Number of completed blocks.
    pub fn complete_blocks(&self, genome: &Genome) -> usize {
        genome
            .bits()
            .chunks_exact(self.block_size)
            .filter(|block| block.iter().all(|&b| b))
            .count()
    }

    /// Optimum for a genome of `len` bits.
    pub fn max_fitness(&self, len: usize) -> f64 {
        self.block_reward * (len / self.block_size) as f64
    }
}

impl Fitness for RoyalRoad {
    /// Callers are expected to have validated that the genome length is a
    /// multiple of the block size; a trailing partial block is ignored.
    fn evaluate(&self, genome: &Genome) -> f64 {
        self.block_reward * self.complete_blocks(genome) as f64
    }
}

/// Royal Road fitness with an explicit length check.
pub fn royal_road_fitness(
    genome: &Genome,
    block_size: usize,
    block_reward: f64,
) -> Result<f64, GaError> {
    let rr = RoyalRoad::new(block_size, block_reward)?;
    if genome.len() % block_size != 0 {
        return Err(GaError::config(
            "genome_length",
            format!(
                "{} bits is not a multiple of block size {block_size}",
                genome.len()
            ),
        ));
    }
    Ok(rr.evaluate(genome))
}
