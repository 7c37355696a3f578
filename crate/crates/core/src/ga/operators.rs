//! Selection and variation operators.

use rand::Rng;

use super::{GaError, Genome, Individual, Population};

/// Linear rank selection.
///
/// With `N` members sorted best first, the member at rank `r` (1 = best) is
/// drawn with probability proportional to `N − r + 1`. Only the order of the
/// population matters, never the fitness values themselves.
pub fn rank_select<'p, R: Rng + ?Sized>(
    population: &'p Population,
    rng: &mut R,
) -> Result<&'p Individual, GaError> {
    let n = population.len();
    if n == 0 {
        return Err(GaError::EmptyPopulation);
    }
    Ok(&population.members()[rank_index(n, rng)])
}

/// Zero-based index drawn with weight `n − index`.
fn rank_index<R: Rng + ?Sized>(n: usize, rng: &mut R) -> usize {
    let total = (n as u64) * (n as u64 + 1) / 2;
    let mut ticket = rng.random_range(0..total);
    for index in 0..n {
        let weight = (n - index) as u64;
        if ticket < weight {
            return index;
        }
        ticket -= weight;
    }
    unreachable!("ticket below total weight")
}

/// One-point crossover: `a[..k] ++ b[k..]` with the cut `k` uniform in
/// `1..=L-1`. Genomes shorter than two bits have no interior cut point and
/// yield a copy of `a`.
pub fn one_point_crossover<R: Rng + ?Sized>(
    a: &Genome,
    b: &Genome,
    rng: &mut R,
) -> Result<Genome, GaError> {
    check_lengths(a, b)?;
    if a.len() < 2 {
        return Ok(a.clone());
    }
    let cut = rng.random_range(1..a.len());
    crossover_at(a, b, cut)
}

/// Deterministic one-point crossover at `cut`.
pub fn crossover_at(a: &Genome, b: &Genome, cut: usize) -> Result<Genome, GaError> {
    check_lengths(a, b)?;
    let cut = cut.min(a.len());
    let mut bits = Vec::with_capacity(a.len());
    bits.extend_from_slice(&a.bits()[..cut]);
    bits.extend_from_slice(&b.bits()[cut..]);
    Ok(Genome::from_bits(bits))
}

fn check_lengths(a: &Genome, b: &Genome) -> Result<(), GaError> {
    if a.len() != b.len() {
        return Err(GaError::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(())
}

/// Flips each bit independently with probability `per_bit_rate`.
///
/// Panics if `per_bit_rate` is outside `[0, 1]`; [`super::GaParams::validate`]
/// rules that out for configured rates.
pub fn mutate<R: Rng + ?Sized>(genome: &Genome, per_bit_rate: f64, rng: &mut R) -> Genome {
    Genome::from_bits(
        genome
            .bits()
            .iter()
            .map(|&b| b ^ rng.random_bool(per_bit_rate))
            .collect(),
    )
}
