use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use super::config::GaConfig;
use super::fitness::CompositionProblem;
use super::genotype::Genotype;
use crate::error::{Error, Result};
use crate::rng;

/// Added to min-shifted fitness so every individual keeps a nonzero slice.
pub const ROULETTE_EPSILON: f64 = 1e-6;

// Stream tag for initialization draws.
const INIT_STREAM: u64 = u64::MAX;

/// Fitness-proportional sampler over one generation. Fitness may be
/// negative, so weights are `f − min(f) + ε`.
#[derive(Debug, Clone)]
pub struct RouletteWheel {
    index: WeightedIndex<f64>,
}

impl RouletteWheel {
    pub fn new(fitnesses: &[f64]) -> Self {
        assert!(!fitnesses.is_empty(), "roulette over an empty population");
        let min = fitnesses.iter().cloned().fold(f64::INFINITY, f64::min);
        let weights = fitnesses.iter().map(|f| f - min + ROULETTE_EPSILON);
        RouletteWheel { index: WeightedIndex::new(weights).expect("shifted weights are positive") }
    }

    pub fn spin<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.index.sample(rng)
    }
}

pub fn roulette_select<'a, R: Rng + ?Sized>(
    population: &'a [Genotype],
    fitnesses: &[f64],
    rng: &mut R,
) -> &'a Genotype {
    &population[RouletteWheel::new(fitnesses).spin(rng)]
}

/// Swaps the segment `[i, j)` between two parents.
pub fn crossover_at(a: &Genotype, b: &Genotype, i: usize, j: usize) -> Result<(Genotype, Genotype)> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    assert!(i <= j && j <= a.len(), "cut points {i}..{j} out of range");
    let (mut x, mut y) = (a.clone(), b.clone());
    x.genes_mut()[i..j].copy_from_slice(&b.genes()[i..j]);
    y.genes_mut()[i..j].copy_from_slice(&a.genes()[i..j]);
    Ok((x, y))
}

/// Standard two-point crossover. Cut points `i < j` are drawn from
/// `[1, len − 1]`; for two genes the only proper exchange is the second.
pub fn two_point_crossover<R: Rng + ?Sized>(a: &Genotype, b: &Genotype, rng: &mut R) -> Result<(Genotype, Genotype)> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    let (i, j) = match a.len() {
        0 | 1 => return Ok((a.clone(), b.clone())),
        2 => (1, 2),
        n => loop {
            let p = rng.gen_range(1..n);
            let q = rng.gen_range(1..n);
            if p != q {
                break (p.min(q), p.max(q));
            }
        },
    };
    crossover_at(a, b, i, j)
}

/// With probability `mutation_prob`, re-binds one random task to a different
/// candidate. Single-candidate tasks are left alone.
pub fn mutate<R: Rng + ?Sized>(g: &Genotype, candidate_counts: &[usize], mutation_prob: f64, rng: &mut R) -> Genotype {
    let mut out = g.clone();
    if out.is_empty() || !rng.gen_bool(mutation_prob) {
        return out;
    }
    let task = rng.gen_range(0..out.len());
    let n = candidate_counts[task];
    if n > 1 {
        let old = out.genes()[task];
        let mut pick = rng.gen_range(0..n - 1);
        if pick >= old {
            pick += 1;
        }
        out.genes_mut()[task] = pick;
    }
    out
}

/// Draws `size` genotypes, each gene by roulette over that task's candidate
/// scores; a task whose scores are all zero is sampled uniformly.
pub fn initial_population_from_scores(scores: &[Vec<f64>], size: usize, seed: u64) -> Vec<Genotype> {
    let wheels: Vec<Option<WeightedIndex<f64>>> = scores.iter().map(|s| WeightedIndex::new(s).ok()).collect();
    (0..size)
        .map(|k| {
            let mut r = rng::stream(seed, INIT_STREAM, k as u64);
            let genes = scores
                .iter()
                .zip(&wheels)
                .map(|(s, wheel)| match wheel {
                    Some(w) => w.sample(&mut r),
                    None => r.gen_range(0..s.len()),
                })
                .collect();
            Genotype::new(genes)
        })
        .collect()
}

pub fn initialize_population(problem: &CompositionProblem, config: &GaConfig) -> Vec<Genotype> {
    initial_population_from_scores(&problem.local_scores(), config.population_size, config.rng_seed)
}
