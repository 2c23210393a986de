use rand::Rng;
use rayon::prelude::*;

use super::config::{FitnessMode, GaConfig};
use super::fitness::{CompositionProblem, Evaluation};
use super::genotype::Genotype;
use super::operators::{initialize_population, mutate, two_point_crossover, RouletteWheel};
use crate::error::Result;
use crate::fuzzy::PreferenceProfile;
use crate::qos::{ProblemInstance, QosVector};
use crate::rng;

/// Fitness changes at or below this are treated as no change.
pub const FITNESS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub gen: usize,
    /// Best penalized fitness in the population.
    pub best: f64,
    pub mean: f64,
    /// Σ ΔQ of the best individual.
    pub violation_sum: f64,
    /// Highest raw fitness among members violating no constraint.
    pub best_feasible: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaResult {
    pub best: Genotype,
    /// Penalized fitness of `best` at the last generation.
    pub best_fitness: f64,
    pub best_raw: f64,
    pub best_qos: QosVector,
    /// ΔQ per constraint for `best`.
    pub constraint_violations: Vec<f64>,
    pub generations_run: usize,
    pub fitness_trace: Vec<TraceRow>,
    pub evaluations: usize,
}

impl GaResult {
    pub fn is_feasible(&self) -> bool {
        self.constraint_violations.iter().all(|&d| d == 0.0)
    }

    pub fn plateau_generation(&self) -> usize {
        plateau_generation(&self.fitness_trace)
    }
}

/// First generation after which the best fitness never moves again.
pub fn plateau_generation(trace: &[TraceRow]) -> usize {
    trace.windows(2).rposition(|w| (w[1].best - w[0].best).abs() >= FITNESS_TOLERANCE).map_or(0, |i| trace[i + 1].gen)
}

struct Member {
    genotype: Genotype,
    eval: Evaluation,
}

/// Runs the elitist generational GA on `problem`.
///
/// Each generation is scored with the penalty weight of that generation.
/// The `elite_count` best individuals survive unchanged; the rest are bred
/// by roulette selection, two-point crossover (with `crossover_prob`, else
/// cloning) and mutation. Breeding for offspring pair `j` of generation `g`
/// draws from its own stream keyed by `(rng_seed, g, j)`, so parallel
/// breeding and evaluation give the same result as a serial run.
///
/// When no elite is feasible, the feasible individual with the highest raw
/// fitness survives as well, taking one offspring slot, so the best feasible
/// composition found is never lost.
///
/// The loop ends once the best individual violates no constraint and its
/// fitness has not changed for `stall_generations`, or after
/// `max_generations`.
pub fn evolve(problem: &CompositionProblem, config: &GaConfig) -> Result<GaResult> {
    config.validate()?;
    let counts = problem.candidate_counts();
    let mut population: Vec<Member> = initialize_population(problem, config)
        .into_par_iter()
        .map(|genotype| {
            let eval = problem.evaluate_unchecked(&genotype);
            Member { genotype, eval }
        })
        .collect();
    let mut evaluations = population.len();
    let mut trace = Vec::new();
    let mut stall = 0usize;
    let mut fitness: Vec<f64>;
    let mut best_idx;

    let mut gen = 0;
    loop {
        let weight = config.penalty_weight_at(gen);
        fitness = population.iter().map(|m| m.eval.penalized(weight)).collect();
        best_idx = argmax(&fitness);
        let best = &population[best_idx];
        let mean = fitness.iter().sum::<f64>() / fitness.len() as f64;
        let feasible = best.eval.is_feasible();

        if let Some(prev) = trace.last().map(|r: &TraceRow| r.best) {
            if feasible && (fitness[best_idx] - prev).abs() <= FITNESS_TOLERANCE {
                stall += 1;
            } else {
                stall = 0;
            }
        }
        trace.push(TraceRow {
            gen,
            best: fitness[best_idx],
            mean,
            violation_sum: best.eval.violation_sum(),
            best_feasible: best_feasible(&population).map(|i| population[i].eval.raw),
        });

        if (feasible && stall >= config.stall_generations) || gen + 1 >= config.max_generations {
            break;
        }

        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]).then(a.cmp(&b)));
        let mut survivors: Vec<usize> = order.iter().take(config.elite_count).copied().collect();
        if config.elite_count > 0 && !survivors.iter().any(|&i| population[i].eval.is_feasible()) {
            if let Some(f) = best_feasible(&population) {
                survivors.push(f);
            }
        }
        let wheel = RouletteWheel::new(&fitness);
        let offspring_needed = config.population_size - survivors.len();
        let pairs = offspring_needed.div_ceil(2);

        let mut offspring: Vec<Genotype> = (0..pairs)
            .into_par_iter()
            .flat_map_iter(|j| {
                let mut r = rng::stream(config.rng_seed, gen as u64, j as u64);
                let a = &population[wheel.spin(&mut r)].genotype;
                let b = &population[wheel.spin(&mut r)].genotype;
                let (x, y) = if r.gen_bool(config.crossover_prob) {
                    two_point_crossover(a, b, &mut r).expect("population genotypes share a length")
                } else {
                    (a.clone(), b.clone())
                };
                let x = mutate(&x, counts, config.mutation_prob, &mut r);
                let y = mutate(&y, counts, config.mutation_prob, &mut r);
                [x, y]
            })
            .collect();
        offspring.truncate(offspring_needed);
        debug_assert!(offspring.iter().all(|g| g.is_valid_for(counts)));

        let mut next: Vec<Member> = Vec::with_capacity(config.population_size);
        // elites keep their evaluation; it does not depend on the generation
        let mut slots: Vec<Option<Member>> = population.into_iter().map(Some).collect();
        for &i in &survivors {
            next.push(slots[i].take().expect("survivor indices are distinct"));
        }
        let bred: Vec<Member> = offspring
            .into_par_iter()
            .map(|genotype| {
                let eval = problem.evaluate_unchecked(&genotype);
                Member { genotype, eval }
            })
            .collect();
        evaluations += bred.len();
        next.extend(bred);
        population = next;
        gen += 1;
    }

    let best = &population[best_idx];
    Ok(GaResult {
        best: best.genotype.clone(),
        best_fitness: fitness[best_idx],
        best_raw: best.eval.raw,
        best_qos: best.eval.qos,
        constraint_violations: best.eval.deltas.clone(),
        generations_run: trace.len(),
        fitness_trace: trace,
        evaluations,
    })
}

/// Builds the problem from its parts and evolves it.
pub fn evolve_instance(
    instance: &ProblemInstance,
    profile: &PreferenceProfile,
    config: &GaConfig,
    mode: FitnessMode,
) -> Result<GaResult> {
    let problem = CompositionProblem::new(instance.clone(), profile, mode)?;
    evolve(&problem, config)
}

// Highest raw fitness among feasible members, lowest index on ties.
fn best_feasible(population: &[Member]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, m) in population.iter().enumerate() {
        if m.eval.is_feasible() && best.is_none_or(|b| m.eval.raw > population[b].eval.raw) {
            best = Some(i);
        }
    }
    best
}

// Highest value, lowest index on ties.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(gen: usize, best: f64) -> TraceRow {
        TraceRow { gen, best, mean: 0.0, violation_sum: 0.0, best_feasible: None }
    }

    #[test]
    fn plateau_detection() {
        assert_eq!(plateau_generation(&[]), 0);
        assert_eq!(plateau_generation(&[row(0, 0.5), row(1, 0.5)]), 0);
        let t = [row(0, 0.1), row(1, 0.2), row(2, 0.2), row(3, 0.3), row(4, 0.3), row(5, 0.3 + 1e-13)];
        assert_eq!(plateau_generation(&t), 3);
    }

    #[test]
    fn argmax_prefers_first() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0, 2.0]), 1);
        assert_eq!(argmax(&[-1.0]), 0);
    }
}
