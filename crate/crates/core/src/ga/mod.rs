//! Genetic optimizer over candidate assignments.
//!
//! Fitness is the fuzzy rank of the aggregated QoS scaled to `[0, 1]`
//! (or a simple additive weighting baseline), minus a quadratic penalty on
//! each constraint's normalized violation. With the dynamic penalty the
//! weight ramps linearly up to its configured value over the run, which lets
//! near-feasible compositions survive the early generations.

mod config;
mod evolve;
mod exhaustive;
mod fitness;
mod genotype;
mod operators;

pub use config::{FitnessMode, GaConfig};
pub use evolve::{evolve, evolve_instance, plateau_generation, GaResult, TraceRow, FITNESS_TOLERANCE};
pub use exhaustive::{exhaustive_optimum, for_each_assignment, Optimum, EXHAUSTIVE_LIMIT};
pub use fitness::{delta_q, CompositionProblem, Evaluation, FuzzyConstraint};
pub use genotype::Genotype;
pub use operators::{
    crossover_at, initial_population_from_scores, initialize_population, mutate, roulette_select, two_point_crossover,
    RouletteWheel, ROULETTE_EPSILON,
};
