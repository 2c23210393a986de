use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub elite_count: usize,
    pub max_generations: usize,
    pub stall_generations: usize,
    pub penalty_weight: f64,
    pub dynamic_penalty: bool,
    pub rng_seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 200,
            crossover_prob: 0.7,
            mutation_prob: 0.1,
            elite_count: 2,
            max_generations: 400,
            stall_generations: 30,
            penalty_weight: 0.5,
            dynamic_penalty: true,
            rng_seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.population_size == 0 {
            return bad("population_size must be positive".into());
        }
        if self.elite_count >= self.population_size {
            return bad(format!(
                "elite_count ({}) must be below population_size ({})",
                self.elite_count, self.population_size
            ));
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return bad(format!("crossover_prob {} outside [0, 1]", self.crossover_prob));
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return bad(format!("mutation_prob {} outside [0, 1]", self.mutation_prob));
        }
        if self.max_generations == 0 {
            return bad("max_generations must be positive".into());
        }
        if self.stall_generations == 0 {
            return bad("stall_generations must be positive".into());
        }
        if !(self.penalty_weight >= 0.0 && self.penalty_weight.is_finite()) {
            return bad(format!("penalty_weight {} must be a non-negative number", self.penalty_weight));
        }
        Ok(())
    }

    /// Penalty weight in force at generation `gen` (0-based). The dynamic
    /// ramp reaches the full weight at the last generation.
    pub fn penalty_weight_at(&self, gen: usize) -> f64 {
        if self.dynamic_penalty {
            self.penalty_weight * (gen + 1) as f64 / self.max_generations as f64
        } else {
            self.penalty_weight
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitnessMode {
    /// Fuzzy rank of the aggregated QoS.
    #[default]
    Fuzzy,
    /// Simple additive weighting of normalized attributes (baseline).
    WeightedSum,
}

impl FitnessMode {
    pub fn name(self) -> &'static str {
        match self {
            FitnessMode::Fuzzy => "fuzzy",
            FitnessMode::WeightedSum => "weighted-sum",
        }
    }
}

impl fmt::Display for FitnessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FitnessMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "fuzzy" => Ok(FitnessMode::Fuzzy),
            "weighted-sum" | "saw" => Ok(FitnessMode::WeightedSum),
            other => Err(format!("unknown fitness mode '{other}' (expected fuzzy or weighted-sum)")),
        }
    }
}
