//! Seeded experiment runs and their CSV artifacts.
//!
//! A study expands into runs keyed by fitness mode, instance size, GA budget
//! and seed. The seed drives both the generated instance and the GA, so both
//! fitness modes of one seed see the same instance. Runs execute in parallel
//! and are reported in key order.
//!
//! Writing a report produces, in the output directory:
//! `experiment_<exp>.json` (everything needed to replay a row),
//! `summary_<exp>.csv` (one row per run) and one
//! `trace_<exp>-<mode>-<tasks>x<candidates>-<pop>x<gens>_<seed>.csv` per run.

mod csvio;
mod sweep;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::PreferenceProfile;
use crate::ga::{evolve, exhaustive_optimum, CompositionProblem, FitnessMode, GaConfig, GaResult, TraceRow};
use crate::qos::ConstraintSpec;
use crate::workload::{generate_instance, QosRanges, WorkflowShape, WorkloadSpec};

pub use csvio::{read_summary, summary_csv, trace_csv, SUMMARY_HEADER, TRACE_HEADER};
pub use sweep::{run_cf_sweep, CfSweepReport, CfSweepRow, CF_SWEEP_HEADER};

/// Largest search space for which runs are also scored against the
/// brute-force optimum.
pub const ORACLE_LIMIT: f64 = 65_536.0;

pub fn default_seeds() -> Vec<u64> {
    (0..10).collect()
}

/// Instance shape shared by every run of a study; size and seed vary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkloadTemplate {
    pub shape: WorkflowShape,
    pub qos_ranges: QosRanges,
    pub constraints: Vec<ConstraintSpec>,
}

impl Default for WorkloadTemplate {
    fn default() -> Self {
        WorkloadTemplate {
            shape: WorkflowShape::SequenceOnly,
            qos_ranges: QosRanges::default(),
            constraints: vec![ConstraintSpec { criterion: crate::qos::Criterion::Cost, term: "cheap".into() }],
        }
    }
}

impl WorkloadTemplate {
    pub fn spec(&self, task_count: usize, candidates: usize, seed: u64, profile: &PreferenceProfile) -> WorkloadSpec {
        WorkloadSpec {
            task_count,
            candidates_per_task: candidates,
            shape: self.shape,
            qos_ranges: self.qos_ranges,
            universes: profile.universes,
            constraints: self.constraints.clone(),
            rng_seed: seed,
        }
    }
}

/// Inputs common to every run of one experiment. `ga.population_size`,
/// `ga.max_generations` and `ga.rng_seed` are overridden per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSetup {
    pub experiment: String,
    pub ga: GaConfig,
    pub profile: PreferenceProfile,
    pub workload: WorkloadTemplate,
}

impl ExperimentSetup {
    pub fn new(experiment: impl Into<String>) -> Self {
        ExperimentSetup {
            experiment: experiment.into(),
            ga: GaConfig::default(),
            profile: PreferenceProfile::default(),
            workload: WorkloadTemplate::default(),
        }
    }

    pub fn file_name(experiment: &str) -> String {
        format!("experiment_{experiment}.json")
    }

    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(Self::file_name(&self.experiment));
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn load(dir: &Path, experiment: &str) -> Result<Self> {
        let path = dir.join(Self::file_name(experiment));
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    fn validate(&self) -> Result<()> {
        let id_ok = !self.experiment.is_empty()
            && self.experiment.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
        if !id_ok {
            return Err(Error::InvalidExperiment(format!(
                "experiment id '{}' must be non-empty ASCII letters, digits, '-' or '_'",
                self.experiment
            )));
        }
        self.ga.validate()
    }
}

// Run key without the seed.
type GroupKey = (FitnessMode, usize, usize, usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunKey {
    pub mode: FitnessMode,
    pub task_count: usize,
    pub candidates: usize,
    pub population: usize,
    pub max_gens: usize,
    pub seed: u64,
}

impl RunKey {
    pub fn label(&self, experiment: &str) -> String {
        format!(
            "{experiment}-{}-{}x{}-{}x{}",
            self.mode, self.task_count, self.candidates, self.population, self.max_gens
        )
    }

    pub fn trace_file_name(&self, experiment: &str) -> String {
        format!("trace_{}_{}.csv", self.label(experiment), self.seed)
    }

    fn group(&self) -> GroupKey {
        (self.mode, self.task_count, self.candidates, self.population, self.max_gens)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub experiment: String,
    pub key: RunKey,
    /// Penalized fitness of the returned composition at the final generation.
    pub final_best_fitness: f64,
    pub final_raw_fitness: f64,
    pub plateau_gen: usize,
    pub generations_run: usize,
    pub violation_sum: f64,
    pub feasible: bool,
    /// Fitness as a percentage of the brute-force optimum, both penalized at
    /// the full configured weight; only for small search spaces.
    pub oracle_percent: Option<f64>,
    pub wall_ms: f64,
}

impl RunRow {
    /// Equal in every column except wall time, compared as written to CSV.
    pub fn same_outcome(&self, other: &RunRow) -> bool {
        let strip = |r: &RunRow| {
            let mut cells = csvio::row_cells(r);
            cells.pop();
            cells
        };
        strip(self) == strip(other)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub row: RunRow,
    pub trace: Vec<TraceRow>,
}

/// Medians over the seeds of one (mode, size, budget) group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupMedian {
    pub mode: FitnessMode,
    pub task_count: usize,
    pub candidates: usize,
    pub population: usize,
    pub max_gens: usize,
    pub runs: usize,
    pub feasible_runs: usize,
    pub median_best_fitness: f64,
    pub median_plateau_gen: f64,
    pub median_oracle_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub setup: ExperimentSetup,
    pub runs: Vec<RunRecord>,
}

impl ExperimentReport {
    pub fn experiment(&self) -> &str {
        &self.setup.experiment
    }

    pub fn rows(&self) -> impl Iterator<Item = &RunRow> {
        self.runs.iter().map(|r| &r.row)
    }

    /// One entry per group, in order of first appearance.
    pub fn medians(&self) -> Vec<GroupMedian> {
        let mut groups: Vec<(GroupKey, Vec<&RunRow>)> = Vec::new();
        for row in self.rows() {
            let g = row.key.group();
            match groups.iter_mut().find(|(k, _)| *k == g) {
                Some((_, rows)) => rows.push(row),
                None => groups.push((g, vec![row])),
            }
        }
        groups
            .into_iter()
            .map(|((mode, task_count, candidates, population, max_gens), rows)| {
                let percents: Vec<f64> = rows.iter().filter_map(|r| r.oracle_percent).collect();
                GroupMedian {
                    mode,
                    task_count,
                    candidates,
                    population,
                    max_gens,
                    runs: rows.len(),
                    feasible_runs: rows.iter().filter(|r| r.feasible).count(),
                    median_best_fitness: median(rows.iter().map(|r| r.final_best_fitness).collect()),
                    median_plateau_gen: median(rows.iter().map(|r| r.plateau_gen as f64).collect()),
                    median_oracle_percent: (percents.len() == rows.len()).then(|| median(percents)),
                }
            })
            .collect()
    }

    pub fn summary_file_name(&self) -> String {
        format!("summary_{}.csv", self.experiment())
    }

    /// Writes the setup, the summary and every trace into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = vec![self.setup.save(dir)?];
        let summary = dir.join(self.summary_file_name());
        let rows: Vec<RunRow> = self.rows().cloned().collect();
        std::fs::write(&summary, summary_csv(&rows)?).map_err(|e| Error::io(&summary, e))?;
        written.push(summary);
        for run in &self.runs {
            let path = dir.join(run.row.key.trace_file_name(self.experiment()));
            std::fs::write(&path, trace_csv(&run.trace)?).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

pub fn median(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Generates the run's instance and evolves it.
pub fn execute_run(setup: &ExperimentSetup, key: &RunKey) -> Result<RunRecord> {
    let started = Instant::now();
    let instance = generate_instance(&setup.workload.spec(key.task_count, key.candidates, key.seed, &setup.profile))?;
    let problem = CompositionProblem::new(instance, &setup.profile, key.mode)?;
    let config =
        GaConfig { population_size: key.population, max_generations: key.max_gens, rng_seed: key.seed, ..setup.ga };
    let result = evolve(&problem, &config)?;
    let oracle_percent = oracle_percent(&problem, &config, &result)?;
    let row = RunRow {
        experiment: setup.experiment.clone(),
        key: *key,
        final_best_fitness: result.best_fitness,
        final_raw_fitness: result.best_raw,
        plateau_gen: result.plateau_generation(),
        generations_run: result.generations_run,
        violation_sum: result.constraint_violations.iter().sum(),
        feasible: result.is_feasible(),
        oracle_percent,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    Ok(RunRecord { row, trace: result.fitness_trace })
}

fn oracle_percent(problem: &CompositionProblem, config: &GaConfig, result: &GaResult) -> Result<Option<f64>> {
    if problem.instance().space_size() > ORACLE_LIMIT {
        return Ok(None);
    }
    let optimum = exhaustive_optimum(problem, config.penalty_weight)?;
    if optimum.fitness <= 0.0 {
        return Ok(None);
    }
    let found = problem.evaluate(&result.best)?.penalized(config.penalty_weight);
    Ok(Some(100.0 * found / optimum.fitness))
}

pub fn run_all(setup: &ExperimentSetup, keys: &[RunKey]) -> Result<ExperimentReport> {
    setup.validate()?;
    let runs = keys.par_iter().map(|k| execute_run(setup, k)).collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport { setup: setup.clone(), runs })
}

fn check_sizes(task_counts: &[usize], candidates: usize, seeds: &[u64]) -> Result<()> {
    if task_counts.is_empty() || seeds.is_empty() {
        return Err(Error::InvalidExperiment("need at least one task count and one seed".into()));
    }
    if candidates == 0 || task_counts.contains(&0) {
        return Err(Error::InvalidExperiment("task counts and candidates must be positive".into()));
    }
    Ok(())
}

/// Fuzzy-mode runs for every task count and seed at the configured budget.
pub fn run_convergence_study(
    setup: &ExperimentSetup,
    task_counts: &[usize],
    candidates: usize,
    seeds: &[u64],
) -> Result<ExperimentReport> {
    check_sizes(task_counts, candidates, seeds)?;
    let keys: Vec<RunKey> = task_counts
        .iter()
        .flat_map(|&task_count| {
            seeds.iter().map(move |&seed| RunKey {
                mode: FitnessMode::Fuzzy,
                task_count,
                candidates,
                population: setup.ga.population_size,
                max_gens: setup.ga.max_generations,
                seed,
            })
        })
        .collect();
    run_all(setup, &keys)
}

/// One instance size under one GA budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaleCase {
    pub task_count: usize,
    pub candidates: usize,
    pub population: usize,
    pub max_gens: usize,
}

/// Fuzzy-mode runs for every (size, budget) case and seed.
pub fn run_scale_study(setup: &ExperimentSetup, cases: &[ScaleCase], seeds: &[u64]) -> Result<ExperimentReport> {
    if cases.is_empty() {
        return Err(Error::InvalidExperiment("need at least one scale case".into()));
    }
    for c in cases {
        check_sizes(&[c.task_count], c.candidates, seeds)?;
    }
    let keys: Vec<RunKey> = cases
        .iter()
        .flat_map(|c| {
            seeds.iter().map(move |&seed| RunKey {
                mode: FitnessMode::Fuzzy,
                task_count: c.task_count,
                candidates: c.candidates,
                population: c.population,
                max_gens: c.max_gens,
                seed,
            })
        })
        .collect();
    run_all(setup, &keys)
}

/// Fuzzy and weighted-sum runs on the same instances and seeds.
pub fn run_comparison(
    setup: &ExperimentSetup,
    task_counts: &[usize],
    candidates: usize,
    seeds: &[u64],
) -> Result<ExperimentReport> {
    check_sizes(task_counts, candidates, seeds)?;
    let mut keys = Vec::new();
    for &task_count in task_counts {
        for mode in [FitnessMode::Fuzzy, FitnessMode::WeightedSum] {
            for &seed in seeds {
                keys.push(RunKey {
                    mode,
                    task_count,
                    candidates,
                    population: setup.ga.population_size,
                    max_gens: setup.ga.max_generations,
                    seed,
                });
            }
        }
    }
    run_all(setup, &keys)
}

/// Outcome of re-running one recorded summary row.
#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub recorded: RunRow,
    pub replayed: RunRecord,
}

impl Replay {
    pub fn matches(&self) -> bool {
        self.recorded.same_outcome(&self.replayed.row)
    }
}

/// Re-runs data row `row` (1-based) of a summary file, using the setup
/// stored next to it.
pub fn replay(summary: &Path, row: usize) -> Result<Replay> {
    let rows = read_summary(summary)?;
    let recorded = match row.checked_sub(1).and_then(|i| rows.get(i)) {
        Some(r) => r.clone(),
        None => {
            return Err(Error::InvalidExperiment(format!(
                "row {row} out of range: {} has {} data rows",
                summary.display(),
                rows.len()
            )))
        }
    };
    let dir = summary.parent().unwrap_or(Path::new("."));
    let setup = ExperimentSetup::load(dir, &recorded.experiment)?;
    let replayed = execute_run(&setup, &recorded.key)?;
    Ok(Replay { recorded, replayed })
}
