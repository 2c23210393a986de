use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fuzzy_compose::ga::{FitnessMode, GaConfig};
use fuzzy_compose::qos::{ConstraintSpec, Criterion};
use fuzzy_compose::workload::WorkflowShape;

#[derive(Debug, Parser)]
#[command(
    name = "fuzzy-compose",
    version,
    about = "QoS-aware service composition with a fuzzy-ranked genetic algorithm"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic problem instance
    Gen(GenArgs),
    /// Optimize one instance and print the selected composition
    Solve(SolveArgs),
    /// Rank spread against the confidence factor of one criterion
    SweepCf(SweepCfArgs),
    /// Convergence study across task counts, or a budget study with --budgets
    Bench(BenchArgs),
    /// Fuzzy fitness against the weighted-sum baseline on shared instances
    Compare(CompareArgs),
    /// Re-run one row of a summary file
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeKind {
    Sequence,
    Mixed,
}

#[derive(Debug, Clone, Args)]
pub struct ShapeArgs {
    /// Workflow shape
    #[arg(long, value_enum, default_value_t = ShapeKind::Sequence)]
    pub shape: ShapeKind,
    /// Chance that a mixed node is a switch
    #[arg(long, default_value_t = 0.25)]
    pub switch_prob: f64,
    /// Chance that a mixed node is a flow
    #[arg(long, default_value_t = 0.25)]
    pub flow_prob: f64,
    /// Chance that a mixed node is wrapped in a loop
    #[arg(long, default_value_t = 0.15)]
    pub loop_prob: f64,
    /// Deepest level of nested constructs in a mixed workflow
    #[arg(long, default_value_t = 3)]
    pub max_depth: usize,
    /// Largest loop iteration count
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_loop_k: u32,
}

impl ShapeArgs {
    pub fn shape(&self) -> WorkflowShape {
        match self.shape {
            ShapeKind::Sequence => WorkflowShape::SequenceOnly,
            ShapeKind::Mixed => WorkflowShape::Mixed {
                switch_prob: self.switch_prob,
                flow_prob: self.flow_prob,
                loop_prob: self.loop_prob,
                max_depth: self.max_depth,
                max_loop_k: self.max_loop_k,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Number of tasks
    #[arg(long, value_parser = positive)]
    pub tasks: usize,
    /// Candidate services per task
    #[arg(long, value_parser = positive)]
    pub candidates: usize,
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Global constraint as criterion=term, e.g. cost=cheap (repeatable)
    #[arg(long = "constraint")]
    pub constraints: Vec<ConstraintSpec>,
    /// Narrow sampling ranges to the constraint terms so every assignment is feasible
    #[arg(long)]
    pub feasible: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path of the instance JSON
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct GaArgs {
    /// JSON file with GA settings; flags below override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = positive)]
    pub population: Option<usize>,
    #[arg(long)]
    pub crossover_prob: Option<f64>,
    #[arg(long)]
    pub mutation_prob: Option<f64>,
    /// Individuals copied unchanged into each generation
    #[arg(long)]
    pub elites: Option<usize>,
    #[arg(long, value_parser = positive)]
    pub max_gens: Option<usize>,
    /// Generations without improvement before a feasible run stops
    #[arg(long, value_parser = positive)]
    pub stall_gens: Option<usize>,
    #[arg(long)]
    pub penalty_weight: Option<f64>,
    /// Ramp the penalty weight up over the generations
    #[arg(long, action = clap::ArgAction::Set)]
    pub dynamic_penalty: Option<bool>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "fuzzy", value_parser = parse_mode)]
    pub fitness_mode: FitnessMode,
}

impl GaArgs {
    pub fn config(&self) -> anyhow::Result<GaConfig> {
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
                serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?
            }
            None => GaConfig::default(),
        };
        if let Some(v) = self.population {
            c.population_size = v;
        }
        if let Some(v) = self.crossover_prob {
            c.crossover_prob = v;
        }
        if let Some(v) = self.mutation_prob {
            c.mutation_prob = v;
        }
        if let Some(v) = self.elites {
            c.elite_count = v;
        }
        if let Some(v) = self.max_gens {
            c.max_generations = v;
        }
        if let Some(v) = self.stall_gens {
            c.stall_generations = v;
        }
        if let Some(v) = self.penalty_weight {
            c.penalty_weight = v;
        }
        if let Some(v) = self.dynamic_penalty {
            c.dynamic_penalty = v;
        }
        if let Some(v) = self.seed {
            c.rng_seed = v;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Problem instance JSON
    #[arg(long)]
    pub instance: PathBuf,
    /// Preference profile JSON; all grades 100 when omitted
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[command(flatten)]
    pub ga: GaArgs,
    /// Write the per-generation trace CSV here
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepCfArgs {
    /// Criterion to sweep; all four when omitted
    #[arg(long)]
    pub criterion: Option<Criterion>,
    /// Confidence factors, comma separated
    #[arg(long, value_delimiter = ',', default_value = "0,0.2,0.4,0.6,0.8,1")]
    pub cfs: Vec<f64>,
    /// Input points per sweep
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Profile supplying the universes
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct StudyArgs {
    /// Task counts, comma separated
    #[arg(long, value_delimiter = ',', default_value = "10,20,30", value_parser = positive)]
    pub task_counts: Vec<usize>,
    #[arg(long, default_value_t = 30, value_parser = positive)]
    pub candidates: usize,
    /// Seeds as a comma list or an inclusive range a..b
    #[arg(long, default_value = "0..9", value_parser = parse_seeds)]
    pub seeds: SeedList,
    /// Preference profile JSON; all grades 100 when omitted
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Constraint of every generated instance (repeatable); cost=cheap when omitted
    #[arg(long = "constraint")]
    pub constraints: Vec<ConstraintSpec>,
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Experiment id used in file names
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub ga: GaArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub study: StudyArgs,
    /// GA budgets as POPxGENS, comma separated; switches to the budget study
    #[arg(long, value_delimiter = ',', value_parser = parse_budget)]
    pub budgets: Vec<(usize, usize)>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub study: StudyArgs,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Summary CSV written by bench or compare
    #[arg(long)]
    pub summary: PathBuf,
    /// Data row to re-run, counting from 1
    #[arg(long, value_parser = positive)]
    pub row: usize,
    /// Write the replayed trace into this directory
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedList(pub Vec<u64>);

pub fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_mode(s: &str) -> Result<FitnessMode, String> {
    s.parse()
}

pub fn parse_seeds(s: &str) -> Result<SeedList, String> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|e| format!("bad range start: {e}"))?;
        let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|e| format!("bad range end: {e}"))?;
        if a > b {
            return Err(format!("empty seed range {a}..{b}"));
        }
        return Ok(SeedList((a..=b).collect()));
    }
    let seeds = s
        .split(',')
        .map(|p| p.trim().parse::<u64>().map_err(|e| format!("bad seed '{p}': {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SeedList(seeds))
}

pub fn parse_budget(s: &str) -> Result<(usize, usize), String> {
    let (p, g) = s.trim().split_once(['x', 'X']).ok_or_else(|| format!("budget '{s}' must look like POPxGENS"))?;
    Ok((positive(p.trim())?, positive(g.trim())?))
}
