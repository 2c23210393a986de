use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use fuzzy_compose::experiment::{
    replay, run_cf_sweep, run_comparison, run_convergence_study, run_scale_study, trace_csv, ExperimentReport,
    ExperimentSetup, GroupMedian, ScaleCase, WorkloadTemplate, SUMMARY_HEADER,
};
use fuzzy_compose::format::fmt_g;
use fuzzy_compose::fuzzy::PreferenceProfile;
use fuzzy_compose::ga::{evolve, CompositionProblem, FitnessMode};
use fuzzy_compose::qos::{Criterion, ProblemInstance};
use fuzzy_compose::workload::{generate_instance, QosRanges, WorkloadSpec};

use crate::args::{BenchArgs, Command, CompareArgs, GenArgs, ReplayArgs, SolveArgs, StudyArgs, SweepCfArgs};

pub enum Outcome {
    Success,
    Infeasible,
}

pub fn run(command: Command, out: &mut impl Write) -> Result<Outcome> {
    match command {
        Command::Gen(a) => gen(a, out),
        Command::Solve(a) => solve(a, out),
        Command::SweepCf(a) => sweep_cf(a, out),
        Command::Bench(a) => bench(a, out),
        Command::Compare(a) => compare(a, out),
        Command::Replay(a) => replay_row(a, out),
    }
}

fn load_profile(path: Option<&Path>) -> Result<PreferenceProfile> {
    match path {
        Some(p) => PreferenceProfile::load(p).with_context(|| format!("loading profile {}", p.display())),
        None => Ok(PreferenceProfile::default()),
    }
}

fn gen(a: GenArgs, out: &mut impl Write) -> Result<Outcome> {
    let mut spec =
        WorkloadSpec::new(a.tasks, a.candidates, a.seed).with_shape(a.shape.shape()).with_constraints(a.constraints);
    if a.feasible {
        spec = spec.restrict_to_constraints()?;
    }
    let instance = generate_instance(&spec)?;
    instance.save(&a.out)?;
    writeln!(out, "wrote {}", a.out.display())?;
    writeln!(out, "tasks {}", instance.task_count())?;
    writeln!(out, "space_size {}^{} = {}", a.candidates, a.tasks, fmt_g(instance.space_size()))?;
    Ok(Outcome::Success)
}

fn solve(a: SolveArgs, out: &mut impl Write) -> Result<Outcome> {
    let instance = ProblemInstance::load(&a.instance).with_context(|| format!("loading {}", a.instance.display()))?;
    let profile = load_profile(a.profile.as_deref())?;
    let config = a.ga.config()?;
    let problem = CompositionProblem::new(instance, &profile, a.ga.fitness_mode)?;
    let result = evolve(&problem, &config)?;

    writeln!(out, "fitness_mode {}", a.ga.fitness_mode)?;
    writeln!(out, "generations_run {}", result.generations_run)?;
    writeln!(out, "plateau_gen {}", result.plateau_generation())?;
    writeln!(out, "evaluations {}", result.evaluations)?;
    for (task, &g) in problem.instance().tasks.iter().zip(result.best.genes()) {
        writeln!(out, "assign {} {}", task.name, task.candidates[g].id)?;
    }
    for c in Criterion::ALL {
        writeln!(out, "qos {} {}", c, fmt_g(result.best_qos.get(c)))?;
    }
    writeln!(out, "raw_fitness {}", fmt_g(result.best_raw))?;
    writeln!(out, "penalized_fitness {}", fmt_g(result.best_fitness))?;
    for (c, d) in problem.constraints().iter().zip(&result.constraint_violations) {
        writeln!(
            out,
            "constraint {}={} bounds [{}, {}] value {} delta_q {}",
            c.criterion,
            c.term,
            fmt_g(c.q_min),
            fmt_g(c.q_max),
            fmt_g(result.best_qos.get(c.criterion)),
            fmt_g(*d)
        )?;
    }
    writeln!(out, "feasible {}", result.is_feasible())?;
    if let Some(path) = &a.trace {
        std::fs::write(path, trace_csv(&result.fitness_trace)?)
            .with_context(|| format!("writing {}", path.display()))?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(if result.is_feasible() { Outcome::Success } else { Outcome::Infeasible })
}

fn sweep_cf(a: SweepCfArgs, out: &mut impl Write) -> Result<Outcome> {
    let profile = load_profile(a.profile.as_deref())?;
    let criteria: Vec<Criterion> = match a.criterion {
        Some(c) => vec![c],
        None => Criterion::ALL.to_vec(),
    };
    let report = run_cf_sweep(&profile, &criteria, &a.cfs, a.points)?;
    out.write_all(report.to_csv()?.as_bytes())?;
    writeln!(out, "check spread_non_decreasing_in_cf {}", yes_no(report.spread_is_monotone()))?;
    let path = report.write(&a.out_dir)?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(Outcome::Success)
}

fn setup(study: &StudyArgs, default_name: &str) -> Result<ExperimentSetup> {
    let workload = WorkloadTemplate {
        shape: study.shape.shape(),
        qos_ranges: QosRanges::default(),
        constraints: if study.constraints.is_empty() {
            WorkloadTemplate::default().constraints
        } else {
            study.constraints.clone()
        },
    };
    if study.ga.fitness_mode != FitnessMode::Fuzzy {
        bail!("--fitness-mode applies to solve only; studies choose their modes");
    }
    Ok(ExperimentSetup {
        experiment: study.name.clone().unwrap_or_else(|| default_name.to_string()),
        ga: study.ga.config()?,
        profile: load_profile(study.profile.as_deref())?,
        workload,
    })
}

fn bench(a: BenchArgs, out: &mut impl Write) -> Result<Outcome> {
    let s = &a.study;
    let setup = setup(s, "bench")?;
    let report = if a.budgets.is_empty() {
        run_convergence_study(&setup, &s.task_counts, s.candidates, &s.seeds.0)?
    } else {
        let cases: Vec<ScaleCase> = s
            .task_counts
            .iter()
            .flat_map(|&task_count| {
                a.budgets.iter().map(move |&(population, max_gens)| ScaleCase {
                    task_count,
                    candidates: s.candidates,
                    population,
                    max_gens,
                })
            })
            .collect();
        run_scale_study(&setup, &cases, &s.seeds.0)?
    };
    let medians = report.medians();
    print_medians(&report, &medians, out)?;
    if a.budgets.is_empty() {
        let plateaus: Vec<f64> = medians.iter().map(|m| m.median_plateau_gen).collect();
        let increasing = plateaus.windows(2).all(|w| w[1] > w[0]);
        writeln!(out, "check plateau_increases_with_tasks {}", yes_no(increasing))?;
    } else {
        for &t in &s.task_counts {
            let mut group: Vec<&GroupMedian> = medians.iter().filter(|m| m.task_count == t).collect();
            group.sort_by_key(|m| m.population * m.max_gens);
            let ok = group.windows(2).all(|w| w[1].median_best_fitness >= w[0].median_best_fitness);
            writeln!(out, "check tasks={t} larger_budget_not_worse {}", yes_no(ok))?;
        }
    }
    write_report(&report, &s.out_dir, out)
}

fn compare(a: CompareArgs, out: &mut impl Write) -> Result<Outcome> {
    let s = &a.study;
    let setup = setup(s, "compare")?;
    let report = run_comparison(&setup, &s.task_counts, s.candidates, &s.seeds.0)?;
    let medians = report.medians();
    print_medians(&report, &medians, out)?;
    for &t in &s.task_counts {
        let plateau = |mode| medians.iter().find(|m| m.task_count == t && m.mode == mode).map(|m| m.median_plateau_gen);
        if let (Some(f), Some(w)) = (plateau(FitnessMode::Fuzzy), plateau(FitnessMode::WeightedSum)) {
            writeln!(out, "check tasks={t} fuzzy_plateau_not_later {}", yes_no(f <= w))?;
        }
    }
    write_report(&report, &s.out_dir, out)
}

fn print_medians(report: &ExperimentReport, medians: &[GroupMedian], out: &mut impl Write) -> Result<()> {
    writeln!(out, "experiment {}", report.experiment())?;
    writeln!(
        out,
        "mode tasks candidates population max_gens runs feasible median_best_fitness median_plateau_gen median_oracle_percent"
    )?;
    for m in medians {
        writeln!(
            out,
            "{} {} {} {} {} {} {} {} {} {}",
            m.mode,
            m.task_count,
            m.candidates,
            m.population,
            m.max_gens,
            m.runs,
            m.feasible_runs,
            fmt_g(m.median_best_fitness),
            fmt_g(m.median_plateau_gen),
            m.median_oracle_percent.map_or_else(|| "-".to_string(), fmt_g)
        )?;
    }
    Ok(())
}

fn write_report(report: &ExperimentReport, dir: &Path, out: &mut impl Write) -> Result<Outcome> {
    let files = report.write(dir)?;
    writeln!(out, "wrote {} files to {}", files.len(), dir.display())?;
    writeln!(out, "summary {}", dir.join(report.summary_file_name()).display())?;
    Ok(Outcome::Success)
}

fn replay_row(a: ReplayArgs, out: &mut impl Write) -> Result<Outcome> {
    let r = replay(&a.summary, a.row)?;
    let row = &r.replayed.row;
    // wall time is the last column and is left out
    let cells = [
        ("experiment", row.experiment.clone()),
        ("mode", row.key.mode.to_string()),
        ("task_count", row.key.task_count.to_string()),
        ("candidates", row.key.candidates.to_string()),
        ("population", row.key.population.to_string()),
        ("max_gens", row.key.max_gens.to_string()),
        ("seed", row.key.seed.to_string()),
        ("final_best_fitness", fmt_g(row.final_best_fitness)),
        ("final_raw_fitness", fmt_g(row.final_raw_fitness)),
        ("plateau_gen", row.plateau_gen.to_string()),
        ("generations_run", row.generations_run.to_string()),
        ("violation_sum", fmt_g(row.violation_sum)),
        ("feasible", row.feasible.to_string()),
        ("oracle_percent", row.oracle_percent.map_or_else(String::new, fmt_g)),
    ];
    debug_assert_eq!(cells.len() + 1, SUMMARY_HEADER.len());
    for (k, v) in cells {
        writeln!(out, "{k} {v}")?;
    }
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(row.key.trace_file_name(&row.experiment));
        std::fs::write(&path, trace_csv(&r.replayed.trace)?).with_context(|| format!("writing {}", path.display()))?;
        writeln!(out, "wrote {}", path.display())?;
    }
    if !r.matches() {
        bail!("replayed row {} differs from the recorded one", a.row);
    }
    writeln!(out, "match yes")?;
    Ok(Outcome::Success)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
