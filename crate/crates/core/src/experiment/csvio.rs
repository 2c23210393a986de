use std::path::Path;

use super::{RunKey, RunRow};
use crate::error::{Error, Result};
use crate::format::fmt_g;
use crate::ga::TraceRow;

pub const TRACE_HEADER: [&str; 4] = ["gen", "best_fitness", "mean_fitness", "violation_sum"];

pub const SUMMARY_HEADER: [&str; 15] = [
    "experiment",
    "mode",
    "task_count",
    "candidates",
    "population",
    "max_gens",
    "seed",
    "final_best_fitness",
    "final_raw_fitness",
    "plateau_gen",
    "generations_run",
    "violation_sum",
    "feasible",
    "oracle_percent",
    "wall_ms",
];

pub(super) fn row_cells(r: &RunRow) -> Vec<String> {
    vec![
        r.experiment.clone(),
        r.key.mode.to_string(),
        r.key.task_count.to_string(),
        r.key.candidates.to_string(),
        r.key.population.to_string(),
        r.key.max_gens.to_string(),
        r.key.seed.to_string(),
        fmt_g(r.final_best_fitness),
        fmt_g(r.final_raw_fitness),
        r.plateau_gen.to_string(),
        r.generations_run.to_string(),
        fmt_g(r.violation_sum),
        r.feasible.to_string(),
        r.oracle_percent.map(fmt_g).unwrap_or_default(),
        fmt_g(r.wall_ms),
    ]
}

fn to_csv<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("CSV cells are UTF-8"))
}

pub fn summary_csv(rows: &[RunRow]) -> Result<String> {
    to_csv(&SUMMARY_HEADER, rows.iter().map(row_cells))
}

pub fn trace_csv(trace: &[TraceRow]) -> Result<String> {
    to_csv(
        &TRACE_HEADER,
        trace.iter().map(|t| vec![t.gen.to_string(), fmt_g(t.best), fmt_g(t.mean), fmt_g(t.violation_sum)]),
    )
}

pub(super) fn cf_csv(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    to_csv(header, rows)
}

pub fn read_summary(path: &Path) -> Result<Vec<RunRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::InvalidExperiment(format!("{}: {other:?}", path.display())),
    })?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != SUMMARY_HEADER {
        return Err(Error::InvalidExperiment(format!("{} does not have a summary header", path.display())));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let rec = record?;
        let bad = |col: &str| Error::InvalidExperiment(format!("{} row {}: bad {col}", path.display(), i + 1));
        let cell = |k: usize| rec.get(k).unwrap_or("");
        let int = |k: usize| cell(k).parse::<usize>().map_err(|_| bad(SUMMARY_HEADER[k]));
        let real = |k: usize| cell(k).parse::<f64>().map_err(|_| bad(SUMMARY_HEADER[k]));
        rows.push(RunRow {
            experiment: cell(0).to_string(),
            key: RunKey {
                mode: cell(1).parse().map_err(|_| bad("mode"))?,
                task_count: int(2)?,
                candidates: int(3)?,
                population: int(4)?,
                max_gens: int(5)?,
                seed: cell(6).parse().map_err(|_| bad("seed"))?,
            },
            final_best_fitness: real(7)?,
            final_raw_fitness: real(8)?,
            plateau_gen: int(9)?,
            generations_run: int(10)?,
            violation_sum: real(11)?,
            feasible: cell(12).parse().map_err(|_| bad("feasible"))?,
            oracle_percent: if cell(13).is_empty() { None } else { Some(real(13)?) },
            wall_ms: real(14)?,
        });
    }
    Ok(rows)
}
