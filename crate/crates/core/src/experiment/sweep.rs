use std::path::{Path, PathBuf};

use super::csvio::cf_csv;
use crate::error::{Error, Result};
use crate::format::fmt_g;
use crate::fuzzy::{
    build_default_variables, generate_rule_base, rank_variable, FuzzyRule, PreferenceProfile, RuleBase,
};
use crate::qos::Criterion;

pub const CF_SWEEP_HEADER: [&str; 5] = ["criterion", "cf", "min_rank", "max_rank", "spread"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfSweepRow {
    pub criterion: Criterion,
    pub cf: f64,
    pub min_rank: f64,
    pub max_rank: f64,
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CfSweepReport {
    pub rows: Vec<CfSweepRow>,
}

impl CfSweepReport {
    pub const FILE_NAME: &'static str = "summary_sweep-cf.csv";

    /// Whether the spread never shrinks as cf grows, per criterion.
    pub fn spread_is_monotone(&self) -> bool {
        Criterion::ALL.iter().all(|&c| {
            let mut rows: Vec<&CfSweepRow> = self.rows.iter().filter(|r| r.criterion == c).collect();
            rows.sort_by(|a, b| a.cf.total_cmp(&b.cf));
            rows.windows(2).all(|w| w[1].spread >= w[0].spread)
        })
    }

    pub fn to_csv(&self) -> Result<String> {
        let rows = self
            .rows
            .iter()
            .map(|r| vec![r.criterion.to_string(), fmt_g(r.cf), fmt_g(r.min_rank), fmt_g(r.max_rank), fmt_g(r.spread)])
            .collect();
        cf_csv(&CF_SWEEP_HEADER, rows)
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(Self::FILE_NAME);
        std::fs::write(&path, self.to_csv()?).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// For each criterion and cf value: sweeps that criterion across its
/// universe with the other inputs at their middle-term peaks, every other
/// criterion at cf 1, and records the range of the inferred rank.
/// `profile_base` supplies the universes.
pub fn run_cf_sweep(
    profile_base: &PreferenceProfile,
    criteria: &[Criterion],
    cf_values: &[f64],
    sweep_points: usize,
) -> Result<CfSweepReport> {
    if let Some(cf) = cf_values.iter().find(|cf| !(0.0..=1.0).contains(*cf)) {
        return Err(Error::InvalidExperiment(format!("cf {cf} outside [0, 1]")));
    }
    if sweep_points < 2 {
        return Err(Error::InvalidExperiment("a sweep needs at least 2 points".into()));
    }
    let variables = build_default_variables(&profile_base.universes)?;
    let mut full = PreferenceProfile::default();
    full.universes = profile_base.universes;
    let base = generate_rule_base(&full, &variables, &rank_variable())?;
    let mut rows = Vec::new();
    for &criterion in criteria {
        for &cf in cf_values {
            let rules = base
                .rules()
                .iter()
                .map(|r| FuzzyRule { cf: if r.criterion == criterion { cf } else { r.cf }, ..*r })
                .collect();
            let rb = RuleBase::from_rules(rules, rank_variable(), &variables)?;
            let mut qos = variables.middle_peaks();
            let ranks: Vec<f64> = variables
                .get(criterion)
                .sweep(sweep_points)
                .into_iter()
                .map(|x| {
                    qos.set(criterion, x);
                    rb.infer_rank(&variables, &qos)
                })
                .collect();
            let min_rank = ranks.iter().copied().fold(f64::INFINITY, f64::min);
            let max_rank = ranks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            rows.push(CfSweepRow { criterion, cf, min_rank, max_rank, spread: max_rank - min_rank });
        }
    }
    Ok(CfSweepReport { rows })
}
