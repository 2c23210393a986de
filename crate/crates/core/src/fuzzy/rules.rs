use std::path::Path;

use serde::{Deserialize, Serialize};

use super::variable::{LinguisticVariable, Universes, VariableSet, RANK_UNIVERSE};
use crate::error::{Error, Result};
use crate::qos::{Criterion, QosVector};

/// Number of samples of the rank universe used for centroid defuzzification.
pub const RANK_GRID_POINTS: usize = 1001;

pub fn importance_to_cf(grade: u32) -> Result<f64> {
    if grade > 100 {
        return Err(Error::GradeOutOfRange(grade));
    }
    Ok(f64::from(grade) / 100.0)
}

/// How the profile's cost and response-time universes relate to an
/// instance's aggregated values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UniverseScaling {
    /// Universes describe a single service; they are stretched by the
    /// workflow's cost and time multipliers before judging a composition.
    #[default]
    PerTask,
    /// Universes apply to aggregated values as written.
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileFile", into = "ProfileFile")]
pub struct PreferenceProfile {
    grades: [u32; 4],
    pub universes: Universes,
    pub universe_scaling: UniverseScaling,
}

impl Default for PreferenceProfile {
    fn default() -> Self {
        PreferenceProfile::uniform(100).expect("100 is a valid grade")
    }
}

impl PreferenceProfile {
    pub fn uniform(grade: u32) -> Result<Self> {
        Self::from_pairs(Criterion::ALL.map(|c| (c, grade)))
    }

    /// Builds a profile from `(criterion, grade)` pairs in any order;
    /// unlisted criteria get grade 100.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Criterion, u32)>) -> Result<Self> {
        let mut grades = [100; 4];
        for (c, g) in pairs {
            importance_to_cf(g)?;
            grades[c.index()] = g;
        }
        Ok(PreferenceProfile { grades, universes: Universes::default(), universe_scaling: UniverseScaling::default() })
    }

    pub fn grade(&self, criterion: Criterion) -> u32 {
        self.grades[criterion.index()]
    }

    pub fn with_grade(mut self, criterion: Criterion, grade: u32) -> Result<Self> {
        importance_to_cf(grade)?;
        self.grades[criterion.index()] = grade;
        Ok(self)
    }

    pub fn cf(&self, criterion: Criterion) -> f64 {
        f64::from(self.grade(criterion)) / 100.0
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }
}

impl TryFrom<ProfileFile> for PreferenceProfile {
    type Error = Error;

    fn try_from(file: ProfileFile) -> Result<Self> {
        let mut profile = Self::from_pairs([
            (Criterion::Cost, file.cost.grade),
            (Criterion::ResponseTime, file.response_time.grade),
            (Criterion::Availability, file.availability.grade),
            (Criterion::Reliability, file.reliability.grade),
        ])?;
        profile.universes = file.universes;
        profile.universe_scaling = file.universe_scaling;
        super::variable::build_default_variables(&profile.universes)?;
        Ok(profile)
    }
}

impl From<PreferenceProfile> for ProfileFile {
    fn from(p: PreferenceProfile) -> Self {
        let entry = |c| GradeEntry { grade: p.grade(c) };
        ProfileFile {
            cost: entry(Criterion::Cost),
            response_time: entry(Criterion::ResponseTime),
            availability: entry(Criterion::Availability),
            reliability: entry(Criterion::Reliability),
            universes: p.universes,
            universe_scaling: p.universe_scaling,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GradeEntry {
    grade: u32,
}

impl Default for GradeEntry {
    fn default() -> Self {
        GradeEntry { grade: 100 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    #[serde(default)]
    cost: GradeEntry,
    #[serde(default)]
    response_time: GradeEntry,
    #[serde(default)]
    availability: GradeEntry,
    #[serde(default)]
    reliability: GradeEntry,
    #[serde(default)]
    universes: Universes,
    #[serde(default)]
    universe_scaling: UniverseScaling,
}

/// `IF criterion = term THEN rank = consequent`, weighted by `cf`.
/// Terms are indices into the worst-to-best term lists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuzzyRule {
    pub criterion: Criterion,
    pub antecedent: usize,
    pub consequent: usize,
    pub cf: f64,
}

/// Rank-term membership sampled on the defuzzification grid, point-major.
#[derive(Debug, Clone, PartialEq)]
struct RankGrid {
    ys: Vec<f64>,
    mu: Vec<f64>,
    terms: usize,
}

impl RankGrid {
    fn new(rank: &LinguisticVariable) -> Self {
        let ys = rank.sweep(RANK_GRID_POINTS);
        let terms = rank.term_count();
        let mu = ys.iter().flat_map(|&y| rank.terms().iter().map(move |t| t.mf.degree(y))).collect();
        RankGrid { ys, mu, terms }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleBase {
    rules: Vec<FuzzyRule>,
    rank: LinguisticVariable,
    grid: RankGrid,
}

impl RuleBase {
    pub fn from_rules(rules: Vec<FuzzyRule>, rank: LinguisticVariable, variables: &VariableSet) -> Result<Self> {
        for r in &rules {
            if !(0.0..=1.0).contains(&r.cf) {
                return Err(Error::InvalidConfig(format!("rule confidence factor {} outside [0, 1]", r.cf)));
            }
            let var = variables.get(r.criterion);
            if r.antecedent >= var.term_count() {
                return Err(Error::UnknownTerm { criterion: r.criterion, term: format!("#{}", r.antecedent) });
            }
            if r.consequent >= rank.term_count() {
                return Err(Error::InvalidConfig(format!("rule consequent #{} is not a rank term", r.consequent)));
            }
        }
        let grid = RankGrid::new(&rank);
        Ok(RuleBase { rules, rank, grid })
    }

    pub fn rules(&self) -> &[FuzzyRule] {
        &self.rules
    }

    pub fn rank(&self) -> &LinguisticVariable {
        &self.rank
    }

    /// Clip height of each rank term: the strongest `degree × cf` among the
    /// rules concluding it.
    pub fn consequent_heights(&self, variables: &VariableSet, qos: &QosVector) -> Vec<f64> {
        let mut heights = vec![0.0; self.grid.terms];
        for r in &self.rules {
            let var = variables.get(r.criterion);
            let x = var.clamp(qos.get(r.criterion));
            let s = var.terms()[r.antecedent].mf.degree(x) * r.cf;
            if s > heights[r.consequent] {
                heights[r.consequent] = s;
            }
        }
        heights
    }

    /// Centroid of the max-aggregated, clipped rank terms.
    pub fn defuzzify(&self, heights: &[f64]) -> f64 {
        let midpoint = 0.5 * (RANK_UNIVERSE.0 + RANK_UNIVERSE.1);
        if heights.iter().all(|&h| h <= 0.0) {
            return midpoint;
        }
        let t = self.grid.terms;
        let (mut num, mut den) = (0.0, 0.0);
        for (j, &y) in self.grid.ys.iter().enumerate() {
            let row = &self.grid.mu[j * t..(j + 1) * t];
            let m = row.iter().zip(heights).fold(0.0f64, |acc, (&mu, &h)| acc.max(mu.min(h)));
            num += y * m;
            den += m;
        }
        if den > 0.0 {
            num / den
        } else {
            midpoint
        }
    }

    pub fn infer_rank(&self, variables: &VariableSet, qos: &QosVector) -> f64 {
        self.defuzzify(&self.consequent_heights(variables, qos))
    }
}

pub fn generate_rule_base(
    profile: &PreferenceProfile,
    variables: &VariableSet,
    rank: &LinguisticVariable,
) -> Result<RuleBase> {
    let mut rules = Vec::with_capacity(Criterion::ALL.len() * rank.term_count());
    for (c, var) in variables.iter() {
        if var.term_count() != rank.term_count() {
            return Err(Error::TermCountMismatch {
                variable: var.name().to_string(),
                expected: rank.term_count(),
                got: var.term_count(),
            });
        }
        let cf = importance_to_cf(profile.grade(c))?;
        // both lists run worst to best, so the i-th term concludes the i-th rank
        rules.extend((0..var.term_count()).map(|i| FuzzyRule { criterion: c, antecedent: i, consequent: i, cf }));
    }
    RuleBase::from_rules(rules, rank.clone(), variables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::variable::{build_default_variables, rank_variable};

    fn setup(profile: &PreferenceProfile) -> (VariableSet, RuleBase) {
        let vars = build_default_variables(&profile.universes).unwrap();
        let rb = generate_rule_base(profile, &vars, &rank_variable()).unwrap();
        (vars, rb)
    }

    // Independent centroid of a single full rank term on the sampling grid.
    fn grid_centroid_of_term(term: usize) -> f64 {
        let rank = rank_variable();
        let mf = rank.terms()[term].mf;
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..=1000 {
            let y = j as f64 / 10.0;
            num += y * mf.degree(y);
            den += mf.degree(y);
        }
        num / den
    }

    #[test]
    fn grade_conversion() {
        assert_eq!(importance_to_cf(100).unwrap(), 1.0);
        assert_eq!(importance_to_cf(0).unwrap(), 0.0);
        assert_eq!(importance_to_cf(50).unwrap(), 0.5);
        assert!(matches!(importance_to_cf(101), Err(Error::GradeOutOfRange(101))));
    }

    #[test]
    fn twenty_rules_with_one_cf_per_category() {
        let profile = PreferenceProfile::default().with_grade(Criterion::Cost, 80).unwrap();
        let (vars, rb) = setup(&profile);
        assert_eq!(rb.rules().len(), 20);
        let cost: Vec<_> = rb.rules().iter().filter(|r| r.criterion == Criterion::Cost).collect();
        assert_eq!(cost.len(), 5);
        assert!(cost.iter().all(|r| r.cf == 0.8));

        let text = |r: &FuzzyRule| {
            (vars.get(r.criterion).terms()[r.antecedent].name.clone(), rb.rank().terms()[r.consequent].name.clone())
        };
        let av: Vec<_> = rb.rules().iter().filter(|r| r.criterion == Criterion::Availability).map(text).collect();
        assert!(av.contains(&("very high".into(), "very high".into())));
        assert!(av.contains(&("very low".into(), "very low".into())));
        let cost: Vec<_> = rb.rules().iter().filter(|r| r.criterion == Criterion::Cost).map(text).collect();
        assert!(cost.contains(&("very cheap".into(), "very high".into())));
        assert!(cost.contains(&("moderate".into(), "moderate".into())));
        assert!(cost.contains(&("very expensive".into(), "very low".into())));
    }

    #[test]
    fn best_point_gives_very_high_centroid() {
        let oracle = grid_centroid_of_term(4);
        // hand computation: 75 + 0.1 * (Σk²/Σk) over k = 0..250 gives 91.7
        assert!((oracle - 91.7).abs() < 1e-9, "{oracle}");
        let profile = PreferenceProfile::default();
        let (vars, rb) = setup(&profile);
        let rank = rb.infer_rank(&vars, &vars.best_point());
        assert!((rank - oracle).abs() < 1e-9, "{rank} vs {oracle}");
    }

    #[test]
    fn middle_peaks_give_fifty() {
        let (vars, rb) = setup(&PreferenceProfile::default());
        let rank = rb.infer_rank(&vars, &vars.middle_peaks());
        assert!((rank - 50.0).abs() < 1e-9, "{rank}");
    }

    #[test]
    fn all_zero_cf_falls_back_to_midpoint() {
        let (vars, rb) = setup(&PreferenceProfile::uniform(0).unwrap());
        assert_eq!(rb.infer_rank(&vars, &vars.best_point()), 50.0);
        assert_eq!(
            rb.infer_rank(&vars, &QosVector { cost: 77.0, response_time: 3.0, availability: 0.1, reliability: 0.6 }),
            50.0
        );
    }

    #[test]
    fn out_of_universe_inputs_are_clamped() {
        let (vars, rb) = setup(&PreferenceProfile::default());
        let inside = rb.infer_rank(&vars, &vars.best_point());
        let outside = QosVector { cost: 1e6, response_time: -0.0, availability: 1.0, reliability: 1.0 };
        let clamped = QosVector { cost: 100.0, ..outside };
        let r = rb.infer_rank(&vars, &outside);
        assert_eq!(r, rb.infer_rank(&vars, &clamped));
        assert!((0.0..=100.0).contains(&r) && r < inside);
    }

    #[test]
    fn cost_spread_shrinks_with_cf() {
        let mut last = f64::INFINITY;
        for grade in [100, 80, 60, 40, 20] {
            let profile = PreferenceProfile::default().with_grade(Criterion::Cost, grade).unwrap();
            let (vars, rb) = setup(&profile);
            let base = vars.middle_peaks();
            let ranks: Vec<f64> = vars
                .get(Criterion::Cost)
                .sweep(100)
                .into_iter()
                .map(|x| rb.infer_rank(&vars, &QosVector { cost: x, ..base }))
                .collect();
            let spread =
                ranks.iter().cloned().fold(f64::MIN, f64::max) - ranks.iter().cloned().fold(f64::MAX, f64::min);
            assert!(spread < last, "grade {grade}: spread {spread} not below {last}");
            last = spread;
        }
    }

    #[test]
    fn rule_order_does_not_matter() {
        let profile = PreferenceProfile::from_pairs([
            (Criterion::Reliability, 30),
            (Criterion::Cost, 90),
            (Criterion::Availability, 60),
            (Criterion::ResponseTime, 10),
        ])
        .unwrap();
        let (vars, rb) = setup(&profile);
        let mut reversed = rb.rules().to_vec();
        reversed.reverse();
        let rb2 = RuleBase::from_rules(reversed, rank_variable(), &vars).unwrap();
        let q = QosVector { cost: 31.0, response_time: 17.0, availability: 0.83, reliability: 0.64 };
        assert_eq!(rb.infer_rank(&vars, &q).to_bits(), rb2.infer_rank(&vars, &q).to_bits());
    }

    #[test]
    fn profile_json() {
        let text = r#"{"cost": {"grade": 80}, "response_time": {"grade": 50},
            "availability": {"grade": 100}, "reliability": {"grade": 0},
            "universes": {"cost": [0, 200], "response_time": [1, 20]}}"#;
        let p = PreferenceProfile::from_json_str(text).unwrap();
        assert_eq!(p.grade(Criterion::Cost), 80);
        assert_eq!(p.cf(Criterion::ResponseTime), 0.5);
        assert_eq!(p.universes.cost, (0.0, 200.0));
        assert_eq!(p.universe_scaling, UniverseScaling::PerTask);
        assert_eq!(PreferenceProfile::from_json_str(&p.to_json_pretty()).unwrap(), p);

        assert!(PreferenceProfile::from_json_str(r#"{"cost": {"grade": 101}}"#).is_err());
        assert!(PreferenceProfile::from_json_str(r#"{"universes": {"availability": [0, 2]}}"#).is_err());
        assert!(PreferenceProfile::from_json_str(r#"{"universes": {"cost": [5, 1]}}"#).is_err());
    }
}
