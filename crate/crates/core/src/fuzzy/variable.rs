use serde::{Deserialize, Serialize};

use super::membership::MembershipFunction;
use crate::error::{Error, Result};
use crate::qos::{Criterion, Direction};

pub const TERMS_PER_VARIABLE: usize = 5;

/// Rank output universe.
pub const RANK_UNIVERSE: (f64, f64) = (0.0, 100.0);

// Term names in ascending order along each universe.
const COST_TERMS: [&str; 5] = ["very cheap", "cheap", "moderate", "expensive", "very expensive"];
const TIME_TERMS: [&str; 5] = ["very fast", "fast", "moderate", "slow", "very slow"];
const LEVEL_TERMS: [&str; 5] = ["very low", "low", "moderate", "high", "very high"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    pub mf: MembershipFunction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinguisticVariable {
    name: String,
    universe: (f64, f64),
    direction: Direction,
    /// Ordered worst to best with respect to `direction`.
    terms: Vec<Term>,
}

impl LinguisticVariable {
    /// Five-term uniform partition of `[lo, hi]`: shoulders at both ends,
    /// triangular interior terms peaking at the quarter points, neighbours
    /// crossing at 0.5. `ascending_names` label the terms from `lo` to `hi`.
    pub fn uniform(
        name: impl Into<String>,
        lo: f64,
        hi: f64,
        direction: Direction,
        ascending_names: [&str; TERMS_PER_VARIABLE],
    ) -> Result<Self> {
        let name = name.into();
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidUniverse { variable: name, lo, hi });
        }
        let peak = |i: usize| if i == 4 { hi } else { lo + i as f64 * (hi - lo) / 4.0 };
        let mfs = [
            MembershipFunction::trapezoidal(lo, lo, lo, peak(1))?,
            MembershipFunction::triangular(lo, peak(1), peak(2))?,
            MembershipFunction::triangular(peak(1), peak(2), peak(3))?,
            MembershipFunction::triangular(peak(2), peak(3), hi)?,
            MembershipFunction::trapezoidal(peak(3), hi, hi, hi)?,
        ];
        let mut terms: Vec<Term> =
            ascending_names.iter().zip(mfs).map(|(n, mf)| Term { name: n.to_string(), mf }).collect();
        if direction == Direction::LowerIsBetter {
            terms.reverse();
        }
        Ok(LinguisticVariable { name, universe: (lo, hi), direction, terms })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> (f64, f64) {
        self.universe
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Terms ordered worst to best.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Looks a term up by name, ignoring case and treating `_`/`-` as spaces.
    pub fn term_index(&self, name: &str) -> Option<usize> {
        let wanted = normalize(name);
        self.terms.iter().position(|t| normalize(&t.name) == wanted)
    }

    pub fn term(&self, name: &str) -> Option<&Term> {
        self.term_index(name).map(|i| &self.terms[i])
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.universe.0, self.universe.1)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.universe.0 + self.universe.1)
    }

    /// Evenly spaced points spanning the universe, endpoints included.
    pub fn sweep(&self, points: usize) -> Vec<f64> {
        let (lo, hi) = self.universe;
        match points {
            0 => Vec::new(),
            1 => vec![self.midpoint()],
            n => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

fn normalize(s: &str) -> String {
    s.trim().to_ascii_lowercase().replace(['_', '-'], " ")
}

/// Cost and response-time universes; availability and reliability are
/// always `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Universes {
    #[serde(default = "default_cost_universe")]
    pub cost: (f64, f64),
    #[serde(default = "default_time_universe")]
    pub response_time: (f64, f64),
}

fn default_cost_universe() -> (f64, f64) {
    (0.0, 100.0)
}

fn default_time_universe() -> (f64, f64) {
    (0.0, 50.0)
}

impl Default for Universes {
    fn default() -> Self {
        Universes { cost: default_cost_universe(), response_time: default_time_universe() }
    }
}

impl Universes {
    pub fn get(&self, criterion: Criterion) -> (f64, f64) {
        match criterion {
            Criterion::Cost => self.cost,
            Criterion::ResponseTime => self.response_time,
            Criterion::Availability | Criterion::Reliability => (0.0, 1.0),
        }
    }

    pub fn scaled(&self, cost_factor: f64, time_factor: f64) -> Universes {
        Universes {
            cost: (self.cost.0 * cost_factor, self.cost.1 * cost_factor),
            response_time: (self.response_time.0 * time_factor, self.response_time.1 * time_factor),
        }
    }
}

/// One linguistic variable per criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableSet {
    vars: [LinguisticVariable; 4],
}

impl VariableSet {
    pub fn get(&self, criterion: Criterion) -> &LinguisticVariable {
        &self.vars[criterion.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Criterion, &LinguisticVariable)> {
        Criterion::ALL.into_iter().map(move |c| (c, &self.vars[c.index()]))
    }

    /// Peak of each variable's middle term.
    pub fn middle_peaks(&self) -> crate::qos::QosVector {
        let mid = |c: Criterion| self.get(c).terms()[TERMS_PER_VARIABLE / 2].mf.core().0;
        crate::qos::QosVector {
            cost: mid(Criterion::Cost),
            response_time: mid(Criterion::ResponseTime),
            availability: mid(Criterion::Availability),
            reliability: mid(Criterion::Reliability),
        }
    }

    /// The point where every variable's best term has degree 1.
    pub fn best_point(&self) -> crate::qos::QosVector {
        let best = |c: Criterion| {
            let v = self.get(c);
            match v.direction() {
                Direction::LowerIsBetter => v.universe().0,
                Direction::HigherIsBetter => v.universe().1,
            }
        };
        crate::qos::QosVector {
            cost: best(Criterion::Cost),
            response_time: best(Criterion::ResponseTime),
            availability: best(Criterion::Availability),
            reliability: best(Criterion::Reliability),
        }
    }
}

pub fn build_default_variables(universes: &Universes) -> Result<VariableSet> {
    let make = |c: Criterion| {
        let names = match c {
            Criterion::Cost => COST_TERMS,
            Criterion::ResponseTime => TIME_TERMS,
            Criterion::Availability | Criterion::Reliability => LEVEL_TERMS,
        };
        let (lo, hi) = universes.get(c);
        LinguisticVariable::uniform(c.name(), lo, hi, c.direction(), names)
    };
    Ok(VariableSet {
        vars: [
            make(Criterion::Cost)?,
            make(Criterion::ResponseTime)?,
            make(Criterion::Availability)?,
            make(Criterion::Reliability)?,
        ],
    })
}

pub fn rank_variable() -> LinguisticVariable {
    LinguisticVariable::uniform("rank", RANK_UNIVERSE.0, RANK_UNIVERSE.1, Direction::HigherIsBetter, LEVEL_TERMS)
        .expect("rank universe is valid")
}
