use super::config::{FitnessMode, GaConfig};
use super::genotype::Genotype;
use crate::error::{Error, Result};
use crate::fuzzy::{
    build_default_variables, generate_rule_base, rank_variable, PreferenceProfile, RuleBase, UniverseScaling,
    VariableSet, RANK_UNIVERSE,
};
use crate::qos::{CandidateService, ConstraintSpec, Criterion, Direction, ProblemInstance, QosVector};

/// A linguistic constraint resolved to the crisp support of its term.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyConstraint {
    pub criterion: Criterion,
    pub term: String,
    pub q_min: f64,
    pub q_max: f64,
}

impl FuzzyConstraint {
    pub fn resolve(spec: &ConstraintSpec, variables: &VariableSet) -> Result<Self> {
        let var = variables.get(spec.criterion);
        let term = var
            .term(&spec.term)
            .ok_or_else(|| Error::UnknownTerm { criterion: spec.criterion, term: spec.term.clone() })?;
        let (q_min, q_max) = term.mf.support();
        Self::with_bounds(spec.criterion, term.name.clone(), q_min, q_max)
    }

    pub fn with_bounds(criterion: Criterion, term: impl Into<String>, q_min: f64, q_max: f64) -> Result<Self> {
        let term = term.into();
        if q_min.partial_cmp(&q_max) != Some(std::cmp::Ordering::Less) {
            return Err(Error::DegenerateConstraint { criterion, term, q_min, q_max });
        }
        Ok(FuzzyConstraint { criterion, term, q_min, q_max })
    }

    pub fn width(&self) -> f64 {
        self.q_max - self.q_min
    }

    pub fn delta_q(&self, q: f64) -> f64 {
        delta_q(q, self)
    }
}

/// Distance of `q` outside the constraint interval; zero inside it.
pub fn delta_q(q: f64, constraint: &FuzzyConstraint) -> f64 {
    if q > constraint.q_max {
        q - constraint.q_max
    } else if q < constraint.q_min {
        constraint.q_min - q
    } else {
        0.0
    }
}

/// Everything the optimizer needs to know about one assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub qos: QosVector,
    pub raw: f64,
    /// ΔQ per constraint, in constraint order.
    pub deltas: Vec<f64>,
    /// Σ (ΔQ / (q_max − q_min))².
    pub penalty: f64,
}

impl Evaluation {
    pub fn penalized(&self, weight: f64) -> f64 {
        self.raw - weight * self.penalty
    }

    pub fn is_feasible(&self) -> bool {
        self.deltas.iter().all(|&d| d == 0.0)
    }

    pub fn violation_sum(&self) -> f64 {
        self.deltas.iter().sum()
    }
}

/// An instance bound to a user profile: fuzzy variables for single services
/// and for aggregated compositions, the generated rule base and the resolved
/// constraints.
#[derive(Debug, Clone)]
pub struct CompositionProblem {
    instance: ProblemInstance,
    profile: PreferenceProfile,
    task_variables: VariableSet,
    aggregate_variables: VariableSet,
    rule_base: RuleBase,
    constraints: Vec<FuzzyConstraint>,
    mode: FitnessMode,
    saw_weights: [f64; 4],
    candidate_counts: Vec<usize>,
}

impl CompositionProblem {
    pub fn new(instance: ProblemInstance, profile: &PreferenceProfile, mode: FitnessMode) -> Result<Self> {
        instance.validate()?;
        let task_variables = build_default_variables(&profile.universes)?;
        let aggregate_variables = match profile.universe_scaling {
            UniverseScaling::Absolute => task_variables.clone(),
            UniverseScaling::PerTask => {
                let (cost_factor, time_factor) = instance.scale_factors();
                build_default_variables(&profile.universes.scaled(cost_factor, time_factor))?
            }
        };
        let rule_base = generate_rule_base(profile, &task_variables, &rank_variable())?;
        let constraints = instance
            .constraints
            .iter()
            .map(|c| FuzzyConstraint::resolve(c, &aggregate_variables))
            .collect::<Result<Vec<_>>>()?;

        let total: u32 = Criterion::ALL.iter().map(|&c| profile.grade(c)).sum();
        let saw_weights =
            Criterion::ALL.map(|c| if total == 0 { 0.25 } else { f64::from(profile.grade(c)) / f64::from(total) });
        let candidate_counts = instance.tasks.iter().map(|t| t.candidates.len()).collect();

        Ok(CompositionProblem {
            instance,
            profile: profile.clone(),
            task_variables,
            aggregate_variables,
            rule_base,
            constraints,
            mode,
            saw_weights,
            candidate_counts,
        })
    }

    pub fn instance(&self) -> &ProblemInstance {
        &self.instance
    }

    pub fn profile(&self) -> &PreferenceProfile {
        &self.profile
    }

    pub fn rule_base(&self) -> &RuleBase {
        &self.rule_base
    }

    /// Variables judging a single candidate service.
    pub fn task_variables(&self) -> &VariableSet {
        &self.task_variables
    }

    /// Variables judging an aggregated composition.
    pub fn aggregate_variables(&self) -> &VariableSet {
        &self.aggregate_variables
    }

    pub fn constraints(&self) -> &[FuzzyConstraint] {
        &self.constraints
    }

    pub fn mode(&self) -> FitnessMode {
        self.mode
    }

    pub fn candidate_counts(&self) -> &[usize] {
        &self.candidate_counts
    }

    /// Raw fitness in [0, 1] of a QoS vector judged on `variables`.
    pub fn score(&self, qos: &QosVector, variables: &VariableSet) -> f64 {
        match self.mode {
            FitnessMode::Fuzzy => self.rule_base.infer_rank(variables, qos) / RANK_UNIVERSE.1,
            FitnessMode::WeightedSum => {
                Criterion::ALL.iter().map(|&c| self.saw_weights[c.index()] * normalized(qos.get(c), variables, c)).sum()
            }
        }
    }

    pub fn evaluate(&self, assignment: &Genotype) -> Result<Evaluation> {
        self.instance.check_assignment(assignment)?;
        Ok(self.evaluate_unchecked(assignment))
    }

    pub(crate) fn evaluate_unchecked(&self, assignment: &Genotype) -> Evaluation {
        let genes = assignment.genes();
        let tasks = &self.instance.tasks;
        let qos = self.instance.workflow.aggregate_with(&|i| tasks[i].candidates[genes[i]].qos);
        self.evaluate_qos(qos)
    }

    pub fn evaluate_qos(&self, qos: QosVector) -> Evaluation {
        let raw = self.score(&qos, &self.aggregate_variables);
        let deltas: Vec<f64> = self.constraints.iter().map(|c| c.delta_q(qos.get(c.criterion))).collect();
        let penalty = self
            .constraints
            .iter()
            .zip(&deltas)
            .map(|(c, d)| {
                let r = d / c.width();
                r * r
            })
            .sum();
        Evaluation { qos, raw, deltas, penalty }
    }

    pub fn raw_fitness(&self, assignment: &Genotype) -> Result<f64> {
        Ok(self.evaluate(assignment)?.raw)
    }

    pub fn penalized_fitness(&self, assignment: &Genotype, config: &GaConfig, gen: usize) -> Result<f64> {
        Ok(self.evaluate(assignment)?.penalized(config.penalty_weight_at(gen)))
    }

    /// Score of a single candidate on its own, used to bias initialization.
    pub fn local_score(&self, candidate: &CandidateService) -> f64 {
        self.score(&candidate.qos, &self.task_variables)
    }

    pub fn local_scores(&self) -> Vec<Vec<f64>> {
        self.instance.tasks.iter().map(|t| t.candidates.iter().map(|c| self.local_score(c)).collect()).collect()
    }
}

// Linear map of the clamped value onto [0, 1], best end at 1.
fn normalized(value: f64, variables: &VariableSet, criterion: Criterion) -> f64 {
    let var = variables.get(criterion);
    let (lo, hi) = var.universe();
    let t = (var.clamp(value) - lo) / (hi - lo);
    match var.direction() {
        Direction::LowerIsBetter => 1.0 - t,
        Direction::HigherIsBetter => t,
    }
}
