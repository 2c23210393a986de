//! Workflow, candidate-service and QoS types, plus the per-construct
//! aggregation of a composition's quality.
//!
//! A composition is evaluated bottom-up over the workflow tree:
//!
//! | attribute    | Sequence | Switch        | Flow    | Loop(k)      |
//! |--------------|----------|---------------|---------|--------------|
//! | time         | sum      | Σ p_i · T_i   | max     | k-fold sum   |
//! | cost         | sum      | Σ p_i · C_i   | sum     | k-fold sum   |
//! | availability | product  | Σ p_i · A_i   | product | k-fold prod  |
//! | reliability  | product  | Σ p_i · R_i   | product | k-fold prod  |
//!
//! A loop is folded exactly like a sequence of `k` copies of its body, so the
//! two forms produce bit-identical results.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ga::Genotype;

/// Tolerance on the sum of switch branch probabilities.
pub const SWITCH_PROBABILITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Cost,
    ResponseTime,
    Availability,
    Reliability,
}

impl Criterion {
    pub const ALL: [Criterion; 4] =
        [Criterion::Cost, Criterion::ResponseTime, Criterion::Availability, Criterion::Reliability];

    pub fn index(self) -> usize {
        match self {
            Criterion::Cost => 0,
            Criterion::ResponseTime => 1,
            Criterion::Availability => 2,
            Criterion::Reliability => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Cost => "cost",
            Criterion::ResponseTime => "response_time",
            Criterion::Availability => "availability",
            Criterion::Reliability => "reliability",
        }
    }

    /// Which end of the axis the user wants. Fixed by the semantics of the
    /// attribute.
    pub fn direction(self) -> Direction {
        match self {
            Criterion::Cost | Criterion::ResponseTime => Direction::LowerIsBetter,
            Criterion::Availability | Criterion::Reliability => Direction::HigherIsBetter,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "cost" => Ok(Criterion::Cost),
            "response_time" | "time" => Ok(Criterion::ResponseTime),
            "availability" => Ok(Criterion::Availability),
            "reliability" => Ok(Criterion::Reliability),
            other => {
                Err(format!("unknown criterion '{other}' (expected cost, response_time, availability or reliability)"))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    LowerIsBetter,
    HigherIsBetter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QosVector {
    pub cost: f64,
    pub response_time: f64,
    pub availability: f64,
    pub reliability: f64,
}

impl QosVector {
    /// Neutral element of sequential composition.
    pub const SEQUENCE_IDENTITY: QosVector =
        QosVector { cost: 0.0, response_time: 0.0, availability: 1.0, reliability: 1.0 };

    pub fn new(cost: f64, response_time: f64, availability: f64, reliability: f64) -> Result<Self> {
        let q = QosVector { cost, response_time, availability, reliability };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [self.cost, self.response_time, self.availability, self.reliability];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidQos(format!("non-finite attribute in {self:?}")));
        }
        if self.cost < 0.0 || self.response_time < 0.0 {
            return Err(Error::InvalidQos(format!("cost and response time must be non-negative, got {self:?}")));
        }
        if !(0.0..=1.0).contains(&self.availability) || !(0.0..=1.0).contains(&self.reliability) {
            return Err(Error::InvalidQos(format!("availability and reliability must lie in [0, 1], got {self:?}")));
        }
        Ok(())
    }

    pub fn get(&self, criterion: Criterion) -> f64 {
        match criterion {
            Criterion::Cost => self.cost,
            Criterion::ResponseTime => self.response_time,
            Criterion::Availability => self.availability,
            Criterion::Reliability => self.reliability,
        }
    }

    pub fn set(&mut self, criterion: Criterion, value: f64) {
        match criterion {
            Criterion::Cost => self.cost = value,
            Criterion::ResponseTime => self.response_time = value,
            Criterion::Availability => self.availability = value,
            Criterion::Reliability => self.reliability = value,
        }
    }

    fn then(self, next: QosVector) -> QosVector {
        QosVector {
            cost: self.cost + next.cost,
            response_time: self.response_time + next.response_time,
            availability: self.availability * next.availability,
            reliability: self.reliability * next.reliability,
        }
    }

    fn alongside(self, other: QosVector) -> QosVector {
        QosVector {
            cost: self.cost + other.cost,
            response_time: self.response_time.max(other.response_time),
            availability: self.availability * other.availability,
            reliability: self.reliability * other.reliability,
        }
    }

    fn weighted_add(self, p: f64, q: QosVector) -> QosVector {
        QosVector {
            cost: self.cost + p * q.cost,
            response_time: self.response_time + p * q.response_time,
            availability: self.availability + p * q.availability,
            reliability: self.reliability + p * q.reliability,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateService {
    pub id: String,
    #[serde(flatten)]
    pub qos: QosVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub name: String,
    pub candidates: Vec<CandidateService>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub p: f64,
    pub node: WorkflowNode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum WorkflowNode {
    Task { index: usize },
    Sequence { children: Vec<WorkflowNode> },
    Switch { branches: Vec<Branch> },
    Flow { children: Vec<WorkflowNode> },
    Loop { k: u32, child: Box<WorkflowNode> },
}

impl WorkflowNode {
    pub fn task(index: usize) -> Self {
        WorkflowNode::Task { index }
    }

    pub fn sequence(children: Vec<WorkflowNode>) -> Self {
        WorkflowNode::Sequence { children }
    }

    pub fn flow(children: Vec<WorkflowNode>) -> Self {
        WorkflowNode::Flow { children }
    }

    pub fn switch(branches: Vec<(f64, WorkflowNode)>) -> Self {
        WorkflowNode::Switch { branches: branches.into_iter().map(|(p, node)| Branch { p, node }).collect() }
    }

    pub fn looped(k: u32, child: WorkflowNode) -> Self {
        WorkflowNode::Loop { k, child: Box::new(child) }
    }

    /// Folds the tree with `leaf` supplying the QoS of each referenced task.
    pub fn aggregate_with<F>(&self, leaf: &F) -> QosVector
    where
        F: Fn(usize) -> QosVector,
    {
        match self {
            WorkflowNode::Task { index } => leaf(*index),
            WorkflowNode::Sequence { children } => {
                children.iter().fold(QosVector::SEQUENCE_IDENTITY, |acc, c| acc.then(c.aggregate_with(leaf)))
            }
            WorkflowNode::Flow { children } => {
                let mut iter = children.iter();
                let first = iter.next().map(|c| c.aggregate_with(leaf)).unwrap_or(QosVector::SEQUENCE_IDENTITY);
                iter.fold(first, |acc, c| acc.alongside(c.aggregate_with(leaf)))
            }
            WorkflowNode::Switch { branches } => branches
                .iter()
                .fold(QosVector { cost: 0.0, response_time: 0.0, availability: 0.0, reliability: 0.0 }, |acc, b| {
                    acc.weighted_add(b.p, b.node.aggregate_with(leaf))
                }),
            WorkflowNode::Loop { k, child } => {
                let body = child.aggregate_with(leaf);
                (0..*k).fold(QosVector::SEQUENCE_IDENTITY, |acc, _| acc.then(body))
            }
        }
    }

    fn collect_refs(&self, out: &mut Vec<usize>) {
        match self {
            WorkflowNode::Task { index } => out.push(*index),
            WorkflowNode::Sequence { children } | WorkflowNode::Flow { children } => {
                children.iter().for_each(|c| c.collect_refs(out))
            }
            WorkflowNode::Switch { branches } => branches.iter().for_each(|b| b.node.collect_refs(out)),
            WorkflowNode::Loop { child, .. } => child.collect_refs(out),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            WorkflowNode::Task { .. } => 0,
            WorkflowNode::Sequence { children } | WorkflowNode::Flow { children } => {
                1 + children.iter().map(|c| c.depth()).max().unwrap_or(0)
            }
            WorkflowNode::Switch { branches } => 1 + branches.iter().map(|b| b.node.depth()).max().unwrap_or(0),
            WorkflowNode::Loop { child, .. } => 1 + child.depth(),
        }
    }

    fn validate_structure(&self) -> Result<()> {
        match self {
            WorkflowNode::Task { .. } => Ok(()),
            WorkflowNode::Sequence { children } | WorkflowNode::Flow { children } => {
                if children.is_empty() {
                    return Err(Error::InvalidInstance("sequence/flow node without children".into()));
                }
                children.iter().try_for_each(|c| c.validate_structure())
            }
            WorkflowNode::Switch { branches } => {
                if branches.is_empty() {
                    return Err(Error::InvalidInstance("switch node without branches".into()));
                }
                let mut sum = 0.0;
                for b in branches {
                    if !(b.p > 0.0 && b.p <= 1.0) {
                        return Err(Error::InvalidInstance(format!(
                            "switch branch probability {} is outside (0, 1]",
                            b.p
                        )));
                    }
                    sum += b.p;
                    b.node.validate_structure()?;
                }
                if (sum - 1.0).abs() > SWITCH_PROBABILITY_TOLERANCE {
                    return Err(Error::InvalidInstance(format!(
                        "switch branch probabilities sum to {sum}, expected 1"
                    )));
                }
                Ok(())
            }
            WorkflowNode::Loop { k, child } => {
                if *k < 1 {
                    return Err(Error::InvalidInstance("loop count must be at least 1".into()));
                }
                child.validate_structure()
            }
        }
    }
}

/// A constraint as written in an instance file: a criterion and one of its
/// linguistic terms. Bounds are resolved later against the fuzzy variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    pub criterion: Criterion,
    pub term: String,
}

impl FromStr for ConstraintSpec {
    type Err = String;

    /// Parses `criterion=term`, e.g. `cost=cheap`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (c, t) = s.split_once('=').ok_or_else(|| format!("constraint '{s}' must look like criterion=term"))?;
        Ok(ConstraintSpec { criterion: c.parse()?, term: t.trim().to_string() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemInstance {
    pub tasks: Vec<Task>,
    pub workflow: WorkflowNode,
    #[serde(default)]
    pub constraints: Vec<ConstraintSpec>,
}

impl ProblemInstance {
    pub fn new(tasks: Vec<Task>, workflow: WorkflowNode, constraints: Vec<ConstraintSpec>) -> Result<Self> {
        let instance = ProblemInstance { tasks, workflow, constraints };
        instance.validate()?;
        Ok(instance)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tasks.is_empty() {
            return Err(Error::InvalidInstance("instance has no tasks".into()));
        }
        for task in &self.tasks {
            if task.candidates.is_empty() {
                return Err(Error::InvalidInstance(format!("task '{}' has no candidates", task.name)));
            }
            let mut ids: Vec<&str> = task.candidates.iter().map(|c| c.id.as_str()).collect();
            ids.sort_unstable();
            if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidInstance(format!(
                    "task '{}' lists candidate id '{}' twice",
                    task.name, w[0]
                )));
            }
            for c in &task.candidates {
                c.qos
                    .validate()
                    .map_err(|e| Error::InvalidInstance(format!("candidate '{}' of '{}': {e}", c.id, task.name)))?;
            }
        }
        self.workflow.validate_structure()?;

        let mut refs = Vec::new();
        self.workflow.collect_refs(&mut refs);
        let mut seen = vec![0usize; self.tasks.len()];
        for &r in &refs {
            if r >= self.tasks.len() {
                return Err(Error::InvalidInstance(format!(
                    "workflow references task {r}, but there are only {} tasks",
                    self.tasks.len()
                )));
            }
            seen[r] += 1;
        }
        if let Some((i, n)) = seen.iter().enumerate().find(|(_, &n)| n != 1) {
            return Err(Error::InvalidInstance(format!(
                "task {i} is referenced {n} times by the workflow, expected exactly once"
            )));
        }
        Ok(())
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    /// Number of distinct assignments (product of candidate counts), as f64
    /// since realistic sizes overflow every integer type.
    pub fn space_size(&self) -> f64 {
        self.tasks.iter().map(|t| t.candidates.len() as f64).product()
    }

    pub fn check_assignment(&self, assignment: &Genotype) -> Result<()> {
        let genes = assignment.genes();
        if genes.len() != self.tasks.len() {
            return Err(Error::AssignmentLengthMismatch { expected: self.tasks.len(), got: genes.len() });
        }
        for (task, (&g, t)) in genes.iter().zip(&self.tasks).enumerate() {
            if g >= t.candidates.len() {
                return Err(Error::InvalidCandidateIndex { task, index: g, len: t.candidates.len() });
            }
        }
        Ok(())
    }

    /// Multiplicative factor a constant per-task value picks up through the
    /// workflow, for cost and for response time. Both are positively
    /// homogeneous: aggregating all-`v` leaves yields `v * factor`.
    pub fn scale_factors(&self) -> (f64, f64) {
        let ones = QosVector { cost: 1.0, response_time: 1.0, availability: 1.0, reliability: 1.0 };
        let q = self.workflow.aggregate_with(&|_| ones);
        (q.cost, q.response_time)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let instance: ProblemInstance = serde_json::from_str(s)?;
        instance.validate()?;
        Ok(instance)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_pretty()).map_err(|e| Error::io(path, e))
    }
}

/// Aggregated QoS of the composition selected by `assignment`.
pub fn aggregate_qos(workflow: &WorkflowNode, tasks: &[Task], assignment: &Genotype) -> Result<QosVector> {
    let genes = assignment.genes();
    if genes.len() != tasks.len() {
        return Err(Error::AssignmentLengthMismatch { expected: tasks.len(), got: genes.len() });
    }
    for (task, (&g, t)) in genes.iter().zip(tasks).enumerate() {
        if g >= t.candidates.len() {
            return Err(Error::InvalidCandidateIndex { task, index: g, len: t.candidates.len() });
        }
    }
    Ok(workflow.aggregate_with(&|i| tasks[i].candidates[genes[i]].qos))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn task(name: &str, qos: QosVector) -> Task {
        Task { name: name.into(), candidates: vec![CandidateService { id: format!("{name}-0"), qos }] }
    }

    fn two_tasks() -> Vec<Task> {
        vec![
            task("a", QosVector::new(10.0, 5.0, 0.9, 0.95).unwrap()),
            task("b", QosVector::new(20.0, 7.0, 0.8, 0.9).unwrap()),
        ]
    }

    fn close(a: QosVector, b: QosVector) -> bool {
        Criterion::ALL.iter().all(|&c| (a.get(c) - b.get(c)).abs() < 1e-12)
    }

    #[test]
    fn single_task_is_identity() {
        let tasks = two_tasks();
        let q = aggregate_qos(&WorkflowNode::task(0), &tasks[..1], &Genotype::new(vec![0])).unwrap();
        assert_eq!(q, tasks[0].candidates[0].qos);
    }

    #[test]
    fn table_constructs() {
        let tasks = two_tasks();
        let g = Genotype::new(vec![0, 0]);
        let both = || vec![WorkflowNode::task(0), WorkflowNode::task(1)];

        let seq = aggregate_qos(&WorkflowNode::sequence(both()), &tasks, &g).unwrap();
        assert!(close(seq, QosVector { cost: 30.0, response_time: 12.0, availability: 0.72, reliability: 0.855 }));

        let flow = aggregate_qos(&WorkflowNode::flow(both()), &tasks, &g).unwrap();
        assert!(close(flow, QosVector { cost: 30.0, response_time: 7.0, availability: 0.72, reliability: 0.855 }));

        let sw = WorkflowNode::switch(vec![(0.5, WorkflowNode::task(0)), (0.5, WorkflowNode::task(1))]);
        let sw = aggregate_qos(&sw, &tasks, &g).unwrap();
        assert!(close(sw, QosVector { cost: 15.0, response_time: 6.0, availability: 0.85, reliability: 0.925 }));

        let lp = aggregate_qos(&WorkflowNode::looped(3, WorkflowNode::task(0)), &tasks[..1], &Genotype::new(vec![0]))
            .unwrap();
        assert!(close(lp, QosVector { cost: 30.0, response_time: 15.0, availability: 0.729, reliability: 0.857375 }));
    }

    #[test]
    fn assignment_errors() {
        let tasks = two_tasks();
        let wf = WorkflowNode::sequence(vec![WorkflowNode::task(0), WorkflowNode::task(1)]);
        assert!(matches!(
            aggregate_qos(&wf, &tasks, &Genotype::new(vec![0])),
            Err(Error::AssignmentLengthMismatch { expected: 2, got: 1 })
        ));
        assert!(matches!(
            aggregate_qos(&wf, &tasks, &Genotype::new(vec![0, 1])),
            Err(Error::InvalidCandidateIndex { task: 1, index: 1, len: 1 })
        ));
    }

    #[test]
    fn rejects_bad_switch_probabilities() {
        let tasks = two_tasks();
        let wf = WorkflowNode::switch(vec![(0.5, WorkflowNode::task(0)), (0.49, WorkflowNode::task(1))]);
        let err = ProblemInstance::new(tasks.clone(), wf, vec![]).unwrap_err();
        assert!(err.to_string().contains("sum to"), "{err}");

        let wf = WorkflowNode::switch(vec![(0.5 + 5e-10, WorkflowNode::task(0)), (0.5, WorkflowNode::task(1))]);
        assert!(ProblemInstance::new(tasks, wf, vec![]).is_ok());
    }

    #[test]
    fn rejects_bad_references() {
        let tasks = two_tasks();
        let twice = WorkflowNode::sequence(vec![WorkflowNode::task(0), WorkflowNode::task(0)]);
        assert!(ProblemInstance::new(tasks.clone(), twice, vec![]).is_err());
        let missing = WorkflowNode::sequence(vec![WorkflowNode::task(0)]);
        assert!(ProblemInstance::new(tasks.clone(), missing, vec![]).is_err());
        let out_of_range = WorkflowNode::sequence(vec![WorkflowNode::task(0), WorkflowNode::task(2)]);
        assert!(ProblemInstance::new(tasks.clone(), out_of_range, vec![]).is_err());
        let zero_loop =
            WorkflowNode::sequence(vec![WorkflowNode::task(0), WorkflowNode::looped(0, WorkflowNode::task(1))]);
        assert!(ProblemInstance::new(tasks, zero_loop, vec![]).is_err());
    }

    #[test]
    fn rejects_bad_qos() {
        assert!(QosVector::new(-1.0, 0.0, 0.5, 0.5).is_err());
        assert!(QosVector::new(1.0, 0.0, 1.5, 0.5).is_err());
        assert!(QosVector::new(1.0, f64::NAN, 0.5, 0.5).is_err());
    }

    #[test]
    fn json_layout() {
        let text = r#"{
            "tasks": [
                {"name": "a", "candidates": [{"id": "a1", "cost": 10, "response_time": 5, "availability": 0.9, "reliability": 0.95}]},
                {"name": "b", "candidates": [{"id": "b1", "cost": 20, "response_time": 7, "availability": 0.8, "reliability": 0.9}]}
            ],
            "workflow": {"type": "sequence", "children": [
                {"type": "loop", "k": 2, "child": {"type": "task", "index": 0}},
                {"type": "switch", "branches": [{"p": 1.0, "node": {"type": "task", "index": 1}}]}
            ]},
            "constraints": [{"criterion": "cost", "term": "cheap"}]
        }"#;
        let inst = ProblemInstance::from_json_str(text).unwrap();
        assert_eq!(inst.constraints[0].criterion, Criterion::Cost);
        let again = ProblemInstance::from_json_str(&inst.to_json_pretty()).unwrap();
        assert_eq!(inst, again);
        assert_eq!(inst.scale_factors(), (3.0, 3.0));
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"tasks": [], "workflow": {"type": "task", "index": 0}, "extra": 1}"#;
        assert!(ProblemInstance::from_json_str(text).is_err());
    }

    #[test]
    fn constraint_spec_parses() {
        let c: ConstraintSpec = "response-time=moderate".parse().unwrap();
        assert_eq!(c.criterion, Criterion::ResponseTime);
        assert_eq!(c.term, "moderate");
        assert!("cost".parse::<ConstraintSpec>().is_err());
    }
}
