//! Seeded synthetic problem instances.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{build_default_variables, Universes};
use crate::qos::{CandidateService, ConstraintSpec, Criterion, ProblemInstance, QosVector, Task, WorkflowNode};
use crate::rng::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WorkflowShape {
    SequenceOnly,
    Mixed { switch_prob: f64, flow_prob: f64, loop_prob: f64, max_depth: usize, max_loop_k: u32 },
}

impl WorkflowShape {
    /// A moderately nested mix of every construct.
    pub fn default_mixed() -> Self {
        WorkflowShape::Mixed { switch_prob: 0.25, flow_prob: 0.25, loop_prob: 0.15, max_depth: 3, max_loop_k: 3 }
    }
}

/// Uniform sampling interval per criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QosRanges {
    pub cost: (f64, f64),
    pub response_time: (f64, f64),
    pub availability: (f64, f64),
    pub reliability: (f64, f64),
}

impl Default for QosRanges {
    fn default() -> Self {
        QosRanges { cost: (5.0, 95.0), response_time: (2.0, 48.0), availability: (0.7, 1.0), reliability: (0.7, 1.0) }
    }
}

impl QosRanges {
    pub fn get(&self, c: Criterion) -> (f64, f64) {
        match c {
            Criterion::Cost => self.cost,
            Criterion::ResponseTime => self.response_time,
            Criterion::Availability => self.availability,
            Criterion::Reliability => self.reliability,
        }
    }

    pub fn set(&mut self, c: Criterion, range: (f64, f64)) {
        match c {
            Criterion::Cost => self.cost = range,
            Criterion::ResponseTime => self.response_time = range,
            Criterion::Availability => self.availability = range,
            Criterion::Reliability => self.reliability = range,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadSpec {
    pub task_count: usize,
    pub candidates_per_task: usize,
    #[serde(default = "sequence_only")]
    pub shape: WorkflowShape,
    #[serde(default)]
    pub qos_ranges: QosRanges,
    /// Per-task universes the sampling ranges must lie in.
    #[serde(default)]
    pub universes: Universes,
    #[serde(default)]
    pub constraints: Vec<ConstraintSpec>,
    #[serde(default)]
    pub rng_seed: u64,
}

fn sequence_only() -> WorkflowShape {
    WorkflowShape::SequenceOnly
}

impl WorkloadSpec {
    pub fn new(task_count: usize, candidates_per_task: usize, rng_seed: u64) -> Self {
        WorkloadSpec {
            task_count,
            candidates_per_task,
            shape: WorkflowShape::SequenceOnly,
            qos_ranges: QosRanges::default(),
            universes: Universes::default(),
            constraints: Vec::new(),
            rng_seed,
        }
    }

    pub fn with_shape(mut self, shape: WorkflowShape) -> Self {
        self.shape = shape;
        self
    }

    pub fn with_constraints(mut self, constraints: Vec<ConstraintSpec>) -> Self {
        self.constraints = constraints;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.task_count == 0 {
            return Err(Error::SpecInvalid("task_count must be positive".into()));
        }
        if self.candidates_per_task == 0 {
            return Err(Error::SpecInvalid("candidates_per_task must be positive".into()));
        }
        for c in Criterion::ALL {
            let (lo, hi) = self.qos_ranges.get(c);
            let (ulo, uhi) = self.universes.get(c);
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::SpecInvalid(format!("{c} range [{lo}, {hi}] is not an interval")));
            }
            if lo < ulo || hi > uhi {
                return Err(Error::SpecInvalid(format!("{c} range [{lo}, {hi}] leaves the universe [{ulo}, {uhi}]")));
            }
        }
        if let WorkflowShape::Mixed { switch_prob, flow_prob, loop_prob, max_loop_k, .. } = self.shape {
            let probs = [switch_prob, flow_prob, loop_prob];
            if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::SpecInvalid(format!("shape probabilities {probs:?} must lie in [0, 1]")));
            }
            if probs.iter().sum::<f64>() > 1.0 + 1e-12 {
                return Err(Error::SpecInvalid(format!("shape probabilities {probs:?} sum above 1")));
            }
            if max_loop_k == 0 {
                return Err(Error::SpecInvalid("max_loop_k must be at least 1".into()));
            }
        }
        let vars = build_default_variables(&self.universes)?;
        for c in &self.constraints {
            if vars.get(c.criterion).term_index(&c.term).is_none() {
                return Err(Error::UnknownTerm { criterion: c.criterion, term: c.term.clone() });
            }
        }
        Ok(())
    }

    /// Narrows each constrained criterion's sampling range to the support of
    /// its constraint term on the per-task universe.
    ///
    /// Aggregated cost and response time are monotone and positively
    /// homogeneous in the leaves, so under per-task universe scaling every
    /// assignment then meets cost and response-time constraints. Products of
    /// availabilities or reliabilities shrink with the task count, so
    /// constraints on those are only guaranteed when the term's support
    /// starts at 0.
    pub fn restrict_to_constraints(mut self) -> Result<Self> {
        let vars = build_default_variables(&self.universes)?;
        for c in &self.constraints {
            let term = vars
                .get(c.criterion)
                .term(&c.term)
                .ok_or_else(|| Error::UnknownTerm { criterion: c.criterion, term: c.term.clone() })?;
            let (slo, shi) = term.mf.support();
            let (lo, hi) = self.qos_ranges.get(c.criterion);
            let (nlo, nhi) = (lo.max(slo), hi.min(shi));
            if nlo > nhi {
                return Err(Error::SpecInvalid(format!(
                    "{} range [{lo}, {hi}] does not meet the support [{slo}, {shi}] of '{}'",
                    c.criterion, c.term
                )));
            }
            self.qos_ranges.set(c.criterion, (nlo, nhi));
        }
        Ok(self)
    }
}

pub fn generate_instance(spec: &WorkloadSpec) -> Result<ProblemInstance> {
    spec.validate()?;
    let mut r = rng::seeded(spec.rng_seed);
    let width = spec.candidates_per_task.to_string().len();
    let tasks: Vec<Task> = (0..spec.task_count)
        .map(|t| Task {
            name: format!("t{t}"),
            candidates: (0..spec.candidates_per_task)
                .map(|k| CandidateService {
                    id: format!("t{t}-s{k:0width$}"),
                    qos: sample_qos(&spec.qos_ranges, &mut r),
                })
                .collect(),
        })
        .collect();
    let indices: Vec<usize> = (0..spec.task_count).collect();
    let workflow = match spec.shape {
        WorkflowShape::SequenceOnly => WorkflowNode::sequence(indices.into_iter().map(WorkflowNode::task).collect()),
        WorkflowShape::Mixed { .. } => {
            let node = build_mixed(&indices, 0, &spec.shape, &mut r);
            match node {
                WorkflowNode::Task { .. } => WorkflowNode::sequence(vec![node]),
                other => other,
            }
        }
    };
    ProblemInstance::new(tasks, workflow, spec.constraints.clone())
}

fn sample_qos(ranges: &QosRanges, r: &mut Rng) -> QosVector {
    let mut draw = |(lo, hi): (f64, f64)| if lo == hi { lo } else { r.gen_range(lo..=hi) };
    QosVector {
        cost: draw(ranges.cost),
        response_time: draw(ranges.response_time),
        availability: draw(ranges.availability),
        reliability: draw(ranges.reliability),
    }
}

// Covers `tasks` (contiguous, in order) with one subtree whose depth is at
// most `max_depth - depth` levels of constructs.
fn build_mixed(tasks: &[usize], depth: usize, shape: &WorkflowShape, r: &mut Rng) -> WorkflowNode {
    let WorkflowShape::Mixed { switch_prob, flow_prob, loop_prob, max_depth, max_loop_k } = *shape else {
        unreachable!("mixed builder called for a flat shape")
    };
    let room = depth < max_depth;
    if room && r.gen_bool(loop_prob) {
        let k = r.gen_range(1..=max_loop_k);
        return WorkflowNode::looped(k, build_mixed(tasks, depth + 1, shape, r));
    }
    if tasks.len() == 1 {
        return WorkflowNode::task(tasks[0]);
    }
    if !room {
        return WorkflowNode::sequence(tasks.iter().map(|&t| WorkflowNode::task(t)).collect());
    }
    let groups = split(tasks, r);
    let u: f64 = r.gen();
    let children = |r: &mut Rng| groups.iter().map(|g| build_mixed(g, depth + 1, shape, r)).collect::<Vec<_>>();
    if u < switch_prob {
        let kids = children(r);
        let raw: Vec<f64> = kids.iter().map(|_| r.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut ps: Vec<f64> = raw.iter().map(|w| w / total).collect();
        // force an exact unit sum
        let rest: f64 = ps[1..].iter().sum();
        ps[0] = 1.0 - rest;
        WorkflowNode::switch(ps.into_iter().zip(kids).collect())
    } else if u < switch_prob + flow_prob {
        WorkflowNode::flow(children(r))
    } else {
        WorkflowNode::sequence(children(r))
    }
}

// Splits into 2..=4 non-empty contiguous groups.
fn split<'a>(tasks: &'a [usize], r: &mut Rng) -> Vec<&'a [usize]> {
    let parts = r.gen_range(2..=tasks.len().min(4));
    let mut cuts = rand::seq::index::sample(r, tasks.len() - 1, parts - 1).into_vec();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for c in cuts {
        out.push(&tasks[start..c + 1]);
        start = c + 1;
    }
    out.push(&tasks[start..]);
    out
}
