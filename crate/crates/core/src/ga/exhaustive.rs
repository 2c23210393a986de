use super::fitness::{CompositionProblem, Evaluation};
use super::genotype::Genotype;
use crate::error::{Error, Result};

/// Largest search space [`exhaustive_optimum`] will enumerate.
pub const EXHAUSTIVE_LIMIT: f64 = 4_000_000.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub genotype: Genotype,
    pub fitness: f64,
    pub evaluation: Evaluation,
}

/// Visits every assignment in lexicographic order.
pub fn for_each_assignment(candidate_counts: &[usize], mut visit: impl FnMut(&Genotype)) {
    if candidate_counts.contains(&0) {
        return;
    }
    let mut g = Genotype::new(vec![0; candidate_counts.len()]);
    loop {
        visit(&g);
        let genes = g.genes_mut();
        let mut pos = genes.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            genes[pos] += 1;
            if genes[pos] < candidate_counts[pos] {
                break;
            }
            genes[pos] = 0;
        }
    }
}

/// Best assignment under the fitness `raw − weight · penalty`, by brute force.
pub fn exhaustive_optimum(problem: &CompositionProblem, weight: f64) -> Result<Optimum> {
    let space = problem.instance().space_size();
    if space > EXHAUSTIVE_LIMIT {
        return Err(Error::InvalidExperiment(format!(
            "search space of {space:e} assignments is too large to enumerate"
        )));
    }
    let mut best: Option<Optimum> = None;
    for_each_assignment(problem.candidate_counts(), |g| {
        let evaluation = problem.evaluate_unchecked(g);
        let fitness = evaluation.penalized(weight);
        if best.as_ref().is_none_or(|b| fitness > b.fitness) {
            best = Some(Optimum { genotype: g.clone(), fitness, evaluation });
        }
    });
    Ok(best.expect("every task has a candidate"))
}
