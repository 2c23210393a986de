use serde::{Deserialize, Serialize};

/// One candidate index per task, in task order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Genotype(Vec<usize>);

impl Genotype {
    pub fn new(genes: Vec<usize>) -> Self {
        Genotype(genes)
    }

    pub fn genes(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_genes(self) -> Vec<usize> {
        self.0
    }

    pub(crate) fn genes_mut(&mut self) -> &mut [usize] {
        &mut self.0
    }

    /// Whether every gene is in range for the given per-task candidate counts.
    pub fn is_valid_for(&self, candidate_counts: &[usize]) -> bool {
        self.0.len() == candidate_counts.len() && self.0.iter().zip(candidate_counts).all(|(&g, &n)| g < n)
    }
}

impl From<Vec<usize>> for Genotype {
    fn from(genes: Vec<usize>) -> Self {
        Genotype(genes)
    }
}
