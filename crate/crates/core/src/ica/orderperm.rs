use crate::ica::total_correlation;
use crate::pmf::JointPMF;

#[derive(Clone, Debug, PartialEq)]
pub struct OrderPermResult {
    /// `assignment[k]` is the word that symbol `k` is mapped to.
    pub assignment: Vec<usize>,
    /// `sum_j H(Y_j)` in bits.
    pub objective: f64,
    pub total_correlation: f64,
}

/// Maps the i-th smallest probability to word i (stable on ties).
pub fn order_permutation(p: &JointPMF) -> OrderPermResult {
    let probs = p.probs();
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[a].total_cmp(&probs[b]));
    let mut assignment = vec![0; probs.len()];
    let mut mapped = vec![0.0; probs.len()];
    for (word, &symbol) in order.iter().enumerate() {
        assignment[symbol] = word;
        mapped[word] = probs[symbol];
    }
    let y = JointPMF::from_parts_unchecked(p.field(), p.dim(), mapped);
    let objective = y.component_entropies().iter().sum();
    OrderPermResult {
        assignment,
        objective,
        total_correlation: total_correlation(&y),
    }
}
