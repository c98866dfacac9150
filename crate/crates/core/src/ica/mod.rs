//! Linear ICA over GF(q): the entropy table and lower bound, greedy and
//! block-greedy solvers, the order-permutation baseline and a brute-force
//! oracle for small instances.

mod bloglica;
mod glica;
mod oracle;
mod orderperm;
mod rowdraw;
mod table;

use crate::gf::FieldMatrix;
use crate::pmf::JointPMF;

pub use bloglica::{
    block_sizes, bloglica, bloglica_samples, BloGLICAConfig, BloGLICAResult, BlockStage,
};
pub use glica::{glica, glica_on_table, glica_with};
pub use oracle::{
    brute_force_optimal_linear, invertible_count, BruteForceResult, BRUTE_FORCE_LIMIT,
};
pub use orderperm::{order_permutation, OrderPermResult};
pub use rowdraw::{expected_rows, row_draw_statistics, rows_variance, RowDrawStats};
pub use table::{linear_lower_bound, EntropyTable, TableOptions};

/// Output of a linear ICA solver: `Y = W X`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearICAResult {
    pub w: FieldMatrix,
    /// `sum_j H(Y_j)` in bits.
    pub objective: f64,
    pub component_entropies: Vec<f64>,
    /// Table rows examined before the basis reached rank d (summed over
    /// blocks and iterations for the block solver).
    pub rows_examined: usize,
    /// Set when the solver built the full entropy table.
    pub lower_bound: Option<f64>,
}

/// `sum_j H(X_j) - H(X)`.
pub fn total_correlation(p: &JointPMF) -> f64 {
    p.component_entropies().iter().sum::<f64>() - p.entropy()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::PrimeField;
    use crate::pmf::{bernoulli_product_pmf, sample_uniform_simplex, transform_pmf};
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn total_correlation_examples() {
        let f = PrimeField::BINARY;
        let prod = bernoulli_product_pmf(&[0.1, 0.25, 0.6]).unwrap();
        assert!(total_correlation(&prod).abs() < 1e-12);
        let twin = JointPMF::new(f, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((total_correlation(&twin) - 1.0).abs() < 1e-12);
        let p = JointPMF::new(f, 2, vec![0.4, 0.1, 0.2, 0.3]).unwrap();
        assert!((total_correlation(&p) - 0.124511).abs() < 1e-6);
    }

    fn random_pmf(q: u32, d: usize, seed: u64) -> JointPMF {
        let f = PrimeField::new(q).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = f.checked_pow(d).unwrap() as usize;
        JointPMF::new(f, d, sample_uniform_simplex(m, &mut rng)).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sandwich(seed in any::<u64>(), case in 0usize..4) {
            let (q, d) = [(2, 2), (2, 3), (2, 4), (3, 2)][case];
            let p = random_pmf(q, d, seed);
            let bound = linear_lower_bound(&p).unwrap();
            let best = brute_force_optimal_linear(&p).unwrap();
            let greedy = glica(&p).unwrap();
            prop_assert!(bound <= best.objective + 1e-9);
            prop_assert!(best.objective <= greedy.objective + 1e-9);
        }

        #[test]
        fn glica_is_lossless_and_full_rank(seed in any::<u64>(), case in 0usize..4) {
            let (q, d) = [(2, 5), (3, 3), (5, 2), (2, 7)][case];
            let p = random_pmf(q, d, seed);
            let r = glica(&p).unwrap();
            prop_assert_eq!(r.w.rank(), d);
            prop_assert!(r.rows_examined >= d);
            prop_assert!(r.objective >= r.lower_bound.unwrap() - 1e-9);
            prop_assert!((r.objective - r.component_entropies.iter().sum::<f64>()).abs() < 1e-9);
            let y = transform_pmf(&p, &r.w).unwrap();
            prop_assert!((y.entropy() - p.entropy()).abs() < 1e-9);
        }

        #[test]
        fn glica_objective_survives_monomial_relabeling(seed in any::<u64>(), case in 0usize..3) {
            let (q, d) = [(2, 4), (3, 3), (5, 2)][case];
            let p = random_pmf(q, d, seed);
            let f = p.field();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let perm = crate::pmf::random_assignment(d, &mut rng);
            let mut m = crate::gf::FieldMatrix::permutation(f, &perm).unwrap();
            for i in 0..d {
                let scale = rand::Rng::random_range(&mut rng, 1..f.order()) as u16;
                for j in 0..d {
                    m.set(i, j, f.mul(m.get(i, j), scale));
                }
            }
            let relabeled = transform_pmf(&p, &m).unwrap();
            let a = glica(&p).unwrap();
            let b = glica(&relabeled).unwrap();
            prop_assert!((a.objective - b.objective).abs() < 1e-9);
            prop_assert!((a.lower_bound.unwrap() - b.lower_bound.unwrap()).abs() < 1e-9);
        }

        #[test]
        fn total_correlation_is_nonnegative(seed in any::<u64>(), case in 0usize..3) {
            let (q, d) = [(2, 6), (3, 3), (7, 2)][case];
            prop_assert!(total_correlation(&random_pmf(q, d, seed)) >= -1e-9);
        }
    }
}
