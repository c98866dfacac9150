use crate::error::{Error, Result};
use crate::gf::{Basis, FieldMatrix, FieldVector, PrimeField};
use crate::pmf::{combination_marginal, JointPMF};

/// Largest number of invertible matrices the oracle will enumerate.
pub const BRUTE_FORCE_LIMIT: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct BruteForceResult {
    pub w: FieldMatrix,
    pub objective: f64,
    /// Number of invertible matrices enumerated.
    pub candidates: u64,
}

/// `prod_k (q^d - q^k)`, or `None` on overflow.
pub fn invertible_count(field: PrimeField, d: usize) -> Option<u64> {
    let total = field.checked_pow(d)?;
    (0..d).try_fold(1u64, |acc, k| {
        acc.checked_mul(total - field.checked_pow(k)?)
    })
}

/// Exhaustive minimum of `sum_j H((W X)_j)` over invertible W.
///
/// Matrices are visited in lexicographic order and only a strictly better
/// objective replaces the incumbent, so the lexicographically smallest
/// minimizer is returned. Row entropies come from direct marginalization.
pub fn brute_force_optimal_linear(p: &JointPMF) -> Result<BruteForceResult> {
    let (field, d) = (p.field(), p.dim());
    let count = invertible_count(field, d).filter(|&c| c <= BRUTE_FORCE_LIMIT);
    if count.is_none() {
        return Err(Error::Capacity(format!(
            "more than {BRUTE_FORCE_LIMIT} invertible {d}x{d} matrices over {field}"
        )));
    }
    let rows = p.len() as u64;
    let entropies: Vec<f64> = (0..rows)
        .map(|r| {
            combination_marginal(p, &FieldVector::from_index(field, d, r)).map(|m| m.entropy())
        })
        .collect::<Result<_>>()?;

    let mut search = Search {
        entropies: &entropies,
        rows,
        chosen: Vec::with_capacity(d),
        best: None,
        candidates: 0,
    };
    search.descend(&Basis::new(field, d), 0.0);
    let (objective, best) = search.best.expect("GF(q)^d has a basis");
    let vectors: Vec<FieldVector> = best
        .iter()
        .map(|&r| FieldVector::from_index(field, d, r))
        .collect();
    Ok(BruteForceResult {
        w: FieldMatrix::from_rows(field, &vectors)?,
        objective,
        candidates: search.candidates,
    })
}

struct Search<'a> {
    entropies: &'a [f64],
    rows: u64,
    chosen: Vec<u64>,
    best: Option<(f64, Vec<u64>)>,
    candidates: u64,
}

impl Search<'_> {
    fn descend(&mut self, basis: &Basis, partial: f64) {
        if basis.is_full() {
            self.candidates += 1;
            let better = match &self.best {
                None => true,
                Some((incumbent, _)) => partial < incumbent - 1e-12,
            };
            if better {
                self.best = Some((partial, self.chosen.clone()));
            }
            return;
        }
        for r in 1..self.rows {
            let mut next = basis.clone();
            if next.try_extend_index(r) {
                self.chosen.push(r);
                self.descend(&next, partial + self.entropies[r as usize]);
                self.chosen.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::bernoulli_product_pmf;

    #[test]
    fn counts() {
        let f2 = PrimeField::BINARY;
        assert_eq!(invertible_count(f2, 2), Some(6));
        assert_eq!(invertible_count(f2, 4), Some(20160));
        assert_eq!(invertible_count(PrimeField::new(3).unwrap(), 2), Some(48));
        let p = JointPMF::uniform(f2, 2).unwrap();
        assert_eq!(brute_force_optimal_linear(&p).unwrap().candidates, 6);
        let big = JointPMF::uniform(f2, 5).unwrap();
        assert!(matches!(
            brute_force_optimal_linear(&big),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn identity_is_optimal_for_a_product() {
        let p = bernoulli_product_pmf(&[0.1, 0.3]).unwrap();
        let r = brute_force_optimal_linear(&p).unwrap();
        let oracle =
            crate::pmf::binary_entropy(0.1).unwrap() + crate::pmf::binary_entropy(0.3).unwrap();
        assert!((r.objective - oracle).abs() < 1e-12);
        // Lexicographic tie-break: rows 01 then 10.
        assert_eq!(r.w.as_slice(), &[0, 1, 1, 0]);
    }

    #[test]
    fn uniform_tie_break_is_lexicographic() {
        let p = JointPMF::uniform(PrimeField::BINARY, 3).unwrap();
        let r = brute_force_optimal_linear(&p).unwrap();
        assert_eq!(r.w.as_slice(), &[0, 0, 1, 0, 1, 0, 1, 0, 0]);
        assert_eq!(r.candidates, 168);
    }
}
