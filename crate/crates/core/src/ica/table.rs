use crate::error::{Error, Result};
use crate::gf::{FieldVector, PrimeField};
use crate::pmf::{all_combination_entropies_with, CombinationStrategy, JointPMF};

/// Options for building an [`EntropyTable`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TableOptions {
    pub strategy: CombinationStrategy,
    /// Keep only rows whose leading nonzero coefficient is 1. Rows `r` and
    /// `c r` have equal entropy and are mutually dependent, so this leaves
    /// the greedy objective unchanged; it does change the lower bound for
    /// q > 2, so the bound always uses the full table.
    pub dedup_scalar_multiples: bool,
}

/// Every nonzero coefficient row with the entropy of its combination,
/// sorted by ascending entropy and then ascending row index.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyTable {
    field: PrimeField,
    d: usize,
    rows: Vec<u32>,
    entropies: Vec<f64>,
}

impl EntropyTable {
    pub fn build(p: &JointPMF) -> Result<Self> {
        Self::build_with(p, TableOptions::default())
    }

    pub fn build_with(p: &JointPMF, opts: TableOptions) -> Result<Self> {
        if p.len() > u32::MAX as usize {
            return Err(Error::Capacity(format!(
                "{} rows do not fit a 32-bit row index",
                p.len()
            )));
        }
        let field = p.field();
        let d = p.dim();
        let all = all_combination_entropies_with(p, opts.strategy);
        let keep =
            |r: usize| !opts.dedup_scalar_multiples || leading_coefficient(field, d, r as u64) == 1;
        let mut pairs: Vec<(f64, u32)> = all
            .into_iter()
            .enumerate()
            .skip(1)
            .filter(|&(r, _)| keep(r))
            .map(|(r, h)| (h, r as u32))
            .collect();
        sort_pairs(&mut pairs);
        let (entropies, rows) = pairs.into_iter().unzip();
        Ok(EntropyTable {
            field,
            d,
            rows,
            entropies,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row_index(&self, i: usize) -> u64 {
        self.rows[i] as u64
    }

    pub fn row(&self, i: usize) -> FieldVector {
        FieldVector::from_index(self.field, self.d, self.rows[i] as u64)
    }

    pub fn entropy(&self, i: usize) -> f64 {
        self.entropies[i]
    }

    pub fn entropies(&self) -> &[f64] {
        &self.entropies
    }

    /// Row indices in table order.
    pub fn row_indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.rows.iter().map(|&r| r as u64)
    }

    /// Sum of the d smallest entropies.
    pub fn lower_bound(&self) -> f64 {
        self.entropies.iter().take(self.d).sum()
    }
}

fn leading_coefficient(field: PrimeField, d: usize, mut index: u64) -> u64 {
    let q = field.order() as u64;
    let mut lead = 0;
    for _ in 0..d {
        let digit = index % q;
        if digit != 0 {
            lead = digit;
        }
        index /= q;
    }
    lead
}

#[cfg(feature = "parallel")]
fn sort_pairs(pairs: &mut [(f64, u32)]) {
    use rayon::slice::ParallelSliceMut;
    pairs.par_sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
}

#[cfg(not(feature = "parallel"))]
fn sort_pairs(pairs: &mut [(f64, u32)]) {
    pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
}

/// Sum of the d smallest combination entropies over nonzero rows: no
/// invertible linear transform can do better.
pub fn linear_lower_bound(p: &JointPMF) -> Result<f64> {
    Ok(EntropyTable::build(p)?.lower_bound())
}
