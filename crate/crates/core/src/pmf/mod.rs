//! Joint distributions over GF(q)^d, samples, entropies and samplers.
//!
//! Every dense table is indexed by the big-endian base-q word index
//! (see [`crate::gf::encode_word`]).

mod entropy;
mod io;
mod sample;
mod special;

use std::collections::HashSet;

use crate::error::{check_dim, Error, Result};
use crate::gf::{decode_word, encode_word, Elem, FieldMatrix, FieldVector, PrimeField};

pub use entropy::{
    all_combination_entropies, all_combination_entropies_with, binary_entropy, entropy,
    CombinationStrategy,
};
pub use sample::{
    bernoulli_product_pmf, beta_binomial_pmf, random_assignment, sample_bernoulli_product,
    sample_beta_binomial, sample_uniform_simplex, sample_zipf, zipf_pmf, Draws, InverseCdf,
};
pub use special::digamma;

/// Default cap on dense table size, in cells.
pub const DEFAULT_MAX_CELLS: u64 = 1 << 30;

/// Upper bound on the number of cells a dense table may allocate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Capacity {
    pub max_cells: u64,
}

impl Default for Capacity {
    fn default() -> Self {
        Capacity {
            max_cells: DEFAULT_MAX_CELLS,
        }
    }
}

impl Capacity {
    pub fn unlimited() -> Self {
        Capacity {
            max_cells: u64::MAX,
        }
    }

    /// `q^d`, provided it fits this capacity.
    pub fn cells(&self, field: PrimeField, d: usize) -> Result<usize> {
        match field.checked_pow(d) {
            Some(c) if c <= self.max_cells && c <= usize::MAX as u64 => Ok(c as usize),
            _ => Err(Error::Capacity(format!(
                "{field}^{d} cells exceeds the limit of {}",
                self.max_cells
            ))),
        }
    }
}

/// Dense joint probability mass function of a d-component vector over GF(q).
#[derive(Clone, Debug, PartialEq)]
pub struct JointPMF {
    field: PrimeField,
    d: usize,
    probs: Vec<f64>,
}

const SUM_TOLERANCE: f64 = 1e-9;

impl JointPMF {
    pub fn new(field: PrimeField, d: usize, probs: Vec<f64>) -> Result<Self> {
        Self::with_capacity(field, d, probs, Capacity::default())
    }

    pub fn with_capacity(
        field: PrimeField,
        d: usize,
        probs: Vec<f64>,
        cap: Capacity,
    ) -> Result<Self> {
        let cells = cap.cells(field, d)?;
        check_dim(cells, probs.len())?;
        if let Some(bad) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::Domain(format!("invalid probability {bad}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::Domain(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(JointPMF { field, d, probs })
    }

    /// Builds a pmf from non-negative weights, normalizing by their sum.
    pub fn from_weights(field: PrimeField, d: usize, mut weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Domain("weights must have positive sum".into()));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Self::new(field, d, weights)
    }

    pub fn uniform(field: PrimeField, d: usize) -> Result<Self> {
        let cells = Capacity::default().cells(field, d)?;
        Self::new(field, d, vec![1.0 / cells as f64; cells])
    }

    pub fn point_mass(field: PrimeField, d: usize, index: usize) -> Result<Self> {
        let cells = Capacity::default().cells(field, d)?;
        let mut probs = vec![0.0; cells];
        *probs
            .get_mut(index)
            .ok_or_else(|| Error::Domain(format!("index {index} out of range")))? = 1.0;
        Self::new(field, d, probs)
    }

    pub(crate) fn from_parts_unchecked(field: PrimeField, d: usize, probs: Vec<f64>) -> Self {
        JointPMF { field, d, probs }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Joint entropy in bits.
    pub fn entropy(&self) -> f64 {
        entropy::entropy_unchecked(&self.probs)
    }

    /// Distribution of the single component `j`.
    pub fn component_marginal(&self, j: usize) -> MarginalDistribution {
        let q = self.field.order() as usize;
        let stride = q.pow((self.d - 1 - j) as u32);
        let mut out = vec![0.0; q];
        for (idx, &p) in self.probs.iter().enumerate() {
            out[(idx / stride) % q] += p;
        }
        MarginalDistribution(out)
    }

    /// Entropies of the d components, in bits.
    pub fn component_entropies(&self) -> Vec<f64> {
        (0..self.d)
            .map(|j| self.component_marginal(j).entropy())
            .collect()
    }

    /// Joint pmf of the components `start..start + len`.
    pub fn block_marginal(&self, start: usize, len: usize) -> JointPMF {
        let q = self.field.order() as usize;
        let inner = q.pow((self.d - start - len) as u32);
        let block_cells = q.pow(len as u32);
        let mut out = vec![0.0; block_cells];
        for (idx, &p) in self.probs.iter().enumerate() {
            out[(idx / inner) % block_cells] += p;
        }
        JointPMF::from_parts_unchecked(self.field, len, out)
    }
}

/// Distribution of a single GF(q)-valued variable.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalDistribution(pub Vec<f64>);

impl MarginalDistribution {
    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn entropy(&self) -> f64 {
        entropy::entropy_unchecked(&self.0)
    }
}

/// n records of d symbols each, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSet {
    field: PrimeField,
    d: usize,
    data: Vec<Elem>,
}

impl SampleSet {
    pub fn new(field: PrimeField, d: usize, data: Vec<Elem>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("samples need at least one component".into()));
        }
        if data.is_empty() || data.len() % d != 0 {
            return Err(Error::Domain(format!(
                "{} symbols do not form a positive number of {d}-symbol rows",
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|&&c| !field.contains(c as u32)) {
            return Err(Error::Domain(format!("symbol {bad} outside {field}")));
        }
        Ok(SampleSet { field, d, data })
    }

    pub fn from_rows(field: PrimeField, d: usize, rows: &[Vec<Elem>]) -> Result<Self> {
        for r in rows {
            check_dim(d, r.len())?;
        }
        Self::new(field, d, rows.concat())
    }

    /// Rows given by word indices.
    pub fn from_indices(field: PrimeField, d: usize, indices: &[u64]) -> Result<Self> {
        let mut data = vec![0; indices.len() * d];
        for (row, &idx) in data.chunks_mut(d).zip(indices) {
            decode_word(field, idx, row);
        }
        Self::new(field, d, data)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.data.len() / self.d
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[Elem]> + '_ {
        self.data.chunks(self.d)
    }

    pub fn as_slice(&self) -> &[Elem] {
        &self.data
    }

    pub fn word_index(&self, i: usize) -> u64 {
        encode_word(self.field, self.row(i))
    }

    /// Symbols of component `j`, in sample order.
    pub fn component(&self, j: usize) -> impl Iterator<Item = Elem> + '_ {
        self.data.iter().skip(j).step_by(self.d).copied()
    }

    /// Number of distinct rows, `n_0`.
    pub fn distinct_count(&self) -> usize {
        self.rows().collect::<HashSet<_>>().len()
    }

    /// Applies `w` to every row.
    pub fn transform(&self, w: &FieldMatrix) -> Result<SampleSet> {
        check_dim(self.d, w.ncols())?;
        let mut out = vec![0; self.n() * w.nrows()];
        for (src, dst) in self.rows().zip(out.chunks_mut(w.nrows())) {
            w.mul_vec_into(src, dst);
        }
        Ok(SampleSet {
            field: self.field,
            d: w.nrows(),
            data: out,
        })
    }

    /// Plug-in empirical entropy of component `j`, in bits.
    pub fn component_entropy(&self, j: usize) -> f64 {
        let q = self.field.order() as usize;
        let mut counts = vec![0u64; q];
        for s in self.component(j) {
            counts[s as usize] += 1;
        }
        entropy::count_entropy(&counts, self.n() as u64)
    }
}

/// Plug-in maximum-likelihood estimate `count(x) / n`.
pub fn empirical_pmf(samples: &SampleSet) -> Result<JointPMF> {
    empirical_pmf_with(samples, Capacity::default())
}

pub fn empirical_pmf_with(samples: &SampleSet, cap: Capacity) -> Result<JointPMF> {
    let cells = cap.cells(samples.field, samples.d)?;
    let mut counts = vec![0u32; cells];
    for i in 0..samples.n() {
        counts[samples.word_index(i) as usize] += 1;
    }
    let n = samples.n() as f64;
    let probs = counts.into_iter().map(|c| c as f64 / n).collect();
    Ok(JointPMF::from_parts_unchecked(
        samples.field,
        samples.d,
        probs,
    ))
}

/// Distribution of `U = <r, X> mod q`.
pub fn combination_marginal(p: &JointPMF, r: &FieldVector) -> Result<MarginalDistribution> {
    check_dim(p.d, r.len())?;
    let f = p.field;
    let q = f.order() as usize;
    let mut out = vec![0.0; q];
    let mut word = vec![0; p.d];
    for (idx, &prob) in p.probs.iter().enumerate() {
        if prob == 0.0 {
            continue;
        }
        decode_word(f, idx as u64, &mut word);
        out[r.dot(f, &word) as usize] += prob;
    }
    Ok(MarginalDistribution(out))
}

/// Pushforward of `p` through `y = W x`.
pub fn transform_pmf(p: &JointPMF, w: &FieldMatrix) -> Result<JointPMF> {
    check_dim(p.d, w.ncols())?;
    check_dim(p.d, w.nrows())?;
    if !w.is_invertible() {
        return Err(Error::SingularMatrix);
    }
    let f = p.field;
    let mut out = vec![0.0; p.probs.len()];
    if f.is_binary() {
        let masks: Vec<u64> = (0..p.d).map(|i| w.binary_row_mask(i)).collect();
        for (x, &prob) in p.probs.iter().enumerate() {
            let y = masks.iter().fold(0u64, |acc, &m| {
                (acc << 1) | ((m & x as u64).count_ones() & 1) as u64
            });
            out[y as usize] = prob;
        }
    } else {
        let mut x = vec![0; p.d];
        let mut y = vec![0; p.d];
        for (idx, &prob) in p.probs.iter().enumerate() {
            decode_word(f, idx as u64, &mut x);
            w.mul_vec_into(&x, &mut y);
            out[encode_word(f, &y) as usize] = prob;
        }
    }
    Ok(JointPMF::from_parts_unchecked(f, p.d, out))
}
