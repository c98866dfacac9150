use crate::error::{Error, Result};
use crate::gf::{decode_word, encode_word, Elem, FieldMatrix, PrimeField};
use crate::ica::{glica, LinearICAResult};
use crate::pmf::{random_assignment, Capacity, JointPMF, SampleSet};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BloGLICAConfig {
    /// Number of blocks `b`.
    pub blocks: usize,
    /// Maximum number of iterations `M`.
    pub max_iter: usize,
    /// Stop once an iteration improves the objective by less than this (bits).
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for BloGLICAConfig {
    fn default() -> Self {
        BloGLICAConfig {
            blocks: 2,
            max_iter: 20,
            epsilon: 1e-12,
            seed: 0,
        }
    }
}

impl BloGLICAConfig {
    pub fn with_blocks(blocks: usize) -> Self {
        BloGLICAConfig {
            blocks,
            ..Self::default()
        }
    }

    fn validate(&self, d: usize) -> Result<()> {
        if self.blocks == 0 || self.blocks > d {
            return Err(Error::Config(format!(
                "block count {} outside 1..={d}",
                self.blocks
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::Config(format!(
                "epsilon {} is negative",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// One iteration: `y = diag(blocks) (U x)` with `(U x)_i = x[permutation[i]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockStage {
    pub permutation: Vec<usize>,
    pub blocks: Vec<FieldMatrix>,
}

impl BlockStage {
    pub fn matrix(&self, field: PrimeField) -> Result<FieldMatrix> {
        let diag = FieldMatrix::block_diagonal(field, &self.blocks)?;
        diag.mul(&FieldMatrix::permutation(field, &self.permutation)?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BloGLICAResult {
    pub result: LinearICAResult,
    /// `trace[0]` is the objective before any iteration, `trace[k]` after
    /// iteration k.
    pub trace: Vec<f64>,
    /// Stages in application order; `result.w` is their product.
    pub stages: Vec<BlockStage>,
}

/// Contiguous block sizes: the first `d mod b` blocks get one extra component.
pub fn block_sizes(d: usize, b: usize) -> Vec<usize> {
    (0..b).map(|i| d / b + usize::from(i < d % b)).collect()
}

pub fn bloglica(p: &JointPMF, cfg: BloGLICAConfig) -> Result<BloGLICAResult> {
    run(PmfState { p: p.clone() }, cfg)
}

/// Runs on samples, re-estimating each block's pmf from the transformed
/// samples every iteration. Only `q^(block size)` cells are ever allocated.
pub fn bloglica_samples(s: &SampleSet, cfg: BloGLICAConfig) -> Result<BloGLICAResult> {
    run(
        SampleState {
            field: s.field(),
            d: s.dim(),
            data: s.as_slice().to_vec(),
            view: (0..s.dim()).collect(),
        },
        cfg,
    )
}

trait State {
    fn field(&self) -> PrimeField;
    fn dim(&self) -> usize;
    fn marginal_sum(&self) -> f64;
    fn block_pmf(&self, start: usize, len: usize) -> JointPMF;
    fn apply(&mut self, stage: &CompiledStage);
}

/// A stage with each block reduced to a lookup table on block word indices.
struct CompiledStage {
    field: PrimeField,
    permutation: Vec<usize>,
    spans: Vec<(usize, usize)>,
    tables: Vec<Vec<u64>>,
}

impl CompiledStage {
    fn new(field: PrimeField, stage: &BlockStage) -> Self {
        let mut spans = Vec::with_capacity(stage.blocks.len());
        let mut start = 0;
        let tables = stage
            .blocks
            .iter()
            .map(|w| {
                let len = w.nrows();
                spans.push((start, len));
                start += len;
                let cells = (field.order() as u64).pow(len as u32);
                if field.is_binary() {
                    return binary_table(w, len);
                }
                let mut x = vec![0; len];
                let mut y = vec![0; len];
                (0..cells)
                    .map(|s| {
                        decode_word(field, s, &mut x);
                        w.mul_vec_into(&x, &mut y);
                        encode_word(field, &y)
                    })
                    .collect()
            })
            .collect();
        CompiledStage {
            field,
            permutation: stage.permutation.clone(),
            spans,
            tables,
        }
    }

    fn apply_word(&self, x: &[Elem], out: &mut [Elem]) {
        for (o, &src) in out.iter_mut().zip(&self.permutation) {
            *o = x[src];
        }
        for (&(start, len), table) in self.spans.iter().zip(&self.tables) {
            let block = &mut out[start..start + len];
            let mapped = table[encode_word(self.field, block) as usize];
            decode_word(self.field, mapped, block);
        }
    }
}

/// Over GF(2) the block map is XOR-linear on word indices: each entry is an
/// earlier entry XOR the image of its lowest set bit.
fn binary_table(w: &FieldMatrix, len: usize) -> Vec<u64> {
    // Bit `k` (from the least significant end) is component `len - 1 - k`.
    let images: Vec<u64> = (0..len)
        .map(|k| {
            let col = len - 1 - k;
            (0..len).fold(0, |acc, i| (acc << 1) | u64::from(w.get(i, col)))
        })
        .collect();
    let mut table = vec![0u64; 1 << len];
    for s in 1..table.len() {
        table[s] = table[s & (s - 1)] ^ images[s.trailing_zeros() as usize];
    }
    table
}

struct PmfState {
    p: JointPMF,
}

impl State for PmfState {
    fn field(&self) -> PrimeField {
        self.p.field()
    }

    fn dim(&self) -> usize {
        self.p.dim()
    }

    fn marginal_sum(&self) -> f64 {
        self.p.component_entropies().iter().sum()
    }

    fn block_pmf(&self, start: usize, len: usize) -> JointPMF {
        self.p.block_marginal(start, len)
    }

    fn apply(&mut self, stage: &CompiledStage) {
        let (f, d) = (self.p.field(), self.p.dim());
        let mut out = vec![0.0; self.p.len()];
        let mut x = vec![0; d];
        let mut y = vec![0; d];
        for (idx, &v) in self.p.probs().iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            decode_word(f, idx as u64, &mut x);
            stage.apply_word(&x, &mut y);
            out[encode_word(f, &y) as usize] += v;
        }
        self.p = JointPMF::from_parts_unchecked(f, d, out);
    }
}

struct SampleState {
    field: PrimeField,
    d: usize,
    data: Vec<Elem>,
    /// Logical component `i` lives in column `view[i]`. Pure permutations
    /// only update the view; the next block pass materializes it.
    view: Vec<usize>,
}

impl SampleState {
    fn n(&self) -> usize {
        self.data.len() / self.d
    }
}

impl State for SampleState {
    fn field(&self) -> PrimeField {
        self.field
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn marginal_sum(&self) -> f64 {
        (0..self.d).map(|j| self.block_pmf(j, 1).entropy()).sum()
    }

    fn block_pmf(&self, start: usize, len: usize) -> JointPMF {
        let cells = (self.field.order() as usize).pow(len as u32);
        let mut counts = vec![0.0; cells];
        let q = self.field.order() as usize;
        let columns = &self.view[start..start + len];
        for row in self.data.chunks(self.d) {
            let word = columns.iter().fold(0, |acc, &c| acc * q + row[c] as usize);
            counts[word] += 1.0;
        }
        let n = self.n() as f64;
        counts.iter_mut().for_each(|c| *c /= n);
        JointPMF::from_parts_unchecked(self.field, len, counts)
    }

    fn apply(&mut self, stage: &CompiledStage) {
        if stage.tables.is_empty() {
            self.view = stage.permutation.iter().map(|&i| self.view[i]).collect();
            return;
        }
        let mut x = vec![0; self.d];
        for row in self.data.chunks_mut(self.d) {
            for (xi, &c) in x.iter_mut().zip(&self.view) {
                *xi = row[c];
            }
            stage.apply_word(&x, row);
        }
        self.view = (0..self.d).collect();
    }
}

fn run<S: State>(mut state: S, cfg: BloGLICAConfig) -> Result<BloGLICAResult> {
    let (field, d) = (state.field(), state.dim());
    cfg.validate(d)?;
    let sizes = block_sizes(d, cfg.blocks);
    Capacity::default().cells(field, sizes[0])?;

    let mut rng = rng::seeded(cfg.seed);
    let mut w = FieldMatrix::identity(field, d);
    let mut trace = vec![state.marginal_sum()];
    let mut stages = Vec::new();
    let mut rows_examined = 0;
    let mut component_entropies = Vec::new();

    for iteration in 0..cfg.max_iter {
        // No shuffle before the first pass, so one block and one pass is GLICA.
        let permutation = if iteration == 0 {
            (0..d).collect()
        } else {
            random_assignment(d, &mut rng)
        };
        if iteration > 0 {
            state.apply(&CompiledStage::new(
                field,
                &BlockStage {
                    permutation: permutation.clone(),
                    blocks: Vec::new(),
                },
            ));
        }

        let mut blocks = Vec::with_capacity(sizes.len());
        let mut entropies = Vec::with_capacity(d);
        let mut start = 0;
        for &len in &sizes {
            let r = glica(&state.block_pmf(start, len))?;
            rows_examined += r.rows_examined;
            entropies.extend_from_slice(&r.component_entropies);
            blocks.push(r.w);
            start += len;
        }
        let identity_perm: Vec<usize> = (0..d).collect();
        state.apply(&CompiledStage::new(
            field,
            &BlockStage {
                permutation: identity_perm,
                blocks: blocks.clone(),
            },
        ));

        let stage = BlockStage {
            permutation,
            blocks,
        };
        w = stage.matrix(field)?.mul(&w)?;
        stages.push(stage);
        let objective: f64 = entropies.iter().sum();
        let previous = *trace.last().expect("trace starts non-empty");
        trace.push(objective);
        component_entropies = entropies;
        if previous - objective < cfg.epsilon {
            break;
        }
    }

    let objective = *trace.last().expect("at least one iteration");
    Ok(BloGLICAResult {
        result: LinearICAResult {
            w,
            objective,
            component_entropies,
            rows_examined,
            lower_bound: None,
        },
        trace,
        stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ica::linear_lower_bound;
    use crate::pmf::{sample_bernoulli_product, sample_uniform_simplex, transform_pmf};
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn random_pmf(q: u32, d: usize, seed: u64) -> JointPMF {
        let f = PrimeField::new(q).unwrap();
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = f.checked_pow(d).unwrap() as usize;
        JointPMF::new(f, d, sample_uniform_simplex(m, &mut r)).unwrap()
    }

    #[test]
    fn partition_sizes() {
        assert_eq!(block_sizes(20, 2), vec![10, 10]);
        assert_eq!(block_sizes(20, 3), vec![7, 7, 6]);
        assert_eq!(block_sizes(5, 5), vec![1; 5]);
    }

    #[test]
    fn config_errors() {
        let p = random_pmf(2, 3, 1);
        for cfg in [
            BloGLICAConfig::with_blocks(0),
            BloGLICAConfig::with_blocks(4),
            BloGLICAConfig {
                max_iter: 0,
                ..Default::default()
            },
            BloGLICAConfig {
                epsilon: -1.0,
                ..Default::default()
            },
        ] {
            assert!(matches!(bloglica(&p, cfg), Err(Error::Config(_))));
        }
    }

    #[test]
    fn one_block_one_pass_is_glica() {
        for (q, d) in [(2, 5), (3, 3)] {
            let p = random_pmf(q, d, 7);
            let cfg = BloGLICAConfig {
                blocks: 1,
                max_iter: 1,
                ..Default::default()
            };
            let b = bloglica(&p, cfg).unwrap();
            let g = glica(&p).unwrap();
            assert_eq!(b.result.w, g.w);
            assert_eq!(b.result.objective, g.objective);
            assert_eq!(b.result.rows_examined, g.rows_examined);
        }
    }

    #[test]
    fn singleton_blocks_keep_the_objective() {
        let p = random_pmf(3, 4, 11);
        let start: f64 = p.component_entropies().iter().sum();
        let r = bloglica(&p, BloGLICAConfig::with_blocks(4)).unwrap();
        assert!(r.trace.iter().all(|t| (t - start).abs() < 1e-9));
        assert_eq!(r.trace.len(), 2);
    }

    #[test]
    fn result_matches_transformed_pmf() {
        let p = random_pmf(2, 8, 3);
        let r = bloglica(&p, BloGLICAConfig::with_blocks(3)).unwrap();
        let y = transform_pmf(&p, &r.result.w).unwrap();
        let direct: f64 = y.component_entropies().iter().sum();
        assert!((direct - r.result.objective).abs() < 1e-9);
        let composed = r
            .stages
            .iter()
            .try_fold(FieldMatrix::identity(p.field(), 8), |acc, s| {
                s.matrix(p.field())?.mul(&acc)
            })
            .unwrap();
        assert_eq!(composed, r.result.w);
    }

    #[test]
    fn samples_path_matches_empirical_pmf_path() {
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let s = sample_bernoulli_product(&[0.1, 0.2, 0.3, 0.4, 0.15, 0.35], 2000, &mut r).unwrap();
        let mix = FieldMatrix::random_invertible(6, s.field(), &mut r);
        let x = s.transform(&mix).unwrap();
        let cfg = BloGLICAConfig::with_blocks(2);
        let a = bloglica_samples(&x, cfg).unwrap();
        let b = bloglica(&crate::pmf::empirical_pmf(&x).unwrap(), cfg).unwrap();
        assert_eq!(a.result.w, b.result.w);
        assert_eq!(a.trace.len(), b.trace.len());
        for (u, v) in a.trace.iter().zip(&b.trace) {
            assert!((u - v).abs() < 1e-9);
        }
        let y = x.transform(&a.result.w).unwrap();
        let direct: f64 = (0..6).map(|j| y.component_entropy(j)).sum();
        assert!((direct - a.result.objective).abs() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn trace_is_monotone_and_above_the_bound(seed in any::<u64>(), case in 0usize..4, b in 1usize..4) {
            let (q, d) = [(2, 6), (2, 8), (3, 4), (5, 3)][case];
            let p = random_pmf(q, d, seed);
            let cfg = BloGLICAConfig { blocks: b.min(d), seed, ..Default::default() };
            let r = bloglica(&p, cfg).unwrap();
            for pair in r.trace.windows(2) {
                prop_assert!(pair[1] <= pair[0] + 1e-9);
            }
            prop_assert_eq!(r.result.w.rank(), d);
            prop_assert!(r.result.objective >= linear_lower_bound(&p).unwrap() - 1e-9);
            prop_assert!(r.trace.len() <= cfg.max_iter + 1);
        }
    }
}
