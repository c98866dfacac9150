use std::time::Instant;

use crate::coding::{self, DictionaryCost, Mode};
use crate::error::{Error, Result};
use crate::experiments::reference::{
    expected_joint_entropy, marginal_sum_beta_form, marginal_sum_shifted_form,
};
use crate::experiments::{Params, ResultRow};
use crate::gf::{FieldMatrix, PrimeField};
use crate::ica::{
    bloglica_samples, glica, linear_lower_bound, order_permutation, row_draw_statistics,
    total_correlation, BloGLICAConfig,
};
use crate::pmf::{
    beta_binomial_pmf, binary_entropy, empirical_pmf, entropy, random_assignment,
    sample_bernoulli_product, sample_uniform_simplex, zipf_pmf, Draws, InverseCdf, JointPMF,
    SampleSet,
};
use crate::rng::{derived, stream_id};

/// Collects rows for one experiment and seed.
struct Rows {
    experiment: &'static str,
    seed: u64,
    rows: Vec<ResultRow>,
}

impl Rows {
    fn new(experiment: &'static str, seed: u64) -> Self {
        Rows {
            experiment,
            seed,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, point: &str, metric: &str, value: f64, runtime_s: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::Domain(format!("{metric} at {point} is {value}")));
        }
        self.rows.push(ResultRow {
            experiment: self.experiment.to_string(),
            point: point.to_string(),
            metric: metric.to_string(),
            value,
            runtime_s,
            seed: self.seed,
        });
        Ok(())
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64()))
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn standard_error(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}

#[cfg(feature = "parallel")]
fn map_trials<T: Send, F: Fn(usize) -> Result<T> + Sync + Send>(
    trials: usize,
    f: F,
) -> Result<Vec<T>> {
    use rayon::prelude::*;
    (0..trials).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_trials<T, F: Fn(usize) -> Result<T>>(trials: usize, f: F) -> Result<Vec<T>> {
    (0..trials).map(f).collect()
}

fn positive(name: &str, v: usize) -> Result<usize> {
    if v == 0 {
        Err(Error::Config(format!("{name} must be positive")))
    } else {
        Ok(v)
    }
}

fn fields(qs: &[u32]) -> Result<Vec<PrimeField>> {
    qs.iter()
        .map(|&q| PrimeField::new(q).map_err(|_| Error::Config(format!("q = {q} is not prime"))))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoverSourcesParams {
    pub d: Vec<usize>,
    pub n: usize,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
}

impl RecoverSourcesParams {
    pub fn from_params(p: &mut Params<'_>) -> Result<Self> {
        let out = RecoverSourcesParams {
            d: p.list("d", &[2, 4, 6, 8, 10, 12])?,
            n: positive("n", p.get("n", 10_000)?)?,
            p: p.get("p", 0.4)?,
            trials: positive("trials", p.get("trials", 10)?)?,
            seed: p.get("seed", 0)?,
        };
        if out.d.iter().any(|&d| !(2..=20).contains(&d)) {
            return Err(Error::Config("recover-sources needs 2 <= d <= 20".into()));
        }
        if !(0.0..=1.0).contains(&out.p) {
            return Err(Error::Config(format!("p = {} is not a probability", out.p)));
        }
        Ok(out)
    }
}

/// Outcome of mixing independent Bernoulli sources and unmixing them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct RecoveryTrial {
    pub bound: f64,
    pub objective: f64,
    pub source_entropy: f64,
    pub recovered: bool,
    pub rows_examined: usize,
    pub runtime_s: f64,
}

pub(crate) fn recovery_trial(
    d: usize,
    n: usize,
    p: f64,
    seed: u64,
    stream: u64,
) -> Result<RecoveryTrial> {
    let mut rng = derived(seed, stream);
    let sources = sample_bernoulli_product(&vec![p; d], n, &mut rng)?;
    let mix = FieldMatrix::random_nontrivial_invertible(d, PrimeField::BINARY, &mut rng)?;
    let x = sources.transform(&mix)?;
    let (r, runtime_s) = timed(|| glica(&empirical_pmf(&x)?))?;
    Ok(RecoveryTrial {
        bound: r.lower_bound.expect("glica reports its bound"),
        objective: r.objective,
        source_entropy: (0..d).map(|j| sources.component_entropy(j)).sum(),
        recovered: r.w.mul(&mix)?.is_monomial(),
        rows_examined: r.rows_examined,
        runtime_s,
    })
}

pub fn run_recover_sources(params: &RecoverSourcesParams) -> Result<Vec<ResultRow>> {
    let mut rows = Rows::new("recover-sources", params.seed);
    for &d in &params.d {
        let trials = map_trials(params.trials, |t| {
            recovery_trial(
                d,
                params.n,
                params.p,
                params.seed,
                stream_id(d as u64, t as u64),
            )
        })?;
        let point = format!("d={d}");
        let pick = |f: fn(&RecoveryTrial) -> f64| trials.iter().map(f).collect::<Vec<_>>();
        let runtime = mean(&pick(|t| t.runtime_s));
        rows.push(&point, "lower_bound", mean(&pick(|t| t.bound)), 0.0)?;
        rows.push(&point, "glica", mean(&pick(|t| t.objective)), runtime)?;
        rows.push(
            &point,
            "glica_rows_examined",
            mean(&pick(|t| t.rows_examined as f64)),
            0.0,
        )?;
        rows.push(
            &point,
            "source_entropy_empirical",
            mean(&pick(|t| t.source_entropy)),
            0.0,
        )?;
        rows.push(
            &point,
            "source_entropy",
            d as f64 * binary_entropy(params.p)?,
            0.0,
        )?;
        rows.push(
            &point,
            "recovery_rate",
            mean(&pick(|t| f64::from(u8::from(t.recovered)))),
            0.0,
        )?;
    }
    Ok(rows.rows)
}

/// Parameters shared by the Zipf and beta-binomial runs: a pmf over `2^d`
/// symbols, a random symbol-to-word assignment and `n` samples.
#[derive(Clone, Debug, PartialEq)]
pub struct RepresentationParams {
    pub d: Vec<usize>,
    pub n: usize,
    /// Zipf exponent, or the beta-binomial pair `(a, b)`.
    pub shape: Shape,
    pub blocks: Vec<usize>,
    pub search: BlockSearch,
    pub seed: u64,
}

/// Iteration controls for the block-greedy runs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockSearch {
    pub max_iter: usize,
    pub epsilon: f64,
}

impl Default for BlockSearch {
    fn default() -> Self {
        let cfg = BloGLICAConfig::default();
        BlockSearch {
            max_iter: cfg.max_iter,
            epsilon: cfg.epsilon,
        }
    }
}

impl BlockSearch {
    fn from_params(p: &mut Params<'_>) -> Result<Self> {
        let default = Self::default();
        Ok(BlockSearch {
            max_iter: positive("max_iter", p.get("max_iter", default.max_iter)?)?,
            epsilon: p.get("epsilon", default.epsilon)?,
        })
    }

    fn config(self, blocks: usize, seed: u64) -> BloGLICAConfig {
        BloGLICAConfig {
            blocks,
            max_iter: self.max_iter,
            epsilon: self.epsilon,
            seed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    Zipf { s: f64 },
    BetaBinomial { a: f64, b: f64 },
}

impl Shape {
    fn pmf(self, m: usize) -> Result<Vec<f64>> {
        match self {
            Shape::Zipf { s } => zipf_pmf(m, s),
            Shape::BetaBinomial { a, b } => beta_binomial_pmf(m, a, b),
        }
    }
}

const DEFAULT_D: [usize; 9] = [4, 6, 8, 10, 12, 14, 16, 18, 20];

impl RepresentationParams {
    pub fn zipf_from(p: &mut Params<'_>) -> Result<Self> {
        Self::common(p, |p| {
            Ok(Shape::Zipf {
                s: p.get("s", 1.01)?,
            })
        })
    }

    pub fn beta_binomial_from(p: &mut Params<'_>) -> Result<Self> {
        Self::common(p, |p| {
            Ok(Shape::BetaBinomial {
                a: p.get("a", 3.0)?,
                b: p.get("b", 3.0)?,
            })
        })
    }

    fn common(
        p: &mut Params<'_>,
        shape: impl FnOnce(&mut Params<'_>) -> Result<Shape>,
    ) -> Result<Self> {
        Ok(RepresentationParams {
            d: p.list("d", &DEFAULT_D)?,
            n: positive("n", p.get("n", 10_000)?)?,
            shape: shape(p)?,
            blocks: p.list("blocks", &[2, 3])?,
            search: BlockSearch::from_params(p)?,
            seed: p.get("seed", 0)?,
        })
    }
}

/// Sampling and search settings shared by every point of a run.
struct PointSettings<'a> {
    n: usize,
    blocks: &'a [usize],
    search: BlockSearch,
    seed: u64,
}

/// Draws `n` samples from `pmf` under a random assignment of symbols to
/// words of GF(q)^d and runs every method on them.
fn representation_point(
    rows: &mut Rows,
    point: &str,
    field: PrimeField,
    d: usize,
    pmf: &[f64],
    settings: &PointSettings<'_>,
    stream: u64,
) -> Result<()> {
    let PointSettings {
        n,
        blocks,
        search,
        seed,
    } = *settings;
    let mut rng = derived(seed, stream);
    let sampler = InverseCdf::new(pmf)?;
    let draws = Draws {
        symbols: (0..n).map(|_| sampler.sample(&mut rng)).collect(),
        pmf: pmf.to_vec(),
    };
    let assignment = random_assignment(pmf.len(), &mut rng);
    let samples = draws.to_samples(field, d, &assignment)?;

    let ((g, joint), glica_s) = timed(|| {
        let p = empirical_pmf(&samples)?;
        Ok((glica(&p)?, p.entropy()))
    })?;
    rows.push(
        point,
        "lower_bound",
        g.lower_bound.expect("glica reports its bound"),
        0.0,
    )?;
    rows.push(point, "glica", g.objective, glica_s)?;
    rows.push(point, "glica_rows_examined", g.rows_examined as f64, 0.0)?;
    for &b in blocks.iter().filter(|&&b| b <= d) {
        let (r, secs) = timed(|| bloglica_samples(&samples, search.config(b, stream)))?;
        rows.push(point, &format!("bloglica_b{b}"), r.result.objective, secs)?;
    }
    let identity: f64 = (0..d).map(|j| samples.component_entropy(j)).sum();
    rows.push(point, "identity", identity, 0.0)?;
    rows.push(point, "joint_entropy_empirical", joint, 0.0)?;
    rows.push(point, "joint_entropy_true", entropy(pmf)?, 0.0)?;
    Ok(())
}

fn run_representation(name: &'static str, params: &RepresentationParams) -> Result<Vec<ResultRow>> {
    let mut rows = Rows::new(name, params.seed);
    for &d in &params.d {
        let pmf = params.shape.pmf(1usize << d)?;
        let settings = PointSettings {
            n: params.n,
            blocks: &params.blocks,
            search: params.search,
            seed: params.seed,
        };
        representation_point(
            &mut rows,
            &format!("d={d}"),
            PrimeField::BINARY,
            d,
            &pmf,
            &settings,
            d as u64,
        )?;
    }
    Ok(rows.rows)
}

pub fn run_zipf(params: &RepresentationParams) -> Result<Vec<ResultRow>> {
    run_representation("zipf", params)
}

pub fn run_beta_binomial(params: &RepresentationParams) -> Result<Vec<ResultRow>> {
    run_representation("beta-binomial", params)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GfqParams {
    pub d: usize,
    pub q: Vec<u32>,
    pub n: usize,
    pub s: f64,
    pub blocks: Vec<usize>,
    pub search: BlockSearch,
    pub seed: u64,
}

impl GfqParams {
    pub fn from_params(p: &mut Params<'_>) -> Result<Self> {
        Ok(GfqParams {
            d: positive("d", p.get("d", 6)?)?,
            q: p.list("q", &[2, 3, 5, 7])?,
            n: positive("n", p.get("n", 10_000)?)?,
            s: p.get("s", 1.01)?,
            blocks: p.list("blocks", &[2, 3])?,
            search: BlockSearch::from_params(p)?,
            seed: p.get("seed", 0)?,
        })
    }
}

/// Zipf samples over GF(q)^d for several primes q.
pub fn run_gfq(params: &GfqParams) -> Result<Vec<ResultRow>> {
    let mut rows = Rows::new("gfq", params.seed);
    for (i, field) in fields(&params.q)?.into_iter().enumerate() {
        let m = crate::pmf::Capacity::default().cells(field, params.d)?;
        let pmf = zipf_pmf(m, params.s)?;
        let settings = PointSettings {
            n: params.n,
            blocks: &params.blocks,
            search: params.search,
            seed: params.seed,
        };
        let point = format!("d={},q={}", params.d, field.order());
        representation_point(
            &mut rows, &point, field, params.d, &pmf, &settings, i as u64,
        )?;
    }
    Ok(rows.rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearVsNonlinearParams {
    pub d: Vec<usize>,
    pub n: usize,
    pub s: f64,
    pub seed: u64,
}

impl LinearVsNonlinearParams {
    pub fn from_params(p: &mut Params<'_>) -> Result<Self> {
        Ok(LinearVsNonlinearParams {
            d: p.list("d", &[2, 4, 6, 8, 10, 12, 14, 16])?,
            n: p.get("n", 0)?,
            s: p.get("s", 1.01)?,
            seed: p.get("seed", 0)?,
        })
    }
}

/// Order permutation against linear methods on a randomly represented Zipf
/// source. With `n = 0` the exact pmf is used, otherwise `n` samples.
pub fn run_linear_vs_nonlinear(params: &LinearVsNonlinearParams) -> Result<Vec<ResultRow>> {
    let mut rows = Rows::new("linear-vs-nonlinear", params.seed);
    let f = PrimeField::BINARY;
    for &d in &params.d {
        let mut rng = derived(params.seed, d as u64);
        let m = 1usize << d;
        let symbol_pmf = zipf_pmf(m, params.s)?;
        let assignment = random_assignment(m, &mut rng);
        let p = if params.n == 0 {
            let mut probs = vec![0.0; m];
            for (k, &w) in assignment.iter().enumerate() {
                probs[w] = symbol_pmf[k];
            }
            JointPMF::new(f, d, probs)?
        } else {
            let draws = crate::pmf::sample_zipf(m, params.s, params.n, &mut rng)?;
            empirical_pmf(&draws.to_samples(f, d, &assignment)?)?
        };
        let point = format!("d={d}");
        let (ord, ord_s) = timed(|| Ok(order_permutation(&p)))?;
        let (g, glica_s) = timed(|| glica(&p))?;
        let bound = g.lower_bound.expect("glica reports its bound");
        rows.push(&point, "order_permutation", ord.objective, ord_s)?;
        rows.push(&point, "lower_bound", bound, 0.0)?;
        rows.push(&point, "glica", g.objective, glica_s)?;
        rows.push(
            &point,
            "identity",
            p.component_entropies().iter().sum(),
            0.0,
        )?;
        rows.push(&point, "joint_entropy", p.entropy(), 0.0)?;
        rows.push(
            &point,
            "bound_minus_order_permutation",
            bound - ord.objective,
            0.0,
        )?;
    }
    Ok(rows.rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AverageCaseParams {
    pub d: Vec<usize>,
    pub draws: usize,
    pub seed: u64,
}

impl AverageCaseParams {
    pub fn from_params(p: &mut Params<'_>) -> Result<Self> {
        let out = AverageCaseParams {
            d: p.list("d", &[2, 3, 4, 5, 6, 7, 8, 9, 10])?,
            draws: positive("draws", p.get("draws", 1000)?)?,
            seed: p.get("seed", 0)?,
        };
        if out.d.iter().any(|&d| d == 0 || d > 20) {
            return Err(Error::Config("average-case needs 1 <= d <= 20".into()));
        }
        Ok(out)
    }
}

/// Per-draw quantities for a pmf drawn uniformly from the `2^d`-simplex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct SimplexDraw {
    pub order_perm_tc: f64,
    pub bound: f64,
    pub identity: f64,
    pub joint: f64,
    pub identity_tc: f64,
}

pub(crate) fn simplex_draw(
    d: usize,
    seed: u64,
    stream: u64,
    with_bound: bool,
) -> Result<SimplexDraw> {
    let mut rng = derived(seed, stream);
    let p = JointPMF::new(
        PrimeField::BINARY,
        d,
        sample_uniform_simplex(1 << d, &mut rng),
    )?;
    let identity: f64 = p.component_entropies().iter().sum();
    Ok(SimplexDraw {
        order_perm_tc: order_permutation(&p).total_correlation,
        bound: if with_bound {
            linear_lower_bound(&p)?
        } else {
            f64::NAN
        },
        identity,
        joint: p.entropy(),
        identity_tc: total_correlation(&p),
    })
}

pub fn run_average_case(params: &AverageCaseParams) -> Result<Vec<ResultRow>> {
    let mut rows = Rows::new("average-case", params.seed);
    for &d in &params.d {
        let (draws, secs) = timed(|| {
            map_trials(params.draws, |t| {
                simplex_draw(d, params.seed, stream_id(d as u64, t as u64), true)
            })
        })?;
        let point = format!("d={d}");
        let pick = |f: fn(&SimplexDraw) -> f64| draws.iter().map(f).collect::<Vec<_>>();
        let tc = pick(|s| s.order_perm_tc);
        let joint = pick(|s| s.joint);
        let identity = pick(|s| s.identity);
        rows.push(&point, "order_permutation_tc", mean(&tc), secs)?;
        rows.push(&point, "order_permutation_tc_se", standard_error(&tc), 0.0)?;
        rows.push(&point, "lower_bound", mean(&pick(|s| s.bound)), 0.0)?;
        rows.push(
            &point,
            "lower_bound_tc",
            mean(&pick(|s| s.bound - s.joint)),
            0.0,
        )?;
        rows.push(&point, "identity", mean(&identity), 0.0)?;
        rows.push(&point, "identity_se", standard_error(&identity), 0.0)?;
        rows.push(
            &point,
            "identity_per_component",
            mean(&identity) / d as f64,
            0.0,
        )?;
        rows.push(&point, "identity_tc", mean(&pick(|s| s.identity_tc)), 0.0)?;
        rows.push(&point, "joint_entropy", mean(&joint), 0.0)?;
        rows.push(&point, "joint_entropy_se", standard_error(&joint), 0.0)?;
        rows.push(
            &point,
            "joint_entropy_analytic",
            expected_joint_entropy(d),
            0.0,
        )?;
        rows.push(&point, "identity_beta_form", marginal_sum_beta_form(d), 0.0)?;
        if d >= 2 {
            rows.push(
                &point,
                "identity_shifted_form",
                marginal_sum_shifted_form(d),
                0.0,
            )?;
        }
    }
    Ok(rows.rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompressionParams {
    pub d: usize,
    pub n: Vec<usize>,
    pub blocks: usize,
    pub search: BlockSearch,
    pub seed: u64,
}

impl CompressionParams {
    pub fn from_params(p: &mut Params<'_>) -> Result<Self> {
        let out = CompressionParams {
            d: p.get("d", 20)?,
            n: p.list("n", &[1000, 2000, 5000, 10_000])?,
            blocks: p.get("blocks", 2)?,
            search: BlockSearch::from_params(p)?,
            seed: p.get("seed", 0)?,
        };
        if !(2..=20).contains(&out.d) {
            return Err(Error::Config("compression needs 2 <= d <= 20".into()));
        }
        if out.n.contains(&0) {
            return Err(Error::Config("n must be positive".into()));
        }
        Ok(out)
    }
}

/// Independent sources with `P(S_i = 1) = i/d`, mixed by a random
/// invertible matrix.
pub(crate) fn mixed_sources(
    d: usize,
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<(SampleSet, SampleSet)> {
    let mut rng = derived(seed, stream);
    let params: Vec<f64> = (1..=d).map(|i| i as f64 / d as f64).collect();
    let sources = sample_bernoulli_product(&params, n, &mut rng)?;
    let mix = FieldMatrix::random_invertible(d, PrimeField::BINARY, &mut rng);
    let mixed = sources.transform(&mix)?;
    Ok((sources, mixed))
}

/// `sum_i h(i/d)`.
pub(crate) fn source_reference(d: usize) -> f64 {
    (1..=d)
        .map(|i| binary_entropy(i as f64 / d as f64).expect("i/d is a probability"))
        .sum()
}

pub fn run_compression(params: &CompressionParams) -> Result<Vec<ResultRow>> {
    let mut rows = Rows::new("compression", params.seed);
    let d = params.d;
    for &n in &params.n {
        let (sources, x) = mixed_sources(d, n, params.seed, n as u64)?;
        let point = format!("d={d},n={n}");
        rows.push(&point, "source_reference", source_reference(d), 0.0)?;
        let source_empirical: f64 = (0..d).map(|j| sources.component_entropy(j)).sum();
        rows.push(&point, "source_marginal_empirical", source_empirical, 0.0)?;
        rows.push(
            &point,
            "huffman_dictionary",
            coding::huffman_dictionary_rate(&x, DictionaryCost::Words).bits_per_symbol,
            0.0,
        )?;
        rows.push(
            &point,
            "marginal_no_transform",
            coding::marginal_rate_no_transform(&x).bits_per_symbol,
            0.0,
        )?;
        let (blob, secs) = timed(|| coding::compress(&x, Mode::Glica))?;
        rows.push(
            &point,
            "glica_codec",
            blob.rate_report("glica")?.bits_per_symbol,
            secs,
        )?;
        let cfg = params.search.config(params.blocks.clamp(1, d), params.seed);
        let (blob, secs) = timed(|| coding::compress(&x, Mode::BloGlica(cfg)))?;
        rows.push(
            &point,
            "bloglica_codec",
            blob.rate_report("bloglica")?.bits_per_symbol,
            secs,
        )?;
    }
    Ok(rows.rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundStatisticsParams {
    pub d: Vec<usize>,
    pub q: Vec<u32>,
    pub trials: usize,
    pub a: f64,
    pub seed: u64,
}

impl BoundStatisticsParams {
    pub fn from_params(p: &mut Params<'_>) -> Result<Self> {
        let out = BoundStatisticsParams {
            d: p.list("d", &[8, 16, 20])?,
            q: p.list("q", &[2, 7])?,
            trials: positive("trials", p.get("trials", 10_000)?)?,
            a: p.get("a", 6.0)?,
            seed: p.get("seed", 0)?,
        };
        if out.d.contains(&0) {
            return Err(Error::Config("d must be positive".into()));
        }
        Ok(out)
    }
}

pub fn run_bound_statistics(params: &BoundStatisticsParams) -> Result<Vec<ResultRow>> {
    let mut rows = Rows::new("bound-statistics", params.seed);
    for field in fields(&params.q)? {
        for &d in &params.d {
            let stream_seed = params.seed ^ ((field.order() as u64) << 40) ^ ((d as u64) << 20);
            let (st, secs) =
                timed(|| Ok(row_draw_statistics(d, field, params.trials, stream_seed)))?;
            let point = format!("d={d},q={}", field.order());
            let a = params.a;
            rows.push(&point, "mean_minus_d", st.mean - d as f64, secs)?;
            rows.push(&point, "mean_se", st.mean_standard_error(), 0.0)?;
            rows.push(
                &point,
                "analytic_mean_minus_d",
                st.analytic_mean - d as f64,
                0.0,
            )?;
            rows.push(&point, "mean_overhead_bound", st.mean_overhead_bound(), 0.0)?;
            rows.push(&point, "variance", st.variance, 0.0)?;
            rows.push(&point, "variance_se", st.variance_standard_error(), 0.0)?;
            rows.push(&point, "analytic_variance", st.analytic_variance, 0.0)?;
            rows.push(&point, "variance_bound", st.variance_bound, 0.0)?;
            rows.push(&point, "tail", st.tail_fraction(a), 0.0)?;
            rows.push(&point, "tail_se", st.tail_standard_error(a), 0.0)?;
            rows.push(
                &point,
                "chebyshev_bound",
                st.analytic_variance / (a * a),
                0.0,
            )?;
        }
    }
    Ok(rows.rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovery_at_small_scale() {
        let p = RecoverSourcesParams {
            d: vec![4],
            n: 5000,
            p: 0.3,
            trials: 8,
            seed: 2,
        };
        let rows = run_recover_sources(&p).unwrap();
        let get = |m: &str| rows.iter().find(|r| r.metric == m).unwrap().value;
        assert!(get("lower_bound") <= get("glica") + 1e-9);
        assert!(get("recovery_rate") >= 0.75);
        assert!((get("source_entropy") - 4.0 * binary_entropy(0.3).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn representation_orderings() {
        let p = RepresentationParams {
            d: vec![6, 8],
            n: 3000,
            shape: Shape::Zipf { s: 1.01 },
            blocks: vec![2, 3],
            search: BlockSearch::default(),
            seed: 1,
        };
        let rows = run_zipf(&p).unwrap();
        for d in [6, 8] {
            let point = format!("d={d}");
            let get = |m: &str| {
                rows.iter()
                    .find(|r| r.point == point && r.metric == m)
                    .unwrap()
                    .value
            };
            assert!(get("lower_bound") <= get("glica") + 1e-9);
            assert!(get("glica") <= get("identity") + 1e-9);
            assert!(get("bloglica_b2") <= get("identity") + 1e-9);
        }
    }

    #[test]
    fn gfq_points_cover_each_field() {
        let p = GfqParams {
            d: 3,
            q: vec![2, 3, 5],
            n: 2000,
            s: 1.01,
            blocks: vec![2],
            search: BlockSearch::default(),
            seed: 0,
        };
        let rows = run_gfq(&p).unwrap();
        for q in [2, 3, 5] {
            let point = format!("d=3,q={q}");
            let get = |m: &str| {
                rows.iter()
                    .find(|r| r.point == point && r.metric == m)
                    .unwrap()
                    .value
            };
            assert!(get("lower_bound") <= get("glica") + 1e-9);
        }
        assert!(matches!(
            run_gfq(&GfqParams { q: vec![4], ..p }),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn linear_vs_nonlinear_identity_dominates_glica() {
        let p = LinearVsNonlinearParams {
            d: vec![4, 8],
            n: 0,
            s: 1.01,
            seed: 3,
        };
        let rows = run_linear_vs_nonlinear(&p).unwrap();
        for d in [4, 8] {
            let point = format!("d={d}");
            let get = |m: &str| {
                rows.iter()
                    .find(|r| r.point == point && r.metric == m)
                    .unwrap()
                    .value
            };
            assert!(get("glica") <= get("identity") + 1e-9);
            assert!(get("order_permutation") >= get("joint_entropy") - 1e-9);
        }
    }

    #[test]
    fn source_reference_value() {
        assert!((source_reference(20) - 14.355046).abs() < 1e-6);
    }
}
