use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{check_dim, Error, Result};
use crate::gf::{decode_word, Elem, PrimeField};
use crate::pmf::{Capacity, JointPMF, SampleSet};

/// Inverse-CDF sampler over `0..len`.
#[derive(Clone, Debug)]
pub struct InverseCdf {
    cdf: Vec<f64>,
}

impl InverseCdf {
    pub fn new(pmf: &[f64]) -> Result<Self> {
        if pmf.is_empty() || pmf.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::Domain(
                "pmf must be non-empty and non-negative".into(),
            ));
        }
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = pmf
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect();
        let total = acc;
        if !(total > 0.0) {
            return Err(Error::Domain("pmf has zero mass".into()));
        }
        cdf.iter_mut().for_each(|c| *c /= total);
        Ok(InverseCdf { cdf })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.cdf.len() - 1)
    }
}

/// Symbol draws over `0..m` together with the pmf they were drawn from.
#[derive(Clone, Debug, PartialEq)]
pub struct Draws {
    pub symbols: Vec<usize>,
    pub pmf: Vec<f64>,
}

impl Draws {
    fn generate<R: Rng + ?Sized>(pmf: Vec<f64>, n: usize, rng: &mut R) -> Result<Self> {
        let sampler = InverseCdf::new(&pmf)?;
        let symbols = (0..n).map(|_| sampler.sample(rng)).collect();
        Ok(Draws { symbols, pmf })
    }

    /// Maps symbol `k` to word `assignment[k]` and returns the sample rows.
    pub fn to_samples(
        &self,
        field: PrimeField,
        d: usize,
        assignment: &[usize],
    ) -> Result<SampleSet> {
        let cells = Capacity::default().cells(field, d)?;
        check_dim(cells, assignment.len())?;
        check_dim(cells, self.pmf.len())?;
        let mut data = vec![0 as Elem; self.symbols.len() * d];
        for (row, &k) in data.chunks_mut(d).zip(&self.symbols) {
            decode_word(field, assignment[k] as u64, row);
        }
        SampleSet::new(field, d, data)
    }

    /// Ground-truth pmf under the same symbol-to-word assignment.
    pub fn mapped_pmf(
        &self,
        field: PrimeField,
        d: usize,
        assignment: &[usize],
    ) -> Result<JointPMF> {
        check_dim(self.pmf.len(), assignment.len())?;
        let mut probs = vec![0.0; self.pmf.len()];
        for (k, &p) in self.pmf.iter().enumerate() {
            probs[assignment[k]] = p;
        }
        JointPMF::new(field, d, probs)
    }
}

/// Seeded random bijection of `0..m` (Fisher-Yates shuffle).
pub fn random_assignment<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(rng);
    perm
}

/// `P(k) = k^-s / sum_l l^-s` for `k = 1..m`, stored at index `k - 1`.
pub fn zipf_pmf(m: usize, s: f64) -> Result<Vec<f64>> {
    if m == 0 || !(s >= 0.0) {
        return Err(Error::Domain(format!(
            "zipf needs m >= 1 and s >= 0 (m={m}, s={s})"
        )));
    }
    let weights: Vec<f64> = (1..=m).map(|k| (k as f64).powf(-s)).collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

pub fn sample_zipf<R: Rng + ?Sized>(m: usize, s: f64, n: usize, rng: &mut R) -> Result<Draws> {
    Draws::generate(zipf_pmf(m, s)?, n, rng)
}

/// Beta-binomial pmf with `m` trials, truncated to the alphabet `0..m`.
///
/// The untruncated support is `0..=m`; the mass at `k = m` is dropped and
/// the remainder renormalized so the support matches an alphabet of size m.
pub fn beta_binomial_pmf(m: usize, a: f64, b: f64) -> Result<Vec<f64>> {
    if m == 0 || !(a > 0.0) || !(b > 0.0) {
        return Err(Error::Domain(format!(
            "beta-binomial needs m >= 1 and a, b > 0 (m={m}, a={a}, b={b})"
        )));
    }
    let mf = m as f64;
    let ln_beta = |x: f64, y: f64| libm::lgamma(x) + libm::lgamma(y) - libm::lgamma(x + y);
    let ln_norm = ln_beta(a, b);
    let log_p: Vec<f64> = (0..m)
        .map(|k| {
            let kf = k as f64;
            let ln_choose =
                libm::lgamma(mf + 1.0) - libm::lgamma(kf + 1.0) - libm::lgamma(mf - kf + 1.0);
            ln_choose + ln_beta(kf + a, mf - kf + b) - ln_norm
        })
        .collect();
    let peak = log_p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_p.iter().map(|&l| (l - peak).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

pub fn sample_beta_binomial<R: Rng + ?Sized>(
    m: usize,
    a: f64,
    b: f64,
    n: usize,
    rng: &mut R,
) -> Result<Draws> {
    Draws::generate(beta_binomial_pmf(m, a, b)?, n, rng)
}

/// A point drawn uniformly from the (m-1)-simplex: normalized i.i.d.
/// standard exponentials.
pub fn sample_uniform_simplex<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    assert!(m >= 1, "simplex dimension must be positive");
    let mut v: Vec<f64> = (0..m).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

/// n rows of independent bits, bit j set with probability `params[j]`.
pub fn sample_bernoulli_product<R: Rng + ?Sized>(
    params: &[f64],
    n: usize,
    rng: &mut R,
) -> Result<SampleSet> {
    if let Some(bad) = params.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Domain(format!("{bad} is not a probability")));
    }
    let data = (0..n)
        .flat_map(|_| {
            params
                .iter()
                .map(|&p| Elem::from(rng.random::<f64>() < p))
                .collect::<Vec<_>>()
        })
        .collect();
    SampleSet::new(PrimeField::BINARY, params.len(), data)
}

/// Exact joint pmf of independent bits with the given parameters.
pub fn bernoulli_product_pmf(params: &[f64]) -> Result<JointPMF> {
    let d = params.len();
    let cells = Capacity::default().cells(PrimeField::BINARY, d)?;
    let probs = (0..cells)
        .map(|x| {
            params
                .iter()
                .enumerate()
                .map(|(j, &p)| {
                    if (x >> (d - 1 - j)) & 1 == 1 {
                        p
                    } else {
                        1.0 - p
                    }
                })
                .product()
        })
        .collect();
    JointPMF::new(PrimeField::BINARY, d, probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::binary_entropy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn zipf_examples() {
        let u = zipf_pmf(5, 0.0).unwrap();
        assert!(u.iter().all(|&p| (p - 0.2).abs() < 1e-15));
        let p = zipf_pmf(2, 1.0).unwrap();
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-15 && (p[1] - 1.0 / 3.0).abs() < 1e-15);
        let p = zipf_pmf(1 << 12, 1.01).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(zipf_pmf(0, 1.0).is_err());
    }

    #[test]
    fn beta_binomial_examples() {
        // a = b = 1 is uniform on 0..=m; truncation keeps it uniform on 0..m.
        let u = beta_binomial_pmf(9, 1.0, 1.0).unwrap();
        assert!(u.iter().all(|&p| (p - 1.0 / 9.0).abs() < 1e-12));

        let untruncated = |m: usize, a: f64, b: f64, k: usize| {
            let (mf, kf) = (m as f64, k as f64);
            let lb = |x: f64, y: f64| libm::lgamma(x) + libm::lgamma(y) - libm::lgamma(x + y);
            (libm::lgamma(mf + 1.0) - libm::lgamma(kf + 1.0) - libm::lgamma(mf - kf + 1.0)
                + lb(kf + a, mf - kf + b)
                - lb(a, b))
            .exp()
        };
        // m = 2, a = b = 3 over the full support: P(1) = 1 - 2 P(0).
        let (p0, p1) = (untruncated(2, 3.0, 3.0, 0), untruncated(2, 3.0, 3.0, 1));
        assert!((p1 - (1.0 - 2.0 * p0)).abs() < 1e-12);
        assert!((p0 - 2.0 / 7.0).abs() < 1e-12);

        // Symmetry of the full support survives on 1..m after truncation.
        let m = 64;
        let p = beta_binomial_pmf(m, 3.0, 3.0).unwrap();
        for k in 1..m {
            assert!((p[k] - p[m - k]).abs() < 1e-15);
        }
        assert!(untruncated(m, 3.0, 3.0, m) < 1e-3);
    }

    #[test]
    fn simplex_draws() {
        let mut r = rng(1);
        assert_eq!(sample_uniform_simplex(1, &mut r), vec![1.0]);
        let m = 4;
        let draws = 100_000;
        let mut mean = vec![0.0; m];
        for _ in 0..draws {
            let p = sample_uniform_simplex(m, &mut r);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&x| x >= 0.0));
            mean.iter_mut().zip(&p).for_each(|(a, b)| *a += b);
        }
        // Dirichlet(1,...,1): var = (m - 1) / (m^2 (m + 1))
        let sd = ((m as f64 - 1.0) / ((m * m) as f64 * (m as f64 + 1.0))).sqrt();
        let se = sd / (draws as f64).sqrt();
        for x in mean {
            assert!((x / draws as f64 - 0.25).abs() < 3.0 * se);
        }
    }

    #[test]
    fn bernoulli_rows() {
        let mut r = rng(2);
        let s = sample_bernoulli_product(&[0.0; 5], 50, &mut r).unwrap();
        assert!(s.as_slice().iter().all(|&b| b == 0));

        let params: Vec<f64> = (1..=20).map(|i| i as f64 / 20.0).collect();
        let total: f64 = params.iter().map(|&p| binary_entropy(p).unwrap()).sum();
        assert!((total - 14.36).abs() < 5e-3);

        let n = 20_000;
        let s = sample_bernoulli_product(&params, n, &mut r).unwrap();
        for (j, &p) in params.iter().enumerate() {
            let mean = s.component(j).map(f64::from).sum::<f64>() / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((mean - p).abs() <= 3.0 * se + 1e-12, "bit {j}");
        }
        assert!(sample_bernoulli_product(&[1.5], 1, &mut r).is_err());
    }

    #[test]
    fn product_pmf_matches_formula() {
        let p = bernoulli_product_pmf(&[0.1, 0.2]).unwrap();
        let expected = [0.72, 0.18, 0.08, 0.02];
        for (a, b) in p.probs().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    /// Multinomial 3-sigma bands at n = 10^5 on every cell.
    #[test]
    fn samplers_track_their_pmf() {
        let n = 100_000;
        let mut r = rng(3);
        let zipf = sample_zipf(64, 1.01, n, &mut r).unwrap();
        let bb = sample_beta_binomial(64, 3.0, 3.0, n, &mut r).unwrap();
        for draws in [zipf, bb] {
            let mut counts = vec![0usize; draws.pmf.len()];
            for &k in &draws.symbols {
                counts[k] += 1;
            }
            for (c, &p) in counts.iter().zip(&draws.pmf) {
                let se = (p * (1.0 - p) / n as f64).sqrt();
                // 3.5 sigma keeps the 64-cell family-wise miss rate small.
                assert!((*c as f64 / n as f64 - p).abs() <= 3.5 * se + 1e-9);
            }
        }
    }

    #[test]
    fn assignment_maps_symbols_to_words() {
        let mut r = rng(4);
        let draws = sample_zipf(8, 1.0, 100, &mut r).unwrap();
        let assignment = random_assignment(8, &mut r);
        let mut sorted = assignment.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..8).collect::<Vec<_>>());
        let samples = draws
            .to_samples(PrimeField::BINARY, 3, &assignment)
            .unwrap();
        for (i, &k) in draws.symbols.iter().enumerate() {
            assert_eq!(samples.word_index(i), assignment[k] as u64);
        }
        let pmf = draws
            .mapped_pmf(PrimeField::BINARY, 3, &assignment)
            .unwrap();
        assert_eq!(pmf.probs()[assignment[0]], draws.pmf[0]);
    }
}
