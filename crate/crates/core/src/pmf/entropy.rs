use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gf::{decode_word, dot, encode_word};
use crate::pmf::JointPMF;

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn entropy(p: &[f64]) -> Result<f64> {
    if let Some(bad) = p.iter().find(|x| !(**x >= 0.0)) {
        return Err(Error::Domain(format!("negative probability {bad}")));
    }
    Ok(entropy_unchecked(p))
}

pub(crate) fn entropy_unchecked(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.log2())
        .sum::<f64>()
}

/// Entropy of the empirical distribution given by `counts` over `n` draws.
pub(crate) fn count_entropy(counts: &[u64], n: u64) -> f64 {
    let n = n as f64;
    -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.log2()
        })
        .sum::<f64>()
}

/// `h(p) = -p log p - (1-p) log(1-p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("{p} is not a probability")));
    }
    Ok(binary_entropy_unchecked(p))
}

#[inline]
pub(crate) fn binary_entropy_unchecked(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (1.0 - p).log2();
    }
    h
}

/// How [`all_combination_entropies_with`] evaluates the row marginals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CombinationStrategy {
    /// Marginalize once per row: O(d q^(2d)).
    Naive,
    /// Walsh-Hadamard transform for q = 2, multidimensional DFT over Z_q
    /// otherwise: O(d q^(d+1)).
    #[default]
    Fast,
}

/// Entropy of `U_r = <r, X>` for every row index `r` in `0..q^d`.
pub fn all_combination_entropies(p: &JointPMF) -> Vec<f64> {
    all_combination_entropies_with(p, CombinationStrategy::Fast)
}

pub fn all_combination_entropies_with(p: &JointPMF, strategy: CombinationStrategy) -> Vec<f64> {
    let mut out = match (strategy, p.field().is_binary()) {
        (CombinationStrategy::Naive, true) => naive_binary(p),
        (CombinationStrategy::Naive, false) => naive_general(p),
        (CombinationStrategy::Fast, true) => walsh_hadamard(p),
        (CombinationStrategy::Fast, false) => character_transform(p),
    };
    // The zero row is constant whatever the rounding in the transforms.
    out[0] = 0.0;
    out
}

#[cfg(feature = "parallel")]
fn map_rows<F: Fn(usize) -> f64 + Sync + Send>(len: usize, f: F) -> Vec<f64> {
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_rows<F: Fn(usize) -> f64>(len: usize, f: F) -> Vec<f64> {
    (0..len).map(f).collect()
}

fn naive_binary(p: &JointPMF) -> Vec<f64> {
    let probs = p.probs();
    map_rows(probs.len(), |r| {
        let ones: f64 = probs
            .iter()
            .enumerate()
            .filter(|(x, _)| (r & x).count_ones() & 1 == 1)
            .map(|(_, &v)| v)
            .sum();
        binary_entropy_unchecked(ones)
    })
}

fn naive_general(p: &JointPMF) -> Vec<f64> {
    let f = p.field();
    let d = p.dim();
    let q = f.order() as usize;
    let probs = p.probs();
    map_rows(probs.len(), |r| {
        let mut row = vec![0; d];
        let mut word = vec![0; d];
        decode_word(f, r as u64, &mut row);
        let mut marginal = vec![0.0; q];
        for (x, &v) in probs.iter().enumerate() {
            decode_word(f, x as u64, &mut word);
            marginal[dot(f, &row, &word) as usize] += v;
        }
        entropy_unchecked(&marginal)
    })
}

/// In-place unnormalized fast Walsh-Hadamard transform.
pub(crate) fn fwht(data: &mut [f64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        for block in data.chunks_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
}

/// Coefficient `r` of the transform is `P(U_r = 0) - P(U_r = 1)`.
fn walsh_hadamard(p: &JointPMF) -> Vec<f64> {
    let mut coeffs = p.probs().to_vec();
    fwht(&mut coeffs);
    map_rows(coeffs.len(), |r| {
        binary_entropy_unchecked(0.5 * (1.0 + coeffs[r]))
    })
}

/// `F(r) = sum_x p(x) w^<r,x>` with `w = exp(2 pi i / q)`, so that
/// `P(U_r = a) = (1/q) sum_c F(c r) w^(-c a)`.
fn character_transform(p: &JointPMF) -> Vec<f64> {
    let f = p.field();
    let d = p.dim();
    let q = f.order() as usize;
    let roots: Vec<Complex64> = (0..q)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / q as f64))
        .collect();

    let mut spectrum: Vec<Complex64> = p.probs().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut line = vec![Complex64::new(0.0, 0.0); q];
    for axis in 0..d {
        let stride = q.pow((d - 1 - axis) as u32);
        for base in 0..spectrum.len() {
            if (base / stride) % q != 0 {
                continue;
            }
            for (k, slot) in line.iter_mut().enumerate() {
                *slot = (0..q)
                    .map(|x| spectrum[base + x * stride] * roots[(k * x) % q])
                    .sum();
            }
            for (k, &v) in line.iter().enumerate() {
                spectrum[base + k * stride] = v;
            }
        }
    }

    map_rows(spectrum.len(), |r| {
        let mut row = vec![0; d];
        let mut scaled = vec![0; d];
        decode_word(f, r as u64, &mut row);
        let multiples: Vec<Complex64> = (0..q)
            .map(|c| {
                for (s, &v) in scaled.iter_mut().zip(&row) {
                    *s = f.mul(v, c as u16);
                }
                spectrum[encode_word(f, &scaled) as usize]
            })
            .collect();
        let marginal: Vec<f64> = (0..q)
            .map(|a| {
                let s: Complex64 = multiples
                    .iter()
                    .enumerate()
                    .map(|(c, &v)| v * roots[(q - (c * a) % q) % q])
                    .sum();
                (s.re / q as f64).max(0.0)
            })
            .collect();
        entropy_unchecked(&marginal)
    })
}
