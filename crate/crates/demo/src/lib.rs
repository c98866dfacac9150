//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each exported function takes plain numbers and returns a JSON string, so
//! the page needs no glue beyond `JSON.parse`. Seeds are `u32` so plain JS
//! numbers pass through. The `*_report` functions are
//! the same operations for native callers and tests.

use fica::coding::{self, DictionaryCost, Mode};
use fica::ica::{self, BloGLICAConfig};
use fica::pmf::{self, empirical_pmf};
use fica::rng::seeded;
use fica::{FieldMatrix, PrimeField};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest dimension the page offers; keeps each call well under a second.
pub const MAX_DIM: usize = 16;
pub const MAX_SAMPLES: usize = 200_000;

#[derive(Debug, Serialize)]
pub struct SeparationReport {
    pub mixing: Vec<Vec<u16>>,
    pub unmixing: Vec<Vec<u16>>,
    /// Whether `W B` is a permutation matrix.
    pub recovered: bool,
    pub source_entropy: f64,
    pub mixed_marginal_sum: f64,
    pub lower_bound: f64,
    pub objective: f64,
}

#[derive(Debug, Serialize)]
pub struct MethodComparison {
    pub joint_entropy: f64,
    pub identity: f64,
    pub lower_bound: f64,
    pub glica: f64,
    pub bloglica: f64,
    pub order_permutation: f64,
}

#[derive(Debug, Serialize)]
pub struct Rate {
    pub scheme: String,
    pub bits_per_symbol: f64,
}

#[derive(Debug, Serialize)]
pub struct CompressionReport {
    pub source_marginal_sum: f64,
    pub rates: Vec<Rate>,
    pub lossless: bool,
}

fn check(d: usize, n: usize) -> Result<(), String> {
    if !(2..=MAX_DIM).contains(&d) {
        return Err(format!("d must be between 2 and {MAX_DIM}"));
    }
    if n == 0 || n > MAX_SAMPLES {
        return Err(format!("n must be between 1 and {MAX_SAMPLES}"));
    }
    Ok(())
}

fn rows(w: &FieldMatrix) -> Vec<Vec<u16>> {
    w.rows().map(<[u16]>::to_vec).collect()
}

fn err(e: fica::Error) -> String {
    e.to_string()
}

/// Mixes `d` independent Bernoulli(p) bits by a random invertible matrix and
/// unmixes them with GLICA.
pub fn separation_report(
    d: usize,
    n: usize,
    p: f64,
    seed: u64,
) -> Result<SeparationReport, String> {
    check(d, n)?;
    let mut rng = seeded(seed);
    let sources = pmf::sample_bernoulli_product(&vec![p; d], n, &mut rng).map_err(err)?;
    let b =
        FieldMatrix::random_nontrivial_invertible(d, PrimeField::BINARY, &mut rng).map_err(err)?;
    let x = sources.transform(&b).map_err(err)?;
    let r = ica::glica(&empirical_pmf(&x).map_err(err)?).map_err(err)?;
    Ok(SeparationReport {
        recovered: r.w.mul(&b).map_err(err)?.is_monomial(),
        mixing: rows(&b),
        unmixing: rows(&r.w),
        source_entropy: (0..d).map(|j| sources.component_entropy(j)).sum(),
        mixed_marginal_sum: (0..d).map(|j| x.component_entropy(j)).sum(),
        lower_bound: r.lower_bound.unwrap_or(f64::NAN),
        objective: r.objective,
    })
}

/// Zipf(s) draws over `2^d` symbols under a random binary representation,
/// scored by every method.
pub fn comparison_report(
    d: usize,
    n: usize,
    s: f64,
    blocks: usize,
    seed: u64,
) -> Result<MethodComparison, String> {
    check(d, n)?;
    let mut rng = seeded(seed);
    let m = 1usize << d;
    let draws = pmf::sample_zipf(m, s, n, &mut rng).map_err(err)?;
    let assignment = pmf::random_assignment(m, &mut rng);
    let x = draws
        .to_samples(PrimeField::BINARY, d, &assignment)
        .map_err(err)?;
    let p = empirical_pmf(&x).map_err(err)?;
    let g = ica::glica(&p).map_err(err)?;
    let cfg = BloGLICAConfig {
        blocks: blocks.clamp(1, d),
        seed,
        ..BloGLICAConfig::default()
    };
    Ok(MethodComparison {
        joint_entropy: p.entropy(),
        identity: p.component_entropies().iter().sum(),
        lower_bound: g.lower_bound.unwrap_or(f64::NAN),
        glica: g.objective,
        bloglica: ica::bloglica_samples(&x, cfg)
            .map_err(err)?
            .result
            .objective,
        order_permutation: ica::order_permutation(&p).objective,
    })
}

/// Independent bits with `P(S_i = 1) = i/d`, mixed, then coded by each scheme.
pub fn compression_report(d: usize, n: usize, seed: u64) -> Result<CompressionReport, String> {
    check(d, n)?;
    let mut rng = seeded(seed);
    let params: Vec<f64> = (1..=d).map(|i| i as f64 / d as f64).collect();
    let sources = pmf::sample_bernoulli_product(&params, n, &mut rng).map_err(err)?;
    let b = FieldMatrix::random_invertible(d, PrimeField::BINARY, &mut rng);
    let x = sources.transform(&b).map_err(err)?;

    let mut rates = vec![
        coding::huffman_dictionary_rate(&x, DictionaryCost::Words),
        coding::marginal_rate_no_transform(&x),
    ];
    let mut lossless = true;
    for (name, mode) in [
        ("glica", Mode::Glica),
        ("bloglica", Mode::BloGlica(BloGLICAConfig::with_blocks(2))),
    ] {
        let blob = coding::compress(&x, mode).map_err(err)?;
        lossless &= coding::decompress(&blob).map_err(err)? == x;
        rates.push(blob.rate_report(name).map_err(err)?);
    }
    Ok(CompressionReport {
        source_marginal_sum: (0..d).map(|j| sources.component_entropy(j)).sum(),
        rates: rates
            .into_iter()
            .map(|r| Rate {
                scheme: r.scheme,
                bits_per_symbol: r.bits_per_symbol,
            })
            .collect(),
        lossless,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn separate(d: usize, n: usize, p: f64, seed: u32) -> Result<String, JsValue> {
    to_js(separation_report(d, n, p, seed.into()))
}

#[wasm_bindgen]
pub fn compare(d: usize, n: usize, s: f64, blocks: usize, seed: u32) -> Result<String, JsValue> {
    to_js(comparison_report(d, n, s, blocks, seed.into()))
}

#[wasm_bindgen]
pub fn compress_rates(d: usize, n: usize, seed: u32) -> Result<String, JsValue> {
    to_js(compression_report(d, n, seed.into()))
}
