use serde::Serialize;

use crate::pmf::SampleSet;

/// Bit accounting for one coding scheme: `total = model + payload`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateReport {
    pub scheme: String,
    pub n: usize,
    pub total_bits: f64,
    pub bits_per_symbol: f64,
    /// Side information: header, transform, dictionary, stream lengths.
    pub model_bits: f64,
    pub payload_bits: f64,
    /// Empirical-entropy payload the scheme is compared against, if any.
    pub ideal_payload_bits: Option<f64>,
}

impl RateReport {
    pub fn new(
        scheme: impl Into<String>,
        n: usize,
        model_bits: f64,
        payload_bits: f64,
        ideal_payload_bits: Option<f64>,
    ) -> Self {
        let total_bits = model_bits + payload_bits;
        RateReport {
            scheme: scheme.into(),
            n,
            total_bits,
            bits_per_symbol: total_bits / n as f64,
            model_bits,
            payload_bits,
            ideal_payload_bits,
        }
    }
}

/// Estimated cost of coding each component separately without a transform:
/// `sum_j n H_emp(j)` plus the adaptive-coder redundancy `(q-1)/2 log2 n`
/// per component.
pub fn marginal_rate_no_transform(s: &SampleSet) -> RateReport {
    let n = s.n() as f64;
    let q = s.field().order() as f64;
    let ideal: f64 = (0..s.dim()).map(|j| n * s.component_entropy(j)).sum();
    let redundancy = s.dim() as f64 * 0.5 * (q - 1.0) * n.log2();
    RateReport::new(
        "marginal-no-transform",
        s.n(),
        0.0,
        ideal + redundancy,
        Some(ideal),
    )
}
