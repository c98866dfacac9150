use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::coding::RateReport;
use crate::pmf::SampleSet;

/// How the Huffman dictionary is charged.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DictionaryCost {
    /// `n_0` words of `ceil(d log2 q)` bits each.
    #[default]
    Words,
    /// Canonical-code serialization: a 32-bit symbol count, an 8-bit maximum
    /// code length, and per symbol its word plus its code length.
    Canonical,
}

/// Huffman code lengths for positive weights. A single symbol gets length 1.
pub fn huffman_code_lengths(weights: &[u64]) -> Vec<u32> {
    match weights.len() {
        0 => return Vec::new(),
        1 => return vec![1],
        _ => {}
    }
    let m = weights.len();
    let mut parent = vec![usize::MAX; 2 * m - 1];
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| Reverse((w, i)))
        .collect();
    let mut next = m;
    while heap.len() > 1 {
        let Reverse((wa, a)) = heap.pop().expect("two nodes left");
        let Reverse((wb, b)) = heap.pop().expect("two nodes left");
        parent[a] = next;
        parent[b] = next;
        heap.push(Reverse((wa + wb, next)));
        next += 1;
    }
    // Parents are created after their children, so walk top-down.
    let mut depth = vec![0u32; 2 * m - 1];
    for node in (0..2 * m - 2).rev() {
        depth[node] = depth[parent[node]] + 1;
    }
    depth.truncate(m);
    depth
}

/// Huffman code over the distinct sample rows, charged with a dictionary.
pub fn huffman_dictionary_rate(s: &SampleSet, cost: DictionaryCost) -> RateReport {
    let mut counts: HashMap<&[crate::gf::Elem], u64> = HashMap::new();
    for row in s.rows() {
        *counts.entry(row).or_default() += 1;
    }
    let mut weights: Vec<u64> = counts.into_values().collect();
    weights.sort_unstable();
    let lengths = huffman_code_lengths(&weights);
    let payload: u64 = weights
        .iter()
        .zip(&lengths)
        .map(|(&w, &l)| w * l as u64)
        .sum();

    let n = s.n() as f64;
    let ideal = -weights
        .iter()
        .map(|&w| {
            let p = w as f64 / n;
            w as f64 * p.log2()
        })
        .sum::<f64>();
    let word_bits = (s.dim() as f64 * s.field().bits()).ceil();
    let n0 = weights.len() as f64;
    let (scheme, dictionary) = match cost {
        DictionaryCost::Words => ("huffman+dictionary", n0 * word_bits),
        DictionaryCost::Canonical => {
            let max_len = lengths.iter().copied().max().unwrap_or(1);
            let len_bits = (max_len as f64 + 1.0).log2().ceil();
            (
                "huffman+canonical-dictionary",
                40.0 + n0 * (word_bits + len_bits),
            )
        }
    };
    RateReport::new(scheme, s.n(), dictionary, payload as f64, Some(ideal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::PrimeField;

    #[test]
    fn code_lengths() {
        assert_eq!(huffman_code_lengths(&[5]), vec![1]);
        assert_eq!(huffman_code_lengths(&[1, 1, 1, 1]), vec![2; 4]);
        let l = huffman_code_lengths(&[1, 1, 2, 4]);
        assert_eq!(l, vec![3, 3, 2, 1]);
        // Kraft equality for a full binary tree.
        let l = huffman_code_lengths(&[3, 9, 1, 7, 7, 2, 40]);
        let kraft: f64 = l.iter().map(|&x| 0.5f64.powi(x as i32)).sum();
        assert!((kraft - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rate_examples() {
        let f = PrimeField::BINARY;
        let single = SampleSet::new(f, 3, vec![1, 0, 1].repeat(50)).unwrap();
        let r = huffman_dictionary_rate(&single, DictionaryCost::Words);
        assert_eq!(r.payload_bits, 50.0);
        assert_eq!(r.model_bits, 3.0);

        let d = 6;
        let n = 4000;
        let rows: Vec<u64> = (0..n).map(|i| [0, 9, 17, 63][i % 4]).collect();
        let s = SampleSet::from_indices(f, d, &rows).unwrap();
        let r = huffman_dictionary_rate(&s, DictionaryCost::Words);
        let expected = 2.0 + 4.0 * d as f64 / n as f64;
        assert!((r.bits_per_symbol - expected).abs() < 1e-12);
        assert!((r.ideal_payload_bits.unwrap() - 2.0 * n as f64).abs() < 1e-9);

        let canonical = huffman_dictionary_rate(&s, DictionaryCost::Canonical);
        assert_eq!(canonical.payload_bits, r.payload_bits);
        assert!(canonical.model_bits > r.model_bits);
    }

    #[test]
    fn sparse_sources_cost_more_than_d() {
        let f = PrimeField::BINARY;
        let d = 20;
        let rows: Vec<u64> = (0..500u64).map(|i| i * 2039 % (1 << 20)).collect();
        let s = SampleSet::from_indices(f, d, &rows).unwrap();
        assert!(huffman_dictionary_rate(&s, DictionaryCost::Words).bits_per_symbol > d as f64);
    }
}
