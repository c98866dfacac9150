//! Adaptive q-ary arithmetic coder with a Krichevsky-Trofimov model.
//!
//! Interval arithmetic uses 62-bit registers and 128-bit products, so the
//! truncation loss per symbol is below 2^-28 bits and the code length stays
//! within two bits of the model's ideal code length.

use crate::gf::Elem;

const BITS: u32 = 62;
const TOP: u64 = 1 << BITS;
const HALF: u64 = 1 << (BITS - 1);
const QUARTER: u64 = 1 << (BITS - 2);
const MAX_TOTAL: u64 = 1 << 32;

/// Add-1/2 estimator with doubled counts: symbol `a` has frequency
/// `2 count(a) + 1` out of `2 n + q`.
#[derive(Clone, Debug)]
struct KtModel {
    freq: Vec<u64>,
    total: u64,
}

impl KtModel {
    fn new(q: usize) -> Self {
        KtModel {
            freq: vec![1; q],
            total: q as u64,
        }
    }

    fn range(&self, symbol: usize) -> (u64, u64) {
        let lo: u64 = self.freq[..symbol].iter().sum();
        (lo, lo + self.freq[symbol])
    }

    fn find(&self, target: u64) -> (usize, u64, u64) {
        let mut lo = 0;
        for (symbol, &f) in self.freq.iter().enumerate() {
            if target < lo + f {
                return (symbol, lo, lo + f);
            }
            lo += f;
        }
        unreachable!("target below total")
    }

    fn update(&mut self, symbol: usize) {
        self.freq[symbol] += 2;
        self.total += 2;
        if self.total > MAX_TOTAL {
            // Keep frequencies odd so none reaches zero.
            self.total = 0;
            for f in &mut self.freq {
                *f = (*f / 2) | 1;
                self.total += *f;
            }
        }
    }
}

#[derive(Default)]
struct BitWriter {
    bytes: Vec<u8>,
    bits: u64,
}

impl BitWriter {
    fn push(&mut self, bit: bool) {
        if self.bits % 8 == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().expect("byte pushed above") |= 0x80 >> (self.bits % 8);
        }
        self.bits += 1;
    }

    fn push_with_pending(&mut self, bit: bool, pending: &mut u64) {
        self.push(bit);
        for _ in 0..*pending {
            self.push(!bit);
        }
        *pending = 0;
    }
}

/// One encoded component stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedStream {
    pub bytes: Vec<u8>,
    /// Code length before padding to whole bytes.
    pub bits: u64,
}

/// Encodes `symbols` (each `< q`) with a fresh adaptive model.
pub fn encode(symbols: impl IntoIterator<Item = Elem>, q: usize) -> EncodedStream {
    let mut model = KtModel::new(q);
    let mut out = BitWriter::default();
    let (mut low, mut high, mut pending) = (0u64, TOP - 1, 0u64);
    for s in symbols {
        let s = s as usize;
        let (lo, hi) = model.range(s);
        let span = (high - low + 1) as u128;
        let total = model.total as u128;
        high = low + (span * hi as u128 / total) as u64 - 1;
        low += (span * lo as u128 / total) as u64;
        loop {
            if high < HALF {
                out.push_with_pending(false, &mut pending);
            } else if low >= HALF {
                out.push_with_pending(true, &mut pending);
                low -= HALF;
                high -= HALF;
            } else if low >= QUARTER && high < HALF + QUARTER {
                pending += 1;
                low -= QUARTER;
                high -= QUARTER;
            } else {
                break;
            }
            low <<= 1;
            high = (high << 1) | 1;
        }
        model.update(s);
    }
    pending += 1;
    out.push_with_pending(low >= QUARTER, &mut pending);
    EncodedStream {
        bits: out.bits,
        bytes: out.bytes,
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
}

impl BitReader<'_> {
    /// Reads past the end as zeros, matching the encoder's padding.
    fn next(&mut self) -> u64 {
        let byte = (self.pos / 8) as usize;
        let bit = self
            .bytes
            .get(byte)
            .map_or(0, |b| (b >> (7 - self.pos % 8)) & 1);
        self.pos += 1;
        bit as u64
    }
}

/// Decodes `n` symbols written by [`encode`] with the same `q`.
pub fn decode(bytes: &[u8], n: usize, q: usize) -> Vec<Elem> {
    let mut model = KtModel::new(q);
    let mut input = BitReader { bytes, pos: 0 };
    let (mut low, mut high) = (0u64, TOP - 1);
    let mut value = 0u64;
    for _ in 0..BITS {
        value = (value << 1) | input.next();
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let span = (high - low + 1) as u128;
        let total = model.total as u128;
        let target = (((value - low) as u128 + 1) * total - 1) / span;
        let (s, lo, hi) = model.find(target as u64);
        high = low + (span * hi as u128 / total) as u64 - 1;
        low += (span * lo as u128 / total) as u64;
        loop {
            if high < HALF {
                // Lower half: nothing to subtract.
            } else if low >= HALF {
                low -= HALF;
                high -= HALF;
                value -= HALF;
            } else if low >= QUARTER && high < HALF + QUARTER {
                low -= QUARTER;
                high -= QUARTER;
                value -= QUARTER;
            } else {
                break;
            }
            low <<= 1;
            high = (high << 1) | 1;
            value = (value << 1) | input.next();
        }
        out.push(s as Elem);
        model.update(s);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::entropy;
    use proptest::prelude::*;

    fn empirical_bits(symbols: &[Elem], q: usize) -> f64 {
        let mut counts = vec![0.0; q];
        for &s in symbols {
            counts[s as usize] += 1.0;
        }
        let n = symbols.len() as f64;
        let p: Vec<f64> = counts.iter().map(|c| c / n).collect();
        n * entropy(&p).unwrap()
    }

    /// `-log2` of the sequential KT probability, computed in floating point.
    fn kt_ideal_bits(symbols: &[Elem], q: usize) -> f64 {
        let mut counts = vec![0.0; q];
        let mut bits = 0.0;
        for (i, &s) in symbols.iter().enumerate() {
            bits -= ((counts[s as usize] + 0.5) / (i as f64 + q as f64 / 2.0)).log2();
            counts[s as usize] += 1.0;
        }
        bits
    }

    #[test]
    fn constant_stream_costs_about_half_log_n_per_extra_symbol() {
        let n = 10_000;
        let s = vec![1 as Elem; n];
        let enc = encode(s.iter().copied(), 2);
        assert_eq!(decode(&enc.bytes, n, 2), s);
        let bound = 0.5 * (n as f64).log2() + 4.0;
        assert!((enc.bits as f64) <= bound, "{} > {bound}", enc.bits);
    }

    #[test]
    fn close_to_the_model_code_length() {
        let symbols: Vec<Elem> = (0..5000u32)
            .map(|i| ((i * 7919) % 13 % 5) as Elem)
            .collect();
        let enc = encode(symbols.iter().copied(), 5);
        let ideal = kt_ideal_bits(&symbols, 5);
        assert!(enc.bits as f64 <= ideal + 2.0 + 1e-6);
        assert!(enc.bits as f64 >= ideal - 1e-6);
        assert_eq!(decode(&enc.bytes, symbols.len(), 5), symbols);
    }

    #[test]
    fn empty_and_single_symbol_streams() {
        let enc = encode(std::iter::empty(), 3);
        assert_eq!(decode(&enc.bytes, 0, 3), Vec::<Elem>::new());
        let enc = encode([2 as Elem], 3);
        assert_eq!(decode(&enc.bytes, 1, 3), vec![2]);
    }

    #[test]
    fn large_alphabet_with_rescaling() {
        let q = 65521;
        let symbols: Vec<Elem> = (0..70_000u64)
            .map(|i| ((i * i) % q as u64) as Elem)
            .collect();
        let enc = encode(symbols.iter().copied(), q);
        assert_eq!(decode(&enc.bytes, symbols.len(), q), symbols);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn round_trip_and_kt_bound(
            q in prop::sample::select(vec![2usize, 3, 5, 7]),
            raw in prop::collection::vec(any::<u16>(), 1..3000),
            skew in 0u16..4,
        ) {
            let symbols: Vec<Elem> = raw.iter().map(|&r| ((r >> skew) as usize % q) as Elem).collect();
            let enc = encode(symbols.iter().copied(), q);
            prop_assert_eq!(decode(&enc.bytes, symbols.len(), q), symbols.clone());
            let n = symbols.len() as f64;
            let bound = empirical_bits(&symbols, q) + 0.5 * (q as f64 - 1.0) * n.log2() + 4.0;
            prop_assert!(enc.bits as f64 <= bound, "{} > {}", enc.bits, bound);
        }
    }
}
