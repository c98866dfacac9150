//! Binary container.
//!
//! ```text
//! "FICA" | version u8 | q u16 | d u16 | n u64 | flag u8 | transform | streams
//! ```
//!
//! All integers are little-endian. `flag` is 0 (identity, no transform
//! bytes), 1 (dense W) or 2 (staged block transform). A dense matrix is
//! the base-q integer `sum_k w_k q^k` over its row-major entries, written in
//! the fewest bytes that hold `q^(d^2) - 1`; for q = 2 that is
//! `ceil(d^2 / 8)` bytes with entry k at bit k. A staged transform is a
//! stage count u16 and block count u16, then per stage the permutation
//! (d entries of `ceil(log2 d)` bits, MSB first, padded to a byte) and each
//! diagonal block packed like a dense matrix. Each of the d component streams
//! is a u32 byte length followed by arithmetic-coded bytes.

use num_bigint::BigUint;

use crate::coding::{arith, RateReport};
use crate::error::{Error, Result};
use crate::gf::{Elem, FieldMatrix, PrimeField};
use crate::ica::{block_sizes, bloglica_samples, glica, BloGLICAConfig, BlockStage};
use crate::pmf::{empirical_pmf, SampleSet};

pub const MAGIC: [u8; 4] = *b"FICA";
pub const VERSION: u8 = 1;
const HEADER_BYTES: usize = 4 + 1 + 2 + 2 + 8 + 1;
/// Decoded sample sets are capped at this many symbols.
const MAX_SYMBOLS: u64 = 1 << 32;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    None,
    Glica,
    BloGlica(BloGLICAConfig),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Transform {
    Identity,
    Dense(FieldMatrix),
    Staged {
        blocks: usize,
        stages: Vec<BlockStage>,
    },
}

impl Transform {
    pub fn flag(&self) -> u8 {
        match self {
            Transform::Identity => 0,
            Transform::Dense(_) => 1,
            Transform::Staged { .. } => 2,
        }
    }

    /// The composed matrix W with `Y = W X`.
    pub fn matrix(&self, field: PrimeField, d: usize) -> Result<FieldMatrix> {
        match self {
            Transform::Identity => Ok(FieldMatrix::identity(field, d)),
            Transform::Dense(w) => Ok(w.clone()),
            Transform::Staged { stages, .. } => stages
                .iter()
                .try_fold(FieldMatrix::identity(field, d), |acc, s| {
                    s.matrix(field)?.mul(&acc)
                }),
        }
    }

    fn write(&self, field: PrimeField, d: usize, out: &mut Vec<u8>) {
        match self {
            Transform::Identity => {}
            Transform::Dense(w) => pack_matrix(w, out),
            Transform::Staged { blocks, stages } => {
                out.extend_from_slice(&(stages.len() as u16).to_le_bytes());
                out.extend_from_slice(&(*blocks as u16).to_le_bytes());
                for stage in stages {
                    pack_permutation(&stage.permutation, out);
                    for b in &stage.blocks {
                        pack_matrix(b, out);
                    }
                }
                debug_assert!(stages
                    .iter()
                    .all(|s| s.blocks.iter().all(|b| b.field() == field)));
                debug_assert!(stages.iter().all(|s| s.permutation.len() == d));
            }
        }
    }

    fn encoded_len(&self, field: PrimeField, d: usize) -> usize {
        let mut buf = Vec::new();
        self.write(field, d, &mut buf);
        buf.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlobHeader {
    pub field: PrimeField,
    pub d: usize,
    pub n: u64,
    pub transform: Transform,
}

/// A serialized compressed sample set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedBlob {
    bytes: Vec<u8>,
}

struct Parsed<'a> {
    header: BlobHeader,
    /// Bytes before the first stream length prefix.
    prefix_len: usize,
    streams: Vec<&'a [u8]>,
}

impl CompressedBlob {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        CompressedBlob { bytes }
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    pub fn header(&self) -> Result<BlobHeader> {
        Ok(self.parse()?.header)
    }

    /// Transform bytes in the header section.
    pub fn transform_bytes(&self) -> Result<usize> {
        Ok(self.parse()?.prefix_len - HEADER_BYTES)
    }

    /// Every byte not inside a component stream counts as model cost.
    pub fn rate_report(&self, scheme: impl Into<String>) -> Result<RateReport> {
        let parsed = self.parse()?;
        let payload: usize = parsed.streams.iter().map(|s| s.len()).sum();
        let model = self.bytes.len() - payload;
        Ok(RateReport::new(
            scheme,
            parsed.header.n as usize,
            8.0 * model as f64,
            8.0 * payload as f64,
            None,
        ))
    }

    fn parse(&self) -> Result<Parsed<'_>> {
        let mut cur = Cursor {
            bytes: &self.bytes,
            pos: 0,
        };
        if cur.take(4)? != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = cur.u8()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let q = cur.u16()?;
        let field = PrimeField::new(q as u32)
            .map_err(|_| Error::Format(format!("q = {q} is not prime")))?;
        let d = cur.u16()? as usize;
        let n = cur.u64()?;
        if d == 0 || n == 0 {
            return Err(Error::Format(format!("empty shape d = {d}, n = {n}")));
        }
        if n.saturating_mul(d as u64) > MAX_SYMBOLS {
            return Err(Error::Capacity(format!("{n} rows of {d} symbols")));
        }
        let transform = match cur.u8()? {
            0 => Transform::Identity,
            1 => {
                let w = unpack_matrix(&mut cur, field, d)?;
                if !w.is_invertible() {
                    return Err(Error::Format("singular transform".into()));
                }
                Transform::Dense(w)
            }
            2 => {
                let count = cur.u16()? as usize;
                let blocks = cur.u16()? as usize;
                if blocks == 0 || blocks > d {
                    return Err(Error::Format(format!("block count {blocks} for d = {d}")));
                }
                let sizes = block_sizes(d, blocks);
                let mut stages = Vec::with_capacity(count);
                for _ in 0..count {
                    let permutation = unpack_permutation(&mut cur, d)?;
                    let mut mats = Vec::with_capacity(blocks);
                    for &size in &sizes {
                        let b = unpack_matrix(&mut cur, field, size)?;
                        if !b.is_invertible() {
                            return Err(Error::Format("singular block".into()));
                        }
                        mats.push(b);
                    }
                    stages.push(BlockStage {
                        permutation,
                        blocks: mats,
                    });
                }
                Transform::Staged { blocks, stages }
            }
            other => return Err(Error::Format(format!("unknown transform flag {other}"))),
        };
        let prefix_len = cur.pos;
        let mut streams = Vec::with_capacity(d);
        for _ in 0..d {
            let len = cur.u32()? as usize;
            streams.push(cur.take(len)?);
        }
        if cur.pos != self.bytes.len() {
            return Err(Error::Format(format!(
                "{} trailing bytes",
                self.bytes.len() - cur.pos
            )));
        }
        Ok(Parsed {
            header: BlobHeader {
                field,
                d,
                n,
                transform,
            },
            prefix_len,
            streams,
        })
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| {
                Error::Truncation(format!(
                    "need {len} bytes at offset {}, have {}",
                    self.pos,
                    self.bytes.len() - self.pos
                ))
            })?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("take returned N bytes"))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.array()?))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }
}

/// Bytes needed for a `d x d` matrix: the fewest that hold `q^(d^2) - 1`.
pub(crate) fn matrix_bytes(field: PrimeField, d: usize) -> usize {
    let limit = BigUint::from(field.order()).pow((d * d) as u32) - 1u32;
    (limit.bits() as usize).div_ceil(8)
}

fn pack_matrix(w: &FieldMatrix, out: &mut Vec<u8>) {
    let q = w.field().order();
    let mut value = BigUint::from(0u32);
    for &e in w.as_slice().iter().rev() {
        value = value * q + e as u32;
    }
    let mut bytes = value.to_bytes_le();
    bytes.resize(matrix_bytes(w.field(), w.nrows()), 0);
    out.extend_from_slice(&bytes);
}

fn unpack_matrix(cur: &mut Cursor<'_>, field: PrimeField, d: usize) -> Result<FieldMatrix> {
    let q = field.order();
    let mut value = BigUint::from_bytes_le(cur.take(matrix_bytes(field, d))?);
    let mut data: Vec<Elem> = Vec::with_capacity(d * d);
    for _ in 0..d * d {
        let digit = &value % q;
        data.push(digit.to_u32_digits().first().copied().unwrap_or(0) as Elem);
        value /= q;
    }
    if value.bits() != 0 {
        return Err(Error::Format("matrix packing out of range".into()));
    }
    FieldMatrix::new(field, d, d, data)
}

fn permutation_width(d: usize) -> u32 {
    if d <= 1 {
        0
    } else {
        usize::BITS - (d - 1).leading_zeros()
    }
}

fn pack_permutation(perm: &[usize], out: &mut Vec<u8>) {
    let width = permutation_width(perm.len());
    let start = out.len();
    out.resize(start + (perm.len() * width as usize).div_ceil(8), 0);
    let mut bit = 0;
    for &p in perm {
        for k in (0..width).rev() {
            if (p >> k) & 1 == 1 {
                out[start + bit / 8] |= 0x80 >> (bit % 8);
            }
            bit += 1;
        }
    }
}

fn unpack_permutation(cur: &mut Cursor<'_>, d: usize) -> Result<Vec<usize>> {
    let width = permutation_width(d);
    let bytes = cur.take((d * width as usize).div_ceil(8))?;
    let mut bit = 0;
    let mut perm = Vec::with_capacity(d);
    for _ in 0..d {
        let mut v = 0;
        for _ in 0..width {
            v = (v << 1) | ((bytes[bit / 8] >> (7 - bit % 8)) & 1) as usize;
            bit += 1;
        }
        perm.push(v);
    }
    let mut seen = vec![false; d];
    for &p in &perm {
        if p >= d || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Format("invalid permutation".into()));
        }
    }
    Ok(perm)
}

/// Transforms the samples and codes each component separately.
pub fn compress(s: &SampleSet, mode: Mode) -> Result<CompressedBlob> {
    let (field, d) = (s.field(), s.dim());
    if d > u16::MAX as usize {
        return Err(Error::Capacity(format!("d = {d} exceeds the header field")));
    }
    let transform = match mode {
        Mode::None => Transform::Identity,
        Mode::Glica => Transform::Dense(glica(&empirical_pmf(s)?)?.w),
        Mode::BloGlica(cfg) => {
            let r = bloglica_samples(s, cfg)?;
            let staged = Transform::Staged {
                blocks: cfg.blocks,
                stages: r.stages,
            };
            if staged.encoded_len(field, d) <= matrix_bytes(field, d) {
                staged
            } else {
                Transform::Dense(r.result.w)
            }
        }
    };
    let y = match &transform {
        Transform::Identity => s.clone(),
        t => s.transform(&t.matrix(field, d)?)?,
    };
    let q = field.order() as usize;
    let streams = map_components(d, |j| arith::encode(y.component(j), q).bytes);

    let mut out =
        Vec::with_capacity(HEADER_BYTES + streams.iter().map(|s| s.len() + 4).sum::<usize>());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(field.order() as u16).to_le_bytes());
    out.extend_from_slice(&(d as u16).to_le_bytes());
    out.extend_from_slice(&(s.n() as u64).to_le_bytes());
    out.push(transform.flag());
    transform.write(field, d, &mut out);
    for stream in &streams {
        let len = u32::try_from(stream.len())
            .map_err(|_| Error::Capacity(format!("stream of {} bytes", stream.len())))?;
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(stream);
    }
    Ok(CompressedBlob { bytes: out })
}

pub fn decompress(blob: &CompressedBlob) -> Result<SampleSet> {
    let parsed = blob.parse()?;
    let BlobHeader {
        field,
        d,
        n,
        transform,
    } = parsed.header;
    let n = n as usize;
    let q = field.order() as usize;
    let columns = map_components(d, |j| arith::decode(parsed.streams[j], n, q));
    let mut data = vec![0 as Elem; n * d];
    for (j, column) in columns.iter().enumerate() {
        for (i, &v) in column.iter().enumerate() {
            data[i * d + j] = v;
        }
    }
    let y = SampleSet::new(field, d, data)?;
    match transform {
        Transform::Identity => Ok(y),
        t => y.transform(&t.matrix(field, d)?.invert()?),
    }
}

#[cfg(feature = "parallel")]
fn map_components<T: Send, F: Fn(usize) -> T + Sync + Send>(d: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..d).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_components<T, F: Fn(usize) -> T>(d: usize, f: F) -> Vec<T> {
    (0..d).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::sample_bernoulli_product;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn mixed(d: usize, n: usize, seed: u64) -> SampleSet {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let params: Vec<f64> = (1..=d).map(|i| i as f64 / (2 * d + 2) as f64).collect();
        let s = sample_bernoulli_product(&params, n, &mut rng).unwrap();
        let b = FieldMatrix::random_invertible(d, PrimeField::BINARY, &mut rng);
        s.transform(&b).unwrap()
    }

    #[test]
    fn matrix_byte_counts() {
        let f2 = PrimeField::BINARY;
        for d in 1..=20 {
            assert_eq!(matrix_bytes(f2, d), (d * d).div_ceil(8));
        }
        for (q, d) in [(3u32, 2usize), (3, 5), (5, 4), (7, 3), (65521, 2)] {
            let f = PrimeField::new(q).unwrap();
            let expected = ((d * d) as f64 * (q as f64).log2() / 8.0).ceil() as usize;
            assert_eq!(matrix_bytes(f, d), expected, "q={q} d={d}");
        }
    }

    #[test]
    fn round_trip_all_modes() {
        let s = mixed(8, 3000, 1);
        for mode in [
            Mode::None,
            Mode::Glica,
            Mode::BloGlica(BloGLICAConfig::with_blocks(2)),
        ] {
            let blob = compress(&s, mode).unwrap();
            assert_eq!(decompress(&blob).unwrap(), s, "{mode:?}");
            let report = blob.rate_report("x").unwrap();
            assert_eq!(report.total_bits, 8.0 * blob.len() as f64);
        }
    }

    #[test]
    fn dense_header_cost() {
        let s = mixed(9, 500, 2);
        let blob = compress(&s, Mode::Glica).unwrap();
        assert_eq!(blob.transform_bytes().unwrap(), 81usize.div_ceil(8));
        assert_eq!(blob.header().unwrap().transform.flag(), 1);
    }

    #[test]
    fn staged_layout_round_trips() {
        let f = PrimeField::new(3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let stage = |rng: &mut rand_chacha::ChaCha8Rng| BlockStage {
            permutation: crate::pmf::random_assignment(5, rng),
            blocks: vec![
                FieldMatrix::random_invertible(3, f, rng),
                FieldMatrix::random_invertible(2, f, rng),
            ],
        };
        let t = Transform::Staged {
            blocks: 2,
            stages: vec![stage(&mut rng), stage(&mut rng)],
        };
        let mut bytes = Vec::new();
        t.write(f, 5, &mut bytes);
        let per_stage = (5 * 3usize).div_ceil(8) + matrix_bytes(f, 3) + matrix_bytes(f, 2);
        assert_eq!(bytes.len(), 4 + 2 * per_stage);
        let mut cur = Cursor {
            bytes: &bytes[4..],
            pos: 0,
        };
        let perm = unpack_permutation(&mut cur, 5).unwrap();
        let Transform::Staged { stages, .. } = &t else {
            unreachable!()
        };
        assert_eq!(perm, stages[0].permutation);
    }

    #[test]
    fn corrupt_blobs() {
        let s = mixed(4, 200, 4);
        let good = compress(&s, Mode::Glica).unwrap().into_bytes();

        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(
            decompress(&CompressedBlob::from_bytes(bad)),
            Err(Error::Format(_))
        ));

        let mut bad = good.clone();
        bad[4] = 9;
        assert!(matches!(
            decompress(&CompressedBlob::from_bytes(bad)),
            Err(Error::Format(_))
        ));

        // Zero matrix in place of W.
        let mut bad = good.clone();
        bad[HEADER_BYTES] = 0;
        bad[HEADER_BYTES + 1] = 0;
        assert!(matches!(
            decompress(&CompressedBlob::from_bytes(bad)),
            Err(Error::Format(_))
        ));

        let short = good[..good.len() - 1].to_vec();
        assert!(matches!(
            decompress(&CompressedBlob::from_bytes(short)),
            Err(Error::Truncation(_))
        ));
        assert!(matches!(
            decompress(&CompressedBlob::from_bytes(good[..10].to_vec())),
            Err(Error::Truncation(_))
        ));

        let mut long = good.clone();
        long.push(0);
        assert!(matches!(
            decompress(&CompressedBlob::from_bytes(long)),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn constant_source_costs_about_log_n_per_component() {
        let d = 5;
        let n = 10_000;
        let s = SampleSet::new(PrimeField::BINARY, d, vec![1; d * n]).unwrap();
        let blob = compress(&s, Mode::None).unwrap();
        let r = blob.rate_report("none").unwrap();
        let header_bits = 8.0 * (HEADER_BYTES + 4 * d) as f64;
        let kt = d as f64 * (0.5 * (n as f64).log2() + 4.0 + 7.0);
        assert!(r.total_bits <= header_bits + kt, "{}", r.total_bits);
        assert_eq!(decompress(&blob).unwrap(), s);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]

        #[test]
        fn lossless_on_fuzzed_samples(
            q in prop::sample::select(vec![2u32, 3]),
            d in 1usize..=10,
            n in 1usize..200,
            seed in any::<u64>(),
            mode_pick in 0usize..3,
        ) {
            let f = PrimeField::new(q).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<Elem> = (0..n * d)
                .map(|i| if rand::Rng::random_bool(&mut rng, 0.7) { (i % 2) as Elem } else { rand::Rng::random_range(&mut rng, 0..q as Elem) })
                .collect();
            let s = SampleSet::new(f, d, data).unwrap();
            let mode = match mode_pick {
                0 => Mode::None,
                1 => Mode::Glica,
                _ => Mode::BloGlica(BloGLICAConfig { blocks: d.min(2), max_iter: 3, seed, ..Default::default() }),
            };
            let blob = compress(&s, mode).unwrap();
            prop_assert_eq!(decompress(&blob).unwrap(), s);
        }
    }
}
