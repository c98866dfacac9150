use std::fmt;

use rand::Rng;

use crate::error::{check_dim, Error, Result};
use crate::gf::{dot, Basis, Elem, FieldVector, PrimeField};

/// Dense row-major matrix over GF(q).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: PrimeField,
    nrows: usize,
    ncols: usize,
    data: Vec<Elem>,
}

impl FieldMatrix {
    pub fn new(field: PrimeField, nrows: usize, ncols: usize, data: Vec<Elem>) -> Result<Self> {
        check_dim(nrows * ncols, data.len())?;
        if let Some(&bad) = data.iter().find(|&&c| !field.contains(c as u32)) {
            return Err(Error::Domain(format!("entry {bad} outside {field}")));
        }
        Ok(FieldMatrix {
            field,
            nrows,
            ncols,
            data,
        })
    }

    pub fn from_rows(field: PrimeField, rows: &[FieldVector]) -> Result<Self> {
        let ncols = rows.first().map_or(0, FieldVector::len);
        let mut data = Vec::with_capacity(rows.len() * ncols);
        for r in rows {
            check_dim(ncols, r.len())?;
            data.extend_from_slice(r.as_slice());
        }
        Self::new(field, rows.len(), ncols, data)
    }

    pub fn zeros(field: PrimeField, nrows: usize, ncols: usize) -> Self {
        FieldMatrix {
            field,
            nrows,
            ncols,
            data: vec![0; nrows * ncols],
        }
    }

    pub fn identity(field: PrimeField, d: usize) -> Self {
        let mut m = Self::zeros(field, d, d);
        for i in 0..d {
            m.data[i * d + i] = 1;
        }
        m
    }

    /// Permutation matrix `U` with `(U y)_i = y_{perm[i]}`.
    pub fn permutation(field: PrimeField, perm: &[usize]) -> Result<Self> {
        let d = perm.len();
        let mut seen = vec![false; d];
        let mut m = Self::zeros(field, d, d);
        for (i, &p) in perm.iter().enumerate() {
            if p >= d || seen[p] {
                return Err(Error::Domain(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
            m.data[i * d + p] = 1;
        }
        Ok(m)
    }

    /// Block-diagonal matrix with the given square blocks along the diagonal.
    pub fn block_diagonal(field: PrimeField, blocks: &[FieldMatrix]) -> Result<Self> {
        let d: usize = blocks.iter().map(|b| b.nrows).sum();
        let mut m = Self::zeros(field, d, d);
        let mut offset = 0;
        for b in blocks {
            if !b.is_square() || b.field != field {
                return Err(Error::Domain(
                    "blocks must be square over the same field".into(),
                ));
            }
            for i in 0..b.nrows {
                let dst = (offset + i) * d + offset;
                m.data[dst..dst + b.ncols].copy_from_slice(b.row(i));
            }
            offset += b.nrows;
        }
        Ok(m)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.ncols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        assert!(self.field.contains(v as u32));
        self.data[i * self.ncols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn row_vector(&self, i: usize) -> FieldVector {
        FieldVector::new(self.field, self.row(i).to_vec()).expect("entries are reduced")
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Elem]> + '_ {
        self.data.chunks(self.ncols.max(1)).take(self.nrows)
    }

    pub fn as_slice(&self) -> &[Elem] {
        &self.data
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &FieldMatrix) -> Result<FieldMatrix> {
        check_dim(self.ncols, rhs.nrows)?;
        let q = self.field.order() as u64;
        let mut out = Self::zeros(self.field, self.nrows, rhs.ncols);
        for i in 0..self.nrows {
            for j in 0..rhs.ncols {
                let mut acc = 0u64;
                for k in 0..self.ncols {
                    acc += self.get(i, k) as u64 * rhs.get(k, j) as u64;
                }
                out.data[i * rhs.ncols + j] = (acc % q) as Elem;
            }
        }
        Ok(out)
    }

    /// Writes `self * x` into `out`.
    pub fn mul_vec_into(&self, x: &[Elem], out: &mut [Elem]) {
        debug_assert_eq!(x.len(), self.ncols);
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.field, self.row(i), x);
        }
    }

    pub fn mul_vec(&self, x: &[Elem]) -> Result<Vec<Elem>> {
        check_dim(self.ncols, x.len())?;
        let mut out = vec![0; self.nrows];
        self.mul_vec_into(x, &mut out);
        Ok(out)
    }

    /// Rank over GF(q) by Gaussian elimination; does not modify `self`.
    pub fn rank(&self) -> usize {
        let mut basis = Basis::new(self.field, self.ncols);
        for i in 0..self.nrows {
            basis
                .try_extend(&self.row_vector(i))
                .expect("row length equals ncols");
        }
        basis.rank()
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.nrows
    }

    /// Inverse by Gauss-Jordan elimination on `[M | I]`.
    pub fn invert(&self) -> Result<FieldMatrix> {
        if !self.is_square() {
            return Err(Error::Dimension {
                expected: self.nrows,
                found: self.ncols,
            });
        }
        let f = self.field;
        let d = self.nrows;
        let w = 2 * d;
        let mut aug = vec![0 as Elem; d * w];
        for i in 0..d {
            aug[i * w..i * w + d].copy_from_slice(self.row(i));
            aug[i * w + d + i] = 1;
        }
        for col in 0..d {
            let pivot = (col..d)
                .find(|&r| aug[r * w + col] != 0)
                .ok_or(Error::SingularMatrix)?;
            if pivot != col {
                for k in 0..w {
                    aug.swap(pivot * w + k, col * w + k);
                }
            }
            let inv = f.inverse(aug[col * w + col])?;
            for k in 0..w {
                aug[col * w + k] = f.mul(aug[col * w + k], inv);
            }
            for r in 0..d {
                let c = aug[r * w + col];
                if r == col || c == 0 {
                    continue;
                }
                for k in 0..w {
                    let v = f.mul(c, aug[col * w + k]);
                    aug[r * w + k] = f.sub(aug[r * w + k], v);
                }
            }
        }
        let data = (0..d)
            .flat_map(|i| aug[i * w + d..i * w + w].iter().copied())
            .collect();
        Ok(FieldMatrix {
            field: f,
            nrows: d,
            ncols: d,
            data,
        })
    }

    /// True iff every row and every column has exactly one nonzero entry.
    pub fn is_monomial(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let d = self.nrows;
        let mut col_hits = vec![0usize; d];
        for i in 0..d {
            let mut row_hits = 0;
            for (j, &v) in self.row(i).iter().enumerate() {
                if v != 0 {
                    row_hits += 1;
                    col_hits[j] += 1;
                }
            }
            if row_hits != 1 {
                return false;
            }
        }
        col_hits.iter().all(|&c| c == 1)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.field, self.nrows)
    }

    /// Uniformly random invertible `d x d` matrix (rejection sampling).
    pub fn random_invertible<R: Rng + ?Sized>(d: usize, field: PrimeField, rng: &mut R) -> Self {
        assert!(d >= 1, "dimension must be positive");
        loop {
            let m = Self::random(d, d, field, rng);
            if m.rank() == d {
                return m;
            }
        }
    }

    /// Random invertible matrix that is not monomial (so neither the
    /// identity nor a permutation or scaling of it). Needs `d >= 2`.
    pub fn random_nontrivial_invertible<R: Rng + ?Sized>(
        d: usize,
        field: PrimeField,
        rng: &mut R,
    ) -> Result<Self> {
        if d < 2 {
            return Err(Error::Config(
                "every invertible 1x1 matrix is monomial".into(),
            ));
        }
        loop {
            let m = Self::random_invertible(d, field, rng);
            if !m.is_monomial() {
                return Ok(m);
            }
        }
    }

    pub fn random<R: Rng + ?Sized>(
        nrows: usize,
        ncols: usize,
        field: PrimeField,
        rng: &mut R,
    ) -> Self {
        let q = field.order() as Elem;
        let data = (0..nrows * ncols).map(|_| rng.random_range(0..q)).collect();
        FieldMatrix {
            field,
            nrows,
            ncols,
            data,
        }
    }

    /// Row `i` packed into a bit mask (q = 2 only), MSB = column 0.
    pub fn binary_row_mask(&self, i: usize) -> u64 {
        debug_assert!(self.field.is_binary() && self.ncols <= 64);
        self.row(i)
            .iter()
            .fold(0u64, |acc, &c| (acc << 1) | c as u64)
    }

    /// Text form: `q d` on the first line, then one line of entries per row.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.field.order(), self.nrows);
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty matrix file".into()))?;
        let head = parse_numbers(header)?;
        let [q, d] = head[..] else {
            return Err(Error::Format(format!(
                "expected header `q d`, got `{header}`"
            )));
        };
        let field = PrimeField::new(q as u32)?;
        let d = d as usize;
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            let line = lines
                .next()
                .ok_or_else(|| Error::Format(format!("missing matrix row {i}")))?;
            let row = parse_numbers(line)?;
            if row.len() != d {
                return Err(Error::Format(format!(
                    "row {i} has {} entries, expected {d}",
                    row.len()
                )));
            }
            for v in row {
                if v > u32::MAX as u64 || !field.contains(v as u32) {
                    return Err(Error::Format(format!("entry {v} outside {field}")));
                }
                data.push(v as Elem);
            }
        }
        if lines.next().is_some() {
            return Err(Error::Format("trailing data after matrix".into()));
        }
        Self::new(field, d, d, data)
    }
}

pub(crate) fn parse_numbers(line: &str) -> Result<Vec<u64>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| Error::Format(format!("`{t}` is not a non-negative integer")))
        })
        .collect()
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldMatrix<{}>[", self.field)?;
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{row:?}")?;
        }
        write!(f, "]")
    }
}
