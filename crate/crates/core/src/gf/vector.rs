use crate::error::{Error, Result};
use crate::gf::{Elem, PrimeField};

/// A coefficient row over GF(q).
///
/// Rows and symbol words share one big-endian index convention: the word
/// `(x_0, ..., x_{d-1})` has index `sum_j x_j * q^(d-1-j)`. For q = 2 the
/// index is therefore also the bit-packed form, with `x_0` in the most
/// significant of the `d` bits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldVector {
    coeffs: Vec<Elem>,
}

impl FieldVector {
    pub fn new(field: PrimeField, coeffs: Vec<Elem>) -> Result<Self> {
        if let Some(&bad) = coeffs.iter().find(|&&c| !field.contains(c as u32)) {
            return Err(Error::Domain(format!("entry {bad} outside {field}")));
        }
        Ok(FieldVector { coeffs })
    }

    pub fn zeros(d: usize) -> Self {
        FieldVector { coeffs: vec![0; d] }
    }

    /// Unit vector `e_j`.
    pub fn unit(d: usize, j: usize) -> Self {
        let mut coeffs = vec![0; d];
        coeffs[j] = 1;
        FieldVector { coeffs }
    }

    pub fn from_index(field: PrimeField, d: usize, index: u64) -> Self {
        let mut coeffs = vec![0; d];
        decode_word(field, index, &mut coeffs);
        FieldVector { coeffs }
    }

    pub fn index(&self, field: PrimeField) -> u64 {
        encode_word(field, &self.coeffs)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn as_slice(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn into_inner(self) -> Vec<Elem> {
        self.coeffs
    }

    pub fn scale(&self, field: PrimeField, c: Elem) -> FieldVector {
        FieldVector {
            coeffs: self.coeffs.iter().map(|&a| field.mul(a, c)).collect(),
        }
    }

    pub fn dot(&self, field: PrimeField, x: &[Elem]) -> Elem {
        dot(field, &self.coeffs, x)
    }
}

#[inline]
pub fn dot(field: PrimeField, a: &[Elem], b: &[Elem]) -> Elem {
    let q = field.order() as u64;
    // Each product is below 2^32, so the sum cannot overflow for any
    // realistic length; reduce once.
    let acc: u64 = a.iter().zip(b).map(|(&x, &y)| x as u64 * y as u64).sum();
    (acc % q) as Elem
}

/// Big-endian base-q index of a word.
#[inline]
pub fn encode_word(field: PrimeField, word: &[Elem]) -> u64 {
    let q = field.order() as u64;
    word.iter().fold(0u64, |acc, &x| acc * q + x as u64)
}

/// Inverse of [`encode_word`]; fills `out` (whose length is `d`).
#[inline]
pub fn decode_word(field: PrimeField, mut index: u64, out: &mut [Elem]) {
    if field.is_binary() {
        for slot in out.iter_mut().rev() {
            *slot = (index & 1) as Elem;
            index >>= 1;
        }
        return;
    }
    let q = field.order() as u64;
    for slot in out.iter_mut().rev() {
        *slot = (index % q) as Elem;
        index /= q;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let f = PrimeField::new(3).unwrap();
        for idx in 0..27u64 {
            let v = FieldVector::from_index(f, 3, idx);
            assert_eq!(v.index(f), idx);
        }
        assert_eq!(FieldVector::from_index(f, 3, 5).as_slice(), &[0, 1, 2][..]);
    }

    #[test]
    fn binary_index_is_msb_first() {
        let v = FieldVector::from_index(PrimeField::BINARY, 4, 0b1000);
        assert_eq!(v.as_slice(), &[1, 0, 0, 0][..]);
    }

    #[test]
    fn rejects_out_of_range_entries() {
        assert!(FieldVector::new(PrimeField::BINARY, vec![0, 2]).is_err());
    }
}
