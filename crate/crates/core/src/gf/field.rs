use std::fmt;

use crate::error::{Error, Result};

/// Field element. Every value is kept reduced into `[0, q)`.
pub type Elem = u16;

/// A prime field GF(q), elements represented by the integers `0..q`.
///
/// Orders are limited to `q < 2^16` so that elements fit in [`Elem`] and the
/// compressed container can record `q` in two bytes.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u16,
}

impl PrimeField {
    pub const BINARY: PrimeField = PrimeField { q: 2 };

    pub fn new(q: u32) -> Result<Self> {
        if q > u16::MAX as u32 || !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(PrimeField { q: q as u16 })
    }

    #[inline]
    pub fn order(self) -> u32 {
        self.q as u32
    }

    #[inline]
    pub fn is_binary(self) -> bool {
        self.q == 2
    }

    /// `log2(q)`, the information content of one uniformly distributed element.
    pub fn bits(self) -> f64 {
        (self.q as f64).log2()
    }

    #[inline]
    pub fn contains(self, a: u32) -> bool {
        a < self.q as u32
    }

    #[inline]
    pub fn add(self, a: Elem, b: Elem) -> Elem {
        ((a as u32 + b as u32) % self.q as u32) as Elem
    }

    #[inline]
    pub fn sub(self, a: Elem, b: Elem) -> Elem {
        ((a as u32 + self.q as u32 - b as u32) % self.q as u32) as Elem
    }

    #[inline]
    pub fn neg(self, a: Elem) -> Elem {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(self, a: Elem, b: Elem) -> Elem {
        ((a as u32 * b as u32) % self.q as u32) as Elem
    }

    /// Reduces an arbitrary integer into the field.
    #[inline]
    pub fn reduce(self, a: i64) -> Elem {
        a.rem_euclid(self.q as i64) as Elem
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inverse(self, a: Elem) -> Result<Elem> {
        if a == 0 || a as u32 >= self.q as u32 {
            return Err(Error::NoInverse(a as u32));
        }
        let (mut r0, mut r1) = (self.q as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce(t0))
    }

    /// Number of cells `q^d`, or `None` on overflow.
    pub fn checked_pow(self, d: usize) -> Option<u64> {
        (self.q as u64).checked_pow(u32::try_from(d).ok()?)
    }
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

/// Trial-division primality test.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u32;
    while k.saturating_mul(k) <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}
