//! Arithmetic and linear algebra over prime fields GF(q).

mod basis;
mod field;
mod matrix;
mod vector;

pub use basis::Basis;
pub use field::{is_prime, Elem, PrimeField};
pub(crate) use matrix::parse_numbers;
pub use matrix::FieldMatrix;
pub use vector::{decode_word, dot, encode_word, FieldVector};

/// Rank of `m` over its field.
pub fn rank(m: &FieldMatrix) -> usize {
    m.rank()
}

/// Inverse of `m`, or [`crate::Error::SingularMatrix`].
pub fn invert(m: &FieldMatrix) -> crate::Result<FieldMatrix> {
    m.invert()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn field_and_matrix() -> impl Strategy<Value = FieldMatrix> {
        (
            prop::sample::select(vec![2u32, 3, 5, 7]),
            1usize..=8,
            1usize..=8,
        )
            .prop_flat_map(|(q, r, c)| {
                let f = PrimeField::new(q).unwrap();
                prop::collection::vec(0..q as Elem, r * c)
                    .prop_map(move |data| FieldMatrix::new(f, r, c, data).unwrap())
            })
    }

    proptest! {
        #[test]
        fn rank_invariant_under_row_ops(m in field_and_matrix(), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let f = m.field();
            let mut rows: Vec<FieldVector> = (0..m.nrows()).map(|i| m.row_vector(i)).collect();
            rows.shuffle(&mut rng);
            let i = rng.random_range(0..rows.len());
            let c = rng.random_range(1..f.order()) as Elem;
            rows[i] = rows[i].scale(f, c);
            let permuted = FieldMatrix::from_rows(f, &rows).unwrap();
            prop_assert_eq!(permuted.rank(), m.rank());
            prop_assert!(m.rank() <= m.nrows().min(m.ncols()));
        }

        #[test]
        fn binary_path_matches_generic(rows in prop::collection::vec(0u64..(1 << 10), 0..24)) {
            let f = PrimeField::BINARY;
            let mut packed = Basis::new(f, 10);
            let mut generic = Basis::generic(f, 10);
            for &r in &rows {
                let v = FieldVector::from_index(f, 10, r);
                let a = packed.try_extend(&v).unwrap();
                let b = generic.try_extend(&v).unwrap();
                prop_assert_eq!(a, b);
                prop_assert_eq!(packed.clone().try_extend_index(r ^ 1), generic.clone().try_extend_index(r ^ 1));
            }
            prop_assert_eq!(packed.rows(), generic.rows());
        }
    }
}
