use crate::error::{check_dim, Result};
use crate::gf::{decode_word, Elem, FieldVector, PrimeField};

/// Incrementally grown set of linearly independent rows.
///
/// Keeps an echelon form of the accepted rows so that testing a new row costs
/// one reduction pass. Over GF(2) with `dim <= 64` rows are packed into `u64`
/// words and a reduction is at most `dim` XORs.
#[derive(Clone, Debug)]
pub struct Basis {
    field: PrimeField,
    dim: usize,
    reducer: Reducer,
    accepted: Vec<FieldVector>,
}

#[derive(Clone, Debug)]
enum Reducer {
    /// `pivots[b]` holds the reduced row whose leading bit is `b`, or 0.
    Binary { pivots: Vec<u64> },
    /// Echelon rows with their pivot column; pivot entries are normalized to 1.
    General { rows: Vec<(usize, Vec<Elem>)> },
}

impl Basis {
    pub fn new(field: PrimeField, dim: usize) -> Self {
        if field.is_binary() && dim <= 64 {
            Basis {
                field,
                dim,
                reducer: Reducer::Binary {
                    pivots: vec![0; dim],
                },
                accepted: Vec::new(),
            }
        } else {
            Self::generic(field, dim)
        }
    }

    /// Forces the element-wise elimination path regardless of the field.
    pub fn generic(field: PrimeField, dim: usize) -> Self {
        Basis {
            field,
            dim,
            reducer: Reducer::General { rows: Vec::new() },
            accepted: Vec::new(),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.accepted.len()
    }

    pub fn is_full(&self) -> bool {
        self.accepted.len() == self.dim
    }

    /// Accepted rows, in acceptance order.
    pub fn rows(&self) -> &[FieldVector] {
        &self.accepted
    }

    pub fn into_rows(self) -> Vec<FieldVector> {
        self.accepted
    }

    /// Adds `row` if it is independent of the current rows.
    pub fn try_extend(&mut self, row: &FieldVector) -> Result<bool> {
        check_dim(self.dim, row.len())?;
        let accepted = match &mut self.reducer {
            Reducer::Binary { pivots } => {
                let mask = row
                    .as_slice()
                    .iter()
                    .fold(0u64, |acc, &c| (acc << 1) | (c & 1) as u64);
                insert_binary(pivots, mask)
            }
            Reducer::General { rows } => insert_general(self.field, rows, row.as_slice().to_vec()),
        };
        if accepted {
            self.accepted.push(row.clone());
        }
        Ok(accepted)
    }

    /// Same as [`Basis::try_extend`] for a row given by its word index.
    pub fn try_extend_index(&mut self, index: u64) -> bool {
        let accepted = match &mut self.reducer {
            Reducer::Binary { pivots } => insert_binary(pivots, index),
            Reducer::General { rows } => {
                let mut v = vec![0; self.dim];
                decode_word(self.field, index, &mut v);
                insert_general(self.field, rows, v)
            }
        };
        if accepted {
            self.accepted
                .push(FieldVector::from_index(self.field, self.dim, index));
        }
        accepted
    }
}

fn insert_binary(pivots: &mut [u64], mut v: u64) -> bool {
    for bit in (0..pivots.len()).rev() {
        if (v >> bit) & 1 == 0 {
            continue;
        }
        if pivots[bit] == 0 {
            pivots[bit] = v;
            return true;
        }
        v ^= pivots[bit];
    }
    false
}

fn insert_general(field: PrimeField, rows: &mut Vec<(usize, Vec<Elem>)>, mut v: Vec<Elem>) -> bool {
    for (pivot, row) in rows.iter() {
        let c = v[*pivot];
        if c == 0 {
            continue;
        }
        for (x, &r) in v.iter_mut().zip(row) {
            *x = field.sub(*x, field.mul(c, r));
        }
    }
    let Some(pivot) = v.iter().position(|&x| x != 0) else {
        return false;
    };
    let inv = field.inverse(v[pivot]).expect("pivot entry is nonzero");
    for x in v.iter_mut() {
        *x = field.mul(*x, inv);
    }
    rows.push((pivot, v));
    true
}
