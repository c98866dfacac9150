use rand::Rng;

use crate::gf::{Basis, FieldVector, PrimeField};
use crate::rng;

/// Monte-Carlo statistics of `L`, the number of i.i.d. uniform rows of
/// GF(q)^d drawn (zero row included) until they span the space.
#[derive(Clone, Debug, PartialEq)]
pub struct RowDrawStats {
    pub d: usize,
    pub field: PrimeField,
    pub trials: usize,
    pub mean: f64,
    pub variance: f64,
    pub analytic_mean: f64,
    /// Exact variance of the geometric-sum model.
    pub analytic_variance: f64,
    /// `q/(q-1)^2 + 1/(q + 1/q - 2)^2`.
    pub variance_bound: f64,
    pub draws: Vec<u32>,
}

impl RowDrawStats {
    pub fn mean_standard_error(&self) -> f64 {
        (self.variance / self.trials as f64).sqrt()
    }

    /// Standard error of the sample variance from the fourth central moment.
    pub fn variance_standard_error(&self) -> f64 {
        let n = self.trials as f64;
        let m4 = self
            .draws
            .iter()
            .map(|&l| (l as f64 - self.mean).powi(4))
            .sum::<f64>()
            / n;
        ((m4 - self.variance * self.variance).max(0.0) / n).sqrt()
    }

    /// Fraction of trials with `L >= d + 2 + a`, the event bounded by
    /// `var(L) / a^2` in the Chebyshev tail argument.
    pub fn tail_fraction(&self, a: f64) -> f64 {
        let threshold = self.d as f64 + 2.0 + a;
        let hits = self
            .draws
            .iter()
            .filter(|&&l| l as f64 >= threshold)
            .count();
        hits as f64 / self.trials as f64
    }

    /// Binomial standard error of [`RowDrawStats::tail_fraction`].
    pub fn tail_standard_error(&self, a: f64) -> f64 {
        let p = self.tail_fraction(a);
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// `q/(q-1)^2`, the limit bound on `E(L) - d`.
    pub fn mean_overhead_bound(&self) -> f64 {
        let q = self.field.order() as f64;
        q / ((q - 1.0) * (q - 1.0))
    }
}

/// `E(L) = sum_{k<d} q^d / (q^d - q^k)`, summed as `d + sum_j 1/(q^j - 1)`.
pub fn expected_rows(d: usize, field: PrimeField) -> f64 {
    let q = field.order() as f64;
    d as f64 + (1..=d).map(|j| 1.0 / (q.powi(j as i32) - 1.0)).sum::<f64>()
}

/// `var(L) = sum_{j=1..d} 1/(q^j + q^-j - 2)`.
pub fn rows_variance(d: usize, field: PrimeField) -> f64 {
    let q = field.order() as f64;
    (1..=d)
        .map(|j| {
            let x = q.powi(j as i32);
            1.0 / (x + 1.0 / x - 2.0)
        })
        .sum()
}

pub fn row_draw_statistics(d: usize, field: PrimeField, trials: usize, seed: u64) -> RowDrawStats {
    assert!(d >= 1 && trials >= 1, "need d >= 1 and at least one trial");
    let draws = map_trials(trials, |t| {
        draw_until_full(d, field, &mut rng::derived(seed, t as u64))
    });
    let n = trials as f64;
    let mean = draws.iter().map(|&l| l as f64).sum::<f64>() / n;
    let variance = if trials > 1 {
        draws
            .iter()
            .map(|&l| (l as f64 - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0)
    } else {
        0.0
    };
    let q = field.order() as f64;
    RowDrawStats {
        d,
        field,
        trials,
        mean,
        variance,
        analytic_mean: expected_rows(d, field),
        analytic_variance: rows_variance(d, field),
        variance_bound: q / ((q - 1.0) * (q - 1.0)) + 1.0 / (q + 1.0 / q - 2.0).powi(2),
        draws,
    }
}

fn draw_until_full<R: Rng>(d: usize, field: PrimeField, rng: &mut R) -> u32 {
    let mut basis = Basis::new(field, d);
    let mut count = 0;
    if field.is_binary() && d <= 64 {
        let mask = if d == 64 { u64::MAX } else { (1u64 << d) - 1 };
        while !basis.is_full() {
            count += 1;
            basis.try_extend_index(rng.random::<u64>() & mask);
        }
    } else {
        let q = field.order() as u16;
        while !basis.is_full() {
            count += 1;
            let row: Vec<u16> = (0..d).map(|_| rng.random_range(0..q)).collect();
            basis
                .try_extend(&FieldVector::new(field, row).expect("entries below q"))
                .expect("row has length d");
        }
    }
    count
}

#[cfg(feature = "parallel")]
fn map_trials<F: Fn(usize) -> u32 + Sync + Send>(trials: usize, f: F) -> Vec<u32> {
    use rayon::prelude::*;
    (0..trials).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_trials<F: Fn(usize) -> u32>(trials: usize, f: F) -> Vec<u32> {
    (0..trials).map(f).collect()
}
