//! Closed-form references for pmfs drawn uniformly from the simplex.

use std::f64::consts::LN_2;

use crate::pmf::digamma;

/// Limit of the mean total correlation left by the order permutation.
pub const ORDER_PERMUTATION_TC_LIMIT: f64 = 0.0162;

fn psi(x: f64) -> f64 {
    digamma(x).expect("arguments are at least 1")
}

/// `E H(p) = (Psi(2^d + 1) - Psi(2)) / ln 2` for `p` uniform on the
/// `2^d`-simplex.
pub fn expected_joint_entropy(d: usize) -> f64 {
    let m = 2f64.powi(d as i32);
    (psi(m + 1.0) - psi(2.0)) / LN_2
}

/// `(d / ln 2)(Psi(2^d + 1) - Psi(2^(d-1) + 1))`: the mean of
/// `sum_j h(P(X_j = 0))` when each marginal is Beta(2^(d-1), 2^(d-1)).
pub fn marginal_sum_beta_form(d: usize) -> f64 {
    let m = 2f64.powi(d as i32);
    d as f64 / LN_2 * (psi(m + 1.0) - psi(m / 2.0 + 1.0))
}

/// `(d / ln 2)(Psi(2^d - 1) - Psi(2^(d-1)))`, the same expression with both
/// digamma arguments shifted.
pub fn marginal_sum_shifted_form(d: usize) -> f64 {
    let m = 2f64.powi(d as i32);
    d as f64 / LN_2 * (psi(m - 1.0) - psi(m / 2.0))
}
