use crate::error::{Error, Result};

/// Digamma function `psi(x)` for `x > 0`.
///
/// Shifts the argument up to `x >= 6` with `psi(x) = psi(x + 1) - 1/x`,
/// then sums the asymptotic series.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "digamma is defined for x > 0, got {x}"
        )));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 6.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // B_2k / (2k) for k = 1..7
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2
                                        * (1.0 / 132.0
                                            - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    Ok(acc + x.ln() - 0.5 / x - series)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    #[test]
    fn known_values() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-12);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-12);
        // psi(1/2) = -gamma - 2 ln 2
        let half = -EULER_GAMMA - 2.0 * std::f64::consts::LN_2;
        assert!((digamma(0.5).unwrap() - half).abs() < 1e-12);
    }

    #[test]
    fn recurrence_holds() {
        for &x in &[0.01, 0.3, 1.7, 5.5, 6.0, 12.25, 1e3, 1e6] {
            let lhs = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
            assert!((lhs - 1.0 / x).abs() < 1e-10 * (1.0 / x).max(1.0), "x={x}");
        }
    }

    #[test]
    fn harmonic_numbers() {
        // psi(n + 1) = H_n - gamma
        let mut h = 0.0;
        for n in 1..=2000u32 {
            h += 1.0 / n as f64;
            if n % 97 == 0 || n < 20 {
                assert!((digamma(n as f64 + 1.0).unwrap() - (h - EULER_GAMMA)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_non_positive() {
        assert!(digamma(0.0).is_err());
        assert!(digamma(-1.5).is_err());
        assert!(digamma(f64::NAN).is_err());
    }
}
