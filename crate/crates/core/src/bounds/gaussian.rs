//! Standard normal tail, density and their inverses.

use statrs::function::erf::{erfc, erfc_inv};
use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

/// Standard normal density.
pub fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function.
pub fn big_phi(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Gaussian tail `Q(x) = P[Z > x]`.
pub fn q(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// Inverse of the Gaussian tail on `(0, 1)`.
pub fn q_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "Q_inv argument {p} outside (0, 1)"
        )));
    }
    let x = SQRT_2 * erfc_inv(2.0 * p);
    // one Newton step on Q(x) = p
    let d = phi(x);
    Ok(if d > 0.0 { x + (q(x) - p) / d } else { x })
}

/// Inverse of the standard normal distribution function on `(0, 1)`.
pub fn big_phi_inv(p: f64) -> Result<f64> {
    q_inv(p).map(|x| -x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bisect_q_inv(p: f64) -> f64 {
        let (mut lo, mut hi) = (-40.0, 40.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if q(mid) > p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn known_values() {
        assert_eq!(q(0.0), 0.5);
        assert_eq!(q_inv(0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(q_inv(0.1).unwrap(), 1.28155, epsilon = 1e-5);
        assert_abs_diff_eq!(q_inv(0.1).unwrap(), bisect_q_inv(0.1), epsilon = 1e-8);
        assert!(q_inv(0.0).is_err());
        assert!(q_inv(1.0).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        // below -5, Q(x) sits within 1e-6 of 1 and loses the digits of x
        for i in -50..=80 {
            let x = i as f64 / 10.0;
            assert_abs_diff_eq!(q_inv(q(x)).unwrap(), x, epsilon = 1e-10);
        }
        for p in [1e-300, 1e-50, 1e-12, 1e-3, 0.3, 0.7, 0.999] {
            assert_abs_diff_eq!(q(q_inv(p).unwrap()) / p, 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(big_phi(1.0) + q(1.0), 1.0, epsilon = 1e-16);
    }
}
