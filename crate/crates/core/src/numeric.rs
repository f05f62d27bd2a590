//! Small numerical helpers shared across modules.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator of floats.
pub fn csum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// `log2(x)` for an arbitrary-precision integer, accurate to a few ulps.
/// Returns `-inf` for zero.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        // to_f64 rounds to nearest, so this is exact up to one rounding.
        return x.to_f64().expect("finite below 2^1000").log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64 bits remain after shift");
    (top as f64).log2() + shift as f64
}

/// `count * 2^(-info)` evaluated in log space.
pub fn scaled_pow2(count: &BigUint, info: f64) -> f64 {
    (log2_big(count) - info).exp2()
}

/// Ratio `num / den` of two big integers as a float, `num <= den`.
pub fn big_ratio(num: &BigUint, den: &BigUint) -> f64 {
    if num == den {
        1.0
    } else {
        (log2_big(num) - log2_big(den)).exp2()
    }
}

/// Tolerance used to decide that two information values (in bits) coincide.
///
/// Values of distinct type classes are sums of up to `n` logarithms, so the
/// tolerance scales with the magnitude of the value.
pub fn info_tolerance(value: f64) -> f64 {
    crate::MERGE_TOLERANCE_BITS * value.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-17);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-16).abs() < 1e-30);
    }

    #[test]
    fn log2_of_large_integers() {
        let x = BigUint::from(1u8) << 5000u32;
        assert_eq!(log2_big(&x), 5000.0);
        let y = BigUint::from(3u8) << 2000u32;
        assert!((log2_big(&y) - (2000.0 + 3f64.log2())).abs() < 1e-12);
        assert_eq!(log2_big(&BigUint::from(1u8)), 0.0);
        assert_eq!(log2_big(&BigUint::default()), f64::NEG_INFINITY);
    }
}
