//! The optimal one-to-one code and the exact limits it attains.
//!
//! The optimal code lists strings by decreasing probability and gives the
//! string of rank `r` (from 1) the `r`-th binary string in the order
//! `∅, 0, 1, 00, 01, ..`, whose length is `floor(log2 r)`. Every quantity
//! here is therefore a function of how the spectrum masses fall on the rank
//! axis, which is computed with exact big-integer string counts.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{big_ratio, csum, info_tolerance, CompensatedSum};
use crate::sources::FiniteDistribution;
use crate::spectrum::InformationSpectrum;
use crate::Budgets;

/// Cumulative string counts of a spectrum on the rank axis.
#[derive(Debug, Clone)]
pub struct Ranking<'a> {
    spec: &'a InformationSpectrum,
    /// `cum[i]` strings lie in masses before `i`; `cum.len() == masses + 1`.
    cum: Vec<BigUint>,
}

/// Split of the spectrum at a rank threshold: the `threshold` most likely
/// strings are retained, the rest form the tail.
#[derive(Debug, Clone, PartialEq)]
pub struct RankCut {
    pub threshold: BigUint,
    /// Strings in masses lying entirely at or below the threshold.
    pub cum_count_below: BigUint,
    /// Probability of those masses.
    pub cum_prob_below: f64,
    /// Mass straddling the threshold, if any.
    pub cut_mass: Option<usize>,
    /// Retained part of the straddling mass.
    pub partial_prob: f64,
    /// Probability of the strings beyond the threshold.
    pub tail_prob: f64,
}

impl<'a> Ranking<'a> {
    pub fn new(spec: &'a InformationSpectrum) -> Result<Self> {
        spec.require_exact("rank arithmetic")?;
        let mut cum = Vec::with_capacity(spec.masses().len() + 1);
        let mut acc = BigUint::zero();
        cum.push(acc.clone());
        for m in spec.masses() {
            acc += &m.count;
            cum.push(acc.clone());
        }
        Ok(Self { spec, cum })
    }

    pub fn spectrum(&self) -> &InformationSpectrum {
        self.spec
    }

    pub fn total(&self) -> &BigUint {
        self.cum.last().expect("cum is never empty")
    }

    /// Strings in masses before mass `i`.
    pub fn count_before(&self, i: usize) -> &BigUint {
        &self.cum[i]
    }

    /// Keeps the `threshold` highest-ranked strings, splitting a tied mass
    /// that straddles the cut in proportion to its string count.
    pub fn cut(&self, threshold: &BigUint) -> RankCut {
        let masses = self.spec.masses();
        // first mass whose last rank exceeds the threshold
        let i = self.cum[1..].partition_point(|c| c <= threshold);
        if i == masses.len() {
            return RankCut {
                threshold: threshold.clone(),
                cum_count_below: self.total().clone(),
                cum_prob_below: self.spec.tail_from(0),
                cut_mass: None,
                partial_prob: 0.0,
                tail_prob: 0.0,
            };
        }
        let below = &self.cum[i];
        let kept = threshold - below;
        let m = &masses[i];
        let (partial, rest) = if kept.is_zero() {
            (0.0, m.prob)
        } else {
            let dropped = &m.count - &kept;
            (
                big_ratio(&kept, &m.count) * m.prob,
                big_ratio(&dropped, &m.count) * m.prob,
            )
        };
        RankCut {
            threshold: threshold.clone(),
            cum_count_below: below.clone(),
            cum_prob_below: 1.0 - self.spec.tail_from(i),
            cut_mass: (!kept.is_zero()).then_some(i),
            partial_prob: partial,
            tail_prob: rest + self.spec.tail_from(i + 1),
        }
    }

    /// `ε*(n, k)`: probability outside the `2^k - 1` most likely strings.
    pub fn epsilon_star(&self, k: u64) -> f64 {
        if k == 0 {
            return 1.0;
        }
        let threshold = (BigUint::one() << k) - 1u32;
        self.cut(&threshold).tail_prob
    }

    /// Smallest `k` with `ε*(n, k) = 0`, i.e. `2^k > total count`.
    pub fn k_exhaust(&self) -> u64 {
        self.total().bits()
    }

    /// `ε*(n, k)` for `k = 0..=k_exhaust()`; the last entry is 0.
    pub fn epsilon_curve(&self) -> Vec<f64> {
        (0..=self.k_exhaust())
            .map(|k| self.epsilon_star(k))
            .collect()
    }
}

/// Probability that the optimal codelength equals each `j`, with the
/// underlying (mass, length) segments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodelengthDistribution {
    pub n: usize,
    /// `probs_by_length[j] = P[ℓ = j]`.
    pub probs_by_length: Vec<f64>,
    #[serde(skip)]
    pub segments: Vec<LengthSegment>,
}

/// Part of spectrum mass `mass` whose ranks fall in `[2^length, 2^(length+1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthSegment {
    pub mass: usize,
    pub length: u64,
    pub prob: f64,
}

impl CodelengthDistribution {
    pub fn from_spectrum(spec: &InformationSpectrum) -> Result<Self> {
        Self::from_ranking(&Ranking::new(spec)?)
    }

    pub fn from_ranking(ranking: &Ranking<'_>) -> Result<Self> {
        let spec = ranking.spectrum();
        let max_len = ranking.total().bits() - 1;
        let mut sums = vec![CompensatedSum::new(); max_len as usize + 1];
        let mut segments = Vec::new();
        for (i, m) in spec.masses().iter().enumerate() {
            let lo = ranking.count_before(i) + 1u32;
            let hi = ranking.count_before(i + 1);
            let (j_lo, j_hi) = (lo.bits() - 1, hi.bits() - 1);
            for j in j_lo..=j_hi {
                let prob = if j_lo == j_hi {
                    m.prob
                } else {
                    let start = (BigUint::one() << j).max(lo.clone());
                    let end = ((BigUint::one() << (j + 1)) - 1u32).min(hi.clone());
                    big_ratio(&(end - start + 1u32), &m.count) * m.prob
                };
                sums[j as usize].add(prob);
                segments.push(LengthSegment {
                    mass: i,
                    length: j,
                    prob,
                });
            }
        }
        Ok(Self {
            n: spec.n(),
            probs_by_length: sums.iter().map(CompensatedSum::value).collect(),
            segments,
        })
    }

    pub fn max_length(&self) -> usize {
        self.probs_by_length.len() - 1
    }

    /// `P[ℓ >= k]`.
    pub fn tail(&self, k: usize) -> f64 {
        csum(self.probs_by_length.iter().skip(k).copied())
    }

    pub fn mean(&self) -> f64 {
        csum(
            self.probs_by_length
                .iter()
                .enumerate()
                .map(|(j, p)| j as f64 * p),
        )
    }

    pub fn second_moment(&self) -> f64 {
        csum(
            self.probs_by_length
                .iter()
                .enumerate()
                .map(|(j, p)| (j * j) as f64 * p),
        )
    }

    /// Variance of the codelength, computed about the mean.
    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        csum(
            self.probs_by_length
                .iter()
                .enumerate()
                .map(|(j, p)| p * (j as f64 - mu).powi(2)),
        )
    }
}

/// Exact limits of one spectrum, computed once and queried many times.
#[derive(Debug, Clone)]
pub struct ExactLimits {
    n: usize,
    /// `ε*(n, k)` for `k = 0..=k_exhaust`.
    epsilon: Vec<f64>,
    lengths: CodelengthDistribution,
    /// `2^k < total` for `k < prefix_limit`.
    prefix_limit: u64,
}

impl ExactLimits {
    pub fn new(spec: &InformationSpectrum) -> Result<Self> {
        let ranking = Ranking::new(spec)?;
        let total = ranking.total();
        // smallest k with 2^k >= total
        let prefix_limit = (total - 1u32).bits();
        Ok(Self {
            n: spec.n(),
            epsilon: ranking.epsilon_curve(),
            lengths: CodelengthDistribution::from_ranking(&ranking)?,
            prefix_limit,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lengths(&self) -> &CodelengthDistribution {
        &self.lengths
    }

    /// `ε*(n, k)`, zero past the last string.
    pub fn epsilon_star(&self, k: u64) -> f64 {
        self.epsilon.get(k as usize).copied().unwrap_or(0.0)
    }

    /// Smallest `k` with `ε*(n, k) <= eps`.
    pub fn k_star(&self, eps: f64) -> Result<u64> {
        check_eps(eps)?;
        Ok(self.epsilon.partition_point(|&e| e > eps) as u64)
    }

    /// `R*(n, ε) = k / n` for the `k` with `ε*(n, k) <= ε < ε*(n, k - 1)`.
    pub fn r_star(&self, eps: f64) -> Result<f64> {
        Ok(self.k_star(eps)? as f64 / self.n as f64)
    }

    /// Minimal average rate from the codelength distribution.
    pub fn rbar(&self) -> f64 {
        self.lengths.mean() / self.n as f64
    }

    /// Minimal average rate as `(1/n) Σ_{k >= 1} ε*(n, k)`.
    pub fn rbar_from_tail(&self) -> f64 {
        csum(self.epsilon.iter().skip(1).copied()) / self.n as f64
    }

    /// `|R̄ - (∫_0^1 R*(n, x) dx - 1/n)|`, integrating the staircase exactly.
    pub fn integral_identity_residual(&self) -> f64 {
        let n = self.n as f64;
        let integral = csum(
            self.epsilon
                .windows(2)
                .enumerate()
                .map(|(i, w)| (i + 1) as f64 / n * (w[0] - w[1])),
        );
        (self.rbar() - (integral - 1.0 / n)).abs()
    }

    /// Optimal prefix-free excess-length probability `ε_p(n, k)`.
    pub fn prefix_epsilon(&self, k: u64) -> f64 {
        match k {
            0 => 1.0,
            _ if k - 1 < self.prefix_limit => self.epsilon_star(k - 1),
            _ => 0.0,
        }
    }

    /// Optimal prefix-free rate `R_p(n, ε)`.
    pub fn prefix_r(&self, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        let k = (0..=self.prefix_limit + 1)
            .find(|&k| self.prefix_epsilon(k) <= eps)
            .expect("prefix_epsilon vanishes past prefix_limit");
        Ok(k as f64 / self.n as f64)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if (0.0..1.0).contains(&eps) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "eps = {eps} outside [0, 1)"
        )))
    }
}

pub fn epsilon_star(spec: &InformationSpectrum, k: u64) -> Result<f64> {
    Ok(Ranking::new(spec)?.epsilon_star(k))
}

pub fn r_star(spec: &InformationSpectrum, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let ranking = Ranking::new(spec)?;
    // binary search over k, using monotonicity of ε*
    let (mut lo, mut hi) = (0u64, ranking.k_exhaust());
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if ranking.epsilon_star(mid) <= eps {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo as f64 / spec.n() as f64)
}

/// One point of the threshold characterisation of the exact limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VivaPoint {
    /// `P[ι >= a]`.
    pub eps: f64,
    /// `ceil(log2(1 + M(2^a))) - 1`; `-1` when no string is more likely
    /// than `2^-a`, the empty-codeword threshold.
    pub length: i64,
    /// `length / n`.
    pub rate: f64,
}

/// Exact minimum rate at error `P[ι >= a]`, from the number of strings more
/// likely than `2^-a`.
pub fn r_star_via_viva(spec: &InformationSpectrum, a: f64) -> Result<VivaPoint> {
    if !(a >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold a = {a} must be >= 0"
        )));
    }
    let m = spec.count_m(a.exp2())?;
    // ceil(log2(1 + M)) = bit length of M
    let length = m.bits() as i64 - 1;
    Ok(VivaPoint {
        eps: spec.ccdf(a),
        length,
        rate: length as f64 / spec.n() as f64,
    })
}

pub fn rbar(spec: &InformationSpectrum) -> Result<f64> {
    Ok(ExactLimits::new(spec)?.rbar())
}

pub fn integral_identity_check(spec: &InformationSpectrum) -> Result<f64> {
    Ok(ExactLimits::new(spec)?.integral_identity_residual())
}

pub fn prefix_epsilon(spec: &InformationSpectrum, k: u64) -> Result<f64> {
    Ok(ExactLimits::new(spec)?.prefix_epsilon(k))
}

pub fn prefix_r(spec: &InformationSpectrum, eps: f64) -> Result<f64> {
    ExactLimits::new(spec)?.prefix_r(eps)
}

/// An exact fraction with a positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: i128,
    pub den: i128,
}

impl Ratio {
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Exact equality by cross-multiplication.
    pub fn same_value(self, other: Ratio) -> bool {
        self.num * other.den == other.num * self.den
    }
}

/// Largest alphabet size for which the equiprobable moments fit in `i128`.
pub const EQUIPROBABLE_MAX_M: u64 = 1 << 52;

fn check_m(m: u64) -> Result<u32> {
    if m == 0 || m > EQUIPROBABLE_MAX_M {
        return Err(Error::InvalidArgument(format!("M = {m} outside [1, 2^52]")));
    }
    Ok(m.ilog2())
}

/// `E[ℓ]` of the optimal code for `M` equiprobable outcomes, as a fraction.
pub fn expected_length_equiprobable_exact(m: u64) -> Result<Ratio> {
    let k = check_m(m)? as i128;
    let m = m as i128;
    Ok(Ratio {
        num: k * m + 2 + k - (1 << (k + 1)),
        den: m,
    })
}

/// `E[ℓ]` of the optimal code for `M` equiprobable outcomes, in bits.
pub fn expected_length_equiprobable(m: u64) -> Result<f64> {
    Ok(expected_length_equiprobable_exact(m)?.to_f64())
}

/// `Var(ℓ)` of the optimal code for `M` equiprobable outcomes, as a fraction.
pub fn var_length_equiprobable_exact(m: u64) -> Result<Ratio> {
    let k = check_m(m)? as i128;
    let m = m as i128;
    let p = 1i128 << (k + 1);
    let sum1 = k * m + 2 + k - p;
    // s(K) = Σ_{j <= K} j² 2^j
    let s = -6 + p * (3 - 2 * k + k * k);
    let sum2 = s - k * k * (p - m - 1);
    Ok(Ratio {
        num: m * sum2 - sum1 * sum1,
        den: m * m,
    })
}

/// `Var(ℓ)` of the optimal code for `M` equiprobable outcomes, in bits².
pub fn var_length_equiprobable(m: u64) -> Result<f64> {
    Ok(var_length_equiprobable_exact(m)?.to_f64())
}

/// Explicit optimal code for strings of length `n` over a small alphabet.
///
/// Strings are ranked by decreasing probability; strings of equal
/// probability are ordered lexicographically by symbol id.
#[derive(Debug, Clone)]
pub struct OptimalCode {
    n: usize,
    /// Strings in rank order, as symbol ids.
    table: Vec<Vec<usize>>,
    probs: Vec<f64>,
    index: HashMap<Vec<usize>, usize>,
}

impl OptimalCode {
    pub fn new(dist: &FiniteDistribution, n: usize) -> Result<Self> {
        Self::with_budget(dist, n, &Budgets::default())
    }

    pub fn with_budget(dist: &FiniteDistribution, n: usize, budgets: &Budgets) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("blocklength must be >= 1".into()));
        }
        let m = dist.len();
        let strings = (m as f64).powi(n as i32);
        if strings > budgets.enumeration as f64 {
            return Err(Error::BudgetExceeded {
                what: "string enumeration",
                required: format!("{strings:.0}"),
                budget: budgets.enumeration,
                hint: Some("the explicit code is for small alphabets and blocklengths"),
            });
        }
        let infos: Vec<f64> = (0..m).map(|i| dist.info(i)).collect();
        // order support positions by symbol id for the lexicographic tie-break
        let mut by_id: Vec<usize> = (0..m).collect();
        by_id.sort_by_key(|&i| dist.symbols()[i]);
        let mut rows: Vec<(f64, Vec<usize>)> = Vec::with_capacity(strings as usize);
        let mut digits = vec![0usize; n];
        loop {
            let mut counts = vec![0usize; m];
            for &d in &digits {
                counts[by_id[d]] += 1;
            }
            // composition-based value so that permutations tie exactly
            let info = csum(counts.iter().zip(&infos).map(|(&c, &i)| c as f64 * i));
            let s = digits.iter().map(|&d| dist.symbols()[by_id[d]]).collect();
            rows.push((info, s));
            if !advance(&mut digits, m) {
                break;
            }
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        // lexicographic order inside groups of equal probability
        let mut start = 0;
        while start < rows.len() {
            let head = rows[start].0;
            let mut end = start + 1;
            while end < rows.len() && rows[end].0 - head <= info_tolerance(head) {
                end += 1;
            }
            rows[start..end].sort_by(|a, b| a.1.cmp(&b.1));
            start = end;
        }
        let probs = rows.iter().map(|(i, _)| (-i).exp2()).collect();
        let table: Vec<Vec<usize>> = rows.into_iter().map(|(_, s)| s).collect();
        let index = table
            .iter()
            .enumerate()
            .map(|(r, s)| (s.clone(), r))
            .collect();
        Ok(Self {
            n,
            table,
            probs,
            index,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Strings in rank order (rank 1 first).
    pub fn strings(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Probabilities in rank order.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Rank (from 1) of a string.
    pub fn rank(&self, x: &[usize]) -> Result<usize> {
        if x.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "string has length {}, code has blocklength {}",
                x.len(),
                self.n
            )));
        }
        self.index
            .get(x)
            .map(|r| r + 1)
            .ok_or_else(|| Error::InvalidArgument("string has zero probability".into()))
    }

    /// Codeword as a string of `'0'` and `'1'`.
    pub fn encode(&self, x: &[usize]) -> Result<String> {
        Ok(codeword_of_rank(self.rank(x)? as u64))
    }

    pub fn decode(&self, bits: &str) -> Result<Vec<usize>> {
        let rank = rank_of_codeword(bits)?;
        self.table
            .get((rank - 1) as usize)
            .cloned()
            .ok_or_else(|| Error::InvalidArgument(format!("codeword {bits:?} is not in use")))
    }
}

/// Odometer increment over `digits` in base `m`; false on wrap-around.
fn advance(digits: &mut [usize], m: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < m {
            return true;
        }
        *d = 0;
    }
    false
}

/// The `r`-th binary string in the order `∅, 0, 1, 00, 01, ..`: the binary
/// expansion of `r` without its leading 1.
pub fn codeword_of_rank(r: u64) -> String {
    assert!(r >= 1, "ranks start at 1");
    let bits = format!("{r:b}");
    bits[1..].to_string()
}

pub fn rank_of_codeword(bits: &str) -> Result<u64> {
    if bits.len() > 62 || !bits.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::InvalidArgument(format!(
            "{bits:?} is not a codeword"
        )));
    }
    Ok(bits.bytes().fold(1u64, |r, b| 2 * r + u64::from(b - b'0')))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::iid_spectrum;
    use approx::assert_abs_diff_eq;

    fn spec(probs: &[f64], n: usize) -> InformationSpectrum {
        iid_spectrum(&FiniteDistribution::new(probs.to_vec()).unwrap(), n).unwrap()
    }

    #[test]
    fn epsilon_star_examples() {
        let u = spec(&[0.5, 0.5], 4);
        assert_eq!(epsilon_star(&u, 0).unwrap(), 1.0);
        assert_eq!(epsilon_star(&u, 4).unwrap(), 1.0 / 16.0);
        assert_eq!(epsilon_star(&u, 5).unwrap(), 0.0);
        let b = spec(&[0.89, 0.11], 2);
        assert_abs_diff_eq!(epsilon_star(&b, 1).unwrap(), 0.2079, epsilon = 1e-12);
        assert_abs_diff_eq!(epsilon_star(&b, 2).unwrap(), 0.0121, epsilon = 1e-12);
    }

    #[test]
    fn r_star_examples() {
        let u = spec(&[0.5, 0.5], 4);
        assert_eq!(r_star(&u, 0.05).unwrap(), 5.0 / 4.0);
        let b = spec(&[0.89, 0.11], 2);
        assert_eq!(r_star(&b, 0.1).unwrap(), 1.0);
        // a single string gets the empty codeword: ε*(n,1) = 0
        let det = spec(&[1.0], 7);
        assert_eq!(r_star(&det, 0.0).unwrap(), 1.0 / 7.0);
        assert!(r_star(&b, 1.0).is_err());
        let limits = ExactLimits::new(&b).unwrap();
        for eps in [0.0, 0.01, 0.0121, 0.1, 0.2079, 0.5, 0.99] {
            assert_eq!(limits.r_star(eps).unwrap(), r_star(&b, eps).unwrap());
        }
    }

    #[test]
    fn viva_examples() {
        let b = spec(&[0.89, 0.11], 2);
        let p = r_star_via_viva(&b, b.masses()[1].info).unwrap();
        assert_abs_diff_eq!(p.eps, 0.2079, epsilon = 1e-12);
        assert_eq!(p.length, 0);
        let u = spec(&[0.5, 0.5], 4);
        let p = r_star_via_viva(&u, 4.5).unwrap();
        assert_eq!((p.length, p.rate), (4, 1.0));
        let p = r_star_via_viva(&u, 0.0).unwrap();
        assert_eq!((p.eps, p.length), (1.0, -1));
    }

    #[test]
    fn rbar_examples() {
        let u7 = spec(&[1.0 / 7.0; 7], 1);
        assert_abs_diff_eq!(rbar(&u7).unwrap(), 10.0 / 7.0, epsilon = 1e-14);
        let limits = ExactLimits::new(&u7).unwrap();
        assert_abs_diff_eq!(limits.rbar_from_tail(), 10.0 / 7.0, epsilon = 1e-14);
    }

    #[test]
    fn integral_identity_examples() {
        assert!(integral_identity_check(&spec(&[0.5, 0.5], 2)).unwrap() < 1e-12);
        assert!(integral_identity_check(&spec(&[0.89, 0.11], 8)).unwrap() < 1e-9);
    }

    #[test]
    fn length_distribution_of_uniform_three() {
        let d = CodelengthDistribution::from_spectrum(&spec(&[1.0 / 3.0; 3], 1)).unwrap();
        assert_eq!(d.probs_by_length.len(), 2);
        assert_abs_diff_eq!(d.probs_by_length[0], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.variance(), 2.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn prefix_examples() {
        let b = spec(&[0.89, 0.11], 2);
        assert_abs_diff_eq!(prefix_epsilon(&b, 2).unwrap(), 0.2079, epsilon = 1e-12);
        assert_eq!(prefix_epsilon(&b, 1).unwrap(), 1.0);
        assert_eq!(prefix_epsilon(&b, 3).unwrap(), 0.0);
        assert_eq!(prefix_r(&b, 0.1).unwrap(), 1.5);
        let u = spec(&[0.5, 0.5], 4);
        assert_eq!(prefix_r(&u, 0.05).unwrap(), 5.0 / 4.0);
        let t = spec(&[1.0 / 3.0; 3], 3);
        let kmax = (3.0 * 3f64.log2()).ceil();
        assert_eq!(r_star(&t, 0.01).unwrap(), kmax / 3.0);
        assert_eq!(prefix_r(&t, 0.01).unwrap(), (kmax + 1.0) / 3.0);
    }

    #[test]
    fn equiprobable_closed_forms() {
        assert_eq!(expected_length_equiprobable(1).unwrap(), 0.0);
        assert_abs_diff_eq!(
            expected_length_equiprobable(7).unwrap(),
            10.0 / 7.0,
            epsilon = 1e-15
        );
        assert_eq!(var_length_equiprobable(1).unwrap(), 0.0);
        let v = var_length_equiprobable_exact(3).unwrap();
        assert!(v.same_value(Ratio { num: 2, den: 9 }));
        // rank-length oracle
        for m in 1..300u64 {
            let lens: Vec<f64> = (1..=m).map(|r| r.ilog2() as f64).collect();
            let mean = lens.iter().sum::<f64>() / m as f64;
            let var = lens.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / m as f64;
            assert_abs_diff_eq!(
                expected_length_equiprobable(m).unwrap(),
                mean,
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(var_length_equiprobable(m).unwrap(), var, epsilon = 1e-12);
        }
        assert!(expected_length_equiprobable(0).is_err());
    }

    #[test]
    fn codewords() {
        assert_eq!(codeword_of_rank(1), "");
        assert_eq!(codeword_of_rank(2), "0");
        assert_eq!(codeword_of_rank(3), "1");
        assert_eq!(codeword_of_rank(4), "00");
        assert_eq!(codeword_of_rank(16), "0000");
        for r in 1..1000 {
            assert_eq!(rank_of_codeword(&codeword_of_rank(r)).unwrap(), r);
        }
        assert!(rank_of_codeword("012").is_err());
    }

    #[test]
    fn encode_small_examples() {
        let biased = FiniteDistribution::new(vec![0.7, 0.3]).unwrap();
        let code = OptimalCode::new(&biased, 4).unwrap();
        assert_eq!(code.encode(&[0, 0, 0, 0]).unwrap(), "");
        assert_eq!(code.encode(&[0, 0, 0, 1]).unwrap(), "0");
        assert_eq!(code.encode(&[1, 1, 1, 1]).unwrap(), "0000");
        let fair = FiniteDistribution::uniform(2).unwrap();
        let code = OptimalCode::new(&fair, 2).unwrap();
        let words: Vec<String> = code
            .strings()
            .iter()
            .map(|s| code.encode(s).unwrap())
            .collect();
        assert_eq!(words, ["", "0", "1", "00"]);
        assert_eq!(code.strings()[0], vec![0, 0]);
        assert_eq!(code.strings()[3], vec![1, 1]);
        let single = FiniteDistribution::new(vec![1.0]).unwrap();
        let code = OptimalCode::new(&single, 5).unwrap();
        assert_eq!(code.encode(&[0; 5]).unwrap(), "");
        let sparse = FiniteDistribution::new(vec![0.5, 0.0, 0.5]).unwrap();
        let code = OptimalCode::new(&sparse, 2).unwrap();
        assert!(code.encode(&[1, 0]).is_err());
        assert_eq!(
            code.decode(&code.encode(&[2, 0]).unwrap()).unwrap(),
            vec![2, 0]
        );
    }
}
