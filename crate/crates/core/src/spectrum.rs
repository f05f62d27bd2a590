//! Information spectra: the distribution of `log2(1 / P(X^n))`.
//!
//! Exact spectra carry, for every distinct information value, the number of
//! strings attaining it as an arbitrary-precision integer. That is what lets
//! the ranking in [`crate::optcode`] work at blocklengths in the thousands.

use std::io::Write;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{csum, info_tolerance, log2_big, scaled_pow2, CompensatedSum};
use crate::sources::{FiniteDistribution, MarkovSource, PathSampler};
use crate::Budgets;

/// Strings sharing one information value.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumMass {
    /// `log2(1 / P(x))` for each string in the mass, in bits.
    pub info: f64,
    /// Total probability of the mass.
    pub prob: f64,
    /// Number of strings; 1 per distinct value in Monte-Carlo spectra.
    pub count: BigUint,
}

/// Masses sorted by strictly increasing information value, i.e. by
/// decreasing per-string probability.
#[derive(Debug, Clone, PartialEq)]
pub struct InformationSpectrum {
    masses: Vec<SpectrumMass>,
    n: usize,
    exact: bool,
    sample_size: u64,
    /// `tail[i] = Σ_{j >= i} masses[j].prob`, one extra trailing zero.
    tail: Vec<f64>,
}

impl InformationSpectrum {
    /// Builds a spectrum from unsorted `(info, prob, count)` triples,
    /// merging values that agree within the merge tolerance.
    pub fn from_raw(
        n: usize,
        mut raw: Vec<SpectrumMass>,
        exact: bool,
        sample_size: u64,
    ) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidDistribution("spectrum has no masses".into()));
        }
        if let Some(m) = raw
            .iter()
            .find(|m| !m.info.is_finite() || m.info < -info_tolerance(m.info))
        {
            return Err(Error::InvalidDistribution(format!(
                "information value {} is negative or not finite",
                m.info
            )));
        }
        raw.sort_by(|a, b| a.info.total_cmp(&b.info));
        let mut masses: Vec<SpectrumMass> = Vec::with_capacity(raw.len());
        for m in raw {
            match masses.last_mut() {
                Some(last) if m.info - last.info <= info_tolerance(last.info) => {
                    last.prob += m.prob;
                    last.count += m.count;
                }
                _ => masses.push(SpectrumMass {
                    info: m.info.max(0.0),
                    ..m
                }),
            }
        }
        let mut tail = vec![0.0; masses.len() + 1];
        let mut acc = CompensatedSum::new();
        for i in (0..masses.len()).rev() {
            acc.add(masses[i].prob);
            tail[i] = acc.value();
        }
        let total = tail[0];
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!(
                "spectrum masses sum to {total}, not 1"
            )));
        }
        Ok(Self {
            masses,
            n,
            exact,
            sample_size,
            tail,
        })
    }

    pub fn masses(&self) -> &[SpectrumMass] {
        &self.masses
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Number of Monte-Carlo samples (0 for exact spectra).
    pub fn sample_size(&self) -> u64 {
        self.sample_size
    }

    /// Probability of the masses from index `i` on.
    pub fn tail_from(&self, i: usize) -> f64 {
        self.tail[i.min(self.masses.len())]
    }

    /// Number of strings with positive probability.
    pub fn total_count(&self) -> BigUint {
        self.masses.iter().map(|m| &m.count).sum()
    }

    pub(crate) fn require_exact(&self, what: &str) -> Result<()> {
        if self.exact {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "{what} needs an exact spectrum, not a Monte-Carlo one"
            )))
        }
    }

    /// Index of the first mass whose value is not below `a` (within the
    /// merge tolerance).
    fn first_at_least(&self, a: f64) -> usize {
        let tol = info_tolerance(a);
        self.masses.partition_point(|m| m.info < a - tol)
    }

    /// `P[ι >= a]`.
    pub fn ccdf(&self, a: f64) -> f64 {
        self.tail_from(self.first_at_least(a))
    }

    /// Number of strings with probability strictly larger than `1 / beta`.
    pub fn count_m(&self, beta: f64) -> Result<BigUint> {
        self.require_exact("count_M")?;
        check_beta(beta)?;
        let end = self.first_at_least(beta.log2());
        Ok(self.masses[..end].iter().map(|m| &m.count).sum())
    }

    /// Number of strings with probability at least `1 / beta`.
    pub fn count_m_plus(&self, beta: f64) -> Result<BigUint> {
        self.require_exact("count_M_plus")?;
        check_beta(beta)?;
        let a = beta.log2();
        let tol = info_tolerance(a);
        let end = self.masses.partition_point(|m| m.info <= a + tol);
        Ok(self.masses[..end].iter().map(|m| &m.count).sum())
    }

    /// Smallest value `x` with `P[ι <= x] >= p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "quantile level {p} outside (0, 1]"
            )));
        }
        // P[ι <= v_i] = 1 - tail[i + 1]
        let i = (0..self.masses.len())
            .find(|&i| 1.0 - self.tail[i + 1] >= p - 1e-12)
            .unwrap_or(self.masses.len() - 1);
        Ok(self.masses[i].info)
    }

    pub fn mean(&self) -> f64 {
        csum(self.masses.iter().map(|m| m.prob * m.info))
    }

    /// Variance of the information, computed about the mean.
    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        csum(self.masses.iter().map(|m| m.prob * (m.info - mu).powi(2)))
    }

    /// Writes `info_value_bits,prob,count` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Config(format!("cannot write CSV: {e}"));
        w.write_record(["info_value_bits", "prob", "count"])
            .map_err(io)?;
        for m in &self.masses {
            w.write_record([
                format!("{:.17e}", m.info),
                format!("{:.17e}", m.prob),
                m.count.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::Config(format!("cannot write CSV: {e}")))?;
        Ok(())
    }

    /// Metadata recorded next to an exported spectrum.
    pub fn metadata(&self) -> SpectrumMetadata {
        SpectrumMetadata {
            n: self.n,
            exact: self.exact,
            sample_size: self.sample_size,
            masses: self.masses.len(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumMetadata {
    pub n: usize,
    pub exact: bool,
    pub sample_size: u64,
    pub masses: usize,
}

fn check_beta(beta: f64) -> Result<()> {
    if beta >= 1.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "beta = {beta} must be >= 1"
        )))
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c *= n - i;
        c /= i + 1;
    }
    c
}

/// Number of compositions of `n` into `m` parts.
fn type_class_count(n: usize, m: usize) -> BigUint {
    binomial((n + m - 1) as u64, (m - 1) as u64)
}

/// Exact spectrum of `n` i.i.d. draws, one mass per type class.
pub fn iid_spectrum(dist: &FiniteDistribution, n: usize) -> Result<InformationSpectrum> {
    iid_spectrum_with_budget(dist, n, &Budgets::default())
}

pub fn iid_spectrum_with_budget(
    dist: &FiniteDistribution,
    n: usize,
    budgets: &Budgets,
) -> Result<InformationSpectrum> {
    if n == 0 {
        return Err(Error::InvalidArgument("blocklength must be >= 1".into()));
    }
    let m = dist.len();
    let classes = type_class_count(n, m);
    if classes > BigUint::from(budgets.type_classes) {
        return Err(Error::BudgetExceeded {
            what: "type classes",
            required: classes.to_string(),
            budget: budgets.type_classes,
            hint: Some("raise the type-class budget or shorten the blocklength"),
        });
    }
    let infos: Vec<f64> = (0..m).map(|i| dist.info(i)).collect();
    let mut raw = Vec::with_capacity(classes.to_usize().unwrap_or(0));
    let mut parts = vec![0usize; m];
    compositions(n, 0, &mut parts, &BigUint::one(), &mut |parts, count| {
        let info = csum(parts.iter().zip(&infos).map(|(&c, &i)| c as f64 * i));
        raw.push(SpectrumMass {
            info,
            prob: scaled_pow2(&count, info),
            count,
        });
    });
    InformationSpectrum::from_raw(n, raw, true, 0)
}

/// Visits every composition of `remaining` into the parts from `depth` on,
/// passing the multinomial coefficient of the full composition.
fn compositions(
    remaining: usize,
    depth: usize,
    parts: &mut Vec<usize>,
    coeff: &BigUint,
    visit: &mut impl FnMut(&[usize], BigUint),
) {
    if depth + 1 == parts.len() {
        parts[depth] = remaining;
        visit(parts, coeff.clone());
        return;
    }
    // C(remaining, c) updated incrementally over c
    let mut binom = BigUint::one();
    for c in 0..=remaining {
        if c > 0 {
            binom *= remaining - c + 1;
            binom /= c;
        }
        parts[depth] = c;
        compositions(remaining - c, depth + 1, parts, &(coeff * &binom), visit);
    }
}

/// Spectrum of a single symbol counting the tails in `trials` fair coin
/// flips: `P(k) = C(trials, k) 2^-trials`.
pub fn binomial_count_spectrum(trials: u64) -> Result<InformationSpectrum> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one flip".into()));
    }
    let mut c = BigUint::one();
    let mut raw = Vec::with_capacity(trials as usize + 1);
    for k in 0..=trials {
        if k > 0 {
            c *= trials - k + 1;
            c /= k;
        }
        let info = trials as f64 - log2_big(&c);
        raw.push(SpectrumMass {
            info,
            prob: (-info).exp2(),
            count: BigUint::one(),
        });
    }
    InformationSpectrum::from_raw(1, raw, true, 0)
}

/// Spectrum built from an explicit list of per-string information values.
pub fn from_string_infos(
    n: usize,
    infos: impl IntoIterator<Item = f64>,
) -> Result<InformationSpectrum> {
    let raw = infos
        .into_iter()
        .map(|info| SpectrumMass {
            info,
            prob: (-info).exp2(),
            count: BigUint::one(),
        })
        .collect();
    InformationSpectrum::from_raw(n, raw, true, 0)
}

/// Exact spectrum of a Markov source by enumerating all
/// positive-probability strings of length `n`.
pub fn markov_spectrum_exact(src: &MarkovSource, n: usize) -> Result<InformationSpectrum> {
    markov_spectrum_exact_with_budget(src, n, &Budgets::default())
}

pub fn markov_spectrum_exact_with_budget(
    src: &MarkovSource,
    n: usize,
    budgets: &Budgets,
) -> Result<InformationSpectrum> {
    if n < src.order() {
        return Err(Error::InvalidArgument(format!(
            "blocklength {n} is shorter than the order {}",
            src.order()
        )));
    }
    let strings = (src.alphabet_size() as f64).powi(n as i32);
    if strings > budgets.enumeration as f64 {
        return Err(Error::BudgetExceeded {
            what: "string enumeration",
            required: format!("{strings:.0}"),
            budget: budgets.enumeration,
            hint: Some("use the Monte-Carlo spectrum or raise the enumeration budget"),
        });
    }
    let mut infos = Vec::new();
    for (state, &p) in src.initial().iter().enumerate() {
        if p > 0.0 {
            extend_paths(src, state, n - src.order(), vec![-p.log2()], &mut infos);
        }
    }
    from_string_infos(n, infos)
}

fn extend_paths(
    src: &MarkovSource,
    state: usize,
    steps: usize,
    terms: Vec<f64>,
    out: &mut Vec<f64>,
) {
    if steps == 0 {
        out.push(csum(terms));
        return;
    }
    for (y, &p) in src.conditional()[state].iter().enumerate() {
        if p > 0.0 {
            let mut next = terms.clone();
            next.push(-p.log2());
            extend_paths(src, src.next_state(state, y), steps - 1, next, out);
        }
    }
}

/// Samples per independent random stream in the Monte-Carlo spectrum.
const MC_CHUNK: u64 = 4096;

/// Empirical spectrum of `samples` independent paths of length `n`.
///
/// Samples are drawn in fixed-size chunks, chunk `c` from stream `c` of a
/// ChaCha generator keyed by `seed`, so the result does not depend on how
/// chunks are scheduled across threads.
pub fn markov_spectrum_mc(
    src: &MarkovSource,
    n: usize,
    samples: u64,
    seed: u64,
) -> Result<InformationSpectrum> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    if n < src.order() {
        return Err(Error::InvalidArgument(format!(
            "blocklength {n} is shorter than the order {}",
            src.order()
        )));
    }
    let sampler = PathSampler::new(src);
    let chunks = samples.div_ceil(MC_CHUNK);
    let run_chunk = |c: u64| -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c);
        let size = MC_CHUNK.min(samples - c * MC_CHUNK);
        (0..size)
            .map(|_| src.sample_info(&sampler, &mut rng, n))
            .collect()
    };
    #[cfg(feature = "parallel")]
    let mut values: Vec<f64> = {
        use rayon::prelude::*;
        (0..chunks)
            .into_par_iter()
            .flat_map_iter(run_chunk)
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let mut values: Vec<f64> = (0..chunks).flat_map(run_chunk).collect();

    values.sort_by(f64::total_cmp);
    let weight = 1.0 / samples as f64;
    let mut raw: Vec<(f64, u64)> = Vec::new();
    for v in values {
        match raw.last_mut() {
            Some((last, hits)) if v - *last <= info_tolerance(*last) => *hits += 1,
            _ => raw.push((v, 1)),
        }
    }
    let masses = raw
        .into_iter()
        .map(|(info, hits)| SpectrumMass {
            info,
            prob: hits as f64 * weight,
            count: BigUint::one(),
        })
        .collect();
    InformationSpectrum::from_raw(n, masses, false, samples)
}

/// Compares two spectra mass by mass within the given tolerances.
pub fn spectra_agree(
    a: &InformationSpectrum,
    b: &InformationSpectrum,
    info_tol: f64,
    prob_tol: f64,
) -> bool {
    a.masses.len() == b.masses.len()
        && a.masses.iter().zip(&b.masses).all(|(x, y)| {
            (x.info - y.info).abs() <= info_tol
                && (x.prob - y.prob).abs() <= prob_tol
                && x.count == y.count
        })
}
