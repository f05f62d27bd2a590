//! Random binning: error probability of mapping outcomes uniformly at random
//! into `N` bins and decoding by maximum likelihood inside the bin.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{csum, info_tolerance};
use crate::sources::FiniteDistribution;
use crate::spectrum::InformationSpectrum;

/// Outcomes sharing one probability value.
#[derive(Debug, Clone, PartialEq)]
pub struct MassClass {
    pub per_string_prob: f64,
    /// Total probability of the class.
    pub class_prob: f64,
    /// `J`: number of outcomes in the class.
    pub count: BigUint,
    /// `M`: number of outcomes strictly more likely.
    pub heavier: BigUint,
}

/// A source together with a number of bins.
#[derive(Debug, Clone, PartialEq)]
pub struct BinningProblem {
    classes: Vec<MassClass>,
    bins: u64,
    /// Per-outcome class index, when outcomes are listed explicitly.
    atoms: Option<Vec<(f64, usize)>>,
}

impl BinningProblem {
    pub fn from_distribution(dist: &FiniteDistribution, bins: u64) -> Result<Self> {
        check_bins(bins)?;
        let mut order: Vec<usize> = (0..dist.len()).collect();
        order.sort_by(|&a, &b| dist.info(a).total_cmp(&dist.info(b)));
        let mut classes: Vec<MassClass> = Vec::new();
        let mut class_of = vec![0; dist.len()];
        let mut head = f64::NAN;
        let mut seen = BigUint::zero();
        for &i in &order {
            let info = dist.info(i);
            let p = dist.probs()[i];
            if classes.is_empty() || info - head > info_tolerance(head) {
                head = info;
                classes.push(MassClass {
                    per_string_prob: p,
                    class_prob: 0.0,
                    count: BigUint::zero(),
                    heavier: seen.clone(),
                });
            }
            let last = classes.last_mut().expect("pushed above");
            last.class_prob += p;
            last.count += 1u32;
            seen += 1u32;
            class_of[i] = classes.len() - 1;
        }
        let atoms = (0..dist.len())
            .map(|i| (dist.probs()[i], class_of[i]))
            .collect();
        Ok(Self {
            classes,
            bins,
            atoms: Some(atoms),
        })
    }

    /// Classes taken from the masses of an exact spectrum.
    pub fn from_spectrum(spec: &InformationSpectrum, bins: u64) -> Result<Self> {
        check_bins(bins)?;
        spec.require_exact("exact binning error")?;
        let mut seen = BigUint::zero();
        let classes = spec
            .masses()
            .iter()
            .map(|m| {
                let class = MassClass {
                    per_string_prob: (-m.info).exp2(),
                    class_prob: m.prob,
                    count: m.count.clone(),
                    heavier: seen.clone(),
                };
                seen += &m.count;
                class
            })
            .collect();
        Ok(Self {
            classes,
            bins,
            atoms: None,
        })
    }

    pub fn classes(&self) -> &[MassClass] {
        &self.classes
    }

    pub fn bins(&self) -> u64 {
        self.bins
    }
}

fn check_bins(bins: u64) -> Result<()> {
    if bins == 0 {
        Err(Error::InvalidArgument("need at least one bin".into()))
    } else {
        Ok(())
    }
}

/// Classes with at most this many outcomes use the direct binomial sum.
pub const DIRECT_SUM_LIMIT: u64 = 64;

/// Probability that an outcome with `heavier` more likely outcomes and
/// `count - 1` equally likely competitors is decoded correctly, by the
/// closed form `(1 - 1/N)^M N (1 - (1 - 1/N)^J) / J`.
pub fn class_success_closed(count: f64, heavier: f64, bins: u64) -> f64 {
    if bins == 1 {
        return if heavier == 0.0 { 1.0 / count } else { 0.0 };
    }
    let ln_keep = (-1.0 / bins as f64).ln_1p();
    let clear = (heavier * ln_keep).exp();
    // 1 - (1 - 1/N)^J without cancellation
    let any = -(count * ln_keep).exp_m1();
    clear * bins as f64 * any / count
}

/// Same quantity as [`class_success_closed`] by the direct sum
/// `Σ_ℓ C(J-1, ℓ) N^-ℓ (1 - 1/N)^(M+J-ℓ-1) / (1 + ℓ)`.
pub fn class_success_direct(count: u64, heavier: f64, bins: u64) -> f64 {
    if bins == 1 {
        return if heavier == 0.0 {
            1.0 / count as f64
        } else {
            0.0
        };
    }
    let q = 1.0 / bins as f64;
    let j = count - 1;
    // Binomial(J - 1, 1/N) weights up to a common factor, grown from the
    // mode by the term ratio; dividing by their sum restores the scale
    // without ever forming the (possibly underflowing) pmf itself.
    let odds = q / (1.0 - q);
    let mode = (((j + 1) as f64 * q).floor() as u64).min(j);
    let mut weights = vec![0.0; j as usize + 1];
    weights[mode as usize] = 1.0;
    for l in mode..j {
        weights[l as usize + 1] = weights[l as usize] * (j - l) as f64 / (l + 1) as f64 * odds;
    }
    for l in (1..=mode).rev() {
        weights[l as usize - 1] = weights[l as usize] * l as f64 / (j - l + 1) as f64 / odds;
    }
    let total = csum(weights.iter().copied());
    let ties = csum(weights.iter().enumerate().map(|(l, w)| w / (1 + l) as f64));
    (heavier * (-q).ln_1p()).exp() * ties / total
}

/// Expected error probability of maximum-likelihood decoding, averaged over
/// all uniform assignments of outcomes to bins.
pub fn binning_error_exact(problem: &BinningProblem) -> Result<f64> {
    let success = csum(problem.classes.iter().map(|c| {
        let heavier = c.heavier.to_f64().unwrap_or(f64::INFINITY);
        let s = match c.count.to_u64() {
            Some(j) if j <= DIRECT_SUM_LIMIT => class_success_direct(j, heavier, problem.bins),
            _ => class_success_closed(
                c.count.to_f64().unwrap_or(f64::INFINITY),
                heavier,
                problem.bins,
            ),
        };
        c.class_prob * s
    }));
    Ok((1.0 - success).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
}

const MC_CHUNK: u64 = 16_384;

/// Monte-Carlo estimate of the binning error: each trial draws a fresh bin
/// assignment and one outcome, and breaks likelihood ties uniformly.
pub fn binning_error_mc(problem: &BinningProblem, trials: u64, seed: u64) -> Result<McEstimate> {
    let atoms = problem.atoms.as_ref().ok_or_else(|| {
        Error::Unsupported("simulation needs an explicitly listed distribution".into())
    })?;
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let size = atoms.len();
    let cdf: Vec<f64> = atoms
        .iter()
        .scan(0.0, |acc, a| {
            *acc += a.0;
            Some(*acc)
        })
        .collect();
    let bins = problem.bins;
    let run_chunk = |c: u64| -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c);
        let mut bin = vec![0u64; size];
        let mut errors = 0;
        for _ in 0..MC_CHUNK.min(trials - c * MC_CHUNK) {
            for b in bin.iter_mut() {
                *b = rng.random_range(0..bins);
            }
            let u: f64 = rng.random::<f64>() * cdf[size - 1];
            let x = cdf.iter().position(|&v| u < v).unwrap_or(size - 1);
            let best = (0..size)
                .filter(|&y| bin[y] == bin[x])
                .map(|y| atoms[y].1)
                .min()
                .expect("x shares its own bin");
            if atoms[x].1 != best {
                errors += 1;
                continue;
            }
            let ties = (0..size)
                .filter(|&y| bin[y] == bin[x] && atoms[y].1 == best)
                .count();
            if ties > 1 && rng.random_range(0..ties) != 0 {
                errors += 1;
            }
        }
        errors
    };
    let chunks = trials.div_ceil(MC_CHUNK);
    #[cfg(feature = "parallel")]
    let errors: u64 = {
        use rayon::prelude::*;
        (0..chunks).into_par_iter().map(run_chunk).sum()
    };
    #[cfg(not(feature = "parallel"))]
    let errors: u64 = (0..chunks).map(run_chunk).sum();
    let p = errors as f64 / trials as f64;
    Ok(McEstimate {
        estimate: p,
        stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        trials,
    })
}
