//! Codelength variance and dispersion: how `Var(ℓ(f*(X^n)))/n` compares
//! with the varentropy, computed exactly from ranked spectra.

use serde::Serialize;

use crate::bounds::q_inv;
use crate::error::{Error, Result};
use crate::numeric::csum;
use crate::optcode::{CodelengthDistribution, ExactLimits};
use crate::sources::{binary_entropy, CountableDistribution, FiniteDistribution, Source};
use crate::spectrum::{
    iid_spectrum_with_budget, markov_spectrum_exact_with_budget, InformationSpectrum,
};
use crate::Budgets;

/// Joint moments of the optimal codelength `ℓ` and the information `ι`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointMoments {
    pub n: usize,
    pub mean_len: f64,
    pub mean_info: f64,
    /// `E[ℓ²]`
    pub second_len: f64,
    /// `E[ι²]`
    pub second_info: f64,
    pub var_len: f64,
    pub var_info: f64,
    /// `E[(ℓ - ι)²]`
    pub gap2: f64,
    /// Largest value of `ℓ - ι` over the support; never positive.
    pub max_excess: f64,
}

impl JointMoments {
    pub fn from_spectrum(spec: &InformationSpectrum) -> Result<Self> {
        let lengths = CodelengthDistribution::from_spectrum(spec)?;
        Ok(Self::from_parts(spec, &lengths))
    }

    pub fn from_parts(spec: &InformationSpectrum, lengths: &CodelengthDistribution) -> Self {
        let masses = spec.masses();
        let gap = |s: &crate::optcode::LengthSegment| s.length as f64 - masses[s.mass].info;
        let mean_len = lengths.mean();
        let mean_info = spec.mean();
        Self {
            n: spec.n(),
            mean_len,
            mean_info,
            second_len: lengths.second_moment(),
            second_info: csum(masses.iter().map(|m| m.prob * m.info * m.info)),
            var_len: lengths.variance(),
            var_info: spec.variance(),
            gap2: csum(lengths.segments.iter().map(|s| s.prob * gap(s).powi(2))),
            max_excess: lengths
                .segments
                .iter()
                .map(gap)
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// `|Var(ℓ) - Var(ι)| <= 2 E[(ℓ-ι)²] + 2 √E[(ℓ-ι)²] √Var(ι)`.
    pub fn cauchy_schwarz_holds(&self) -> bool {
        let lhs = (self.var_len - self.var_info).abs();
        let rhs = 2.0 * self.gap2 + 2.0 * self.gap2.sqrt() * self.var_info.sqrt();
        lhs <= rhs * (1.0 + 1e-9) + 1e-12
    }
}

pub fn var_codelength(spec: &InformationSpectrum) -> Result<f64> {
    Ok(CodelengthDistribution::from_spectrum(spec)?.variance())
}

pub fn second_moment_gap(spec: &InformationSpectrum) -> Result<f64> {
    Ok(JointMoments::from_spectrum(spec)?.gap2)
}

/// Per-blocklength dispersion diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionTrace {
    pub points: Vec<JointMoments>,
    /// Varentropy (rate) the normalized variances should approach.
    pub sigma2_ref: f64,
    /// First blocklength that could not be computed, with the reason.
    pub stopped_at: Option<(usize, String)>,
}

impl DispersionTrace {
    pub fn n_list(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.n).collect()
    }
}

fn exact_spectrum(source: &Source, n: usize, budgets: &Budgets) -> Result<InformationSpectrum> {
    match source {
        Source::Memoryless(d) => iid_spectrum_with_budget(d, n, budgets),
        Source::Markov(m) => markov_spectrum_exact_with_budget(m, n, budgets),
    }
}

/// Exact joint moments at each blocklength, stopping with a marker at the
/// first blocklength that exceeds a budget.
pub fn dispersion_estimate(
    source: &Source,
    n_list: &[usize],
    budgets: &Budgets,
) -> Result<DispersionTrace> {
    let sigma2_ref = match source {
        Source::Memoryless(d) => d.varentropy(),
        Source::Markov(m) => m.varentropy_rate(1e-14, budgets.max_lags)?.value,
    };
    let mut points = Vec::with_capacity(n_list.len());
    for &n in n_list {
        match exact_spectrum(source, n, budgets) {
            Ok(spec) => points.push(JointMoments::from_spectrum(&spec)?),
            Err(e @ Error::BudgetExceeded { .. }) => {
                return Ok(DispersionTrace {
                    points,
                    sigma2_ref,
                    stopped_at: Some((n, e.to_string())),
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(DispersionTrace {
        points,
        sigma2_ref,
        stopped_at: None,
    })
}

/// `σ²/H²` of a memoryless source.
pub fn normalized_dispersion(dist: &FiniteDistribution) -> Result<f64> {
    let h = dist.entropy();
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(
            "normalized dispersion needs H > 0".into(),
        ));
    }
    Ok(dist.varentropy() / (h * h))
}

/// `σ²/H²` of a countable source through its truncation.
pub fn normalized_dispersion_countable(dist: &CountableDistribution) -> Result<f64> {
    normalized_dispersion(&dist.truncate()?)
}

/// Closed form of `σ²/H²` for a Bernoulli(`p`) source.
pub fn bernoulli_normalized_dispersion(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} outside (0, 1)")));
    }
    let ratio = p.ln() / (1.0 - p).ln();
    Ok((p - p * p) / (p + 1.0 / (ratio - 1.0)).powi(2))
}

/// Closed form of `σ²/H²` for the geometric source `P(k) = q(1-q)^k`.
pub fn geometric_normalized_dispersion(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidArgument(format!("q = {q} outside (0, 1)")));
    }
    Ok((1.0 - q) * ((1.0 - q).log2() / binary_entropy(q)).powi(2))
}

/// `n ((R*(n, ε) - H) / Q⁻¹(ε))²` for one `(n, ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RdPoint {
    pub n: usize,
    pub eps: f64,
    pub r_star: f64,
    pub value: f64,
    pub sigma2: f64,
}

/// Table of the rate-deviation characterization of the varentropy.
pub fn rd_characterization_check(
    source: &Source,
    eps_list: &[f64],
    n_list: &[usize],
    budgets: &Budgets,
) -> Result<Vec<RdPoint>> {
    let h = source.entropy_rate()?;
    let sigma2 = source.varentropy_rate()?;
    if !(sigma2 > 0.0) {
        return Err(Error::Unsupported(
            "needs a strictly positive varentropy".into(),
        ));
    }
    let mut rows = Vec::new();
    for &n in n_list {
        let limits = ExactLimits::new(&exact_spectrum(source, n, budgets)?)?;
        for &eps in eps_list {
            let r_star = limits.r_star(eps)?;
            let qe = q_inv(eps)?;
            rows.push(RdPoint {
                n,
                eps,
                r_star,
                value: n as f64 * ((r_star - h) / qe).powi(2),
                sigma2,
            });
        }
    }
    Ok(rows)
}

/// `max ι(x^n)/n` over the support of a spectrum.
pub fn max_information_rate(spec: &InformationSpectrum) -> f64 {
    spec.masses()
        .last()
        .map_or(0.0, |m| m.info / spec.n() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::iid_spectrum;
    use approx::assert_abs_diff_eq;

    #[test]
    fn var_codelength_examples() {
        let det = iid_spectrum(&FiniteDistribution::new(vec![1.0]).unwrap(), 6).unwrap();
        assert_eq!(var_codelength(&det).unwrap(), 0.0);
        assert_eq!(second_moment_gap(&det).unwrap(), 0.0);
        let u3 = iid_spectrum(&FiniteDistribution::uniform(3).unwrap(), 1).unwrap();
        assert_abs_diff_eq!(var_codelength(&u3).unwrap(), 2.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn dyadic_gap_matches_equiprobable_formulas() {
        for n in 1..12 {
            let s = iid_spectrum(&FiniteDistribution::uniform(2).unwrap(), n).unwrap();
            let j = JointMoments::from_spectrum(&s).unwrap();
            let m = 1u64 << n;
            let mean = crate::optcode::expected_length_equiprobable(m).unwrap();
            let var = crate::optcode::var_length_equiprobable(m).unwrap();
            // ι = n for every string
            let expected = var + (n as f64 - mean).powi(2);
            assert_abs_diff_eq!(j.gap2, expected, epsilon = 1e-10);
            assert!(j.max_excess <= 0.0);
            assert!(j.cauchy_schwarz_holds());
        }
    }

    #[test]
    fn normalized_dispersion_examples() {
        assert_eq!(
            normalized_dispersion(&FiniteDistribution::bernoulli(0.5).unwrap()).unwrap(),
            0.0
        );
        assert_abs_diff_eq!(
            geometric_normalized_dispersion(0.5).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        for p in [0.01, 0.11, 0.3, 0.7] {
            let d = FiniteDistribution::bernoulli(p).unwrap();
            assert_abs_diff_eq!(
                normalized_dispersion(&d).unwrap(),
                bernoulli_normalized_dispersion(p).unwrap(),
                epsilon = 1e-12
            );
        }
        for q in [0.1, 0.3, 0.5, 0.9] {
            let g = CountableDistribution::geometric(q).unwrap();
            assert_abs_diff_eq!(
                normalized_dispersion_countable(&g).unwrap(),
                geometric_normalized_dispersion(q).unwrap(),
                // the 1e-12 tail sits at information values near 40 bits
                epsilon = 1e-8
            );
        }
        assert!(normalized_dispersion(&FiniteDistribution::new(vec![1.0]).unwrap()).is_err());
    }

    #[test]
    fn trace_stops_at_budget() {
        let src = Source::Memoryless(FiniteDistribution::bernoulli(0.2).unwrap());
        let budgets = Budgets {
            type_classes: 30,
            ..Budgets::default()
        };
        let t = dispersion_estimate(&src, &[5, 10, 40, 50], &budgets).unwrap();
        assert_eq!(t.n_list(), vec![5, 10]);
        assert_eq!(t.stopped_at.as_ref().unwrap().0, 40);
    }
}
