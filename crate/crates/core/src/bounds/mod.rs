//! Non-asymptotic bounds and Gaussian approximations for `R*(n, ε)`.
//!
//! Rates are in bits per symbol throughout. Every bound comes back as a
//! [`BoundReport`] whose `valid` flag records whether `n` lies in the range
//! where the bound is proved; the value is reported either way so curves
//! can be plotted across the whole range.

pub mod gaussian;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::csum;
use crate::optcode::ExactLimits;
use crate::sources::{MarkovSource, MomentSummary};
use crate::spectrum::{markov_spectrum_mc, InformationSpectrum};

pub use gaussian::{big_phi, big_phi_inv, phi, q, q_inv};

const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Information moments driving the Gaussian bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianParams {
    /// Entropy (rate), bits.
    pub h: f64,
    /// Varentropy (rate), bits².
    pub sigma2: f64,
    /// Third centered absolute moment, bits³.
    pub mu3: f64,
    /// Berry-Esseen constant for Markov sources, when known.
    pub a_markov: Option<f64>,
}

impl GaussianParams {
    pub fn new(h: f64, sigma2: f64, mu3: f64) -> Self {
        Self {
            h,
            sigma2,
            mu3,
            a_markov: None,
        }
    }

    pub fn with_markov_constant(mut self, a: f64) -> Self {
        self.a_markov = Some(a);
        self
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    fn require_dispersion(&self) -> Result<()> {
        if self.sigma2 > 0.0 {
            Ok(())
        } else {
            Err(Error::Unsupported(
                "Gaussian bounds need a strictly positive varentropy".into(),
            ))
        }
    }

    fn markov_constant(&self) -> Result<f64> {
        match self.a_markov {
            Some(a) if a > 0.0 => Ok(a),
            Some(a) => Err(Error::Config(format!(
                "Markov constant A = {a} must be > 0"
            ))),
            None => Err(Error::Config(
                "Markov Berry-Esseen constant A is not set".into(),
            )),
        }
    }
}

impl From<MomentSummary> for GaussianParams {
    fn from(m: MomentSummary) -> Self {
        Self::new(m.h, m.sigma2, m.mu3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Achievability,
    Converse,
    Approximation,
}

/// A bound value with the domain in which it is proved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub value: f64,
    pub kind: BoundKind,
    pub valid: bool,
    /// Human-readable validity predicate, e.g. `"n > 12.3"`.
    pub validity_condition: String,
    /// Blocklength threshold of the validity predicate, if any.
    pub n0: Option<f64>,
    /// Which bound produced the value.
    pub provenance: &'static str,
}

impl BoundReport {
    fn always(value: f64, kind: BoundKind, provenance: &'static str) -> Self {
        Self {
            value,
            kind,
            valid: true,
            validity_condition: "all n".into(),
            n0: None,
            provenance,
        }
    }
}

fn check_n(n: usize) -> Result<f64> {
    if n == 0 {
        Err(Error::InvalidArgument("blocklength must be >= 1".into()))
    } else {
        Ok(n as f64)
    }
}

fn check_open_unit(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "eps = {eps} outside (0, 1)"
        )))
    }
}

/// Smallest rate `R` such that `P[ι(X^n) > nR] <= ε`, i.e. the
/// `(1 - ε)`-quantile of the information spectrum divided by `n`.
pub fn r_upper_quantile(spec: &InformationSpectrum, eps: f64) -> Result<BoundReport> {
    check_open_unit(eps)?;
    let masses = spec.masses();
    let j = (0..masses.len())
        .find(|&j| spec.tail_from(j + 1) <= eps)
        .unwrap_or(masses.len() - 1);
    Ok(BoundReport::always(
        masses[j].info / spec.n() as f64,
        BoundKind::Achievability,
        "information-spectrum quantile",
    ))
}

/// Lower bound on `P[ℓ(f*(X^n)) >= k]`: `max_τ P[ι >= k + τ] - 2^-τ`,
/// maximized over the spectrum jump offsets and a geometric grid of `τ`.
pub fn converse_optimized(spec: &InformationSpectrum, k: u64) -> Result<BoundReport> {
    let k = k as f64;
    let n = spec.n().max(1) as f64;
    let mut taus: Vec<f64> = spec
        .masses()
        .iter()
        .map(|m| m.info - k)
        .filter(|&t| t > 0.0)
        .collect();
    let mut t = 2f64.powi(-6);
    while t <= n {
        taus.push(t);
        t *= 2.0;
    }
    let best = taus
        .into_iter()
        .map(|tau| spec.ccdf(k + tau) - (-tau).exp2())
        .fold(0.0, f64::max);
    Ok(BoundReport::always(
        best,
        BoundKind::Converse,
        "optimized spectrum converse",
    ))
}

/// One codeword of a code under test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeEntry {
    pub prob: f64,
    /// `log2(1 / prob)`.
    pub info: f64,
    /// Codeword length in bits.
    pub length: u64,
}

/// Both sides of a codelength-versus-information converse inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConverseCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl ConverseCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// `P[ℓ(f(X)) <= ι(X) - τ]` against `2^-τ (floor(log2 |X|) + 1)` for any
/// code, or `P[ℓ(f(X)) < ι(X) - τ]` against `2^-τ` for prefix codes.
pub fn converse_codelength_vs_info(
    code: &[CodeEntry],
    tau: f64,
    prefix: bool,
) -> Result<ConverseCheck> {
    if code.is_empty() {
        return Err(Error::InvalidArgument("empty code".into()));
    }
    if prefix {
        let kraft = csum(code.iter().map(|c| (-(c.length as f64)).exp2()));
        if kraft > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "lengths violate Kraft's inequality (sum {kraft})"
            )));
        }
        if tau < 0.0 {
            return Err(Error::InvalidArgument(format!("tau = {tau} must be >= 0")));
        }
        let lhs = csum(
            code.iter()
                .filter(|c| (c.length as f64) < c.info - tau)
                .map(|c| c.prob),
        );
        Ok(ConverseCheck {
            lhs,
            rhs: (-tau).exp2(),
        })
    } else {
        if tau < 0.0 {
            return Err(Error::InvalidArgument(format!("tau = {tau} must be >= 0")));
        }
        let lhs = csum(
            code.iter()
                .filter(|c| c.length as f64 <= c.info - tau)
                .map(|c| c.prob),
        );
        let size = code.len() as f64;
        Ok(ConverseCheck {
            lhs,
            rhs: (-tau).exp2() * (size.log2().floor() + 1.0),
        })
    }
}

/// `H + σ Q⁻¹(ε)/√n - log2(n)/(2n)`.
pub fn approx_rstar(params: &GaussianParams, n: usize, eps: f64) -> Result<f64> {
    let nf = check_n(n)?;
    check_open_unit(eps)?;
    params.require_dispersion()?;
    Ok(params.h + params.sigma() * q_inv(eps)? / nf.sqrt() - nf.log2() / (2.0 * nf))
}

/// Constants `(c, c'_n)` with `c <= n (R* - approx) <= c'_n` for memoryless
/// sources, from the converse and achievability bounds below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianBracket {
    pub lower: f64,
    pub upper: f64,
    /// Whether the lower constant applies at this `n`.
    pub lower_valid: bool,
    /// Whether the upper constant applies at this `n`.
    pub upper_valid: bool,
}

fn achievability_terms(params: &GaussianParams, n: f64, eps: f64) -> Result<(f64, bool)> {
    let sigma = params.sigma();
    let qe = q_inv(eps)?;
    let shift = params.mu3 / (sigma.powi(3) * n.sqrt());
    let inner = big_phi(qe) + shift;
    let valid = inner < 1.0;
    let log_term = (LOG2_E / (2.0 * std::f64::consts::PI * params.sigma2).sqrt()
        + params.mu3 / sigma.powi(3))
    .log2();
    let density = if valid { phi(big_phi_inv(inner)?) } else { 0.0 };
    let last = if valid {
        params.mu3 / (params.sigma2 * density)
    } else {
        f64::INFINITY
    };
    Ok((log_term + last, valid))
}

fn converse_constant(params: &GaussianParams, eps: f64) -> Result<(f64, f64)> {
    let sigma = params.sigma();
    let qe = q_inv(eps)?;
    let c = -(params.mu3 / 2.0 + sigma.powi(3)) / (params.sigma2 * phi(qe));
    let n0 = 0.25 * (1.0 + params.mu3 / (2.0 * sigma.powi(3))).powi(2) / (phi(qe) * qe).powi(2);
    Ok((c, n0))
}

pub fn gaussian_bracket(params: &GaussianParams, n: usize, eps: f64) -> Result<GaussianBracket> {
    let nf = check_n(n)?;
    params.require_dispersion()?;
    check_open_unit(eps)?;
    let (upper, upper_valid) = achievability_terms(params, nf, eps)?;
    let (lower, n0) = converse_constant(params, eps)?;
    Ok(GaussianBracket {
        lower,
        upper,
        lower_valid: eps < 0.5 && nf > n0,
        upper_valid: upper_valid && eps <= 0.5,
    })
}

/// Upper bound on `R*(n, ε)` for memoryless sources, `0 < ε <= 1/2`.
///
/// Reported invalid when `Φ(Q⁻¹(ε)) + μ₃/(σ³√n) >= 1`, where the bound's
/// last term is undefined.
pub fn achievability_iid(params: &GaussianParams, n: usize, eps: f64) -> Result<BoundReport> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "eps = {eps} outside (0, 1/2]"
        )));
    }
    let nf = check_n(n)?;
    let approx = approx_rstar(params, n, eps)?;
    let (terms, valid) = achievability_terms(params, nf, eps)?;
    Ok(BoundReport {
        value: approx + terms / nf,
        kind: BoundKind::Achievability,
        valid,
        validity_condition: "Phi(Q_inv(eps)) + mu3/(sigma^3 sqrt(n)) < 1".into(),
        n0: None,
        provenance: "iid Berry-Esseen achievability",
    })
}

/// Lower bound on `R*(n, ε)` for memoryless sources, `0 < ε < 1/2`, proved
/// for `n > n0`.
pub fn converse_iid(params: &GaussianParams, n: usize, eps: f64) -> Result<BoundReport> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "eps = {eps} outside (0, 1/2)"
        )));
    }
    let nf = check_n(n)?;
    let approx = approx_rstar(params, n, eps)?;
    let (c, n0) = converse_constant(params, eps)?;
    Ok(BoundReport {
        value: approx + c / nf,
        kind: BoundKind::Converse,
        valid: nf > n0,
        validity_condition: format!("n > {n0:.6}"),
        n0: Some(n0),
        provenance: "iid Berry-Esseen converse",
    })
}

/// Second-order expansion with the `1/n` terms; a reference curve only, as
/// its derivation has not been verified.
pub fn strassen_expansion(params: &GaussianParams, n: usize, eps: f64) -> Result<f64> {
    let nf = check_n(n)?;
    check_open_unit(eps)?;
    params.require_dispersion()?;
    let qe = q_inv(eps)?;
    Ok(params.h + params.sigma() * qe / nf.sqrt()
        - (2.0 * std::f64::consts::PI * params.sigma2 * nf).log2() / (2.0 * nf)
        - qe * qe * LOG2_E / (2.0 * nf)
        + params.mu3 * (qe * qe - 1.0) / (6.0 * params.sigma2 * nf))
}

fn markov_eps(eps: f64) -> Result<f64> {
    if eps > 0.0 && eps < 0.5 {
        q_inv(eps)
    } else {
        Err(Error::InvalidArgument(format!(
            "eps = {eps} outside (0, 1/2)"
        )))
    }
}

/// Markov upper bound `nR* <= nH + σ√n Q⁻¹(ε) + C`, `C = 2Aσ/φ(Q⁻¹(ε))`,
/// proved for `n >= 8A²/(πe φ(Q⁻¹(ε))⁴)`. The value is a rate.
pub fn markov_achievability(params: &GaussianParams, n: usize, eps: f64) -> Result<BoundReport> {
    let nf = check_n(n)?;
    let qe = markov_eps(eps)?;
    let a = params.markov_constant()?;
    params.require_dispersion()?;
    let sigma = params.sigma();
    let c = 2.0 * a * sigma / phi(qe);
    let n0 = 8.0 * a * a / (std::f64::consts::PI * std::f64::consts::E * phi(qe).powi(4));
    Ok(BoundReport {
        value: params.h + sigma * qe / nf.sqrt() + c / nf,
        kind: BoundKind::Achievability,
        valid: nf >= n0,
        validity_condition: format!("n >= {n0:.6}"),
        n0: Some(n0),
        provenance: "Markov achievability with Berry-Esseen constant A",
    })
}

/// Markov lower bound `nR* >= nH + σ√n Q⁻¹(ε) - ½log2 n - C`,
/// `C = σ(A+1)/φ(Q⁻¹(ε)) + 1`, proved for `n >= ((A+1)/(Q⁻¹(ε)φ(Q⁻¹(ε))))²`.
pub fn markov_converse(params: &GaussianParams, n: usize, eps: f64) -> Result<BoundReport> {
    let nf = check_n(n)?;
    let qe = markov_eps(eps)?;
    let a = params.markov_constant()?;
    params.require_dispersion()?;
    let sigma = params.sigma();
    let c = sigma * (a + 1.0) / phi(qe) + 1.0;
    let n0 = ((a + 1.0) / (qe * phi(qe))).powi(2);
    Ok(BoundReport {
        value: params.h + sigma * qe / nf.sqrt() - 0.5 * nf.log2() / nf - c / nf,
        kind: BoundKind::Converse,
        valid: nf >= n0,
        validity_condition: format!("n >= {n0:.6}"),
        n0: Some(n0),
        provenance: "Markov converse with Berry-Esseen constant A",
    })
}

/// `sup_z |P[(ι - mean)/sd >= z] - Q(z)|` over the jumps of the spectrum,
/// checking both sides of each jump.
pub fn kolmogorov_distance_to_normal(spec: &InformationSpectrum, mean: f64, sd: f64) -> f64 {
    let masses = spec.masses();
    (0..masses.len())
        .map(|j| {
            let z = (masses[j].info - mean) / sd;
            let qz = q(z);
            let at = (spec.tail_from(j) - qz).abs();
            let past = (spec.tail_from(j + 1) - qz).abs();
            at.max(past)
        })
        .fold(0.0, f64::max)
}

/// Estimated Berry-Esseen constant of a Markov source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    /// `max_n √n · sup_z |ccdf_n(z) - Q(z)|`.
    pub a_hat: f64,
    /// Half-width of a 95% Dvoretzky-Kiefer-Wolfowitz band, scaled like `a_hat`.
    pub mc_error: f64,
    /// `(n, √n · sup distance)` for each blocklength.
    pub per_n: Vec<(usize, f64)>,
}

/// Monte-Carlo estimate of the Berry-Esseen constant of the normalized
/// information `(ι(X^n) - nH)/(σ√n)`.
pub fn markov_be_calibrate(
    src: &MarkovSource,
    n_list: &[usize],
    samples: u64,
    seed: u64,
) -> Result<Calibration> {
    let h = src.entropy_rate()?;
    let sigma2 = crate::sources::markov_varentropy_rate(src, 1e-14)?;
    if !(sigma2 > 1e-14) {
        return Err(Error::Unsupported(
            "Berry-Esseen calibration needs a strictly positive varentropy rate".into(),
        ));
    }
    if n_list.is_empty() {
        return Err(Error::InvalidArgument(
            "no blocklengths to calibrate on".into(),
        ));
    }
    let dkw = ((2.0f64 / 0.05).ln() / (2.0 * samples as f64)).sqrt();
    let mut per_n = Vec::with_capacity(n_list.len());
    for (i, &n) in n_list.iter().enumerate() {
        let spec = markov_spectrum_mc(src, n, samples, seed.wrapping_add(i as u64))?;
        let nf = n as f64;
        let d = kolmogorov_distance_to_normal(&spec, nf * h, (sigma2 * nf).sqrt());
        per_n.push((n, nf.sqrt() * d));
    }
    let a_hat = per_n.iter().map(|p| p.1).fold(0.0, f64::max);
    let max_n = n_list.iter().copied().max().unwrap_or(1) as f64;
    Ok(Calibration {
        a_hat,
        mc_error: max_n.sqrt() * dkw,
        per_n,
    })
}

/// Gaussian estimate of the blocklength needed to reach rate
/// `R = (1 + η) H` at error `ε`: `(σ²/H²) (Q⁻¹(ε)/(1 + η))²`, rounded up.
pub fn n_star(params: &GaussianParams, rate: f64, eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "eps = {eps} outside (0, 1/2]"
        )));
    }
    if !(rate > params.h) || params.h <= 0.0 {
        return Err(Error::NoSolution(format!(
            "rate {rate} does not exceed the entropy {}",
            params.h
        )));
    }
    let eta = rate / params.h - 1.0;
    let value = params.sigma2 / (params.h * params.h) * (q_inv(eps)? / (1.0 + eta)).powi(2);
    Ok((value.ceil() as usize).max(1))
}

/// Number of consecutive blocklengths that must meet the rate before the
/// exact search calls the constraint settled.
pub const N_STAR_WINDOW: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NStarExact {
    /// First `n` with `R*(n, ε) <= R`.
    pub first_hit: usize,
    /// First `n` from which the next `N_STAR_WINDOW` blocklengths all meet
    /// the rate, if seen within the search range.
    pub stable_from: Option<usize>,
}

/// Smallest blocklength with `R*(n, ε) <= R`, scanning `n = 1..=n_max`.
///
/// `R*` is not monotone in `n`, so the scan also reports where the
/// constraint starts to hold over a whole window.
pub fn n_star_exact<F>(spectrum_at: F, rate: f64, eps: f64, n_max: usize) -> Result<NStarExact>
where
    F: Fn(usize) -> Result<InformationSpectrum>,
{
    let mut first_hit = None;
    let mut run_start = None;
    for n in 1..=n_max {
        let ok = ExactLimits::new(&spectrum_at(n)?)?.r_star(eps)? <= rate;
        if ok {
            first_hit.get_or_insert(n);
            let start = *run_start.get_or_insert(n);
            if n + 1 - start >= N_STAR_WINDOW {
                return Ok(NStarExact {
                    first_hit: first_hit.unwrap_or(start),
                    stable_from: Some(start),
                });
            }
        } else {
            run_start = None;
        }
    }
    match first_hit {
        Some(first_hit) => Ok(NStarExact {
            first_hit,
            stable_from: None,
        }),
        None => Err(Error::NoSolution(format!(
            "R*(n, {eps}) > {rate} for every n <= {n_max}"
        ))),
    }
}
