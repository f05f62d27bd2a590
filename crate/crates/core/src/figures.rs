//! Data behind the standard plots: codelength and information CDFs, rate
//! curves against blocklength, and normalized dispersion against entropy.

use serde::Serialize;

use crate::bounds::{
    achievability_iid, approx_rstar, converse_iid, r_upper_quantile, GaussianParams,
};
use crate::dispersion::normalized_dispersion;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::optcode::{CodelengthDistribution, ExactLimits};
use crate::sources::{CountableDistribution, FiniteDistribution};
use crate::spectrum::{binomial_count_spectrum, iid_spectrum_with_budget};
use crate::Budgets;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CdfPoint {
    pub x_bits: f64,
    pub cdf: f64,
}

/// CDFs of the optimal codelength and of the information for the number
/// of tails in a run of fair coin flips.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoinCountCdfs {
    pub trials: u64,
    /// `H(X)` in bits.
    pub entropy: f64,
    /// `E[ℓ(f*(X))]` in bits.
    pub mean_length: f64,
    pub length_cdf: Vec<CdfPoint>,
    pub info_cdf: Vec<CdfPoint>,
}

pub fn coin_count_cdfs(trials: u64) -> Result<CoinCountCdfs> {
    let spec = binomial_count_spectrum(trials)?;
    let lengths = CodelengthDistribution::from_spectrum(&spec)?;
    let mut acc = CompensatedSum::new();
    let length_cdf = lengths
        .probs_by_length
        .iter()
        .enumerate()
        .map(|(j, p)| {
            acc.add(*p);
            CdfPoint {
                x_bits: j as f64,
                cdf: acc.value(),
            }
        })
        .collect();
    let mut acc = CompensatedSum::new();
    let info_cdf = spec
        .masses()
        .iter()
        .map(|m| {
            acc.add(m.prob);
            CdfPoint {
                x_bits: m.info,
                cdf: acc.value(),
            }
        })
        .collect();
    Ok(CoinCountCdfs {
        trials,
        entropy: spec.mean(),
        mean_length: lengths.mean(),
        length_cdf,
        info_cdf,
    })
}

/// Exact limit and Gaussian bounds at one blocklength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRow {
    pub n: usize,
    pub r_star: f64,
    pub prefix_r: f64,
    pub rbar: f64,
    pub approx: f64,
    pub upper_quantile: f64,
    /// `None` when `ε` is outside the bound's range.
    pub achievability: Option<f64>,
    pub achievability_valid: bool,
    pub converse: Option<f64>,
    pub converse_valid: bool,
}

fn rate_row(
    dist: &FiniteDistribution,
    params: &GaussianParams,
    eps: f64,
    n: usize,
    budgets: &Budgets,
) -> Result<RateRow> {
    let spec = iid_spectrum_with_budget(dist, n, budgets)?;
    let limits = ExactLimits::new(&spec)?;
    let ach = achievability_iid(params, n, eps).ok();
    let conv = converse_iid(params, n, eps).ok();
    Ok(RateRow {
        n,
        r_star: limits.r_star(eps)?,
        prefix_r: limits.prefix_r(eps)?,
        rbar: limits.rbar(),
        approx: approx_rstar(params, n, eps)?,
        upper_quantile: r_upper_quantile(&spec, eps)?.value,
        achievability: ach.as_ref().map(|b| b.value),
        achievability_valid: ach.is_some_and(|b| b.valid),
        converse: conv.as_ref().map(|b| b.value),
        converse_valid: conv.is_some_and(|b| b.valid),
    })
}

/// Exact `R*(n, ε)` with the Gaussian approximation and bounds over
/// `n_list`, in the order given.
pub fn rate_curves(
    dist: &FiniteDistribution,
    eps: f64,
    n_list: &[usize],
    budgets: &Budgets,
) -> Result<Vec<RateRow>> {
    let params: GaussianParams = dist.moments().into();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        n_list
            .par_iter()
            .map(|&n| rate_row(dist, &params, eps, n, budgets))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    n_list
        .iter()
        .map(|&n| rate_row(dist, &params, eps, n, budgets))
        .collect()
}

/// One point of a normalized-dispersion curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionCurvePoint {
    pub family: &'static str,
    pub param: f64,
    /// Entropy in bits.
    pub h: f64,
    /// `σ²/H²`.
    pub d_over_h2: f64,
}

fn curve_point(
    family: &'static str,
    param: f64,
    dist: &FiniteDistribution,
) -> Result<DispersionCurvePoint> {
    Ok(DispersionCurvePoint {
        family,
        param,
        h: dist.entropy(),
        d_over_h2: normalized_dispersion(dist)?,
    })
}

/// `σ²/H²` against `H` for Bernoulli, geometric and Poisson sources,
/// `points` parameter values per family.
pub fn normalized_dispersion_curves(points: usize) -> Result<Vec<DispersionCurvePoint>> {
    if points < 2 {
        return Err(Error::InvalidArgument(
            "need at least two points per curve".into(),
        ));
    }
    let grid = |lo: f64, hi: f64| {
        (0..points).map(move |i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
    };
    let mut out = Vec::with_capacity(3 * points);
    // p = 1/2 has zero varentropy; stay just below it
    for p in grid(0.005, 0.495) {
        out.push(curve_point(
            "bernoulli",
            p,
            &FiniteDistribution::bernoulli(p)?,
        )?);
    }
    for q in grid(0.05, 0.95) {
        out.push(curve_point(
            "geometric",
            q,
            &CountableDistribution::geometric(q)?.truncate()?,
        )?);
    }
    for lambda in grid(0.05, 10.0) {
        out.push(curve_point(
            "poisson",
            lambda,
            &CountableDistribution::poisson(lambda)?.truncate()?,
        )?);
    }
    Ok(out)
}
