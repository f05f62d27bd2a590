//! WebAssembly bindings for the browser demo in `www/`. Each export returns
//! a flat `Float64Array` of fixed-width rows.

use finlim::figures::{coin_count_cdfs, normalized_dispersion_curves, rate_curves};
use finlim::{Budgets, Error, FiniteDistribution};
use wasm_bindgen::prelude::*;

/// Largest blocklength the page may request; keeps a sweep interactive.
pub const MAX_N: usize = 3000;

fn to_js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Rows `(n, R*, approx, upper_quantile, achievability)` for a
/// Bernoulli(`p`) source; achievability is NaN where it does not apply.
pub fn rate_rows(
    p: f64,
    eps: f64,
    n_min: usize,
    n_max: usize,
    step: usize,
) -> Result<Vec<f64>, Error> {
    if n_min == 0 || n_min > n_max || n_max > MAX_N || step == 0 {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= n_min <= n_max <= {MAX_N} and step >= 1"
        )));
    }
    let dist = FiniteDistribution::bernoulli(p)?;
    let n_list: Vec<usize> = (n_min..=n_max).step_by(step).collect();
    let rows = rate_curves(&dist, eps, &n_list, &Budgets::default())?;
    Ok(rows
        .iter()
        .flat_map(|r| {
            let ach = r
                .achievability
                .filter(|_| r.achievability_valid)
                .unwrap_or(f64::NAN);
            [r.n as f64, r.r_star, r.approx, r.upper_quantile, ach]
        })
        .collect())
}

/// Rows `(curve, x_bits, cdf)` with curve 0 for the optimal codelength and
/// 1 for the information of the number of tails in `flips` fair flips.
pub fn coin_rows(flips: u64) -> Result<Vec<f64>, Error> {
    if flips == 0 || flips > 100_000 {
        return Err(Error::InvalidArgument(
            "flips must lie in 1..=100000".into(),
        ));
    }
    let c = coin_count_cdfs(flips)?;
    let lengths = c.length_cdf.iter().flat_map(|p| [0.0, p.x_bits, p.cdf]);
    let info = c.info_cdf.iter().flat_map(|p| [1.0, p.x_bits, p.cdf]);
    Ok(lengths.chain(info).collect())
}

/// Rows `(family, H, σ²/H²)` with family 0 Bernoulli, 1 geometric, 2 Poisson.
pub fn dispersion_rows(points: usize) -> Result<Vec<f64>, Error> {
    let curves = normalized_dispersion_curves(points.min(400))?;
    Ok(curves
        .iter()
        .flat_map(|c| {
            let family = match c.family {
                "bernoulli" => 0.0,
                "geometric" => 1.0,
                _ => 2.0,
            };
            [family, c.h, c.d_over_h2]
        })
        .collect())
}

#[wasm_bindgen]
pub fn rate_curve(
    p: f64,
    eps: f64,
    n_min: usize,
    n_max: usize,
    step: usize,
) -> Result<Vec<f64>, JsError> {
    rate_rows(p, eps, n_min, n_max, step).map_err(to_js)
}

#[wasm_bindgen]
pub fn coin_cdfs(flips: u32) -> Result<Vec<f64>, JsError> {
    coin_rows(flips.into()).map_err(to_js)
}

#[wasm_bindgen]
pub fn dispersion_curves(points: usize) -> Result<Vec<f64>, JsError> {
    dispersion_rows(points).map_err(to_js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_rows_have_five_columns() {
        let rows = rate_rows(0.11, 0.1, 10, 50, 10).unwrap();
        assert_eq!(rows.len(), 5 * 5);
        assert_eq!(rows[0], 10.0);
        assert!(rate_rows(0.11, 0.1, 0, 5, 1).is_err());
        assert!(rate_rows(0.11, 0.1, 5, MAX_N + 1, 1).is_err());
    }

    #[test]
    fn coin_rows_end_at_one() {
        let rows = coin_rows(100).unwrap();
        assert_eq!(rows.len() % 3, 0);
        assert!((rows[rows.len() - 1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dispersion_rows_cover_families() {
        let rows = dispersion_rows(4).unwrap();
        assert_eq!(rows.len(), 3 * 12);
    }
}
