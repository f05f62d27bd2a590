//! One function per subcommand, each producing a [`Table`].

use finlim::binning::{binning_error_exact, binning_error_mc, BinningProblem};
use finlim::bounds::{
    achievability_iid, approx_rstar, converse_iid, markov_achievability, markov_converse,
    r_upper_quantile, GaussianParams,
};
use finlim::dispersion::dispersion_estimate;
use finlim::figures::{coin_count_cdfs, normalized_dispersion_curves, rate_curves};
use finlim::optcode::ExactLimits;
use finlim::spectrum::{
    iid_spectrum_with_budget, markov_spectrum_exact_with_budget, markov_spectrum_mc,
    InformationSpectrum,
};
use finlim::{Budgets, Error, FiniteDistribution, Source};
use serde_json::{json, Value};

use crate::output::{num, opt, Table};
use crate::{Command, Failure, RunConfig};

pub fn run(config: &RunConfig) -> Result<Table, Failure> {
    let source = config.source.as_ref().map(|s| s.build()).transpose()?;
    let budgets = config.opts.budgets();
    let src = || source.as_ref().expect("resolve() checked the source");
    match config.subcommand {
        Command::Spectrum => spectrum(config, src(), &budgets),
        Command::Limits => limits(config, src(), &budgets),
        Command::Bounds => bounds(config, src(), &budgets),
        Command::Binning => binning(config, src(), &budgets),
        Command::Dispersion => dispersion(config, src(), &budgets),
        Command::Figure1 => figure1(config),
        Command::Figure2 | Command::Figure3 => rate_figure(config, src(), &budgets),
        Command::Figure4 => figure4(config),
    }
}

fn exact_spectrum(
    source: &Source,
    n: usize,
    budgets: &Budgets,
) -> Result<InformationSpectrum, Error> {
    match source {
        Source::Memoryless(d) => iid_spectrum_with_budget(d, n, budgets),
        Source::Markov(m) => markov_spectrum_exact_with_budget(m, n, budgets),
    }
}

fn memoryless<'a>(source: &'a Source, what: &str) -> Result<&'a FiniteDistribution, Failure> {
    match source {
        Source::Memoryless(d) => Ok(d),
        Source::Markov(_) => {
            Err(Error::Unsupported(format!("{what} needs a memoryless source")).into())
        }
    }
}

fn spectrum(config: &RunConfig, source: &Source, budgets: &Budgets) -> Result<Table, Failure> {
    let [n] = config.n[..] else {
        return Err(Error::Config("spectrum takes a single blocklength".into()).into());
    };
    let spec = match (source, config.opts.samples) {
        (Source::Markov(m), Some(samples)) => markov_spectrum_mc(m, n, samples, config.opts.seed)?,
        _ => exact_spectrum(source, n, budgets)?,
    };
    let mut t = Table::new(["info_value_bits", "prob", "count"]);
    for m in spec.masses() {
        t.push(vec![
            num(m.info),
            num(m.prob),
            Value::String(m.count.to_string()),
        ]);
    }
    let meta = spec.metadata();
    t.extra.insert("n".into(), json!(meta.n));
    t.extra.insert("exact".into(), json!(meta.exact));
    t.extra
        .insert("sample_size".into(), json!(meta.sample_size));
    t.extra.insert("masses".into(), json!(meta.masses));
    t.extra.insert("mean_info_bits".into(), num(spec.mean()));
    t.extra
        .insert("var_info_bits2".into(), num(spec.variance()));
    Ok(t)
}

fn limits(config: &RunConfig, source: &Source, budgets: &Budgets) -> Result<Table, Failure> {
    let mut columns = vec![
        "n".to_string(),
        "k_bits".into(),
        "epsilon_star_prob".into(),
        "prefix_epsilon_prob".into(),
    ];
    for eps in &config.eps {
        columns.push(format!("r_star_eps_{eps}_bits_per_symbol"));
        columns.push(format!("prefix_r_eps_{eps}_bits_per_symbol"));
    }
    columns.push("rbar_bits_per_symbol".into());
    let mut t = Table::new(columns);
    for &n in &config.n {
        let limits = ExactLimits::new(&exact_spectrum(source, n, budgets)?)?;
        let mut rates = Vec::new();
        for &eps in &config.eps {
            rates.push(num(limits.r_star(eps)?));
            rates.push(num(limits.prefix_r(eps)?));
        }
        rates.push(num(limits.rbar()));
        // ε* vanishes past the longest codeword, ε_p one step later
        for k in 0..=limits.lengths().max_length() as u64 + 2 {
            let mut row = vec![
                json!(n),
                json!(k),
                num(limits.epsilon_star(k)),
                num(limits.prefix_epsilon(k)),
            ];
            row.extend(rates.iter().cloned());
            t.push(row);
        }
    }
    Ok(t)
}

fn gaussian_params(config: &RunConfig, source: &Source) -> Result<GaussianParams, Failure> {
    Ok(match source {
        Source::Memoryless(d) => d.moments().into(),
        Source::Markov(_) => {
            let p = GaussianParams::new(source.entropy_rate()?, source.varentropy_rate()?, 0.0);
            match config.opts.markov_constant {
                Some(a) => p.with_markov_constant(a),
                None => p,
            }
        }
    })
}

fn bounds(config: &RunConfig, source: &Source, budgets: &Budgets) -> Result<Table, Failure> {
    let params = gaussian_params(config, source)?;
    let mut t = Table::new([
        "n",
        "eps_prob",
        "exact_rstar_bits_per_symbol",
        "approx_bits_per_symbol",
        "achievability_bits_per_symbol",
        "converse_bits_per_symbol",
        "upper_quantile_bits_per_symbol",
        "achievability_valid",
        "converse_valid",
    ]);
    let markov = matches!(source, Source::Markov(_));
    for &n in &config.n {
        let spec = exact_spectrum(source, n, budgets)?;
        let limits = ExactLimits::new(&spec)?;
        for &eps in &config.eps {
            // out-of-range eps or a missing Markov constant leave the bound empty
            let (ach, conv) = if markov {
                (
                    markov_achievability(&params, n, eps).ok(),
                    markov_converse(&params, n, eps).ok(),
                )
            } else {
                (
                    achievability_iid(&params, n, eps).ok(),
                    converse_iid(&params, n, eps).ok(),
                )
            };
            t.push(vec![
                json!(n),
                num(eps),
                num(limits.r_star(eps)?),
                opt(approx_rstar(&params, n, eps).ok()),
                opt(ach.as_ref().map(|b| b.value)),
                opt(conv.as_ref().map(|b| b.value)),
                opt(r_upper_quantile(&spec, eps).ok().map(|b| b.value)),
                json!(ach.is_some_and(|b| b.valid)),
                json!(conv.is_some_and(|b| b.valid)),
            ]);
        }
    }
    t.extra.insert(
        "gaussian_params".into(),
        serde_json::to_value(params).expect("serializable"),
    );
    Ok(t)
}

/// All strings of length `n` as one explicit distribution.
fn product_distribution(d: &FiniteDistribution, n: usize) -> Result<FiniteDistribution, Error> {
    let mut probs = vec![1.0];
    for _ in 0..n {
        probs = probs
            .iter()
            .flat_map(|&p| d.probs().iter().map(move |&q| p * q))
            .collect();
    }
    FiniteDistribution::new(probs)
}

fn binning(config: &RunConfig, source: &Source, budgets: &Budgets) -> Result<Table, Failure> {
    let bins = config
        .opts
        .bins
        .clone()
        .ok_or_else(|| Error::Config("binning needs --bins".into()))?;
    let mut t = Table::new([
        "n",
        "bins",
        "exact_error_prob",
        "mc_estimate_prob",
        "mc_stderr_prob",
    ]);
    for &n in &config.n {
        let explicit = match source {
            Source::Memoryless(d)
                if (d.len() as f64).powi(n as i32) <= budgets.enumeration as f64 =>
            {
                Some(product_distribution(d, n)?)
            }
            _ => None,
        };
        let spec = match explicit {
            Some(_) => None,
            None => Some(exact_spectrum(source, n, budgets)?),
        };
        for &b in &bins {
            let problem = match (&explicit, &spec) {
                (Some(d), _) => BinningProblem::from_distribution(d, b)?,
                (None, Some(s)) => BinningProblem::from_spectrum(s, b)?,
                (None, None) => unreachable!("one of the two is built above"),
            };
            let exact = binning_error_exact(&problem)?;
            let mc = match explicit {
                Some(_) if config.opts.trials > 0 => Some(binning_error_mc(
                    &problem,
                    config.opts.trials,
                    config.opts.seed,
                )?),
                _ => None,
            };
            t.push(vec![
                json!(n),
                json!(b),
                num(exact),
                opt(mc.map(|m| m.estimate)),
                opt(mc.map(|m| m.stderr)),
            ]);
        }
    }
    Ok(t)
}

fn dispersion(config: &RunConfig, source: &Source, budgets: &Budgets) -> Result<Table, Failure> {
    let trace = dispersion_estimate(source, &config.n, budgets)?;
    let mut t = Table::new([
        "n",
        "var_len_over_n_bits2",
        "var_info_over_n_bits2",
        "gap2_bits2",
        "sigma2_ref_bits2",
    ]);
    for p in &trace.points {
        let n = p.n as f64;
        t.push(vec![
            json!(p.n),
            num(p.var_len / n),
            num(p.var_info / n),
            num(p.gap2),
            num(trace.sigma2_ref),
        ]);
    }
    let stopped = trace
        .stopped_at
        .as_ref()
        .map(|(n, reason)| json!({ "n": n, "reason": reason }));
    t.extra
        .insert("stopped_at".into(), stopped.unwrap_or(Value::Null));
    Ok(t)
}

fn figure1(config: &RunConfig) -> Result<Table, Failure> {
    let cdfs = coin_count_cdfs(config.opts.flips)?;
    let mut t = Table::new(["curve", "x_bits", "cdf_prob"]);
    for p in &cdfs.length_cdf {
        t.push(vec![json!("codelength"), num(p.x_bits), num(p.cdf)]);
    }
    for p in &cdfs.info_cdf {
        t.push(vec![json!("information"), num(p.x_bits), num(p.cdf)]);
    }
    t.extra.insert("flips".into(), json!(cdfs.trials));
    t.extra.insert("entropy_bits".into(), num(cdfs.entropy));
    t.extra
        .insert("mean_length_bits".into(), num(cdfs.mean_length));
    Ok(t)
}

fn rate_figure(config: &RunConfig, source: &Source, budgets: &Budgets) -> Result<Table, Failure> {
    let dist = memoryless(source, "rate figures")?;
    let mut t = Table::new([
        "n",
        "eps_prob",
        "r_star_bits_per_symbol",
        "approx_bits_per_symbol",
        "upper_quantile_bits_per_symbol",
        "achievability_bits_per_symbol",
        "converse_bits_per_symbol",
    ]);
    for &eps in &config.eps {
        for row in rate_curves(dist, eps, &config.n, budgets)? {
            t.push(vec![
                json!(row.n),
                num(eps),
                num(row.r_star),
                num(row.approx),
                num(row.upper_quantile),
                opt(row.achievability.filter(|_| row.achievability_valid)),
                opt(row.converse.filter(|_| row.converse_valid)),
            ]);
        }
    }
    Ok(t)
}

fn figure4(config: &RunConfig) -> Result<Table, Failure> {
    let mut t = Table::new(["h_bits", "d_over_h2", "family", "param"]);
    for p in normalized_dispersion_curves(config.opts.points)? {
        t.push(vec![
            num(p.h),
            num(p.d_over_h2),
            json!(p.family),
            num(p.param),
        ]);
    }
    Ok(t)
}
