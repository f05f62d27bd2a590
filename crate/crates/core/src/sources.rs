//! Source models and their information moments.
//!
//! All logarithms are base 2: entropies are in bits, varentropies in bits²,
//! third absolute moments in bits³.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::csum;

/// Tolerance on the total mass of a distribution and on kernel row sums.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Default truncation tail for countable distributions.
pub const DEFAULT_TAIL_BOUND: f64 = 1e-12;

fn validate_probs(probs: &[f64], tail_mass: f64, what: &str) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution(format!("{what} has no symbols")));
    }
    if let Some((i, p)) = probs
        .iter()
        .enumerate()
        .find(|(_, p)| !p.is_finite() || **p < 0.0)
    {
        return Err(Error::InvalidDistribution(format!(
            "{what}: probability {p} at index {i} is negative or not finite"
        )));
    }
    let total = csum(probs.iter().copied()) + tail_mass;
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "{what}: masses sum to {total}, not 1"
        )));
    }
    if !probs.iter().any(|&p| p > 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "{what}: no strictly positive mass"
        )));
    }
    Ok(())
}

/// A probability mass function on a finite alphabet.
///
/// Zero-mass symbols are dropped at construction, so `info` is never
/// evaluated at zero probability. `symbols` keeps the original ids of the
/// surviving symbols, in their original order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteDistribution {
    symbols: Vec<usize>,
    probs: Vec<f64>,
    /// Mass removed by truncating a countable distribution (0 otherwise).
    tail_mass: f64,
}

impl FiniteDistribution {
    /// Distribution over symbols `0..probs.len()`.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let symbols = (0..probs.len()).collect();
        Self::with_symbols(symbols, probs)
    }

    pub fn with_symbols(symbols: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        Self::build(symbols, probs, 0.0)
    }

    /// A sub-probability vector whose missing mass `tail_mass` was cut off
    /// by truncation.
    pub fn truncated(probs: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tail_mass) {
            return Err(Error::InvalidDistribution(format!(
                "tail mass {tail_mass} outside [0, 1]"
            )));
        }
        let symbols = (0..probs.len()).collect();
        Self::build(symbols, probs, tail_mass)
    }

    fn build(symbols: Vec<usize>, probs: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if symbols.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} symbols but {} probabilities",
                symbols.len(),
                probs.len()
            )));
        }
        validate_probs(&probs, tail_mass, "distribution")?;
        let (symbols, probs) = symbols
            .into_iter()
            .zip(probs)
            .filter(|&(_, p)| p > 0.0)
            .unzip();
        Ok(Self {
            symbols,
            probs,
            tail_mass,
        })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        Self::new(vec![1.0 / m as f64; m])
    }

    /// Symbol 0 with probability `1 - p`, symbol 1 with probability `p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidDistribution(format!(
                "Bernoulli parameter {p} outside [0, 1]"
            )));
        }
        Self::new(vec![1.0 - p, p])
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Number of symbols with positive probability.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `log2(1 / P(symbol at position i))`.
    pub fn info(&self, i: usize) -> f64 {
        -self.probs[i].log2()
    }

    pub fn entropy(&self) -> f64 {
        csum((0..self.len()).map(|i| self.probs[i] * self.info(i)))
    }

    pub fn varentropy(&self) -> f64 {
        if self.is_equiprobable() {
            return 0.0;
        }
        let h = self.entropy();
        csum((0..self.len()).map(|i| self.probs[i] * (self.info(i) - h).powi(2)))
    }

    pub fn third_abs_moment(&self) -> f64 {
        if self.is_equiprobable() {
            return 0.0;
        }
        let h = self.entropy();
        csum((0..self.len()).map(|i| self.probs[i] * (self.info(i) - h).abs().powi(3)))
    }

    pub fn moments(&self) -> MomentSummary {
        MomentSummary {
            h: self.entropy(),
            sigma2: self.varentropy(),
            mu3: self.third_abs_moment(),
        }
    }

    /// True when every surviving symbol has the same probability.
    pub fn is_equiprobable(&self) -> bool {
        self.probs.iter().all(|&p| p == self.probs[0])
    }
}

/// Entropy, varentropy and third centered absolute moment of the
/// information random variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    /// bits
    pub h: f64,
    /// bits²
    pub sigma2: f64,
    /// bits³
    pub mu3: f64,
}

pub fn entropy(dist: &FiniteDistribution) -> f64 {
    dist.entropy()
}

pub fn varentropy(dist: &FiniteDistribution) -> f64 {
    dist.varentropy()
}

pub fn third_abs_moment(dist: &FiniteDistribution) -> f64 {
    dist.third_abs_moment()
}

/// Binary entropy function in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Countable families used by the dispersion curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CountableFamily {
    /// `P(k) = q (1 - q)^k`, `k >= 0`.
    Geometric { q: f64 },
    /// `P(k) = e^{-λ} λ^k / k!`, `k >= 0`.
    Poisson { lambda: f64 },
}

/// A distribution on the nonnegative integers, used through its truncation
/// to the smallest prefix `0..K` whose complement has mass at most
/// `tail_bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountableDistribution {
    pub family: CountableFamily,
    pub tail_bound: f64,
}

impl CountableDistribution {
    pub fn geometric(q: f64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::InvalidDistribution(format!(
                "geometric parameter {q} outside (0, 1]"
            )));
        }
        Ok(Self {
            family: CountableFamily::Geometric { q },
            tail_bound: DEFAULT_TAIL_BOUND,
        })
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        // e^{-λ} underflows past ~745
        if !(lambda > 0.0 && lambda <= 700.0) {
            return Err(Error::InvalidDistribution(format!(
                "Poisson parameter {lambda} outside (0, 700]"
            )));
        }
        Ok(Self {
            family: CountableFamily::Poisson { lambda },
            tail_bound: DEFAULT_TAIL_BOUND,
        })
    }

    pub fn with_tail_bound(mut self, tail_bound: f64) -> Result<Self> {
        if !(tail_bound > 0.0 && tail_bound < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "tail bound {tail_bound} outside (0, 1)"
            )));
        }
        self.tail_bound = tail_bound;
        Ok(self)
    }

    pub fn pmf(&self, k: u64) -> f64 {
        match self.family {
            CountableFamily::Geometric { q } => q * (1.0 - q).powf(k as f64),
            CountableFamily::Poisson { lambda } => {
                let ln = -lambda + k as f64 * lambda.ln() - ln_factorial(k);
                ln.exp()
            }
        }
    }

    /// Truncated support `0..K` as a finite distribution carrying the
    /// removed mass (at most `tail_bound`) in its `tail_mass`.
    pub fn truncate(&self) -> Result<FiniteDistribution> {
        const MAX_SUPPORT: usize = 1 << 20;
        let mut probs = Vec::new();
        match self.family {
            CountableFamily::Geometric { q } => {
                if q == 1.0 {
                    return FiniteDistribution::truncated(vec![1.0], 0.0);
                }
                // tail after keeping 0..K is (1-q)^K exactly
                let mut tail = 1.0;
                while tail > self.tail_bound {
                    probs.push(q * tail);
                    tail *= 1.0 - q;
                    if probs.len() > MAX_SUPPORT {
                        return Err(Error::BudgetExceeded {
                            what: "geometric truncation",
                            required: "more symbols".into(),
                            budget: MAX_SUPPORT as u64,
                            hint: Some("raise the tail bound"),
                        });
                    }
                }
                FiniteDistribution::truncated(probs, tail)
            }
            CountableFamily::Poisson { lambda } => {
                let mut p = (-lambda).exp();
                let mut k = 0u64;
                loop {
                    probs.push(p);
                    let next = p * lambda / (k + 1) as f64;
                    // past the mode the tail is dominated by a geometric series
                    let ratio = lambda / (k + 2) as f64;
                    if (k + 1) as f64 > lambda && ratio < 1.0 {
                        let tail_bound = next / (1.0 - ratio);
                        if tail_bound <= self.tail_bound {
                            let tail = (1.0 - csum(probs.iter().copied())).max(0.0);
                            return FiniteDistribution::truncated(probs, tail.min(tail_bound));
                        }
                    }
                    p = next;
                    k += 1;
                    if probs.len() > MAX_SUPPORT {
                        return Err(Error::BudgetExceeded {
                            what: "Poisson truncation",
                            required: "more symbols".into(),
                            budget: MAX_SUPPORT as u64,
                            hint: Some("raise the tail bound"),
                        });
                    }
                }
            }
        }
    }
}

fn ln_factorial(k: u64) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// A `k`th-order Markov chain on `{0, .., m-1}`, stored as a first-order
/// chain on the `m^k` contexts.
///
/// Context `(x_1, .., x_k)` has index `Σ x_i m^(k-i)`; emitting `y` from
/// context `s` moves to `(s * m + y) mod m^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovSource {
    order: usize,
    alphabet: usize,
    /// `m^k` rows of `m` conditional probabilities.
    conditional: Vec<Vec<f64>>,
    /// Law of the first `k` symbols, indexed by context.
    initial: Vec<f64>,
}

/// Varentropy rate with the truncation diagnostics of its covariance series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarentropyRate {
    pub value: f64,
    /// Estimated magnitude of the truncated tail of the series.
    pub error_bar: f64,
    pub lags: usize,
}

impl MarkovSource {
    /// `conditional[s][y] = P(next = y | context s)`; `initial[s]` is the
    /// probability that the first `order` symbols form context `s`.
    pub fn new(order: usize, conditional: Vec<Vec<f64>>, initial: Vec<f64>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidDistribution(
                "Markov order must be >= 1".into(),
            ));
        }
        let alphabet = conditional.first().map_or(0, Vec::len);
        if alphabet == 0 {
            return Err(Error::InvalidDistribution("empty kernel".into()));
        }
        let states = alphabet
            .checked_pow(order as u32)
            .filter(|&s| s <= 1 << 16)
            .ok_or_else(|| Error::InvalidDistribution("context space too large".into()))?;
        if conditional.len() != states {
            return Err(Error::InvalidDistribution(format!(
                "order-{order} kernel on {alphabet} symbols needs {states} rows, got {}",
                conditional.len()
            )));
        }
        for (s, row) in conditional.iter().enumerate() {
            if row.len() != alphabet {
                return Err(Error::InvalidDistribution(format!(
                    "kernel row {s} has {} entries, expected {alphabet}",
                    row.len()
                )));
            }
            validate_probs(row, 0.0, &format!("kernel row {s}"))?;
        }
        if initial.len() != states {
            return Err(Error::InvalidDistribution(format!(
                "initial law has {} entries, expected {states}",
                initial.len()
            )));
        }
        validate_probs(&initial, 0.0, "initial law")?;
        Ok(Self {
            order,
            alphabet,
            conditional,
            initial,
        })
    }

    /// First-order chain from a square kernel.
    pub fn first_order(kernel: Vec<Vec<f64>>, initial: Vec<f64>) -> Result<Self> {
        Self::new(1, kernel, initial)
    }

    /// First-order chain started from its stationary law.
    pub fn stationary(order: usize, conditional: Vec<Vec<f64>>) -> Result<Self> {
        let states = conditional.len();
        let provisional = Self::new(order, conditional, vec![1.0 / states as f64; states])?;
        let pi = provisional.stationary_distribution()?;
        let mut initial = vec![0.0; states];
        for (&s, &p) in pi.symbols().iter().zip(pi.probs()) {
            initial[s] = p;
        }
        Ok(Self {
            initial,
            ..provisional
        })
    }

    /// Memoryless source seen as a first-order chain whose rows all equal `q`.
    pub fn iid(q: &[f64]) -> Result<Self> {
        Self::first_order(vec![q.to_vec(); q.len()], q.to_vec())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.conditional.len()
    }

    pub fn conditional(&self) -> &[Vec<f64>] {
        &self.conditional
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn next_state(&self, state: usize, symbol: usize) -> usize {
        (state * self.alphabet + symbol) % self.num_states()
    }

    /// Transition matrix of the context chain.
    pub fn expanded_kernel(&self) -> DMatrix<f64> {
        let s = self.num_states();
        let mut k = DMatrix::zeros(s, s);
        for (from, row) in self.conditional.iter().enumerate() {
            for (y, &p) in row.iter().enumerate() {
                k[(from, self.next_state(from, y))] += p;
            }
        }
        k
    }

    fn successors(&self) -> Vec<Vec<usize>> {
        (0..self.num_states())
            .map(|s| {
                let mut next: Vec<usize> = self.conditional[s]
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0.0)
                    .map(|(y, _)| self.next_state(s, y))
                    .collect();
                next.sort_unstable();
                next.dedup();
                next
            })
            .collect()
    }

    fn reachable(adj: &[Vec<usize>], start: usize) -> Vec<Option<usize>> {
        let mut level = vec![None; adj.len()];
        let mut queue = std::collections::VecDeque::from([start]);
        level[start] = Some(0);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if level[v].is_none() {
                    level[v] = Some(level[u].unwrap() + 1);
                    queue.push_back(v);
                }
            }
        }
        level
    }

    pub fn is_irreducible(&self) -> bool {
        let adj = self.successors();
        let mut rev = vec![Vec::new(); adj.len()];
        for (u, next) in adj.iter().enumerate() {
            for &v in next {
                rev[v].push(u);
            }
        }
        Self::reachable(&adj, 0).iter().all(Option::is_some)
            && Self::reachable(&rev, 0).iter().all(Option::is_some)
    }

    /// Period of an irreducible chain: gcd of all cycle lengths.
    pub fn period(&self) -> usize {
        let adj = self.successors();
        let level = Self::reachable(&adj, 0);
        let mut g = 0usize;
        for (u, next) in adj.iter().enumerate() {
            let Some(lu) = level[u] else { continue };
            for &v in next {
                if let Some(lv) = level[v] {
                    g = gcd(g, (lu + 1).abs_diff(lv));
                }
            }
        }
        g
    }

    fn require_irreducible(&self) -> Result<()> {
        if self.is_irreducible() {
            Ok(())
        } else {
            Err(Error::Structural("chain is reducible".into()))
        }
    }

    /// Irreducible and aperiodic, as needed by the CLT-type results.
    pub fn require_ergodic(&self) -> Result<()> {
        self.require_irreducible()?;
        match self.period() {
            1 => Ok(()),
            d => Err(Error::Structural(format!(
                "chain is periodic with period {d}"
            ))),
        }
    }

    /// Unique invariant law of the context chain (symbols are context ids).
    ///
    /// Requires irreducibility only; periodic chains still have a unique
    /// invariant law.
    pub fn stationary_distribution(&self) -> Result<FiniteDistribution> {
        self.require_irreducible()?;
        let s = self.num_states();
        let k = self.expanded_kernel();
        // (K^T - I) π = 0 with the last equation replaced by Σ π = 1
        let mut a = k.transpose() - DMatrix::identity(s, s);
        for j in 0..s {
            a[(s - 1, j)] = 1.0;
        }
        let mut b = DVector::zeros(s);
        b[s - 1] = 1.0;
        let lu = a.lu();
        let mut pi = lu
            .solve(&b)
            .ok_or_else(|| Error::Structural("singular balance equations".into()))?;
        // one step of iterative refinement
        let mut a2 = k.transpose() - DMatrix::identity(s, s);
        for j in 0..s {
            a2[(s - 1, j)] = 1.0;
        }
        let residual = &b - &a2 * &pi;
        if let Some(delta) = lu.solve(&residual) {
            pi += delta;
        }
        let mut probs: Vec<f64> = pi.iter().map(|&p| p.max(0.0)).collect();
        let total = csum(probs.iter().copied());
        probs.iter_mut().for_each(|p| *p /= total);
        let pi_vec = DVector::from_vec(probs.clone());
        let drift = (k.transpose() * &pi_vec - &pi_vec).abs().sum();
        if drift > MASS_TOLERANCE {
            return Err(Error::Structural(format!(
                "stationary law not found to tolerance (L1 drift {drift})"
            )));
        }
        FiniteDistribution::with_symbols((0..s).collect(), probs)
    }

    fn stationary_vec(&self) -> Result<Vec<f64>> {
        let pi = self.stationary_distribution()?;
        let mut v = vec![0.0; self.num_states()];
        for (&s, &p) in pi.symbols().iter().zip(pi.probs()) {
            v[s] = p;
        }
        Ok(v)
    }

    pub fn entropy_rate(&self) -> Result<f64> {
        let pi = self.stationary_vec()?;
        Ok(csum(self.conditional.iter().zip(&pi).map(|(row, &w)| {
            w * csum(row.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()))
        })))
    }

    /// Varentropy rate by the autocovariance series of the per-step
    /// information along the stationary chain.
    ///
    /// Stops once five consecutive covariance terms are below `tol` in
    /// magnitude and adds a geometric tail estimate to the error bar.
    pub fn varentropy_rate(&self, tol: f64, max_lags: usize) -> Result<VarentropyRate> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance {tol} must be > 0"
            )));
        }
        self.require_ergodic()?;
        let pi = self.stationary_vec()?;
        let h = self.entropy_rate()?;
        let s = self.num_states();

        // centred information of each transition
        let centred = |row: &[f64], y: usize| -row[y].log2() - h;
        let mut var0 = Vec::new();
        let mut a = vec![0.0; s];
        let mut v = vec![0.0; s];
        for (from, row) in self.conditional.iter().enumerate() {
            let mut hv = Vec::new();
            for (y, &p) in row.iter().enumerate().filter(|(_, &p)| p > 0.0) {
                let g = centred(row, y);
                var0.push(pi[from] * p * g * g);
                a[self.next_state(from, y)] += pi[from] * p * g;
                hv.push(p * g);
            }
            v[from] = csum(hv);
        }
        let mut total = crate::numeric::CompensatedSum::new();
        total.add(csum(var0));

        let mut quiet = 0;
        let mut prev = f64::NAN;
        let mut last = 0.0;
        for lag in 1..=max_lags {
            let cov = csum(a.iter().zip(&v).map(|(x, y)| x * y));
            total.add(2.0 * cov);
            if cov.abs() < tol {
                quiet += 1;
            } else {
                quiet = 0;
            }
            if quiet >= 5 {
                let ratio = if prev.is_finite() && prev != 0.0 {
                    (cov / prev).abs()
                } else {
                    0.0
                };
                let tail = if ratio < 1.0 {
                    2.0 * cov.abs() * ratio / (1.0 - ratio)
                } else {
                    2.0 * tol
                };
                return Ok(VarentropyRate {
                    value: total.value().max(0.0),
                    error_bar: tail,
                    lags: lag,
                });
            }
            prev = cov;
            last = cov;
            // v <- K v, one more step of the chain between the two transitions
            let next: Vec<f64> = (0..s)
                .map(|from| {
                    csum(
                        self.conditional[from]
                            .iter()
                            .enumerate()
                            .map(|(y, &p)| p * v[self.next_state(from, y)]),
                    )
                })
                .collect();
            v = next;
        }
        let _ = last;
        Err(Error::NoConvergence {
            partial: total.value(),
            lags: max_lags,
        })
    }

    /// `log2(1 / P(x^n))`, or `None` for a zero-probability string.
    pub fn string_info(&self, x: &[usize]) -> Result<Option<f64>> {
        if x.len() < self.order {
            return Err(Error::InvalidArgument(format!(
                "string of length {} shorter than the order {}",
                x.len(),
                self.order
            )));
        }
        let mut state = 0;
        for &sym in &x[..self.order] {
            if sym >= self.alphabet {
                return Err(Error::InvalidArgument(format!("symbol {sym} out of range")));
            }
            state = state * self.alphabet + sym;
        }
        let p0 = self.initial[state];
        if p0 == 0.0 {
            return Ok(None);
        }
        let mut terms = vec![-p0.log2()];
        for &sym in &x[self.order..] {
            if sym >= self.alphabet {
                return Err(Error::InvalidArgument(format!("symbol {sym} out of range")));
            }
            let p = self.conditional[state][sym];
            if p == 0.0 {
                return Ok(None);
            }
            terms.push(-p.log2());
            state = self.next_state(state, sym);
        }
        Ok(Some(csum(terms)))
    }

    /// Draws one path of length `n` and returns its information in bits.
    pub(crate) fn sample_info<R: Rng + ?Sized>(
        &self,
        sampler: &PathSampler,
        rng: &mut R,
        n: usize,
    ) -> f64 {
        let mut state = sampler.initial.draw(rng);
        let mut info = sampler.initial_info[state];
        for _ in self.order..n {
            let row = &sampler.rows[state];
            let y = row.draw(rng);
            info += sampler.row_info[state][y];
            state = self.next_state(state, y);
        }
        info
    }
}

/// Inverse-CDF tables for fast path sampling.
pub(crate) struct PathSampler {
    initial: CdfTable,
    initial_info: Vec<f64>,
    rows: Vec<CdfTable>,
    row_info: Vec<Vec<f64>>,
}

impl PathSampler {
    pub(crate) fn new(src: &MarkovSource) -> Self {
        let info = |p: f64| if p > 0.0 { -p.log2() } else { f64::INFINITY };
        Self {
            initial: CdfTable::new(&src.initial),
            initial_info: src.initial.iter().map(|&p| info(p)).collect(),
            rows: src.conditional.iter().map(|r| CdfTable::new(r)).collect(),
            row_info: src
                .conditional
                .iter()
                .map(|r| r.iter().map(|&p| info(p)).collect())
                .collect(),
        }
    }
}

struct CdfTable {
    cdf: Vec<f64>,
}

impl CdfTable {
    fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = probs
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect();
        // never select a trailing zero-mass symbol through round-off
        let last_positive = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        for c in &mut cdf[last_positive..] {
            *c = f64::INFINITY;
        }
        Self { cdf }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.cdf.len() - 1)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Markov entropy rate in bits.
pub fn markov_entropy_rate(src: &MarkovSource) -> Result<f64> {
    src.entropy_rate()
}

/// Default lag budget for the varentropy-rate series.
pub const DEFAULT_MAX_LAGS: usize = 1_000_000;

/// Markov varentropy rate in bits².
pub fn markov_varentropy_rate(src: &MarkovSource, tol: f64) -> Result<f64> {
    Ok(src.varentropy_rate(tol, DEFAULT_MAX_LAGS)?.value)
}

pub fn stationary_distribution(src: &MarkovSource) -> Result<FiniteDistribution> {
    src.stationary_distribution()
}

/// A fully specified source as read from JSON, e.g.
/// `{"type": "markov", "kernel": [[0.9, 0.1], [0.2, 0.8]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SourceSpec {
    Memoryless {
        probs: Vec<f64>,
    },
    Markov {
        /// `m^order` rows of `m` conditional probabilities.
        kernel: Vec<Vec<f64>>,
        /// Law of the first `order` symbols; stationary when omitted.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial: Option<Vec<f64>>,
        #[serde(default = "default_order")]
        order: usize,
    },
    Geometric {
        param: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_bound: Option<f64>,
    },
    Poisson {
        param: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_bound: Option<f64>,
    },
}

fn default_order() -> usize {
    1
}

/// A source ready for computation.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Memoryless(FiniteDistribution),
    Markov(MarkovSource),
}

impl SourceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed source spec: {e}")))
    }

    pub fn build(&self) -> Result<Source> {
        match self {
            SourceSpec::Memoryless { probs } => {
                Ok(Source::Memoryless(FiniteDistribution::new(probs.clone())?))
            }
            SourceSpec::Markov {
                kernel,
                initial,
                order,
            } => {
                let src = match initial {
                    Some(init) => MarkovSource::new(*order, kernel.clone(), init.clone())?,
                    None => MarkovSource::stationary(*order, kernel.clone())?,
                };
                Ok(Source::Markov(src))
            }
            SourceSpec::Geometric { param, tail_bound } => {
                let mut d = CountableDistribution::geometric(*param)?;
                if let Some(t) = tail_bound {
                    d = d.with_tail_bound(*t)?;
                }
                Ok(Source::Memoryless(d.truncate()?))
            }
            SourceSpec::Poisson { param, tail_bound } => {
                let mut d = CountableDistribution::poisson(*param)?;
                if let Some(t) = tail_bound {
                    d = d.with_tail_bound(*t)?;
                }
                Ok(Source::Memoryless(d.truncate()?))
            }
        }
    }
}

impl Source {
    /// Entropy (rate) in bits per symbol.
    pub fn entropy_rate(&self) -> Result<f64> {
        match self {
            Source::Memoryless(d) => Ok(d.entropy()),
            Source::Markov(m) => m.entropy_rate(),
        }
    }

    /// Varentropy (rate) in bits² per symbol.
    pub fn varentropy_rate(&self) -> Result<f64> {
        match self {
            Source::Memoryless(d) => Ok(d.varentropy()),
            Source::Markov(m) => markov_varentropy_rate(m, 1e-14),
        }
    }
}
