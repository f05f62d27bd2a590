//! Exact and approximate finite-blocklength limits of variable-length
//! lossless compression.
//!
//! The central object is the [`InformationSpectrum`]: the distribution of
//! `log2(1 / P(X^n))` stored as masses with exact big-integer string counts.
//! Ranking those masses gives the codelength distribution of the optimal
//! one-to-one code, from which every exact limit follows: the excess-length
//! probability `ε*(n, k)`, the minimal rate `R*(n, ε)`, the minimal average
//! rate, their prefix-free counterparts and the codelength variance.
//!
//! ```
//! use finlim::{iid_spectrum, optcode, FiniteDistribution};
//!
//! let coin = FiniteDistribution::bernoulli(0.11).unwrap();
//! let spec = iid_spectrum(&coin, 2).unwrap();
//! assert_eq!(optcode::r_star(&spec, 0.1).unwrap(), 1.0);
//! ```

pub mod binning;
pub mod bounds;
pub mod dispersion;
pub mod error;
pub mod figures;
pub mod numeric;
pub mod optcode;
pub mod sources;
pub mod spectrum;

pub use error::{Error, Result};
pub use optcode::{CodelengthDistribution, OptimalCode, RankCut};
pub use sources::{
    CountableDistribution, CountableFamily, FiniteDistribution, MarkovSource, MomentSummary,
    Source, SourceSpec,
};
pub use spectrum::{iid_spectrum, markov_spectrum_exact, markov_spectrum_mc, InformationSpectrum};

/// Relative tolerance (in bits, scaled by the magnitude of the value) under
/// which two information values are treated as equal.
pub const MERGE_TOLERANCE_BITS: f64 = 1e-12;

/// Work limits for the exact and Monte-Carlo computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Budgets {
    /// Maximum number of type classes in a memoryless spectrum.
    pub type_classes: u64,
    /// Maximum number of strings enumerated explicitly.
    pub enumeration: u64,
    /// Maximum number of lags in the varentropy-rate series.
    pub max_lags: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            type_classes: 2_000_000,
            enumeration: 20_000,
            max_lags: sources::DEFAULT_MAX_LAGS,
        }
    }
}
