mod common;

use common::{
    huffman_lengths, iid_string_probs, markov_string_probs, random_probs, rng, SortedOracle,
};
use finlim::dispersion::var_codelength;
use finlim::optcode::ExactLimits;
use finlim::spectrum::{iid_spectrum, markov_spectrum_exact, InformationSpectrum};
use finlim::{CountableDistribution, FiniteDistribution, MarkovSource};
use num_bigint::BigUint;

const EPS_GRID: [f64; 9] = [0.0, 0.001, 0.01, 0.05, 0.1, 0.2, 0.35, 0.5, 0.9];

fn assert_matches_oracle(spec: &InformationSpectrum, oracle: &SortedOracle, label: &str) {
    let n = spec.n();
    let limits = ExactLimits::new(spec).unwrap();
    assert_eq!(
        spec.total_count(),
        BigUint::from(oracle.probs.len()),
        "{label}: string count"
    );
    for k in 0..=64 {
        let (a, b) = (limits.epsilon_star(k), oracle.epsilon_star(k));
        assert!((a - b).abs() <= 1e-12, "{label}: eps*({k}) {a} vs {b}");
    }
    for eps in EPS_GRID {
        // an eps sitting on a jump of the staircase is decided by rounding
        if (0..=64).any(|k| (oracle.epsilon_star(k) - eps).abs() < 1e-9) {
            continue;
        }
        assert_eq!(
            limits.r_star(eps).unwrap(),
            oracle.r_star(eps, n),
            "{label}: R*({eps})"
        );
    }
    let mean = oracle.mean_length();
    let diff = (limits.rbar() * n as f64 - mean).abs();
    assert!(diff <= 1e-12 * mean.max(1.0), "{label}: Rbar off by {diff}");
    let var = var_codelength(spec).unwrap();
    assert!(
        (var - oracle.var_length()).abs() <= 1e-11 * var.max(1.0),
        "{label}: var {var} vs {}",
        oracle.var_length()
    );
}

fn memoryless_grid() -> Vec<Vec<f64>> {
    let mut sources = vec![
        vec![1.0],
        vec![0.5, 0.5],
        vec![0.89, 0.11],
        vec![0.5, 0.25, 0.25],
        vec![1.0 / 3.0; 3],
        vec![0.6, 0.3, 0.1],
    ];
    let mut r = rng(11);
    for m in [2, 3, 2, 3] {
        sources.push(random_probs(&mut r, m));
    }
    sources
}

#[test]
fn memoryless_limits_match_enumeration() {
    for probs in memoryless_grid() {
        let dist = FiniteDistribution::new(probs.clone()).unwrap();
        for n in 1..=8 {
            let spec = iid_spectrum(&dist, n).unwrap();
            let oracle = SortedOracle::new(iid_string_probs(&probs, n));
            assert_matches_oracle(&spec, &oracle, &format!("{probs:?} n={n}"));
        }
    }
}

#[test]
fn markov_limits_match_enumeration() {
    let chains: Vec<(Vec<Vec<f64>>, Vec<f64>)> = vec![
        (
            vec![vec![0.9, 0.1], vec![0.2, 0.8]],
            vec![2.0 / 3.0, 1.0 / 3.0],
        ),
        (vec![vec![0.5, 0.5], vec![0.5, 0.5]], vec![0.5, 0.5]),
        (vec![vec![0.7, 0.3], vec![1.0, 0.0]], vec![1.0, 0.0]),
        (vec![vec![0.3, 0.7], vec![0.6, 0.4]], vec![0.25, 0.75]),
    ];
    for (kernel, initial) in chains {
        let src = MarkovSource::first_order(kernel.clone(), initial.clone()).unwrap();
        for n in 1..=12 {
            let spec = markov_spectrum_exact(&src, n).unwrap();
            let oracle = SortedOracle::new(markov_string_probs(&kernel, &initial, n));
            assert_matches_oracle(&spec, &oracle, &format!("{kernel:?} n={n}"));
        }
    }
}

#[test]
fn prefix_limits_couple_to_unconstrained_ones() {
    for probs in memoryless_grid() {
        let m = probs.len();
        let dist = FiniteDistribution::new(probs.clone()).unwrap();
        for n in 1..=8 {
            let spec = iid_spectrum(&dist, n).unwrap();
            let limits = ExactLimits::new(&spec).unwrap();
            let oracle = SortedOracle::new(iid_string_probs(&probs, n));
            let full = n as f64 * (m as f64).log2();
            for k in 0..=30u64 {
                let p = limits.prefix_epsilon(k + 1);
                assert!((p - oracle.prefix_epsilon(k + 1)).abs() <= 1e-12);
                if (k as f64) < full {
                    assert_eq!(p, limits.epsilon_star(k));
                } else {
                    assert_eq!(p, 0.0);
                }
            }
            let min_prob = oracle.probs.last().copied().unwrap();
            for eps in EPS_GRID {
                let rp = limits.prefix_r(eps).unwrap();
                let r = limits.r_star(eps).unwrap();
                if m.is_power_of_two() && eps < min_prob {
                    let expected = (m as f64).log2() + 1.0 / n as f64;
                    assert!((rp - expected).abs() < 1e-12 && (r - expected).abs() < 1e-12);
                } else if m > 1 {
                    assert!(
                        (rp - r - 1.0 / n as f64).abs() < 1e-12,
                        "{probs:?} n={n} eps={eps}"
                    );
                }
            }
        }
    }
}

#[test]
fn geometric_average_lengths() {
    let dist = CountableDistribution::geometric(0.5)
        .unwrap()
        .truncate()
        .unwrap();
    let spec = iid_spectrum(&dist, 1).unwrap();
    let rbar = ExactLimits::new(&spec).unwrap().rbar();
    // Σ_j floor(log2 j) 2^-j, with the tail beyond j = 60 below 1e-16
    let direct: f64 = (1..=60u32)
        .map(|j| (31 - j.leading_zeros()) as f64 * 0.5f64.powi(j as i32))
        .sum();
    assert!((rbar - direct).abs() < 1e-10);
    assert!((rbar - 0.632843).abs() < 1e-6);

    let mut probs = dist.probs().to_vec();
    probs.push(dist.tail_mass());
    let lengths = huffman_lengths(&probs);
    // the unary code 1, 01, 001, ... with the tail symbol sharing the last length
    let k = probs.len();
    for (j, l) in lengths.iter().enumerate().take(k - 1) {
        assert_eq!(*l, j as u64 + 1);
    }
    assert_eq!(lengths[k - 1], (k - 1) as u64);
}
