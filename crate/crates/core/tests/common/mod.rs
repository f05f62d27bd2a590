//! Independent oracles: brute-force string enumeration, sort-and-count
//! limits, Huffman lengths and exhaustive bin assignments.
#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random probability vector with `m` entries, occasionally with ties.
pub fn random_probs(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
    if m > 1 && rng.random_bool(0.3) {
        w[1] = w[0];
    }
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

/// Probabilities of all `m^n` strings of a memoryless source, by products.
pub fn iid_string_probs(probs: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for _ in 0..n {
        out = out
            .iter()
            .flat_map(|&p| probs.iter().map(move |&q| p * q))
            .collect();
    }
    out
}

/// Probabilities of all positive-probability strings of a first-order chain.
pub fn markov_string_probs(kernel: &[Vec<f64>], initial: &[f64], n: usize) -> Vec<f64> {
    let m = initial.len();
    let mut paths: Vec<(usize, f64)> = (0..m).map(|s| (s, initial[s])).collect();
    for _ in 1..n {
        paths = paths
            .iter()
            .flat_map(|&(s, p)| (0..m).map(move |t| (t, p * kernel[s][t])))
            .collect();
    }
    paths
        .into_iter()
        .map(|(_, p)| p)
        .filter(|&p| p > 0.0)
        .collect()
}

/// Sorted-descending probabilities and the limits read off them directly.
pub struct SortedOracle {
    pub probs: Vec<f64>,
}

impl SortedOracle {
    pub fn new(mut probs: Vec<f64>) -> Self {
        probs.retain(|&p| p > 0.0);
        probs.sort_by(|a, b| b.total_cmp(a));
        Self { probs }
    }

    /// Optimal length of the string at 1-based rank `r`.
    pub fn length(r: usize) -> u64 {
        (usize::BITS - 1 - r.leading_zeros()) as u64
    }

    /// `P[ℓ >= k]`: mass of ranks `>= 2^k`.
    pub fn epsilon_star(&self, k: u64) -> f64 {
        if k >= 63 {
            return 0.0;
        }
        let start = (1usize << k) - 1;
        self.probs.iter().skip(start).sum()
    }

    pub fn r_star(&self, eps: f64, n: usize) -> f64 {
        let k = (0..).find(|&k| self.epsilon_star(k) <= eps).unwrap();
        k as f64 / n as f64
    }

    pub fn mean_length(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| p * Self::length(i + 1) as f64)
            .sum()
    }

    pub fn var_length(&self) -> f64 {
        let mean = self.mean_length();
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| p * (Self::length(i + 1) as f64 - mean).powi(2))
            .sum()
    }

    /// Best prefix code for `P[ℓ >= k]`: at most `2^(k-1) - 1` strings can
    /// take lengths below `k` while leaving Kraft room for the rest, unless
    /// everything fits.
    pub fn prefix_epsilon(&self, k: u64) -> f64 {
        if k == 0 {
            return 1.0;
        }
        let room = 1u128 << (k - 1).min(100);
        if (self.probs.len() as u128) <= room {
            return 0.0;
        }
        self.probs.iter().skip(room as usize - 1).sum()
    }
}

/// Huffman codeword lengths, in input order.
pub fn huffman_lengths(probs: &[f64]) -> Vec<u64> {
    if probs.len() == 1 {
        return vec![0];
    }
    // ordered by (probability bits, node id) so ties resolve deterministically
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = probs
        .iter()
        .enumerate()
        .map(|(i, p)| Reverse((p.to_bits(), i)))
        .collect();
    let mut parent: Vec<usize> = vec![usize::MAX; probs.len()];
    while heap.len() > 1 {
        let Reverse((a, i)) = heap.pop().unwrap();
        let Reverse((b, j)) = heap.pop().unwrap();
        let id = parent.len();
        parent.push(usize::MAX);
        parent[i] = id;
        parent[j] = id;
        heap.push(Reverse((
            (f64::from_bits(a) + f64::from_bits(b)).to_bits(),
            id,
        )));
    }
    (0..probs.len())
        .map(|mut i| {
            let mut depth = 0;
            while parent[i] != usize::MAX {
                i = parent[i];
                depth += 1;
            }
            depth
        })
        .collect()
}

/// Error probability of maximum-likelihood decoding with uniform tie
/// breaking, averaged over every assignment of outcomes to `bins` bins.
pub fn exhaustive_binning_error(probs: &[f64], bins: u64) -> f64 {
    let size = probs.len();
    let assignments = (bins as usize).pow(size as u32);
    // Neumaier summation over the many small terms
    let (mut success, mut carry) = (0.0f64, 0.0f64);
    let mut bin = vec![0usize; size];
    for a in 0..assignments {
        let mut code = a;
        for b in bin.iter_mut() {
            *b = code % bins as usize;
            code /= bins as usize;
        }
        for x in 0..size {
            let rivals: Vec<usize> = (0..size).filter(|&y| bin[y] == bin[x]).collect();
            let best = rivals.iter().map(|&y| probs[y]).fold(0.0, f64::max);
            if probs[x] == best {
                let ties = rivals.iter().filter(|&&y| probs[y] == best).count();
                let term = probs[x] / ties as f64;
                let t = success + term;
                carry += if success.abs() >= term.abs() {
                    (success - t) + term
                } else {
                    (term - t) + success
                };
                success = t;
            }
        }
    }
    1.0 - (success + carry) / assignments as f64
}
