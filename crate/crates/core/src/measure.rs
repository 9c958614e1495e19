//! Shot sampling and per-qubit post-processing of measurement counts.
//!
//! Samples are drawn by inverse CDF: cumulative probabilities are built in
//! ascending basis-state order and each shot takes the first outcome whose
//! cumulative mass exceeds a uniform draw in [0, 1). The uniform source is
//! SplitMix64 seeded directly with the caller's 64-bit seed.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Bitstring (leftmost character = highest qubit) → number of shots.
pub type CountsMap = BTreeMap<String, u64>;

/// Renders `index` as `width` bits, most significant first.
pub fn bitstring(index: usize, width: usize) -> String {
    (0..width)
        .rev()
        .map(|bit| if index >> bit & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Inverse of [`bitstring`]; `None` on any character other than 0/1.
pub fn parse_bitstring(bits: &str) -> Option<usize> {
    bits.chars().try_fold(0usize, |acc, c| match c {
        '0' => Some(acc << 1),
        '1' => Some(acc << 1 | 1),
        _ => None,
    })
}

/// Draws `shots` samples of the full register.
pub fn sample_counts(state: &StateVector, shots: u64, seed: u64) -> Result<CountsMap> {
    let n = state.qubit_count();
    let outcomes = sample_outcomes(&state.probabilities(), shots, seed)?;
    Ok(outcomes
        .into_iter()
        .map(|(index, count)| (bitstring(index, n), count))
        .collect())
}

/// Draws `shots` samples of only `qubits`; `qubits[k]` becomes bit k of the
/// outcome, i.e. the k-th character from the right.
pub fn sample_counts_on(
    state: &StateVector,
    qubits: &[usize],
    shots: u64,
    seed: u64,
) -> Result<CountsMap> {
    let probs = marginal_distribution(state, qubits)?;
    let outcomes = sample_outcomes(&probs, shots, seed)?;
    Ok(outcomes
        .into_iter()
        .map(|(index, count)| (bitstring(index, qubits.len()), count))
        .collect())
}

/// Joint distribution of `qubits`, indexed the same way as [`sample_counts_on`].
pub fn marginal_distribution(state: &StateVector, qubits: &[usize]) -> Result<Vec<f64>> {
    let n = state.qubit_count();
    if let Some(&q) = qubits.iter().find(|&&q| q >= n) {
        return Err(Error::QubitOutOfRange { index: q, qubit_count: n });
    }
    let mut probs = vec![0.0; 1 << qubits.len()];
    for (i, a) in state.amplitudes().iter().enumerate() {
        let outcome = qubits
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &q)| acc | ((i >> q & 1) << k));
        probs[outcome] += a.norm_sqr();
    }
    Ok(probs)
}

fn sample_outcomes(probs: &[f64], shots: u64, seed: u64) -> Result<BTreeMap<usize, u64>> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let cdf: Vec<f64> = probs
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    // rounding can leave the final cumulative value just below a draw
    let last_nonzero = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.random();
        let index = cdf.partition_point(|&c| c <= u).min(last_nonzero);
        *counts.entry(index).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Fraction of shots in which each qubit read 1; entry j is qubit j.
pub fn analyze(counts: &CountsMap, n: usize) -> Result<Vec<f64>> {
    let mut ones = vec![0u64; n];
    let mut total = 0u64;
    for (bits, &count) in counts {
        if bits.len() != n || parse_bitstring(bits).is_none() {
            return Err(Error::BitstringLength { bitstring: bits.clone(), expected: n });
        }
        for (j, c) in bits.chars().rev().enumerate() {
            if c == '1' {
                ones[j] += count;
            }
        }
        total += count;
    }
    if total == 0 {
        return Err(Error::EmptyCounts);
    }
    Ok(ones.into_iter().map(|o| o as f64 / total as f64).collect())
}
