use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::markov::MarkovMeasure;
use super::potential::Potential;
use crate::symbolic::Symbol;
use crate::{Error, Real, Result};

/// `h(μ) = -Σ_a π_a Σ_b P_ab log P_ab`, with `0 log 0 = 0`.
pub fn markov_entropy<T: Real>(mu: &MarkovMeasure<T>) -> T {
    let k = mu.size();
    let h: T = (0..k)
        .map(|a| {
            let row: T = (0..k).map(|b| mu.p(a, b)).filter(|&p| p > T::zero()).map(|p| -p * p.ln()).sum();
            mu.pi(a) * row
        })
        .sum();
    h.max(T::zero())
}

/// `∫φ dμ = Σ_{a,b} π_a P_ab φ(a, b)`; pairs of zero mass are skipped so
/// that `-inf` entries on forbidden transitions do not poison the sum.
pub fn markov_integral<T: Real>(mu: &MarkovMeasure<T>, phi: &Potential<T>) -> Result<T> {
    if phi.size() != mu.size() {
        return Err(Error::invalid("potential and measure sizes differ"));
    }
    let k = mu.size();
    Ok((0..k * k)
        .map(|i| (mu.pi(i / k) * mu.p(i / k, i % k), phi.get(i / k, i % k)))
        .filter(|(w, _)| *w > T::zero())
        .map(|(w, v)| w * v)
        .sum())
}

fn sample_index(rng: &mut ChaCha8Rng, probs: impl Iterator<Item = f64>) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in probs.enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// Samples a word of length `n` from `μ`.
pub(crate) fn sample_word<T: Real>(mu: &MarkovMeasure<T>, n: usize, rng: &mut ChaCha8Rng) -> Vec<Symbol> {
    let k = mu.size();
    let mut word = Vec::with_capacity(n);
    if n == 0 {
        return word;
    }
    let mut a = sample_index(rng, (0..k).map(|i| mu.pi(i).to_f64_lossy()));
    word.push(a as Symbol);
    for _ in 1..n {
        a = sample_index(rng, (0..k).map(|b| mu.p(a, b).to_f64_lossy()));
        word.push(a as Symbol);
    }
    word
}

/// Mean of `-(1/n) log μ([α₀ … α_{n-1}])` over `samples` words drawn from
/// `μ`. Sample `i` uses ChaCha stream `i` of `seed`, so the result does not
/// depend on thread scheduling.
pub fn smb_entropy_estimate<T: Real>(mu: &MarkovMeasure<T>, n: usize, samples: usize, seed: u64) -> Result<T> {
    if n < 2 {
        return Err(Error::pre("Shannon–McMillan–Breiman estimate needs n >= 2"));
    }
    if samples == 0 {
        return Err(Error::pre("need at least one sample"));
    }
    let nf = T::from_usize_lossy(n);
    let values: Vec<T> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let w = sample_word(mu, n, &mut rng);
            -mu.log_cylinder_mass(&w) / nf
        })
        .collect();
    Ok(values.into_iter().sum::<T>() / T::from_usize_lossy(samples))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RuelleReport<T> {
    /// `h(μ)`.
    pub lhs: T,
    /// `-∫ log J^u dμ`.
    pub rhs: T,
    pub satisfied: bool,
}

/// Checks `h(μ) ≤ -∫ log J^u dμ` with slack 1e-10.
pub fn ruelle_check<T: Real>(mu: &MarkovMeasure<T>, log_ju: &Potential<T>) -> Result<RuelleReport<T>> {
    if let Some(i) = log_ju.values().iter().position(|&v| v > T::zero()) {
        let k = log_ju.size();
        return Err(Error::pre(format!("log J^u[{}][{}] = {} is positive", i / k, i % k, log_ju.values()[i])));
    }
    let lhs = markov_entropy(mu);
    let rhs = -markov_integral(mu, log_ju)?;
    Ok(RuelleReport { lhs, rhs, satisfied: lhs <= rhs + T::tolerance(1e-10) })
}
