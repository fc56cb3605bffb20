use rand::Rng;

use super::markov::MarkovMeasure;
use crate::symbolic::Alphabet;
use crate::{Real, Result};

/// Random Markov measure supported on the admissible transitions, with row
/// weights `u^γ` for uniform `u`. Larger `sharpness` gives more skewed rows.
pub fn random_markov_measure<T: Real, R: Rng>(alphabet: &Alphabet, sharpness: f64, rng: &mut R) -> Result<MarkovMeasure<T>> {
    let k = alphabet.size();
    let mut p = vec![T::zero(); k * k];
    for a in 0..k {
        let row: Vec<f64> = (0..k)
            .map(|b| if alphabet.allows(a as u16, b as u16) { rng.random::<f64>().max(1e-6).powf(sharpness) } else { 0.0 })
            .collect();
        let s: f64 = row.iter().sum();
        for b in 0..k {
            p[a * k + b] = T::lit(row[b] / s);
        }
    }
    normalise_rows(k, &mut p);
    MarkovMeasure::from_transition(k, p)
}

/// Multiplies each positive transition by `exp(ε ξ)` with `ξ ~ U[-1, 1]` and
/// renormalises.
pub fn perturb_measure<T: Real, R: Rng>(mu: &MarkovMeasure<T>, eps: f64, rng: &mut R) -> Result<MarkovMeasure<T>> {
    let k = mu.size();
    let mut p: Vec<T> = mu
        .transition()
        .iter()
        .map(|&x| if x > T::zero() { x * T::lit((eps * (2.0 * rng.random::<f64>() - 1.0)).exp()) } else { T::zero() })
        .collect();
    normalise_rows(k, &mut p);
    MarkovMeasure::from_transition(k, p)
}

fn normalise_rows<T: Real>(k: usize, p: &mut [T]) {
    for a in 0..k {
        let s: T = p[a * k..(a + 1) * k].iter().copied().sum();
        p[a * k..(a + 1) * k].iter_mut().for_each(|x| *x /= s);
    }
}
