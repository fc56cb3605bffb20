use serde::{Deserialize, Serialize};

use crate::symbolic::{Symbol, WeightTable};
use crate::{Error, Real, Result};

/// Pair potential `φ(a, b)` on a `K`-symbol alphabet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPotential<T>", into = "RawPotential<T>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Potential<T> {
    size: usize,
    values: Vec<T>,
}

#[derive(Serialize, Deserialize)]
struct RawPotential<T> {
    #[serde(rename = "K")]
    k: usize,
    values: Vec<T>,
}

impl<T: Real> TryFrom<RawPotential<T>> for Potential<T> {
    type Error = Error;
    fn try_from(raw: RawPotential<T>) -> Result<Self> {
        Self::new(raw.k, raw.values)
    }
}

impl<T: Real> From<Potential<T>> for RawPotential<T> {
    fn from(p: Potential<T>) -> Self {
        Self { k: p.size, values: p.values }
    }
}

impl<T: Real> Potential<T> {
    /// Row-major `k × k` values; `-inf` is allowed and marks a pair that only
    /// inadmissible transitions may carry.
    pub fn new(k: usize, values: Vec<T>) -> Result<Self> {
        if k == 0 || values.len() != k * k {
            return Err(Error::invalid(format!("potential needs {} values", k * k)));
        }
        if values.iter().any(|v| v.is_nan() || *v == T::infinity()) {
            return Err(Error::invalid("potential values must be finite or -inf"));
        }
        Ok(Self { size: k, values })
    }

    pub fn constant(k: usize, c: T) -> Self {
        Self { size: k, values: vec![c; k * k] }
    }

    pub fn zero(k: usize) -> Self {
        Self::constant(k, T::zero())
    }

    pub fn from_fn(k: usize, f: impl Fn(usize, usize) -> T) -> Result<Self> {
        Self::new(k, (0..k * k).map(|i| f(i / k, i % k)).collect())
    }

    /// `s · log J^u` from a weight table (typically `s = 1/2`).
    pub fn from_weights(weights: &WeightTable<T>, s: T) -> Self {
        Self { size: weights.size(), values: weights.entries().iter().map(|&v| s * v).collect() }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> T {
        self.values[a * self.size + b]
    }

    #[inline]
    pub fn pair(&self, a: Symbol, b: Symbol) -> T {
        self.get(a as usize, b as usize)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn shifted(&self, c: T) -> Self {
        Self { size: self.size, values: self.values.iter().map(|&v| v + c).collect() }
    }

    /// `Σ_i φ(α_i, α_{i+1})`.
    pub fn birkhoff_sum(&self, letters: &[Symbol]) -> T {
        letters.windows(2).map(|w| self.pair(w[0], w[1])).sum()
    }
}
