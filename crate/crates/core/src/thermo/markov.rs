use serde::{Deserialize, Serialize};

use crate::symbolic::Alphabet;
use crate::{Error, Real, Result};

/// Shift-invariant Markov probability: a row-stochastic transition matrix
/// together with its stationary vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMarkov<T>", into = "RawMarkov<T>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct MarkovMeasure<T> {
    size: usize,
    transition: Vec<T>,
    stationary: Vec<T>,
}

#[derive(Serialize, Deserialize)]
struct RawMarkov<T> {
    #[serde(rename = "K")]
    k: usize,
    transition: Vec<T>,
    stationary: Vec<T>,
}

impl<T: Real> TryFrom<RawMarkov<T>> for MarkovMeasure<T> {
    type Error = Error;
    fn try_from(raw: RawMarkov<T>) -> Result<Self> {
        Self::new(raw.k, raw.transition, raw.stationary)
    }
}

impl<T: Real> From<MarkovMeasure<T>> for RawMarkov<T> {
    fn from(m: MarkovMeasure<T>) -> Self {
        Self { k: m.size, transition: m.transition, stationary: m.stationary }
    }
}

impl<T: Real> MarkovMeasure<T> {
    /// Validates stochasticity (rows within 1e-12), the stationary vector
    /// (sum within 1e-12) and `πP = π` within 1e-10.
    pub fn new(k: usize, transition: Vec<T>, stationary: Vec<T>) -> Result<Self> {
        if k == 0 || transition.len() != k * k || stationary.len() != k {
            return Err(Error::invalid("Markov measure dimensions do not match"));
        }
        let row_tol = T::tolerance(1e-12);
        for a in 0..k {
            let row = &transition[a * k..(a + 1) * k];
            if row.iter().any(|&p| !(p >= T::zero()) || !p.is_finite()) {
                return Err(Error::invalid(format!("row {a} has a negative or non-finite entry")));
            }
            let s: T = row.iter().copied().sum();
            if (s - T::one()).abs() > row_tol {
                return Err(Error::invalid(format!("row {a} sums to {s}")));
            }
        }
        if stationary.iter().any(|&p| !(p >= T::zero())) {
            return Err(Error::invalid("stationary vector has a negative entry"));
        }
        let total: T = stationary.iter().copied().sum();
        if (total - T::one()).abs() > row_tol {
            return Err(Error::invalid(format!("stationary vector sums to {total}")));
        }
        let fix_tol = T::tolerance(1e-10);
        for b in 0..k {
            let pb: T = (0..k).map(|a| stationary[a] * transition[a * k + b]).sum();
            if (pb - stationary[b]).abs() > fix_tol {
                return Err(Error::invalid(format!("stationary vector not invariant at symbol {b}")));
            }
        }
        Ok(Self { size: k, transition, stationary })
    }

    /// Computes the stationary vector of an irreducible transition matrix.
    pub fn from_transition(k: usize, transition: Vec<T>) -> Result<Self> {
        if transition.len() != k * k {
            return Err(Error::invalid("transition matrix must be k × k"));
        }
        let stationary = stationary_vector(k, &transition)?;
        Self::new(k, transition, stationary)
    }

    /// Checks that every forbidden transition carries zero mass.
    pub fn check_compatible(&self, alphabet: &Alphabet) -> Result<()> {
        if alphabet.size() != self.size {
            return Err(Error::invalid("alphabet size differs from the measure"));
        }
        for (i, (&p, &ok)) in self.transition.iter().zip(alphabet.adjacency()).enumerate() {
            if !ok && p > T::zero() {
                return Err(Error::invalid(format!(
                    "transition {} -> {} is forbidden but has mass {p}",
                    i / self.size,
                    i % self.size
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn p(&self, a: usize, b: usize) -> T {
        self.transition[a * self.size + b]
    }

    #[inline]
    pub fn pi(&self, a: usize) -> T {
        self.stationary[a]
    }

    pub fn transition(&self) -> &[T] {
        &self.transition
    }

    pub fn stationary(&self) -> &[T] {
        &self.stationary
    }

    /// `log μ([α]) = log π_{α₀} + Σ log P(α_i, α_{i+1})`.
    pub fn log_cylinder_mass(&self, letters: &[crate::symbolic::Symbol]) -> T {
        match letters.first() {
            None => T::zero(),
            Some(&a0) => {
                self.pi(a0 as usize).ln()
                    + letters.windows(2).map(|w| self.p(w[0] as usize, w[1] as usize).ln()).sum::<T>()
            }
        }
    }
}

/// Solves `πP = π`, `Σπ = 1` by Gaussian elimination with partial pivoting.
fn stationary_vector<T: Real>(k: usize, p: &[T]) -> Result<Vec<T>> {
    // rows: (Pᵀ - I) with the last equation replaced by normalisation
    let mut a = vec![T::zero(); k * (k + 1)];
    for i in 0..k {
        for j in 0..k {
            a[i * (k + 1) + j] = p[j * k + i] - if i == j { T::one() } else { T::zero() };
        }
    }
    for j in 0..k {
        a[(k - 1) * (k + 1) + j] = T::one();
    }
    a[(k - 1) * (k + 1) + k] = T::one();
    let w = k + 1;
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&r, &s| a[r * w + col].abs().partial_cmp(&a[s * w + col].abs()).unwrap())
            .unwrap();
        if a[piv * w + col].abs() <= T::epsilon() {
            return Err(Error::invalid("transition matrix is not irreducible (singular stationary system)"));
        }
        if piv != col {
            for j in 0..w {
                a.swap(piv * w + j, col * w + j);
            }
        }
        for r in 0..k {
            if r != col {
                let f = a[r * w + col] / a[col * w + col];
                if !f.is_zero() {
                    for j in col..w {
                        let v = a[col * w + j];
                        a[r * w + j] -= f * v;
                    }
                }
            }
        }
    }
    Ok((0..k).map(|i| (a[i * w + k] / a[i * w + i]).max(T::zero())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_by_hand() {
        let m = MarkovMeasure::<f64>::from_transition(2, vec![0.9, 0.1, 0.5, 0.5]).unwrap();
        assert!((m.pi(0) - 5.0 / 6.0).abs() < 1e-15);
        assert!((m.pi(1) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn invariants_checked() {
        assert!(MarkovMeasure::<f64>::new(2, vec![0.9, 0.2, 0.5, 0.5], vec![0.5, 0.5]).is_err());
        assert!(MarkovMeasure::<f64>::new(2, vec![0.9, 0.1, 0.5, 0.5], vec![0.5, 0.5]).is_err());
        let m = MarkovMeasure::<f64>::from_transition(2, vec![0.5, 0.5, 1.0, 0.0]).unwrap();
        assert!(m.check_compatible(&Alphabet::golden_mean()).is_ok());
        let bad = MarkovMeasure::<f64>::from_transition(2, vec![0.5, 0.5, 0.5, 0.5]).unwrap();
        assert!(bad.check_compatible(&Alphabet::golden_mean()).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = MarkovMeasure::<f64>::from_transition(2, vec![0.75, 0.25, 0.5, 0.5]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.starts_with(r#"{"K":2,"transition":[0.75,0.25,0.5,0.5]"#));
        let back: MarkovMeasure<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
