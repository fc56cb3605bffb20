use super::markov::MarkovMeasure;
use super::potential::Potential;
use crate::scalar::LogSumExp;
use crate::symbolic::{enumerate_words, Alphabet};
use crate::{Error, Real, Result};

pub const POWER_ITERATION_TOL: f64 = 1e-12;
pub const POWER_ITERATION_MAX: usize = 1_000_000;

/// Perron root and eigenvectors of a nonnegative irreducible matrix.
#[derive(Clone, Debug)]
pub struct PerronData<T> {
    pub rho: T,
    /// `L r = ρ r`, normalised to `max r = 1`.
    pub right: Vec<T>,
    /// `lᵀ L = ρ lᵀ`, normalised to `max l = 1`.
    pub left: Vec<T>,
    pub iterations: usize,
}

/// Ruelle transfer matrix `L[a][b] = 1_{a→b} e^{φ(a,b)}`, row-major.
pub fn transfer_matrix<T: Real>(alphabet: &Alphabet, phi: &Potential<T>) -> Result<Vec<T>> {
    let k = alphabet.size();
    if phi.size() != k {
        return Err(Error::invalid(format!("potential is {}×{}, alphabet has {k} symbols", phi.size(), phi.size())));
    }
    Ok((0..k * k)
        .map(|i| if alphabet.adjacency()[i] { phi.get(i / k, i % k).exp() } else { T::zero() })
        .collect())
}

fn support_alphabet<T: Real>(k: usize, matrix: &[T]) -> Result<Alphabet> {
    Alphabet::from_flat(k, matrix.iter().map(|&v| v > T::zero()).collect())
}

/// Power iteration on `L + sI` with `s = max L`, which is primitive whenever
/// `L` is irreducible, so periodic adjacencies converge too. Stops on the
/// Collatz–Wielandt bracket `max (Bv)_i/v_i - min (Bv)_i/v_i ≤ tol · max`.
fn dominant_vector<T: Real>(k: usize, matrix: &[T], transpose: bool) -> Result<(Vec<T>, usize)> {
    let at = |i: usize, j: usize| if transpose { matrix[j * k + i] } else { matrix[i * k + j] };
    let shift = matrix.iter().copied().fold(T::zero(), T::max);
    let tol = T::tolerance(POWER_ITERATION_TOL);
    let mut v = vec![T::one(); k];
    let mut w = vec![T::zero(); k];
    for it in 1..=POWER_ITERATION_MAX {
        for i in 0..k {
            w[i] = shift * v[i] + (0..k).map(|j| at(i, j) * v[j]).sum::<T>();
        }
        let (mut lo, mut hi) = (T::infinity(), T::zero());
        for i in 0..k {
            let r = w[i] / v[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let norm = w.iter().copied().fold(T::zero(), T::max);
        for i in 0..k {
            v[i] = w[i] / norm;
        }
        if hi - lo <= tol * hi {
            return Ok((v, it));
        }
    }
    Err(Error::NoConvergence(format!("power iteration exceeded {POWER_ITERATION_MAX} steps")))
}

/// Perron data of a nonnegative `k × k` matrix (row-major).
pub fn perron<T: Real>(k: usize, matrix: &[T]) -> Result<PerronData<T>> {
    support_alphabet(k, matrix)?.check_irreducible()?;
    let (right, it_r) = dominant_vector(k, matrix, false)?;
    let (left, it_l) = dominant_vector(k, matrix, true)?;
    // Rayleigh-type estimate with the left and right vectors: lᵀLr / lᵀr
    let num: T = (0..k).map(|i| left[i] * (0..k).map(|j| matrix[i * k + j] * right[j]).sum::<T>()).sum();
    let den: T = (0..k).map(|i| left[i] * right[i]).sum();
    Ok(PerronData { rho: num / den, right, left, iterations: it_r.max(it_l) })
}

/// `P_top = log ρ(L)` for an irreducible alphabet.
pub fn transfer_pressure<T: Real>(alphabet: &Alphabet, phi: &Potential<T>) -> Result<T> {
    alphabet.check_irreducible()?;
    let l = transfer_matrix(alphabet, phi)?;
    Ok(perron(alphabet.size(), &l)?.rho.ln())
}

/// `(1/n) log Σ_{|α| = n} exp(Σ_{i<n-1} φ(α_i, α_{i+1}))` over admissible
/// words, accumulated in log space.
pub fn brute_force_pressure<T: Real>(alphabet: &Alphabet, phi: &Potential<T>, n: usize, cap: u64) -> Result<T> {
    if n < 2 {
        return Err(Error::pre("brute-force pressure needs n >= 2"));
    }
    if phi.size() != alphabet.size() {
        return Err(Error::invalid("potential and alphabet sizes differ"));
    }
    let mut acc = LogSumExp::default();
    let mut stream = enumerate_words(alphabet, n, cap)?;
    while let Some(w) = stream.advance() {
        acc.push(phi.birkhoff_sum(w));
    }
    Ok(acc.value() / T::from_usize_lossy(n))
}

/// Gibbs/Parry measure `P[a][b] = L[a][b] r_b / (ρ r_a)`, `π_a ∝ l_a r_a`,
/// the maximiser of `h(μ) + ∫φ dμ` among Markov measures.
pub fn parry_measure<T: Real>(alphabet: &Alphabet, phi: &Potential<T>) -> Result<MarkovMeasure<T>> {
    alphabet.check_irreducible()?;
    let k = alphabet.size();
    let l = transfer_matrix(alphabet, phi)?;
    let data = perron(k, &l)?;
    let mut transition: Vec<T> = (0..k * k)
        .map(|i| {
            let (a, b) = (i / k, i % k);
            l[i] * data.right[b] / (data.rho * data.right[a])
        })
        .collect();
    // renormalise rows to absorb the eigenvector residual
    for a in 0..k {
        let s: T = transition[a * k..(a + 1) * k].iter().copied().sum();
        transition[a * k..(a + 1) * k].iter_mut().for_each(|p| *p /= s);
    }
    let mut pi: Vec<T> = (0..k).map(|a| data.left[a] * data.right[a]).collect();
    let z: T = pi.iter().copied().sum();
    pi.iter_mut().for_each(|p| *p /= z);
    MarkovMeasure::new(k, transition, pi)
}
