use crate::{Error, Real, Result};

/// Both forms of the upper bound on `Σ_{Σ_p(W, τ)} J^u_p(α)^{1/2}` for a
/// family `W` with `Σ_W J^u_{n₀}^{1/2} ≤ e^{-n₀P₀/2}`, in log space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountingBound<T> {
    /// `-pP₀/8 + p(1-τ)(λ₀ + log K) + n₀(λ₀ + log K) + n₀P₀/2`.
    pub log_simplified: T,
    /// `2 log C(p, ⌊p/n₀⌋) + ((1-τ)p + n₀)(λ₀ + log K) + n₀P₀/2 - pP₀/4`.
    pub log_sharp: T,
    /// Whether `C(p, ⌊p/n₀⌋) ≤ e^{pP₀/16}` holds for this instance. The
    /// simplified form follows from the sharp one only when it does.
    pub binomial_hypothesis: bool,
}

impl<T: Real> CountingBound<T> {
    pub fn simplified(&self) -> T {
        self.log_simplified.exp()
    }

    pub fn sharp(&self) -> T {
        self.log_sharp.exp()
    }

    /// The tightest bound that is justified for this instance.
    pub fn log_valid(&self) -> T {
        if self.binomial_hypothesis {
            self.log_sharp.min(self.log_simplified)
        } else {
            self.log_sharp
        }
    }
}

/// `log C(n, k)` by direct summation of logs.
pub fn log_binomial<T: Real>(n: usize, k: usize) -> T {
    if k > n {
        return T::neg_infinity();
    }
    let k = k.min(n - k);
    (0..k).map(|i| T::from_usize_lossy(n - i).ln() - T::from_usize_lossy(i + 1).ln()).sum()
}

pub fn counting_bound<T: Real>(p: usize, n0: usize, tau: T, k: usize, lambda0: T, p0: T) -> Result<CountingBound<T>> {
    if n0 == 0 || p < n0 {
        return Err(Error::pre(format!("need p >= n0 >= 1, got p = {p}, n0 = {n0}")));
    }
    if tau < T::lit(0.5) || tau > T::one() {
        return Err(Error::pre(format!("tau = {tau} outside [1/2, 1]")));
    }
    if k == 0 {
        return Err(Error::pre("empty alphabet"));
    }
    let pf = T::from_usize_lossy(p);
    let nf = T::from_usize_lossy(n0);
    let per_letter = lambda0 + T::from_usize_lossy(k).ln();
    let eight = T::lit(8.0);
    let two = T::lit(2.0);
    let log_simplified = -pf * p0 / eight + pf * (T::one() - tau) * per_letter + nf * per_letter + nf * p0 / two;
    let log_binom: T = log_binomial(p, p / n0);
    let log_sharp =
        two * log_binom + ((T::one() - tau) * pf + nf) * per_letter + nf * p0 / two - pf * p0 / T::lit(4.0);
    Ok(CountingBound { log_simplified, log_sharp, binomial_hypothesis: log_binom <= pf * p0 / T::lit(16.0) })
}
