use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar used by the symbolic, thermodynamic and classical code.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Infallible for every float type we ship.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Working tolerance: the requested value, floored at a few hundred ulps
    /// so that single precision does not chase unreachable targets.
    #[inline]
    fn tolerance(requested: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(256.0);
        Self::lit(requested).max(floor)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `log(sum(exp(x_i)))` without overflow; `-inf` for an empty input.
pub fn log_sum_exp<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    let values: Vec<T> = values.into_iter().collect();
    let max = values.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return max;
    }
    let sum: T = values.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Streaming variant of [`log_sum_exp`].
#[derive(Clone, Copy, Debug)]
pub struct LogSumExp<T> {
    max: T,
    scaled: T,
}

impl<T: Real> Default for LogSumExp<T> {
    fn default() -> Self {
        Self { max: T::neg_infinity(), scaled: T::zero() }
    }
}

impl<T: Real> LogSumExp<T> {
    pub fn push(&mut self, v: T) {
        if v == T::neg_infinity() {
            return;
        }
        if v <= self.max {
            self.scaled += (v - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - v).exp() + T::one();
            self.max = v;
        }
    }

    pub fn value(&self) -> T {
        if self.max == T::neg_infinity() {
            self.max
        } else {
            self.max + self.scaled.ln()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streaming_matches_batch() {
        let xs = [-700.0f64, 3.0, 2.5, -1.0, 10.0];
        let mut acc = LogSumExp::default();
        xs.iter().for_each(|&x| acc.push(x));
        assert!((acc.value() - log_sum_exp(xs)).abs() < 1e-14);
        assert_eq!(log_sum_exp(Vec::<f64>::new()), f64::NEG_INFINITY);
    }

    #[test]
    fn tolerance_floor_for_f32() {
        assert!(f32::tolerance(1e-12) > 1e-6);
        assert_eq!(f64::tolerance(1e-12), 1e-12);
    }
}
